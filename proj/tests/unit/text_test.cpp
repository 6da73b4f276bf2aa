// Copyright 2026 The kanglid Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "kanglid/text.hpp"

#include <gtest/gtest.h>

namespace kanglid {
namespace {

TEST(Text, Utf8RoundTrip) {
  const std::string s = "café ನಮಸ್ಕಾರ 😀";
  EXPECT_EQ(utf8_encode(utf8_decode(s)), s);
  EXPECT_EQ(utf8_decode("é").size(), 1u);
  EXPECT_EQ(utf8_decode("😀")[0], U'\U0001F600');
}

TEST(Text, InvalidBytesBecomeReplacementCharacter) {
  const std::string truncated = "a\xE0\xB2";
  const auto decoded = utf8_decode(truncated);
  ASSERT_GE(decoded.size(), 2u);
  EXPECT_EQ(decoded[0], U'a');
  EXPECT_EQ(decoded[1], U'�');
  EXPECT_EQ(utf8_decode("\xFF")[0], U'�');
}

TEST(Text, TrimAndSplit) {
  EXPECT_EQ(trim("  a b \r\n"), "a b");
  EXPECT_EQ(trim(" \t "), "");
  const auto parts = split("a\t\tb", '\t');
  ASSERT_EQ(parts.size(), 3u);
  EXPECT_EQ(parts[1], "");
}

TEST(Text, CaseAndAccents) {
  EXPECT_EQ(to_lower(U'É'), U'é');
  EXPECT_EQ(to_lower(U'Ω'), U'ω');
  EXPECT_EQ(to_lower(U'Ж'), U'ж');
  EXPECT_EQ(strip_accent(U'é'), U'e');
  EXPECT_EQ(strip_accent(U'Ł'), U'Ł');
  EXPECT_EQ(strip_accent(U'č'), U'c');
  EXPECT_EQ(strip_accent(U'Ž'), U'Z');
}

TEST(Text, CharacterClasses) {
  EXPECT_TRUE(is_punctuation(U'!'));
  EXPECT_TRUE(is_punctuation(U'-'));
  EXPECT_FALSE(is_punctuation(U'a'));
  EXPECT_TRUE(is_whitespace(U' '));
  EXPECT_TRUE(is_control(U'​'));
  EXPECT_TRUE(is_cjk(U'中'));
  EXPECT_TRUE(is_combining_mark(U'́'));
  EXPECT_TRUE(is_letter(U'ಕ'));
}

}  // namespace
}  // namespace kanglid
