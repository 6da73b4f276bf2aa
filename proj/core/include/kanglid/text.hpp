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

#pragma once

#include <string>
#include <string_view>
#include <vector>

// Small UTF-8 and character-class helpers shared by the corpus reader and the
// tokenizers. Case mapping and accent stripping cover ASCII, Latin-1,
// Latin Extended-A, basic Greek and basic Cyrillic; other scripts (including
// Kannada) have no case and pass through unchanged.
namespace kanglid {

std::string_view trim(std::string_view text);
std::string ascii_lower(std::string_view text);

// Invalid sequences decode to U+FFFD.
std::u32string utf8_decode(std::string_view text);
std::string utf8_encode(std::u32string_view text);
void utf8_append(std::string& out, char32_t cp);

std::vector<std::string_view> split(std::string_view text, char separator);

bool is_whitespace(char32_t cp);
bool is_control(char32_t cp);
bool is_punctuation(char32_t cp);
bool is_combining_mark(char32_t cp);
bool is_cjk(char32_t cp);
bool is_letter(char32_t cp);
bool is_number(char32_t cp);

char32_t to_lower(char32_t cp);
// Base letter of a precomposed Latin letter, or the code point itself.
char32_t strip_accent(char32_t cp);

}  // namespace kanglid
