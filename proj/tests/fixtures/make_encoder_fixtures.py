#!/usr/bin/env python3
# Copyright 2026 The kanglid Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Builds tiny randomly initialised BERT / RoBERTa / XLM-R snapshots and the
reference outputs the C++ encoder tests compare against.

The snapshots use the same on-disk layout as a Hugging Face download
(config.json, model.safetensors, tokenizer.json), so the C++ loader reads them
through exactly the code path used for the full-size models.

Usage: make_encoder_fixtures.py <output-dir>
"""

import json
import os
import sys

import torch
from tokenizers.implementations import (BertWordPieceTokenizer, ByteLevelBPETokenizer,
                                        SentencePieceUnigramTokenizer)
from tokenizers.processors import RobertaProcessing
from transformers import (BertConfig, BertModel, BertTokenizerFast, RobertaConfig, RobertaModel,
                          RobertaTokenizerFast, XLMRobertaConfig, XLMRobertaModel,
                          XLMRobertaTokenizerFast)

HIDDEN = 32
LAYERS = 2
HEADS = 4
INTERMEDIATE = 64

TRAINING_TEXT = [
    "ninna hesaru enu", "nanu bengaluru alli iddini", "hello how are you",
    "namaskara guru", "english kannada mixed text", "maadi bega", "super agide movie",
    "location mysuru", "name ramesh", "other symbols !! ??", "thumba chennagide",
    "yenu madtha idiya", "good morning friends", "coding is fun", "ondu eradu mooru",
]

WORDS = ["ninna", "Bengaluru", "hello!", "maadi", "x", "namaskara", "ENGLISH", "café",
         "thumba", "123", "super-agide", "zzqq"]


def randomize_norms(model, generator):
    with torch.no_grad():
        for name, param in model.named_parameters():
            if "LayerNorm" in name:
                param.copy_(param + 0.1 * torch.randn(param.shape, generator=generator))


def bert_vocab():
    vocab = ["[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]"]
    vocab += list("!?-.,'") + [str(d) for d in range(10)]
    vocab += [chr(c) for c in range(ord("a"), ord("z") + 1)]
    vocab += ["##" + chr(c) for c in range(ord("a"), ord("z") + 1)]
    vocab += ["##" + str(d) for d in range(10)]
    vocab += ["ninna", "hello", "beng", "##alu", "##ru", "maad", "##i", "namas", "##kara",
              "english", "cafe", "thu", "##mba", "super", "##agi", "##de", "12", "##3"]
    seen, out = set(), []
    for tok in vocab:
        if tok not in seen:
            seen.add(tok)
            out.append(tok)
    return out


def dump(model, tokenizer, path, name):
    os.makedirs(path, exist_ok=True)
    model.save_pretrained(path, safe_serialization=True)
    tokenizer.save_pretrained(path)
    model.eval()
    reference = {"backend": name, "words": []}
    with torch.no_grad():
        for word in WORDS:
            enc = tokenizer(word, add_special_tokens=True, return_tensors="pt")
            ids = enc["input_ids"][0].tolist()
            pieces = tokenizer.convert_ids_to_tokens(ids)
            hidden = model(**enc).last_hidden_state[0]
            reference["words"].append({
                "word": word,
                "ids": ids[1:-1],
                "pieces": pieces[1:-1],
                "vectors": hidden[1:-1].tolist(),
            })
    with open(os.path.join(path, "reference.json"), "w", encoding="utf-8") as fh:
        json.dump(reference, fh, ensure_ascii=False)


def make_bert(root):
    path = os.path.join(root, "tiny-bert")
    os.makedirs(path, exist_ok=True)
    vocab_file = os.path.join(path, "vocab.txt")
    with open(vocab_file, "w", encoding="utf-8") as fh:
        fh.write("\n".join(bert_vocab()) + "\n")
    wordpiece = BertWordPieceTokenizer(vocab_file, lowercase=True)
    tokenizer = BertTokenizerFast(tokenizer_object=wordpiece._tokenizer, unk_token="[UNK]",
                                  sep_token="[SEP]", cls_token="[CLS]", pad_token="[PAD]",
                                  mask_token="[MASK]")
    config = BertConfig(vocab_size=len(bert_vocab()), hidden_size=HIDDEN,
                        num_hidden_layers=LAYERS, num_attention_heads=HEADS,
                        intermediate_size=INTERMEDIATE, max_position_embeddings=64,
                        hidden_dropout_prob=0.0, attention_probs_dropout_prob=0.0)
    torch.manual_seed(11)
    model = BertModel(config, add_pooling_layer=False)
    randomize_norms(model, torch.Generator().manual_seed(12))
    dump(model, tokenizer, path, "tiny-bert")
    # save_pretrained rewrites vocab.txt from the fast tokenizer; keep the full list.
    with open(vocab_file, "w", encoding="utf-8") as fh:
        fh.write("\n".join(bert_vocab()) + "\n")


def make_roberta(root):
    path = os.path.join(root, "tiny-roberta")
    bpe = ByteLevelBPETokenizer()
    bpe.train_from_iterator(TRAINING_TEXT, vocab_size=320, min_frequency=1,
                            special_tokens=["<s>", "<pad>", "</s>", "<unk>", "<mask>"])
    bpe._tokenizer.post_processor = RobertaProcessing(("</s>", 2), ("<s>", 0))
    tokenizer = RobertaTokenizerFast(tokenizer_object=bpe._tokenizer, bos_token="<s>",
                                     eos_token="</s>", sep_token="</s>", cls_token="<s>",
                                     unk_token="<unk>", pad_token="<pad>", mask_token="<mask>")
    config = RobertaConfig(vocab_size=bpe.get_vocab_size(), hidden_size=HIDDEN,
                           num_hidden_layers=LAYERS, num_attention_heads=HEADS,
                           intermediate_size=INTERMEDIATE, max_position_embeddings=66,
                           type_vocab_size=1, pad_token_id=1, layer_norm_eps=1e-5,
                           hidden_dropout_prob=0.0, attention_probs_dropout_prob=0.0)
    torch.manual_seed(21)
    model = RobertaModel(config, add_pooling_layer=False)
    randomize_norms(model, torch.Generator().manual_seed(22))
    dump(model, tokenizer, path, "tiny-roberta")


def make_xlmr(root):
    path = os.path.join(root, "tiny-xlmr")
    unigram = SentencePieceUnigramTokenizer()
    unigram.train_from_iterator(TRAINING_TEXT, vocab_size=120,
                                special_tokens=["<s>", "<pad>", "</s>", "<unk>", "<mask>"],
                                unk_token="<unk>")
    # The C++ tokenizer does not implement sentencepiece's precompiled charsmap;
    # the fixture keeps normalisation out of the comparison.
    unigram._tokenizer.normalizer = None
    tokenizer = XLMRobertaTokenizerFast(tokenizer_object=unigram._tokenizer, bos_token="<s>",
                                        eos_token="</s>", sep_token="</s>", cls_token="<s>",
                                        unk_token="<unk>", pad_token="<pad>",
                                        mask_token="<mask>")
    config = XLMRobertaConfig(vocab_size=unigram.get_vocab_size(), hidden_size=HIDDEN,
                              num_hidden_layers=LAYERS, num_attention_heads=HEADS,
                              intermediate_size=INTERMEDIATE, max_position_embeddings=66,
                              type_vocab_size=1, pad_token_id=1, layer_norm_eps=1e-5,
                              hidden_dropout_prob=0.0, attention_probs_dropout_prob=0.0)
    torch.manual_seed(31)
    model = XLMRobertaModel(config, add_pooling_layer=False)
    randomize_norms(model, torch.Generator().manual_seed(32))
    dump(model, tokenizer, path, "tiny-xlmr")


def main():
    root = sys.argv[1] if len(sys.argv) > 1 else "."
    make_bert(root)
    make_roberta(root)
    make_xlmr(root)


if __name__ == "__main__":
    main()
