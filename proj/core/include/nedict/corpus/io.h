// Copyright (c) 2026 The nedict Authors.
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

// Corpus directory layout:
//   meta.json          format tag, version, phoneme inventory and prototypes,
//                      lexicon, target vocabulary, split names
//   dict.jsonl         one NamedEntity per line:
//                      {id, surface, phonemes, target, category}
//   {split}.jsonl      one utterance per line:
//                      {id, tokens, phonemes, frames, alignment, target,
//                       entities: [{ne_id, begin, end}]}
//   {split}.frames.bin "NEDFRAME" | u32 version | u32 count | per utterance:
//                      u32 id bytes, id, u32 rows, u32 cols, f32 values
// All integers and floats are little-endian.

#ifndef NEDICT_CORPUS_IO_H_
#define NEDICT_CORPUS_IO_H_

#include <filesystem>
#include <string>

#include "nedict/corpus/types.h"

namespace nedict::corpus {

inline constexpr char kCorpusFormat[] = "nedict-corpus";
inline constexpr int kCorpusVersion = 1;

void SaveCorpus(const Corpus& corpus, const std::filesystem::path& dir);
Corpus LoadCorpus(const std::filesystem::path& dir);

}  // namespace nedict::corpus

#endif  // NEDICT_CORPUS_IO_H_
