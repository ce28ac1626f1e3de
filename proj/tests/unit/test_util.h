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

// Shared fixtures for the unit tests. Generated corpora are cached per
// process because several suites reuse them.

#ifndef NEDICT_TESTS_TEST_UTIL_H_
#define NEDICT_TESTS_TEST_UTIL_H_

#include <filesystem>
#include <string>

#include "nedict/corpus/generator.h"

namespace nedict::testing_util {

corpus::CorpusConfig TinyConfig();
const corpus::Corpus& TinyCorpus();
const corpus::Corpus& DefaultCorpus();

// A fresh, empty directory under the system temp dir.
std::filesystem::path TempDir(const std::string& name);

}  // namespace nedict::testing_util

#endif  // NEDICT_TESTS_TEST_UTIL_H_
