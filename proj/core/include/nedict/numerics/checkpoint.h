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

// Versioned binary checkpoints of a ParameterSet.
//
// Layout (little-endian):
//   "NEDICKPT" | u32 version | u64 header bytes | header (JSON text)
//   u32 tensor count | per tensor: u32 name bytes, name, u32 rows, u32 cols,
//   rows*cols f64 values
// Tensors are written in name order so identical models give identical files.

#ifndef NEDICT_NUMERICS_CHECKPOINT_H_
#define NEDICT_NUMERICS_CHECKPOINT_H_

#include <filesystem>
#include <string>

#include "nedict/numerics/parameters.h"

namespace nedict::numerics {

inline constexpr uint32_t kCheckpointVersion = 1;

void SaveCheckpoint(const std::filesystem::path& path,
                    const ParameterSet& params, const std::string& header);

// Reads the JSON header without touching any tensors.
std::string ReadCheckpointHeader(const std::filesystem::path& path);

// Loads tensor values into `params` by name. Every parameter of `params`
// must be present with a matching shape. Returns the header.
std::string LoadCheckpoint(const std::filesystem::path& path,
                           ParameterSet& params);

}  // namespace nedict::numerics

#endif  // NEDICT_NUMERICS_CHECKPOINT_H_
