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

#include "nedict/numerics/checkpoint.h"

#include <bit>
#include <fstream>
#include <stdexcept>
#include <vector>

namespace nedict::numerics {
namespace {

static_assert(std::endian::native == std::endian::little,
              "checkpoint I/O assumes a little-endian host");

constexpr char kMagic[8] = {'N', 'E', 'D', 'I', 'C', 'K', 'P', 'T'};

template <typename T>
void WritePod(std::ostream& out, T value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T ReadPod(std::istream& in, const std::filesystem::path& path) {
  T value{};
  if (!in.read(reinterpret_cast<char*>(&value), sizeof(T))) {
    throw std::runtime_error("truncated checkpoint: " + path.string());
  }
  return value;
}

std::string ReadString(std::istream& in, size_t n,
                       const std::filesystem::path& path) {
  std::string s(n, '\0');
  if (n > 0 && !in.read(s.data(), static_cast<std::streamsize>(n))) {
    throw std::runtime_error("truncated checkpoint: " + path.string());
  }
  return s;
}

std::string ReadPreamble(std::istream& in, const std::filesystem::path& path) {
  char magic[8];
  if (!in.read(magic, 8) || !std::equal(magic, magic + 8, kMagic)) {
    throw std::runtime_error("not a checkpoint file: " + path.string());
  }
  const auto version = ReadPod<uint32_t>(in, path);
  if (version != kCheckpointVersion) {
    throw std::runtime_error("checkpoint version " + std::to_string(version) +
                             " unsupported (expected " +
                             std::to_string(kCheckpointVersion) +
                             "): " + path.string());
  }
  const auto header_len = ReadPod<uint64_t>(in, path);
  return ReadString(in, header_len, path);
}

}  // namespace

void SaveCheckpoint(const std::filesystem::path& path,
                    const ParameterSet& params, const std::string& header) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.write(kMagic, 8);
  WritePod<uint32_t>(out, kCheckpointVersion);
  WritePod<uint64_t>(out, header.size());
  out.write(header.data(), static_cast<std::streamsize>(header.size()));
  WritePod<uint32_t>(out, static_cast<uint32_t>(params.size()));
  for (const auto& [name, v] : params) {
    WritePod<uint32_t>(out, static_cast<uint32_t>(name.size()));
    out.write(name.data(), static_cast<std::streamsize>(name.size()));
    WritePod<uint32_t>(out, static_cast<uint32_t>(v.rows()));
    WritePod<uint32_t>(out, static_cast<uint32_t>(v.cols()));
    out.write(reinterpret_cast<const char*>(v.value().data()),
              static_cast<std::streamsize>(sizeof(double) * v.value().size()));
  }
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

std::string ReadCheckpointHeader(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open checkpoint " + path.string());
  return ReadPreamble(in, path);
}

std::string LoadCheckpoint(const std::filesystem::path& path,
                           ParameterSet& params) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open checkpoint " + path.string());
  std::string header = ReadPreamble(in, path);
  const auto count = ReadPod<uint32_t>(in, path);
  size_t loaded = 0;
  for (uint32_t i = 0; i < count; ++i) {
    const auto name_len = ReadPod<uint32_t>(in, path);
    const std::string name = ReadString(in, name_len, path);
    const auto rows = ReadPod<uint32_t>(in, path);
    const auto cols = ReadPod<uint32_t>(in, path);
    Matrix values(rows, cols);
    if (!in.read(reinterpret_cast<char*>(values.data()),
                 static_cast<std::streamsize>(sizeof(double) * rows * cols))) {
      throw std::runtime_error("truncated checkpoint tensor '" + name +
                               "': " + path.string());
    }
    if (!params.Contains(name)) continue;
    Var target = params.Get(name);
    if (target.rows() != static_cast<int>(rows) ||
        target.cols() != static_cast<int>(cols)) {
      throw std::runtime_error("checkpoint tensor '" + name +
                               "' has shape " + std::to_string(rows) + "x" +
                               std::to_string(cols) + ", model expects " +
                               std::to_string(target.rows()) + "x" +
                               std::to_string(target.cols()));
    }
    target.mutable_value() = std::move(values);
    ++loaded;
  }
  if (loaded != params.size()) {
    throw std::runtime_error("checkpoint " + path.string() + " provides " +
                             std::to_string(loaded) + " of " +
                             std::to_string(params.size()) +
                             " model parameters");
  }
  return header;
}

}  // namespace nedict::numerics
