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

#include "nedict/corpus/io.h"

#include <bit>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace nedict::corpus {
namespace {

static_assert(std::endian::native == std::endian::little,
              "frame files assume a little-endian host");

using json = nlohmann::json;
namespace fs = std::filesystem;

constexpr char kFrameMagic[8] = {'N', 'E', 'D', 'F', 'R', 'A', 'M', 'E'};
constexpr uint32_t kFrameVersion = 1;

template <typename T>
void WritePod(std::ostream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
bool ReadPod(std::istream& in, T* v) {
  return static_cast<bool>(in.read(reinterpret_cast<char*>(v), sizeof(T)));
}

std::ofstream OpenOut(const fs::path& path, bool binary = false) {
  std::ofstream out(path, binary ? std::ios::binary | std::ios::trunc
                                 : std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

std::ifstream OpenIn(const fs::path& path, bool binary = false) {
  std::ifstream in(path, binary ? std::ios::binary : std::ios::in);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  return in;
}

std::vector<json> ReadJsonLines(const fs::path& path) {
  std::ifstream in = OpenIn(path);
  std::vector<json> lines;
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    try {
      lines.push_back(json::parse(line));
    } catch (const json::exception& e) {
      throw std::runtime_error(path.string() + ":" + std::to_string(n) +
                               ": " + e.what());
    }
  }
  return lines;
}

json EntityToJson(const NamedEntity& ne) {
  return {{"id", ne.id},
          {"surface", ne.source_surface},
          {"phonemes", ne.phonemes},
          {"target", ne.target_form},
          {"category", std::string(CategoryName(ne.category))}};
}

NamedEntity EntityFromJson(const json& j) {
  NamedEntity ne;
  ne.id = j.at("id").get<std::string>();
  ne.source_surface = j.at("surface").get<std::string>();
  ne.phonemes = j.at("phonemes").get<std::vector<int>>();
  ne.target_form = j.at("target").get<std::string>();
  ne.category = ParseCategory(j.at("category").get<std::string>());
  return ne;
}

json UtteranceToJson(const Utterance& u) {
  json entities = json::array();
  for (const auto& g : u.gold_entities) {
    entities.push_back({{"ne_id", g.ne_id}, {"begin", g.begin}, {"end", g.end}});
  }
  return {{"id", u.id},
          {"tokens", u.transcript_tokens},
          {"phonemes", u.transcript_phonemes},
          {"frames", u.speech_frames.rows()},
          {"alignment", u.frame_alignment},
          {"target", u.target_tokens},
          {"entities", entities}};
}

void WriteFrames(const fs::path& path, const std::vector<Utterance>& utts) {
  std::ofstream out = OpenOut(path, /*binary=*/true);
  out.write(kFrameMagic, 8);
  WritePod<uint32_t>(out, kFrameVersion);
  WritePod<uint32_t>(out, static_cast<uint32_t>(utts.size()));
  std::vector<float> buf;
  for (const auto& u : utts) {
    WritePod<uint32_t>(out, static_cast<uint32_t>(u.id.size()));
    out.write(u.id.data(), static_cast<std::streamsize>(u.id.size()));
    const auto& m = u.speech_frames.matrix();
    WritePod<uint32_t>(out, static_cast<uint32_t>(m.rows()));
    WritePod<uint32_t>(out, static_cast<uint32_t>(m.cols()));
    buf.resize(static_cast<size_t>(m.size()));
    for (Eigen::Index i = 0; i < m.size(); ++i) {
      buf[i] = static_cast<float>(m.data()[i]);
    }
    out.write(reinterpret_cast<const char*>(buf.data()),
              static_cast<std::streamsize>(sizeof(float) * buf.size()));
  }
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

void ReadFrames(const fs::path& path, std::vector<Utterance>& utts,
                int frame_dim, const std::vector<int>& expected_rows) {
  std::ifstream in = OpenIn(path, /*binary=*/true);
  char magic[8];
  uint32_t version = 0;
  uint32_t count = 0;
  if (!in.read(magic, 8) || !std::equal(magic, magic + 8, kFrameMagic)) {
    throw std::runtime_error("not a frame file: " + path.string());
  }
  if (!ReadPod(in, &version) || version != kFrameVersion) {
    throw std::runtime_error("frame file version " + std::to_string(version) +
                             " unsupported (expected " +
                             std::to_string(kFrameVersion) +
                             "): " + path.string());
  }
  if (!ReadPod(in, &count) || count != utts.size()) {
    throw std::runtime_error(path.string() + " holds " +
                             std::to_string(count) + " blocks for " +
                             std::to_string(utts.size()) + " utterances");
  }
  std::vector<float> buf;
  for (size_t i = 0; i < utts.size(); ++i) {
    Utterance& u = utts[i];
    auto fail = [&](const std::string& what) {
      throw std::runtime_error(path.string() + ": frame block of utterance '" +
                               u.id + "': " + what);
    };
    uint32_t id_len = 0;
    if (!ReadPod(in, &id_len)) fail("truncated");
    std::string id(id_len, '\0');
    if (id_len > 0 && !in.read(id.data(), id_len)) fail("truncated");
    if (id != u.id) fail("found block for '" + id + "' instead");
    uint32_t rows = 0;
    uint32_t cols = 0;
    if (!ReadPod(in, &rows) || !ReadPod(in, &cols)) fail("truncated");
    if (static_cast<int>(rows) != expected_rows[i]) {
      fail("has " + std::to_string(rows) + " frames, metadata says " +
           std::to_string(expected_rows[i]));
    }
    if (rows > 0 && static_cast<int>(cols) != frame_dim) {
      fail("frame dimension " + std::to_string(cols) + " != " +
           std::to_string(frame_dim));
    }
    buf.resize(static_cast<size_t>(rows) * cols);
    if (!in.read(reinterpret_cast<char*>(buf.data()),
                 static_cast<std::streamsize>(sizeof(float) * buf.size()))) {
      fail("truncated frame data");
    }
    numerics::Matrix m(rows, cols);
    for (size_t k = 0; k < buf.size(); ++k) m.data()[k] = buf[k];
    u.speech_frames = numerics::Tensor(std::move(m));
  }
  char extra;
  if (in.read(&extra, 1)) {
    throw std::runtime_error(path.string() + ": trailing bytes after last block");
  }
}

}  // namespace

void SaveCorpus(const Corpus& corpus, const fs::path& dir) {
  fs::create_directories(dir);
  json meta;
  meta["format"] = kCorpusFormat;
  meta["version"] = kCorpusVersion;
  meta["phonemes"] = corpus.phoneme_inventory;
  meta["frame_dim"] = corpus.phoneme_prototypes.cols();
  json protos = json::array();
  for (int r = 0; r < corpus.phoneme_prototypes.rows(); ++r) {
    const auto row = corpus.phoneme_prototypes.row(r);
    protos.push_back(std::vector<double>(row.data(), row.data() + row.size()));
  }
  meta["prototypes"] = protos;
  json lexicon = json::array();
  for (const auto& e : corpus.lexicon.entries()) {
    lexicon.push_back({{"token", e.token},
                       {"phonemes", e.phonemes},
                       {"translation", e.translation},
                       {"acronym", e.acronym},
                       {"homograph", e.homograph}});
  }
  meta["lexicon"] = lexicon;
  meta["target_vocab"] = corpus.target_vocab.tokens();
  std::vector<std::string> split_names;
  for (const auto& [name, utts] : corpus.splits) split_names.push_back(name);
  meta["splits"] = split_names;
  OpenOut(dir / "meta.json") << meta.dump(1) << "\n";

  {
    std::ofstream out = OpenOut(dir / "dict.jsonl");
    for (const auto& ne : corpus.dictionary) {
      out << EntityToJson(ne).dump() << "\n";
    }
  }
  for (const auto& [name, utts] : corpus.splits) {
    std::ofstream out = OpenOut(dir / (name + ".jsonl"));
    for (const auto& u : utts) out << UtteranceToJson(u).dump() << "\n";
    WriteFrames(dir / (name + ".frames.bin"), utts);
  }
}

Corpus LoadCorpus(const fs::path& dir) {
  json meta;
  try {
    meta = json::parse(OpenIn(dir / "meta.json"));
  } catch (const json::exception& e) {
    throw std::runtime_error((dir / "meta.json").string() + ": " + e.what());
  }
  if (meta.value("format", "") != kCorpusFormat) {
    throw std::runtime_error(dir.string() + " is not a nedict corpus");
  }
  const int version = meta.value("version", -1);
  if (version != kCorpusVersion) {
    throw std::runtime_error("corpus format version " +
                             std::to_string(version) +
                             " unsupported (expected " +
                             std::to_string(kCorpusVersion) + ")");
  }
  Corpus corpus;
  corpus.phoneme_inventory = meta.at("phonemes").get<std::vector<std::string>>();
  const int frame_dim = meta.at("frame_dim").get<int>();
  const auto protos = meta.at("prototypes").get<std::vector<std::vector<double>>>();
  if (!protos.empty()) {
    numerics::Matrix m(static_cast<Eigen::Index>(protos.size()), frame_dim);
    for (size_t r = 0; r < protos.size(); ++r) {
      if (static_cast<int>(protos[r].size()) != frame_dim) {
        throw std::runtime_error("prototype row " + std::to_string(r) +
                                 " has wrong dimension");
      }
      for (int c = 0; c < frame_dim; ++c) m(r, c) = protos[r][c];
    }
    corpus.phoneme_prototypes = numerics::Tensor(std::move(m));
  }
  for (const auto& j : meta.at("lexicon")) {
    LexiconEntry e;
    e.token = j.at("token").get<std::string>();
    e.phonemes = j.at("phonemes").get<std::vector<int>>();
    e.translation = j.at("translation").get<std::vector<std::string>>();
    e.acronym = j.at("acronym").get<bool>();
    e.homograph = j.at("homograph").get<std::string>();
    corpus.lexicon.Add(std::move(e));
  }
  corpus.target_vocab =
      Vocabulary(meta.at("target_vocab").get<std::vector<std::string>>());
  for (const auto& j : ReadJsonLines(dir / "dict.jsonl")) {
    corpus.dictionary.push_back(EntityFromJson(j));
  }
  for (const auto& name : meta.at("splits").get<std::vector<std::string>>()) {
    auto& utts = corpus.splits[name];
    std::vector<int> rows;
    for (const auto& j : ReadJsonLines(dir / (name + ".jsonl"))) {
      Utterance u;
      u.id = j.at("id").get<std::string>();
      u.transcript_tokens = j.at("tokens").get<std::vector<std::string>>();
      u.transcript_phonemes = j.at("phonemes").get<std::vector<int>>();
      u.frame_alignment = j.at("alignment").get<std::vector<int>>();
      u.target_tokens = j.at("target").get<std::vector<std::string>>();
      for (const auto& g : j.at("entities")) {
        u.gold_entities.push_back({g.at("ne_id").get<std::string>(),
                                   g.at("begin").get<int>(),
                                   g.at("end").get<int>()});
      }
      rows.push_back(j.at("frames").get<int>());
      utts.push_back(std::move(u));
    }
    ReadFrames(dir / (name + ".frames.bin"), utts, frame_dim, rows);
  }
  return corpus;
}

}  // namespace nedict::corpus
