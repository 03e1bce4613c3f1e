// Copyright 2026 The embedaudit Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "embedaudit/embed_store.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

#include "embedaudit/error.hpp"
#include "embedaudit/text.hpp"

namespace embedaudit {
namespace {

std::string describe_row(std::size_t row, const std::string& id) {
  return "record " + std::to_string(row) + " (id \"" + id + "\")";
}

void check_id(const std::string& id, std::size_t row) {
  if (id.empty()) {
    throw Error(ErrorCode::empty_id, "record " + std::to_string(row) + " has an empty id");
  }
  if (id.size() > kMaxIdBytes) {
    throw Error(ErrorCode::id_too_long, "record " + std::to_string(row) + " id exceeds " +
                                            std::to_string(kMaxIdBytes) + " bytes");
  }
  if (!is_valid_utf8(id)) {
    throw Error(ErrorCode::invalid_utf8, "record " + std::to_string(row) + " id is not valid UTF-8");
  }
}

void check_values(std::span<const float> row, std::size_t index, const std::string& id) {
  bool all_zero = true;
  for (std::size_t j = 0; j < row.size(); ++j) {
    if (!std::isfinite(row[j])) {
      throw Error(ErrorCode::non_finite, describe_row(index, id) + " has a non-finite value at column " +
                                             std::to_string(j));
    }
    if (row[j] != 0.0f) all_zero = false;
  }
  if (all_zero) {
    throw Error(ErrorCode::zero_vector, describe_row(index, id) + " is the all-zero vector");
  }
}

void put_u16(std::ostream& out, std::uint16_t v) {
  const std::array<char, 2> b{static_cast<char>(v & 0xFF), static_cast<char>(v >> 8)};
  out.write(b.data(), b.size());
}

void put_u32(std::ostream& out, std::uint32_t v) {
  const std::array<char, 4> b{static_cast<char>(v & 0xFF), static_cast<char>((v >> 8) & 0xFF),
                              static_cast<char>((v >> 16) & 0xFF), static_cast<char>(v >> 24)};
  out.write(b.data(), b.size());
}

std::uint32_t get_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

// Reads exactly n bytes or reports how many arrived.
std::size_t read_bytes(std::istream& in, void* dst, std::size_t n) {
  in.read(static_cast<char*>(dst), static_cast<std::streamsize>(n));
  return static_cast<std::size_t>(in.gcount());
}

}  // namespace

EmbeddingSet::EmbeddingSet(std::size_t dim) : dim_(dim) {
  if (dim_ == 0) throw Error(ErrorCode::zero_dimension, "dimension must be at least 1");
}

EmbeddingSet::EmbeddingSet(std::vector<std::string> ids, std::vector<float> values,
                           std::size_t dim)
    : ids_(std::move(ids)), values_(std::move(values)), dim_(dim) {
  if (dim_ == 0) throw Error(ErrorCode::zero_dimension, "dimension must be at least 1");
  if (values_.size() != ids_.size() * dim_) {
    throw Error(ErrorCode::length_mismatch,
                std::to_string(ids_.size()) + " ids x dim " + std::to_string(dim_) +
                    " does not match " + std::to_string(values_.size()) + " values");
  }
  index_.reserve(ids_.size());
  for (std::size_t i = 0; i < ids_.size(); ++i) {
    check_id(ids_[i], i);
    if (!index_.emplace(ids_[i], i).second) {
      throw Error(ErrorCode::duplicate_id, describe_row(i, ids_[i]) + " repeats an earlier id");
    }
    check_values(row(i), i, ids_[i]);
  }
}

std::span<const float> EmbeddingSet::row(std::size_t index) const {
  if (index >= ids_.size()) throw std::out_of_range("EmbeddingSet::row");
  return std::span<const float>(values_).subspan(index * dim_, dim_);
}

std::optional<std::size_t> EmbeddingSet::find(std::string_view id) const {
  const auto it = index_.find(std::string(id));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

bool operator==(const EmbeddingSet& a, const EmbeddingSet& b) {
  if (a.dim_ != b.dim_ || a.ids_ != b.ids_ || a.values_.size() != b.values_.size()) return false;
  return std::equal(a.values_.begin(), a.values_.end(), b.values_.begin(),
                    [](float x, float y) {
                      return std::bit_cast<std::uint32_t>(x) == std::bit_cast<std::uint32_t>(y);
                    });
}

void write_embeddings(const EmbeddingSet& set, std::ostream& out) {
  if (set.size() > 0xFFFFFFFFu || set.dim() > 0xFFFFFFFFu) {
    throw Error(ErrorCode::out_of_range, "record count or dimension exceeds u32");
  }
  out.write(kEmbMagic.data(), kEmbMagic.size());
  put_u32(out, static_cast<std::uint32_t>(set.size()));
  put_u32(out, static_cast<std::uint32_t>(set.dim()));
  for (std::size_t i = 0; i < set.size(); ++i) {
    const std::string& id = set.id(i);
    put_u16(out, static_cast<std::uint16_t>(id.size()));
    out.write(id.data(), static_cast<std::streamsize>(id.size()));
    for (float v : set.row(i)) put_u32(out, std::bit_cast<std::uint32_t>(v));
  }
  if (!out) throw Error(ErrorCode::io, "write failed");
}

EmbeddingSet read_embeddings(std::istream& in) {
  std::array<unsigned char, kEmbHeaderBytes> header{};
  const std::size_t got = read_bytes(in, header.data(), header.size());
  if (got >= 4 && std::memcmp(header.data(), kEmbMagic.data(), 4) != 0) {
    throw Error(ErrorCode::bad_magic, "file does not start with \"EMB1\"");
  }
  if (got < header.size()) {
    throw Error(ErrorCode::truncated, "truncated header (" + std::to_string(got) + " of " +
                                          std::to_string(kEmbHeaderBytes) + " bytes)");
  }
  const std::uint32_t count = get_u32(header.data() + 4);
  const std::uint32_t dim = get_u32(header.data() + 8);
  if (dim == 0) throw Error(ErrorCode::zero_dimension, "header declares dimension 0");

  std::vector<std::string> ids;
  std::vector<float> values;
  // Corrupt counts must not drive huge allocations before the data proves them.
  ids.reserve(std::min<std::size_t>(count, 1u << 16));
  values.reserve(std::min<std::size_t>(static_cast<std::size_t>(count) * dim, 1u << 22));

  std::vector<unsigned char> payload(static_cast<std::size_t>(dim) * 4);
  for (std::uint32_t r = 0; r < count; ++r) {
    std::array<unsigned char, 2> len_bytes{};
    if (read_bytes(in, len_bytes.data(), 2) != 2) {
      throw Error(ErrorCode::truncated, "truncated at record " + std::to_string(r) + " of " +
                                            std::to_string(count) + " (id length)");
    }
    const std::size_t len = len_bytes[0] | (static_cast<std::size_t>(len_bytes[1]) << 8);
    std::string id(len, '\0');
    if (read_bytes(in, id.data(), len) != len) {
      throw Error(ErrorCode::truncated, "truncated at record " + std::to_string(r) + " of " +
                                            std::to_string(count) + " (id bytes)");
    }
    if (read_bytes(in, payload.data(), payload.size()) != payload.size()) {
      throw Error(ErrorCode::truncated, "truncated at record " + std::to_string(r) + " of " +
                                            std::to_string(count) + " (values of id \"" + id +
                                            "\")");
    }
    for (std::size_t j = 0; j < dim; ++j) {
      values.push_back(std::bit_cast<float>(get_u32(payload.data() + 4 * j)));
    }
    ids.push_back(std::move(id));
  }
  if (in.peek() != std::char_traits<char>::eof()) {
    throw Error(ErrorCode::length_mismatch, "trailing bytes after " + std::to_string(count) +
                                                " declared records of dimension " +
                                                std::to_string(dim));
  }
  return EmbeddingSet(std::move(ids), std::move(values), dim);
}

void save_embeddings(const EmbeddingSet& set, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::io, path.string() + ": cannot open for writing");
  try {
    write_embeddings(set, out);
    out.flush();
    if (!out) throw Error(ErrorCode::io, "write failed");
  } catch (const Error& e) {
    throw e.with_context(path.string());
  }
}

EmbeddingSet load_embeddings(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io, path.string() + ": cannot open for reading");
  try {
    return read_embeddings(in);
  } catch (const Error& e) {
    throw e.with_context(path.string());
  }
}

LabelMap::LabelMap(std::vector<Entry> entries) : entries_(std::move(entries)) {
  if (entries_.empty()) throw Error(ErrorCode::empty_input, "label map has no rows");
  std::unordered_map<std::string, bool> seen_class;
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const auto& [id, label] = entries_[i];
    if (id.empty() || label.empty()) {
      throw Error(ErrorCode::empty_field, "row " + std::to_string(i + 1) + " has an empty " +
                                              (id.empty() ? "id" : "label"));
    }
    if (!index_.emplace(id, i).second) {
      throw Error(ErrorCode::duplicate_id, "id \"" + id + "\" appears more than once");
    }
    if (seen_class.emplace(label, true).second) classes_.push_back(label);
  }
}

const std::string* LabelMap::find(std::string_view id) const {
  const auto it = index_.find(std::string(id));
  return it == index_.end() ? nullptr : &entries_[it->second].second;
}

LabelMap read_label_map(std::istream& in) {
  const auto rows = csv::parse(in);
  if (rows.empty() || rows.front() != csv::Row{"id", "label"}) {
    throw Error(ErrorCode::missing_header, "expected header \"id,label\"");
  }
  std::vector<LabelMap::Entry> entries;
  entries.reserve(rows.size() - 1);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].size() != 2) {
      throw Error(ErrorCode::malformed_csv, "row " + std::to_string(i) + " has " +
                                                std::to_string(rows[i].size()) +
                                                " fields, expected 2");
    }
    entries.emplace_back(rows[i][0], rows[i][1]);
  }
  return LabelMap(std::move(entries));
}

LabelMap load_label_map(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io, path.string() + ": cannot open for reading");
  try {
    return read_label_map(in);
  } catch (const Error& e) {
    throw e.with_context(path.string());
  }
}

LabeledAudio align(const EmbeddingSet& audio, const LabelMap& labels) {
  if (audio.dim() == 0) throw Error(ErrorCode::zero_dimension, "audio dimension is zero");
  LabeledAudio out{audio, {}, {}};
  out.labels.reserve(audio.size());
  for (std::size_t i = 0; i < audio.size(); ++i) {
    const std::string* label = labels.find(audio.id(i));
    if (!label) {
      throw Error(ErrorCode::unlabeled_id, "audio id \"" + audio.id(i) + "\" has no label");
    }
    out.labels.push_back(*label);
  }
  for (const auto& [id, label] : labels.entries()) {
    if (!audio.find(id)) {
      out.warnings.push_back("label row for id \"" + id + "\" has no audio embedding");
    }
  }
  return out;
}

}  // namespace embedaudit
