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

#pragma once

// On-disk embedding sets (EMB1) and label metadata.
//
// EMB1 layout, all integers little-endian:
//   "EMB1" | u32 count | u32 dim | count x { u16 id_len | id bytes | dim x f32 }

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace embedaudit {

inline constexpr std::string_view kEmbMagic = "EMB1";
inline constexpr std::size_t kEmbHeaderBytes = 12;
inline constexpr std::size_t kMaxIdBytes = 0xFFFF;

/// Immutable, validated collection of fixed-dimension embeddings.
///
/// Construction enforces: dim >= 1, ids unique, non-empty and valid UTF-8,
/// every value finite, no all-zero row. Values are held at the storage
/// width (f32); analysis code widens to double.
class EmbeddingSet {
 public:
  /// Empty set of the given dimension.
  explicit EmbeddingSet(std::size_t dim);

  /// `values` is row-major, ids.size() * dim entries.
  EmbeddingSet(std::vector<std::string> ids, std::vector<float> values,
               std::size_t dim);

  std::size_t size() const noexcept { return ids_.size(); }
  std::size_t dim() const noexcept { return dim_; }
  bool empty() const noexcept { return ids_.empty(); }

  const std::vector<std::string>& ids() const noexcept { return ids_; }
  const std::string& id(std::size_t row) const { return ids_.at(row); }
  std::span<const float> row(std::size_t index) const;
  std::span<const float> values() const noexcept { return values_; }

  std::optional<std::size_t> find(std::string_view id) const;

  /// Bitwise equality of ids, order and every stored value.
  friend bool operator==(const EmbeddingSet& a, const EmbeddingSet& b);

 private:
  std::vector<std::string> ids_;
  std::vector<float> values_;
  std::size_t dim_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// One row per class label.
using LabelEmbeddings = EmbeddingSet;

void write_embeddings(const EmbeddingSet& set, std::ostream& out);
EmbeddingSet read_embeddings(std::istream& in);

// File wrappers; errors carry the path as context.
void save_embeddings(const EmbeddingSet& set, const std::filesystem::path& path);
EmbeddingSet load_embeddings(const std::filesystem::path& path);

/// Ground-truth class per embedding id, in input order.
class LabelMap {
 public:
  using Entry = std::pair<std::string, std::string>;

  explicit LabelMap(std::vector<Entry> entries);

  const std::vector<Entry>& entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }

  /// nullptr when the id is not mapped.
  const std::string* find(std::string_view id) const;

  /// Distinct labels, in order of first appearance.
  const std::vector<std::string>& classes() const noexcept { return classes_; }

 private:
  std::vector<Entry> entries_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<std::string> classes_;
};

/// CSV with header `id,label`.
LabelMap read_label_map(std::istream& in);
LabelMap load_label_map(const std::filesystem::path& path);

struct LabeledAudio {
  EmbeddingSet audio;
  std::vector<std::string> labels;  // parallel to audio rows
  std::vector<std::string> warnings;
};

/// Pairs audio rows with their labels. Unlabeled audio ids are errors;
/// label rows without audio only produce warnings.
LabeledAudio align(const EmbeddingSet& audio, const LabelMap& labels);

}  // namespace embedaudit
