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

// Instrument ontology trees and semantic triplets derived from them.
//
// Similarity between two nodes is the unweighted path length through their
// lowest common ancestor. A triplet (anchor, positive, negative) holds when
// the anchor-positive pair is strictly the closest pair of the three.

#include <cstddef>
#include <filesystem>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "embedaudit/embed_store.hpp"

namespace embedaudit::ontolex {

class OntologyTree {
 public:
  struct Node {
    std::string name;  // as written in the source
    std::string key;   // lowercase, used for matching
    std::optional<std::size_t> parent;
    std::vector<std::size_t> children;
    std::size_t depth = 0;
  };

  /// parents[i] is the index of node i's parent; exactly parents[0] is empty
  /// and every other parent index is smaller than i.
  static OntologyTree from_parents(const std::vector<std::string>& names,
                                   const std::vector<std::optional<std::size_t>>& parents);

  std::size_t size() const noexcept { return nodes_.size(); }
  static constexpr std::size_t root() noexcept { return 0; }
  const Node& node(std::size_t index) const { return nodes_.at(index); }

  /// Case-insensitive lookup.
  std::optional<std::size_t> find(std::string_view name) const;
  /// Throws unknown_name.
  std::size_t index_of(std::string_view name) const;

  /// Childless nodes other than the root, in source order.
  std::vector<std::size_t> leaves() const;

  std::size_t lca(std::size_t a, std::size_t b) const;
  std::size_t distance(std::size_t a, std::size_t b) const;

 private:
  friend OntologyTree parse_ontology(std::istream& in);
  std::size_t add_node(std::string name, std::optional<std::size_t> parent);

  std::vector<Node> nodes_;
  std::unordered_map<std::string, std::size_t> by_key_;
};

/// JSON: {"name": "...", "children": [ ...nodes... ]}, single root object.
OntologyTree parse_ontology(std::istream& in);
OntologyTree load_ontology(const std::filesystem::path& path);

/// Edge count of the path between two named nodes.
std::size_t tree_distance(const OntologyTree& tree, std::string_view a, std::string_view b);

struct Triplet {
  std::string anchor;
  std::string positive;
  std::string negative;

  friend bool operator==(const Triplet&, const Triplet&) = default;
};

struct TripletStats {
  std::size_t candidates = 0;
  std::size_t candidate_subsets = 0;
  std::size_t ambiguous = 0;  // closest distance shared by two or more pairs
  std::size_t root_excluded = 0;
  std::size_t retained = 0;
};

struct TripletSet {
  std::vector<Triplet> triplets;  // sorted by (anchor, positive, negative), case-insensitively
  TripletStats stats;
};

/// Candidates are `restrict` if given, else all leaves, else (with
/// include_internal) every non-root node. Each unordered 3-subset yields at
/// most one triplet: the unique closest pair forms (anchor, positive) with
/// the lexicographically smaller name as anchor; the subset is dropped when
/// the closest distance is tied, or when the pair's lowest common ancestor
/// is the root.
TripletSet generate_triplets(const OntologyTree& tree,
                             const std::optional<std::vector<std::string>>& restrict,
                             bool include_internal);

struct TripletVerdict {
  Triplet triplet;
  double anchor_positive = 0.0;
  double anchor_negative = 0.0;
  bool correct = false;
};

struct TripletScore {
  double accuracy = 0.0;
  std::size_t correct = 0;
  std::vector<TripletVerdict> verdicts;
};

/// A verdict is correct iff cos(anchor, positive) > cos(anchor, negative).
/// Embedding ids are matched case-insensitively.
TripletScore triplet_accuracy(const std::vector<Triplet>& triplets, const LabelEmbeddings& emb);

/// CSV with header `anchor,positive,negative`.
std::vector<Triplet> read_triplets(std::istream& in);
void write_triplets(const std::vector<Triplet>& triplets, std::ostream& out);

}  // namespace embedaudit::ontolex
