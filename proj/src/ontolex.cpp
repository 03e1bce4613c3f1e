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

#include "embedaudit/ontolex.hpp"

#include <algorithm>
#include <fstream>
#include <tuple>

#include <json.hpp>

#include "embedaudit/error.hpp"
#include "embedaudit/text.hpp"
#include "embedaudit/zeroshot.hpp"

namespace embedaudit::ontolex {

using nlohmann::json;

std::size_t OntologyTree::add_node(std::string name, std::optional<std::size_t> parent) {
  if (trim(name).empty()) throw Error(ErrorCode::empty_name, "ontology node with an empty name");
  std::string key = ascii_lower(name);
  const std::size_t index = nodes_.size();
  if (!by_key_.emplace(key, index).second) {
    throw Error(ErrorCode::duplicate_name, "node name \"" + name + "\" appears more than once");
  }
  Node n{std::move(name), std::move(key), parent, {}, 0};
  if (parent) {
    n.depth = nodes_.at(*parent).depth + 1;
    nodes_[*parent].children.push_back(index);
  }
  nodes_.push_back(std::move(n));
  return index;
}

OntologyTree OntologyTree::from_parents(const std::vector<std::string>& names,
                                        const std::vector<std::optional<std::size_t>>& parents) {
  if (names.empty() || names.size() != parents.size()) {
    throw Error(ErrorCode::malformed_ontology, "names and parents must be non-empty and parallel");
  }
  OntologyTree tree;
  for (std::size_t i = 0; i < names.size(); ++i) {
    const bool ok = i == 0 ? !parents[i].has_value() : (parents[i] && *parents[i] < i);
    if (!ok) {
      throw Error(ErrorCode::malformed_ontology,
                  "node " + std::to_string(i) + " has an invalid parent index");
    }
    tree.add_node(names[i], parents[i]);
  }
  return tree;
}

std::optional<std::size_t> OntologyTree::find(std::string_view name) const {
  const auto it = by_key_.find(ascii_lower(name));
  if (it == by_key_.end()) return std::nullopt;
  return it->second;
}

std::size_t OntologyTree::index_of(std::string_view name) const {
  const auto found = find(name);
  if (!found) {
    throw Error(ErrorCode::unknown_name, "\"" + std::string(name) + "\" is not in the ontology");
  }
  return *found;
}

std::vector<std::size_t> OntologyTree::leaves() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 1; i < nodes_.size(); ++i) {
    if (nodes_[i].children.empty()) out.push_back(i);
  }
  return out;
}

std::size_t OntologyTree::lca(std::size_t a, std::size_t b) const {
  while (nodes_.at(a).depth > nodes_.at(b).depth) a = *nodes_[a].parent;
  while (nodes_[b].depth > nodes_[a].depth) b = *nodes_[b].parent;
  while (a != b) {
    a = *nodes_[a].parent;
    b = *nodes_[b].parent;
  }
  return a;
}

std::size_t OntologyTree::distance(std::size_t a, std::size_t b) const {
  const std::size_t common = lca(a, b);
  return nodes_[a].depth + nodes_[b].depth - 2 * nodes_[common].depth;
}

OntologyTree parse_ontology(std::istream& in) {
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::malformed_ontology, std::string("invalid JSON: ") + e.what());
  }

  OntologyTree tree;
  // Depth-first, children in source order; explicit stack keeps deep trees
  // off the call stack.
  struct Pending {
    const json* node;
    std::optional<std::size_t> parent;
  };
  std::vector<Pending> stack{{&doc, std::nullopt}};
  while (!stack.empty()) {
    const auto [node, parent] = stack.back();
    stack.pop_back();
    if (!node->is_object()) {
      throw Error(ErrorCode::malformed_ontology, "every node must be a JSON object");
    }
    const auto name = node->find("name");
    if (name == node->end() || !name->is_string()) {
      throw Error(ErrorCode::malformed_ontology, "node without a string \"name\"");
    }
    const std::size_t index = tree.add_node(name->get<std::string>(), parent);
    const auto children = node->find("children");
    if (children == node->end() || children->is_null()) continue;
    if (!children->is_array()) {
      throw Error(ErrorCode::malformed_ontology,
                  "\"children\" of \"" + name->get<std::string>() + "\" is not an array");
    }
    for (auto it = children->rbegin(); it != children->rend(); ++it) {
      stack.push_back({&*it, index});
    }
  }
  return tree;
}

OntologyTree load_ontology(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io, path.string() + ": cannot open for reading");
  try {
    return parse_ontology(in);
  } catch (const Error& e) {
    throw e.with_context(path.string());
  }
}

std::size_t tree_distance(const OntologyTree& tree, std::string_view a, std::string_view b) {
  return tree.distance(tree.index_of(a), tree.index_of(b));
}

TripletSet generate_triplets(const OntologyTree& tree,
                             const std::optional<std::vector<std::string>>& restrict,
                             bool include_internal) {
  std::vector<std::size_t> candidates;
  if (restrict) {
    for (const auto& name : *restrict) candidates.push_back(tree.index_of(name));
  } else if (include_internal) {
    for (std::size_t i = 1; i < tree.size(); ++i) candidates.push_back(i);
  } else {
    candidates = tree.leaves();
  }
  std::sort(candidates.begin(), candidates.end(), [&](std::size_t a, std::size_t b) {
    return tree.node(a).key < tree.node(b).key;
  });
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
  const std::size_t m = candidates.size();
  if (m < 3) {
    throw Error(ErrorCode::too_few_candidates,
                "triplets need at least 3 candidate names, got " + std::to_string(m));
  }

  std::vector<std::size_t> dist(m * m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) dist[i * m + j] = tree.distance(candidates[i], candidates[j]);
  }

  TripletSet out;
  out.stats.candidates = m;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      for (std::size_t k = j + 1; k < m; ++k) {
        ++out.stats.candidate_subsets;
        // (first, second) is the closest pair; first < second keeps the
        // lexicographically smaller name as anchor.
        const std::size_t d_ij = dist[i * m + j];
        const std::size_t d_ik = dist[i * m + k];
        const std::size_t d_jk = dist[j * m + k];
        std::size_t first = 0;
        std::size_t second = 0;
        std::size_t other = 0;
        if (d_ij < d_ik && d_ij < d_jk) {
          std::tie(first, second, other) = std::tuple{i, j, k};
        } else if (d_ik < d_ij && d_ik < d_jk) {
          std::tie(first, second, other) = std::tuple{i, k, j};
        } else if (d_jk < d_ij && d_jk < d_ik) {
          std::tie(first, second, other) = std::tuple{j, k, i};
        } else {
          ++out.stats.ambiguous;
          continue;
        }
        if (tree.lca(candidates[first], candidates[second]) == OntologyTree::root()) {
          ++out.stats.root_excluded;
          continue;
        }
        out.triplets.push_back({tree.node(candidates[first]).name,
                                tree.node(candidates[second]).name,
                                tree.node(candidates[other]).name});
      }
    }
  }
  out.stats.retained = out.triplets.size();
  std::sort(out.triplets.begin(), out.triplets.end(), [](const Triplet& a, const Triplet& b) {
    return std::tuple{ascii_lower(a.anchor), ascii_lower(a.positive), ascii_lower(a.negative)} <
           std::tuple{ascii_lower(b.anchor), ascii_lower(b.positive), ascii_lower(b.negative)};
  });
  return out;
}

TripletScore triplet_accuracy(const std::vector<Triplet>& triplets, const LabelEmbeddings& emb) {
  if (triplets.empty()) throw Error(ErrorCode::empty_input, "no triplets to score");
  std::unordered_map<std::string, std::size_t> rows;
  for (std::size_t r = 0; r < emb.size(); ++r) {
    if (!rows.emplace(ascii_lower(emb.id(r)), r).second) {
      throw Error(ErrorCode::ambiguous_id,
                  "embedding ids differing only in case: \"" + emb.id(r) + "\"");
    }
  }
  auto row_of = [&](const std::string& name) {
    const auto it = rows.find(ascii_lower(name));
    if (it == rows.end()) {
      throw Error(ErrorCode::missing_embedding, "no embedding for triplet name \"" + name + "\"");
    }
    return emb.row(it->second);
  };

  TripletScore score;
  score.verdicts.reserve(triplets.size());
  for (const auto& t : triplets) {
    const auto anchor = row_of(t.anchor);
    TripletVerdict v{t, zeroshot::cosine(anchor, row_of(t.positive)),
                     zeroshot::cosine(anchor, row_of(t.negative)), false};
    v.correct = v.anchor_positive > v.anchor_negative;
    score.correct += v.correct ? 1 : 0;
    score.verdicts.push_back(std::move(v));
  }
  score.accuracy = static_cast<double>(score.correct) / static_cast<double>(triplets.size());
  return score;
}

std::vector<Triplet> read_triplets(std::istream& in) {
  const auto rows = csv::parse(in);
  if (rows.empty() || rows.front() != csv::Row{"anchor", "positive", "negative"}) {
    throw Error(ErrorCode::missing_header, "expected header \"anchor,positive,negative\"");
  }
  std::vector<Triplet> out;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& r = rows[i];
    if (r.size() != 3) {
      throw Error(ErrorCode::malformed_csv, "row " + std::to_string(i) + " has " +
                                                std::to_string(r.size()) + " fields, expected 3");
    }
    if (r[0].empty() || r[1].empty() || r[2].empty()) {
      throw Error(ErrorCode::empty_field, "row " + std::to_string(i) + " has an empty name");
    }
    out.push_back({r[0], r[1], r[2]});
  }
  return out;
}

void write_triplets(const std::vector<Triplet>& triplets, std::ostream& out) {
  csv::write_row(out, {"anchor", "positive", "negative"});
  for (const auto& t : triplets) csv::write_row(out, {t.anchor, t.positive, t.negative});
}

}  // namespace embedaudit::ontolex
