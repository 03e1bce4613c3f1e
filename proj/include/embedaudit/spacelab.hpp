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

// Embedding-space diagnostics: positive/negative pair similarity
// distributions, per-class centroid label embeddings, and top-2 margins.

#include <cstddef>
#include <vector>

#include "embedaudit/embed_store.hpp"
#include "embedaudit/zeroshot.hpp"

namespace embedaudit::spacelab {

inline constexpr std::size_t kDefaultBins = 50;

struct PairHistogram {
  std::vector<double> bin_edges;  // bins + 1, strictly increasing
  std::vector<std::size_t> positive_counts;
  std::vector<std::size_t> negative_counts;
  std::size_t positive_pairs = 0;
  std::size_t negative_pairs = 0;
  double overlap_coefficient = 0.0;  // sum over bins of min(p_b, n_b), normalised frequencies
  double pooled_pair_auc = 0.0;      // P(positive > negative), ties count half
};

/// Positive pairs are (recording, true label) cells of the matrix; every
/// other cell is a negative pair. Bins are uniform over the pooled range.
PairHistogram pair_histogram(const zeroshot::SimilarityMatrix& sim, const LabelMap& truth,
                             std::size_t bins = kDefaultBins);

/// Arithmetic mean of each class's audio rows, classes in lexicographic
/// order. Every label in `truth` must own at least one audio row, and every
/// audio row must be labeled.
LabelEmbeddings class_centroids(const EmbeddingSet& audio, const LabelMap& truth);

struct MarginReport {
  std::vector<std::string> audio_ids;
  std::vector<double> margins;  // best minus second-best similarity
  std::vector<double> bin_edges;
  std::vector<std::size_t> counts;
  double median_margin = 0.0;
};

MarginReport margins(const zeroshot::SimilarityMatrix& sim, std::size_t bins = kDefaultBins);

/// Order-statistic median; mean of the central pair for even counts.
double median(std::vector<double> values);

}  // namespace embedaudit::spacelab
