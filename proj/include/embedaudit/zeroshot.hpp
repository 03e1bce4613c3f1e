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

// Zero-shot classification by cosine similarity between audio embeddings
// and per-class label embeddings, plus the retrieval metrics used to score
// it: top-k accuracy, macro ROC-AUC and macro PR-AUC (average precision).

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "embedaudit/embed_store.hpp"

namespace embedaudit::zeroshot {

/// Cosine similarity, accumulated in index order at double precision and
/// clamped to [-1, 1]. Throws on dimension mismatch or a zero-norm input.
double cosine(std::span<const float> a, std::span<const float> b);
double cosine(std::span<const double> a, std::span<const double> b);

struct SimilarityMatrix {
  std::vector<std::string> audio_ids;
  std::vector<std::string> label_ids;
  std::vector<double> values;  // row-major, audio_ids.size() x label_ids.size()

  std::size_t rows() const noexcept { return audio_ids.size(); }
  std::size_t cols() const noexcept { return label_ids.size(); }
  double at(std::size_t row, std::size_t col) const { return values[row * cols() + col]; }
  std::span<const double> row(std::size_t index) const {
    return std::span<const double>(values).subspan(index * cols(), cols());
  }
};

SimilarityMatrix similarity_matrix(const EmbeddingSet& audio, const LabelEmbeddings& labels);

/// Column indices of one row, most similar first; equal similarities are
/// ordered by label id.
std::vector<std::size_t> rank_labels(const SimilarityMatrix& sim, std::size_t row);

struct Classification {
  std::string audio_id;
  std::vector<std::string> ranking;
  std::string predicted;
};

std::vector<Classification> classify(const SimilarityMatrix& sim);

/// Column of each row's true label. Throws unlabeled_id / unknown_label.
std::vector<std::size_t> truth_columns(const SimilarityMatrix& sim, const LabelMap& truth);

/// Fraction of recordings whose true label is within the first k ranks,
/// for each requested k (1 <= k <= label count).
std::map<std::size_t, double> top_k_accuracy(const SimilarityMatrix& sim, const LabelMap& truth,
                                             std::span<const std::size_t> ks);

/// Mann-Whitney U / (|pos| |neg|) with midranks for ties. Both spans must be
/// non-empty.
double mann_whitney_auc(std::span<const double> positives, std::span<const double> negatives);

/// Step-wise average precision; tied scores form one threshold. Requires at
/// least one positive.
double average_precision(std::span<const double> scores, const std::vector<bool>& positive);

struct ClassAuc {
  double roc_auc = 0.0;
  double pr_auc = 0.0;
  std::size_t positives = 0;
  std::size_t negatives = 0;
};

struct AucReport {
  double roc_auc = 0.0;  // macro average over evaluated classes
  double pr_auc = 0.0;
  std::map<std::string, ClassAuc> per_class;
  std::vector<std::string> skipped;  // classes with no positives or no negatives
};

/// One-vs-rest per label column. Throws single_class when no class has
/// both positives and negatives.
AucReport roc_pr_auc(const SimilarityMatrix& sim, const LabelMap& truth);

struct ClassificationReport {
  std::vector<Classification> rankings;
  std::map<std::size_t, double> top_k;
  AucReport auc;
};

ClassificationReport evaluate(const SimilarityMatrix& sim, const LabelMap& truth,
                              std::span<const std::size_t> ks);

}  // namespace embedaudit::zeroshot
