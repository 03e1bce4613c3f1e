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

#include "embedaudit/zeroshot.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "embedaudit/error.hpp"

namespace embedaudit::zeroshot {
namespace {

template <typename T>
double cosine_impl(std::span<const T> a, std::span<const T> b) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::dimension_mismatch, "cosine of vectors with dimensions " +
                                                   std::to_string(a.size()) + " and " +
                                                   std::to_string(b.size()));
  }
  double dot = 0.0;
  double norm_a = 0.0;
  double norm_b = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double x = a[i];
    const double y = b[i];
    dot += x * y;
    norm_a += x * x;
    norm_b += y * y;
  }
  if (norm_a == 0.0 || norm_b == 0.0) {
    throw Error(ErrorCode::zero_vector, "cosine of a zero-norm vector");
  }
  return std::clamp(dot / (std::sqrt(norm_a) * std::sqrt(norm_b)), -1.0, 1.0);
}

}  // namespace

double cosine(std::span<const float> a, std::span<const float> b) { return cosine_impl(a, b); }
double cosine(std::span<const double> a, std::span<const double> b) { return cosine_impl(a, b); }

SimilarityMatrix similarity_matrix(const EmbeddingSet& audio, const LabelEmbeddings& labels) {
  if (labels.empty()) throw Error(ErrorCode::empty_input, "label embedding set is empty");
  if (audio.dim() != labels.dim()) {
    throw Error(ErrorCode::dimension_mismatch, "audio dimension " + std::to_string(audio.dim()) +
                                                   " vs label dimension " +
                                                   std::to_string(labels.dim()));
  }
  SimilarityMatrix sim{audio.ids(), labels.ids(), {}};
  sim.values.resize(audio.size() * labels.size());
  for (std::size_t i = 0; i < audio.size(); ++i) {
    const auto a = audio.row(i);
    for (std::size_t k = 0; k < labels.size(); ++k) {
      sim.values[i * labels.size() + k] = cosine(a, labels.row(k));
    }
  }
  return sim;
}

std::vector<std::size_t> rank_labels(const SimilarityMatrix& sim, std::size_t row) {
  const auto values = sim.row(row);
  std::vector<std::size_t> order(sim.cols());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    if (values[x] != values[y]) return values[x] > values[y];
    return sim.label_ids[x] < sim.label_ids[y];
  });
  return order;
}

std::vector<Classification> classify(const SimilarityMatrix& sim) {
  if (sim.cols() == 0) throw Error(ErrorCode::empty_input, "no candidate labels");
  std::vector<Classification> out;
  out.reserve(sim.rows());
  for (std::size_t i = 0; i < sim.rows(); ++i) {
    Classification c{sim.audio_ids[i], {}, {}};
    for (std::size_t k : rank_labels(sim, i)) c.ranking.push_back(sim.label_ids[k]);
    c.predicted = c.ranking.front();
    out.push_back(std::move(c));
  }
  return out;
}

std::vector<std::size_t> truth_columns(const SimilarityMatrix& sim, const LabelMap& truth) {
  std::map<std::string, std::size_t> column;
  for (std::size_t k = 0; k < sim.cols(); ++k) column.emplace(sim.label_ids[k], k);
  std::vector<std::size_t> out;
  out.reserve(sim.rows());
  for (const auto& id : sim.audio_ids) {
    const std::string* label = truth.find(id);
    if (!label) throw Error(ErrorCode::unlabeled_id, "audio id \"" + id + "\" has no label");
    const auto it = column.find(*label);
    if (it == column.end()) {
      throw Error(ErrorCode::unknown_label, "true label \"" + *label + "\" of audio id \"" + id +
                                                "\" is not among the candidate labels");
    }
    out.push_back(it->second);
  }
  return out;
}

std::map<std::size_t, double> top_k_accuracy(const SimilarityMatrix& sim, const LabelMap& truth,
                                             std::span<const std::size_t> ks) {
  for (std::size_t k : ks) {
    if (k < 1 || k > sim.cols()) {
      throw Error(ErrorCode::out_of_range, "k = " + std::to_string(k) + " outside [1, " +
                                               std::to_string(sim.cols()) + "]");
    }
  }
  if (sim.rows() == 0) throw Error(ErrorCode::empty_input, "no recordings");
  const auto true_col = truth_columns(sim, truth);

  // hits_at[r] counts recordings whose true label sits at rank r.
  std::vector<std::size_t> hits_at(sim.cols(), 0);
  for (std::size_t i = 0; i < sim.rows(); ++i) {
    const auto order = rank_labels(sim, i);
    const auto pos = std::find(order.begin(), order.end(), true_col[i]) - order.begin();
    ++hits_at[static_cast<std::size_t>(pos)];
  }
  std::map<std::size_t, double> out;
  for (std::size_t k : ks) {
    const std::size_t hits = std::accumulate(hits_at.begin(), hits_at.begin() + k, std::size_t{0});
    out[k] = static_cast<double>(hits) / static_cast<double>(sim.rows());
  }
  return out;
}

double mann_whitney_auc(std::span<const double> positives, std::span<const double> negatives) {
  if (positives.empty() || negatives.empty()) {
    throw Error(ErrorCode::empty_input, "AUC needs at least one positive and one negative");
  }
  struct Scored {
    double score;
    bool positive;
  };
  std::vector<Scored> all;
  all.reserve(positives.size() + negatives.size());
  for (double s : positives) all.push_back({s, true});
  for (double s : negatives) all.push_back({s, false});
  std::sort(all.begin(), all.end(), [](const Scored& a, const Scored& b) { return a.score < b.score; });

  double positive_rank_sum = 0.0;
  for (std::size_t i = 0; i < all.size();) {
    std::size_t j = i;
    std::size_t group_positives = 0;
    while (j < all.size() && all[j].score == all[i].score) {
      group_positives += all[j].positive ? 1 : 0;
      ++j;
    }
    // Ranks i+1 .. j share their mean.
    const double midrank = 0.5 * static_cast<double>(i + 1 + j);
    positive_rank_sum += midrank * static_cast<double>(group_positives);
    i = j;
  }
  const double np = static_cast<double>(positives.size());
  const double nn = static_cast<double>(negatives.size());
  return (positive_rank_sum - np * (np + 1.0) / 2.0) / (np * nn);
}

double average_precision(std::span<const double> scores, const std::vector<bool>& positive) {
  if (scores.size() != positive.size()) {
    throw Error(ErrorCode::dimension_mismatch, "scores and positive flags differ in length");
  }
  const auto total_positives =
      static_cast<std::size_t>(std::count(positive.begin(), positive.end(), true));
  if (total_positives == 0) {
    throw Error(ErrorCode::empty_input, "average precision needs at least one positive");
  }
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  double ap = 0.0;
  std::size_t tp = 0;
  std::size_t seen = 0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    std::size_t group_tp = 0;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) {
      group_tp += positive[order[j]] ? 1 : 0;
      ++j;
    }
    tp += group_tp;
    seen = j;
    if (group_tp > 0) {
      const double precision = static_cast<double>(tp) / static_cast<double>(seen);
      ap += precision * static_cast<double>(group_tp) / static_cast<double>(total_positives);
    }
    i = j;
  }
  return ap;
}

AucReport roc_pr_auc(const SimilarityMatrix& sim, const LabelMap& truth) {
  if (sim.rows() == 0 || sim.cols() == 0) throw Error(ErrorCode::empty_input, "empty similarity matrix");
  const auto true_col = truth_columns(sim, truth);

  AucReport report;
  std::vector<double> column(sim.rows());
  std::vector<bool> is_positive(sim.rows());
  double roc_sum = 0.0;
  double pr_sum = 0.0;
  for (std::size_t k = 0; k < sim.cols(); ++k) {
    std::vector<double> pos;
    std::vector<double> neg;
    for (std::size_t i = 0; i < sim.rows(); ++i) {
      column[i] = sim.at(i, k);
      is_positive[i] = true_col[i] == k;
      (is_positive[i] ? pos : neg).push_back(column[i]);
    }
    if (pos.empty() || neg.empty()) {
      report.skipped.push_back(sim.label_ids[k]);
      continue;
    }
    ClassAuc c;
    c.roc_auc = mann_whitney_auc(pos, neg);
    c.pr_auc = average_precision(column, is_positive);
    c.positives = pos.size();
    c.negatives = neg.size();
    roc_sum += c.roc_auc;
    pr_sum += c.pr_auc;
    report.per_class.emplace(sim.label_ids[k], c);
  }
  if (report.per_class.empty()) {
    throw Error(ErrorCode::single_class,
                "no class has both positive and negative recordings");
  }
  const auto evaluated = static_cast<double>(report.per_class.size());
  report.roc_auc = roc_sum / evaluated;
  report.pr_auc = pr_sum / evaluated;
  return report;
}

ClassificationReport evaluate(const SimilarityMatrix& sim, const LabelMap& truth,
                              std::span<const std::size_t> ks) {
  ClassificationReport report;
  report.top_k = top_k_accuracy(sim, truth, ks);
  report.auc = roc_pr_auc(sim, truth);
  report.rankings = classify(sim);
  return report;
}

}  // namespace embedaudit::zeroshot
