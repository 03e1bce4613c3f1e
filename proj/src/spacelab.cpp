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

#include "embedaudit/spacelab.hpp"

#include <algorithm>
#include <map>

#include "embedaudit/error.hpp"

namespace embedaudit::spacelab {
namespace {

// Uniform edges over [lo, hi]. A degenerate range is widened so the edges
// stay strictly increasing.
std::vector<double> uniform_edges(double lo, double hi, std::size_t bins) {
  if (!(hi > lo)) {
    constexpr double kHalfWidth = 1e-6;
    lo -= kHalfWidth;
    hi += kHalfWidth;
  }
  std::vector<double> edges(bins + 1);
  const double width = (hi - lo) / static_cast<double>(bins);
  for (std::size_t b = 0; b <= bins; ++b) edges[b] = lo + width * static_cast<double>(b);
  edges.back() = hi;
  return edges;
}

std::size_t bin_of(double value, const std::vector<double>& edges) {
  const std::size_t bins = edges.size() - 1;
  const double lo = edges.front();
  const double width = (edges.back() - lo) / static_cast<double>(bins);
  const double pos = (value - lo) / width;
  if (pos <= 0.0) return 0;
  return std::min(static_cast<std::size_t>(pos), bins - 1);
}

}  // namespace

PairHistogram pair_histogram(const zeroshot::SimilarityMatrix& sim, const LabelMap& truth,
                             std::size_t bins) {
  if (bins == 0) throw Error(ErrorCode::out_of_range, "bin count must be at least 1");
  if (sim.rows() == 0 || sim.cols() == 0) throw Error(ErrorCode::empty_input, "empty similarity matrix");
  if (sim.cols() < 2) {
    throw Error(ErrorCode::single_class, "a single candidate label leaves no negative pairs");
  }
  const auto true_col = zeroshot::truth_columns(sim, truth);

  std::vector<double> pos;
  std::vector<double> neg;
  pos.reserve(sim.rows());
  neg.reserve(sim.rows() * (sim.cols() - 1));
  for (std::size_t i = 0; i < sim.rows(); ++i) {
    for (std::size_t k = 0; k < sim.cols(); ++k) {
      (k == true_col[i] ? pos : neg).push_back(sim.at(i, k));
    }
  }
  const auto [lo, hi] = std::minmax_element(sim.values.begin(), sim.values.end());

  PairHistogram h;
  h.bin_edges = uniform_edges(*lo, *hi, bins);
  h.positive_counts.assign(bins, 0);
  h.negative_counts.assign(bins, 0);
  for (double v : pos) ++h.positive_counts[bin_of(v, h.bin_edges)];
  for (double v : neg) ++h.negative_counts[bin_of(v, h.bin_edges)];
  h.positive_pairs = pos.size();
  h.negative_pairs = neg.size();

  const auto np = static_cast<double>(pos.size());
  const auto nn = static_cast<double>(neg.size());
  for (std::size_t b = 0; b < bins; ++b) {
    h.overlap_coefficient += std::min(static_cast<double>(h.positive_counts[b]) / np,
                                      static_cast<double>(h.negative_counts[b]) / nn);
  }
  h.overlap_coefficient = std::clamp(h.overlap_coefficient, 0.0, 1.0);
  h.pooled_pair_auc = zeroshot::mann_whitney_auc(pos, neg);
  return h;
}

LabelEmbeddings class_centroids(const EmbeddingSet& audio, const LabelMap& truth) {
  const std::size_t dim = audio.dim();
  std::map<std::string, std::pair<std::vector<double>, std::size_t>> sums;
  for (const auto& label : truth.classes()) sums[label] = {std::vector<double>(dim, 0.0), 0};

  for (std::size_t i = 0; i < audio.size(); ++i) {
    const std::string* label = truth.find(audio.id(i));
    if (!label) {
      throw Error(ErrorCode::unlabeled_id, "audio id \"" + audio.id(i) + "\" has no label");
    }
    auto& [sum, count] = sums.at(*label);
    const auto row = audio.row(i);
    for (std::size_t j = 0; j < dim; ++j) sum[j] += row[j];
    ++count;
  }

  std::vector<std::string> ids;
  std::vector<float> values;
  ids.reserve(sums.size());
  values.reserve(sums.size() * dim);
  for (const auto& [label, acc] : sums) {
    const auto& [sum, count] = acc;
    if (count == 0) {
      throw Error(ErrorCode::empty_class, "class \"" + label + "\" has no audio recordings");
    }
    bool all_zero = true;
    for (double s : sum) {
      const auto mean = static_cast<float>(s / static_cast<double>(count));
      all_zero = all_zero && mean == 0.0f;
      values.push_back(mean);
    }
    if (all_zero) {
      throw Error(ErrorCode::zero_centroid,
                  "centroid of class \"" + label + "\" is the zero vector");
    }
    ids.push_back(label);
  }
  return EmbeddingSet(std::move(ids), std::move(values), dim);
}

double median(std::vector<double> values) {
  if (values.empty()) throw Error(ErrorCode::empty_input, "median of no values");
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
  const double upper = values[mid];
  if (values.size() % 2 == 1) return upper;
  const double lower = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

MarginReport margins(const zeroshot::SimilarityMatrix& sim, std::size_t bins) {
  if (bins == 0) throw Error(ErrorCode::out_of_range, "bin count must be at least 1");
  if (sim.cols() < 2) {
    throw Error(ErrorCode::too_few_candidates, "margins need at least 2 candidate labels, got " +
                                                   std::to_string(sim.cols()));
  }
  if (sim.rows() == 0) throw Error(ErrorCode::empty_input, "no recordings");

  MarginReport report;
  report.audio_ids = sim.audio_ids;
  report.margins.reserve(sim.rows());
  for (std::size_t i = 0; i < sim.rows(); ++i) {
    const auto row = sim.row(i);
    double best = row[0] >= row[1] ? row[0] : row[1];
    double second = row[0] >= row[1] ? row[1] : row[0];
    for (std::size_t k = 2; k < row.size(); ++k) {
      if (row[k] > best) {
        second = best;
        best = row[k];
      } else if (row[k] > second) {
        second = row[k];
      }
    }
    report.margins.push_back(best - second);
  }
  const double top = *std::max_element(report.margins.begin(), report.margins.end());
  report.bin_edges = uniform_edges(0.0, top, bins);
  report.counts.assign(bins, 0);
  for (double m : report.margins) ++report.counts[bin_of(m, report.bin_edges)];
  report.median_margin = median(report.margins);
  return report;
}

}  // namespace embedaudit::spacelab
