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

#include "embedaudit/cli.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <chrono>
#include <ctime>
#include <fstream>
#include <functional>
#include <iomanip>
#include <memory>
#include <sstream>

#include <CLI11.hpp>

#include "embedaudit/embed_store.hpp"
#include "embedaudit/error.hpp"
#include "embedaudit/ontolex.hpp"
#include "embedaudit/promptgen.hpp"
#include "embedaudit/spacelab.hpp"
#include "embedaudit/text.hpp"
#include "embedaudit/zeroshot.hpp"

namespace embedaudit::cli {

using nlohmann::json;

nlohmann::json AuditReport::to_json() const {
  json j;
  j["tool"] = "embedaudit";
  j["tool_version"] = kToolVersion;
  j["experiment"] = experiment;
  json in = json::object();
  for (const auto& [role, file] : inputs) in[role] = {{"path", file.path}, {"sha256", file.sha256}};
  j["inputs"] = in;
  j["parameters"] = parameters;
  j["results"] = results;
  if (timestamp) j["timestamp"] = *timestamp;
  return j;
}

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io, path.string() + ": cannot open for reading");
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 initialisation failed");
  }
  std::array<char, 1 << 16> buf{};
  while (in) {
    in.read(buf.data(), buf.size());
    if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), md.data(), &len);
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i) {
    hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
  }
  return hex.str();
}

namespace {

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::array<char, 32> buf{};
  std::strftime(buf.data(), buf.size(), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf.data();
}

// Runs `fn`, prefixing any input error with the file it concerns.
template <typename Fn>
auto in_context(const std::string& path, Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    throw e.with_context(path);
  }
}

std::ifstream open_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io, path + ": cannot open for reading");
  return in;
}

template <typename T, typename Reader>
T read_text_file(const std::string& path, Reader reader) {
  auto in = open_text(path);
  return in_context(path, [&] { return reader(in); });
}

void emit(const std::string& text, const std::string& out_path, std::ostream& out) {
  if (out_path.empty()) {
    out << text;
    return;
  }
  std::ofstream file(out_path, std::ios::binary | std::ios::trunc);
  if (!file) throw Error(ErrorCode::io, out_path + ": cannot open for writing");
  file << text;
  if (!file.flush()) throw Error(ErrorCode::io, out_path + ": write failed");
}

void print_warnings(const std::vector<std::string>& warnings, std::ostream& err) {
  for (const auto& w : warnings) err << "warning: " << w << '\n';
}

struct Common {
  std::string out;
  bool no_timestamp = false;
};

class Reporter {
 public:
  Reporter(std::string experiment, const Common& common) : common_(common) {
    report_.experiment = std::move(experiment);
    if (!common.no_timestamp) report_.timestamp = utc_timestamp();
  }

  void input(const std::string& role, const std::string& path) {
    report_.inputs[role] = {path, sha256_file(path)};
  }
  json& parameters() { return report_.parameters; }
  json& results() { return report_.results; }

  void finish(std::ostream& out) const { emit(report_.to_json().dump(2) + "\n", common_.out, out); }

 private:
  const Common& common_;
  AuditReport report_;
};

// --- embedding-level helpers -------------------------------------------------

struct Loaded {
  EmbeddingSet audio;
  LabelMap truth;
  std::vector<std::string> warnings;
};

Loaded load_labeled_audio(const std::string& audio_path, const std::string& labels_path) {
  auto audio = load_embeddings(audio_path);
  auto truth = load_label_map(labels_path);
  auto aligned = in_context(labels_path, [&] { return align(audio, truth); });
  return {std::move(audio), std::move(truth), std::move(aligned.warnings)};
}

zeroshot::SimilarityMatrix similarity(const EmbeddingSet& audio, const LabelEmbeddings& labels,
                                      const std::string& labels_path) {
  return in_context(labels_path, [&] { return zeroshot::similarity_matrix(audio, labels); });
}

json histogram_json(const std::vector<double>& edges) { return json(edges); }

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"embedaudit: audit joint audio-text embedding spaces"};
  app.name("embedaudit");
  app.set_version_flag("--version", std::string(kToolVersion));
  app.require_subcommand(1);

  Common common;
  auto add_common = [&](CLI::App* sub, bool report) {
    sub->add_option("--out", common.out, report ? "Report path (default: stdout)" : "Output path");
    if (report) {
      sub->add_flag("--no-timestamp", common.no_timestamp, "Omit the timestamp field");
    }
  };

  std::function<void()> action;

  // validate
  std::string validate_path;
  auto* validate = app.add_subcommand("validate", "Check an EMB1 embedding file");
  validate->add_option("embeddings", validate_path, "EMB1 file")->required();
  validate->callback([&] {
    action = [&] {
      const auto set = load_embeddings(validate_path);
      out << "ok: " << validate_path << ": " << set.size() << " records, dim " << set.dim() << '\n';
    };
  });

  // classify
  std::string audio_path, audio_labels_path, labels_path;
  std::vector<std::size_t> ks{1, 2, 3};
  bool with_rankings = false;
  auto* classify = app.add_subcommand("classify", "Zero-shot classification metrics");
  classify->add_option("--audio", audio_path, "Audio embeddings (EMB1)")->required();
  classify->add_option("--audio-labels", audio_labels_path, "Ground truth CSV id,label")->required();
  classify->add_option("--labels", labels_path, "Label embeddings (EMB1)")->required();
  classify->add_option("--topk", ks, "k values, comma separated")->delimiter(',');
  classify->add_flag("--rankings", with_rankings, "Include per-recording rankings");
  add_common(classify, true);
  classify->callback([&] {
    action = [&] {
      Reporter rep("classify", common);
      rep.input("audio", audio_path);
      rep.input("audio_labels", audio_labels_path);
      rep.input("labels", labels_path);
      auto data = load_labeled_audio(audio_path, audio_labels_path);
      const auto labels = load_embeddings(labels_path);
      const auto sim = similarity(data.audio, labels, labels_path);
      const auto report = in_context(audio_labels_path, [&] { return zeroshot::evaluate(sim, data.truth, ks); });
      print_warnings(data.warnings, err);

      rep.parameters() = {{"topk", ks}, {"rankings", with_rankings}};
      json& r = rep.results();
      r["recordings"] = sim.rows();
      r["classes"] = sim.cols();
      json top = json::object();
      for (const auto& [k, acc] : report.top_k) top[std::to_string(k)] = acc;
      r["top_k"] = top;
      r["roc_auc"] = report.auc.roc_auc;
      r["pr_auc"] = report.auc.pr_auc;
      json per_class = json::object();
      for (const auto& [label, c] : report.auc.per_class) {
        per_class[label] = {{"roc_auc", c.roc_auc}, {"pr_auc", c.pr_auc},
                            {"positives", c.positives}, {"negatives", c.negatives}};
      }
      r["per_class"] = per_class;
      r["skipped_classes"] = report.auc.skipped;
      r["warnings"] = data.warnings;
      if (with_rankings) {
        json rankings = json::array();
        for (const auto& c : report.rankings) {
          rankings.push_back({{"id", c.audio_id}, {"predicted", c.predicted}, {"ranking", c.ranking}});
        }
        r["rankings"] = rankings;
      }
      rep.finish(out);
    };
  });

  // centroids
  auto* centroids = app.add_subcommand("centroids", "Per-class mean audio embeddings as labels");
  centroids->add_option("--audio", audio_path, "Audio embeddings (EMB1)")->required();
  centroids->add_option("--audio-labels", audio_labels_path, "Ground truth CSV id,label")->required();
  centroids->add_option("--out", common.out, "Output EMB1 path")->required();
  centroids->callback([&] {
    action = [&] {
      const auto data = load_labeled_audio(audio_path, audio_labels_path);
      print_warnings(data.warnings, err);
      const auto result = in_context(audio_labels_path, [&] {
        return spacelab::class_centroids(data.audio, data.truth);
      });
      save_embeddings(result, common.out);
      out << "wrote " << result.size() << " centroids of dim " << result.dim() << " to "
          << common.out << '\n';
    };
  });

  // pairs
  std::size_t bins = spacelab::kDefaultBins;
  auto* pairs = app.add_subcommand("pairs", "Positive/negative pair similarity histograms");
  pairs->add_option("--audio", audio_path, "Audio embeddings (EMB1)")->required();
  pairs->add_option("--audio-labels", audio_labels_path, "Ground truth CSV id,label")->required();
  pairs->add_option("--labels", labels_path, "Label embeddings (EMB1)")->required();
  pairs->add_option("--bins", bins, "Histogram bins")->check(CLI::PositiveNumber);
  add_common(pairs, true);
  pairs->callback([&] {
    action = [&] {
      Reporter rep("pairs", common);
      rep.input("audio", audio_path);
      rep.input("audio_labels", audio_labels_path);
      rep.input("labels", labels_path);
      const auto data = load_labeled_audio(audio_path, audio_labels_path);
      const auto labels = load_embeddings(labels_path);
      const auto sim = similarity(data.audio, labels, labels_path);
      const auto h = in_context(audio_labels_path, [&] { return spacelab::pair_histogram(sim, data.truth, bins); });
      print_warnings(data.warnings, err);
      rep.parameters() = {{"bins", bins}};
      rep.results() = {{"bin_edges", histogram_json(h.bin_edges)},
                       {"positive_counts", h.positive_counts},
                       {"negative_counts", h.negative_counts},
                       {"positive_pairs", h.positive_pairs},
                       {"negative_pairs", h.negative_pairs},
                       {"overlap_coefficient", h.overlap_coefficient},
                       {"pooled_pair_auc", h.pooled_pair_auc},
                       {"warnings", data.warnings}};
      rep.finish(out);
    };
  });

  // margins
  auto* margins = app.add_subcommand("margins", "Top-2 similarity margins per recording");
  margins->add_option("--audio", audio_path, "Audio embeddings (EMB1)")->required();
  margins->add_option("--labels", labels_path, "Label embeddings (EMB1)")->required();
  margins->add_option("--bins", bins, "Histogram bins")->check(CLI::PositiveNumber);
  add_common(margins, true);
  margins->callback([&] {
    action = [&] {
      Reporter rep("margins", common);
      rep.input("audio", audio_path);
      rep.input("labels", labels_path);
      const auto audio = load_embeddings(audio_path);
      const auto labels = load_embeddings(labels_path);
      const auto sim = similarity(audio, labels, labels_path);
      const auto m = in_context(labels_path, [&] { return spacelab::margins(sim, bins); });
      json per = json::array();
      for (std::size_t i = 0; i < m.margins.size(); ++i) {
        per.push_back({{"id", m.audio_ids[i]}, {"margin", m.margins[i]}});
      }
      rep.parameters() = {{"bins", bins}};
      rep.results() = {{"bin_edges", histogram_json(m.bin_edges)},
                       {"counts", m.counts},
                       {"median_margin", m.median_margin},
                       {"margins", per}};
      rep.finish(out);
    };
  });

  // triplets-gen
  std::string ontology_path, restrict_path, report_path;
  bool include_internal = false;
  auto* tgen = app.add_subcommand("triplets-gen", "Generate ontology triplets");
  tgen->add_option("--ontology", ontology_path, "Ontology tree (JSON)")->required();
  tgen->add_option("--restrict", restrict_path, "Candidate names, one per line");
  tgen->add_flag("--include-internal", include_internal, "Use every non-root node as a candidate");
  tgen->add_option("--out", common.out, "Triplet CSV path")->required();
  tgen->add_option("--report", report_path, "Also write the statistics report here");
  tgen->add_flag("--no-timestamp", common.no_timestamp, "Omit the timestamp field");
  tgen->callback([&] {
    action = [&] {
      Common report_common{report_path, common.no_timestamp};
      Reporter rep("triplets-gen", report_common);
      rep.input("ontology", ontology_path);
      const auto tree = ontolex::load_ontology(ontology_path);
      std::optional<std::vector<std::string>> restriction;
      if (!restrict_path.empty()) {
        rep.input("restrict", restrict_path);
        restriction = read_text_file<std::vector<std::string>>(
            restrict_path, [](std::istream& in) { return promptgen::read_classes(in); });
      }
      const auto set = in_context(ontology_path, [&] {
        return ontolex::generate_triplets(tree, restriction, include_internal);
      });
      std::ostringstream csv_text;
      ontolex::write_triplets(set.triplets, csv_text);
      emit(csv_text.str(), common.out, out);

      rep.parameters() = {{"include_internal", include_internal},
                          {"restrict", !restrict_path.empty()},
                          {"similarity", "tree_path_distance"}};
      rep.results() = {{"candidates", set.stats.candidates},
                       {"candidate_subsets", set.stats.candidate_subsets},
                       {"ambiguous", set.stats.ambiguous},
                       {"root_excluded", set.stats.root_excluded},
                       {"retained", set.stats.retained},
                       {"triplets_csv", common.out}};
      // The summary line always reaches stdout; --report adds the full report.
      if (!report_path.empty()) rep.finish(out);
      out << "candidates=" << set.stats.candidates
          << " candidate_subsets=" << set.stats.candidate_subsets
          << " ambiguous=" << set.stats.ambiguous << " root_excluded=" << set.stats.root_excluded
          << " retained=" << set.stats.retained << '\n';
    };
  });

  // triplets-score
  std::string triplets_path;
  bool with_verdicts = false;
  auto* tscore = app.add_subcommand("triplets-score", "Triplet accuracy of label embeddings");
  tscore->add_option("--triplets", triplets_path, "Triplet CSV")->required();
  tscore->add_option("--labels", labels_path, "Label embeddings (EMB1)")->required();
  tscore->add_flag("--verdicts", with_verdicts, "Include per-triplet verdicts");
  add_common(tscore, true);
  tscore->callback([&] {
    action = [&] {
      Reporter rep("triplets-score", common);
      rep.input("triplets", triplets_path);
      rep.input("labels", labels_path);
      const auto triplets = read_text_file<std::vector<ontolex::Triplet>>(
          triplets_path, [](std::istream& in) { return ontolex::read_triplets(in); });
      const auto labels = load_embeddings(labels_path);
      const auto score = in_context(labels_path, [&] { return ontolex::triplet_accuracy(triplets, labels); });
      rep.parameters() = {{"verdicts", with_verdicts}};
      json& r = rep.results();
      r["accuracy"] = score.accuracy;
      r["correct"] = score.correct;
      r["total"] = score.verdicts.size();
      if (with_verdicts) {
        json verdicts = json::array();
        for (const auto& v : score.verdicts) {
          verdicts.push_back({{"anchor", v.triplet.anchor}, {"positive", v.triplet.positive},
                              {"negative", v.triplet.negative},
                              {"anchor_positive", v.anchor_positive},
                              {"anchor_negative", v.anchor_negative}, {"correct", v.correct}});
        }
        r["verdicts"] = verdicts;
      }
      rep.finish(out);
    };
  });

  // prompts
  std::string classes_path, templates_path, definitions_path, pool_path;
  bool strip = false;
  std::size_t context_words = 0;
  std::uint64_t seed = 0;
  auto* prompts = app.add_subcommand("prompts", "Build a prompt manifest");
  prompts->add_option("--classes", classes_path, "Class labels, one per line")->required();
  prompts->add_option("--templates", templates_path, "Templates with {label}, one per line");
  prompts->add_option("--definitions", definitions_path, "CSV label,definition");
  prompts->add_flag("--strip-label", strip, "Remove label words from template and definition prompts");
  prompts->add_option("--random-context", context_words, "Add label + N random pool words per class");
  prompts->add_option("--word-pool", pool_path, "Whitespace-separated word pool");
  prompts->add_option("--seed", seed, "Seed for --random-context");
  add_common(prompts, false);
  prompts->callback([&] {
    action = [&] {
      const auto classes = read_text_file<std::vector<std::string>>(
          classes_path, [](std::istream& in) { return promptgen::read_classes(in); });
      promptgen::Warnings warnings;
      promptgen::PromptManifest manifest;

      if (!templates_path.empty()) {
        const auto templates = read_text_file<std::vector<promptgen::PromptTemplate>>(
            templates_path, [](std::istream& in) { return promptgen::read_templates(in); });
        for (const auto& t : templates) {
          auto part = promptgen::expand(t, classes, "template:" + t.pattern, &warnings);
          manifest.entries.insert(manifest.entries.end(), part.entries.begin(), part.entries.end());
        }
      }
      if (!definitions_path.empty()) {
        auto defs = read_text_file<std::vector<promptgen::PromptEntry>>(
            definitions_path, [](std::istream& in) { return promptgen::read_definitions(in); });
        for (const auto& d : defs) {
          if (std::find(classes.begin(), classes.end(), d.label) == classes.end()) {
            throw Error(ErrorCode::unknown_label, definitions_path + ": definition for \"" +
                                                      d.label + "\" which is not a listed class");
          }
        }
        manifest.entries.insert(manifest.entries.end(), defs.begin(), defs.end());
      }
      if (strip) {
        for (auto& e : manifest.entries) {
          e.prompt = promptgen::strip_label(e.prompt, e.label, &warnings);
          e.provenance += "+strip_label";
          if (e.prompt.empty()) {
            throw Error(ErrorCode::empty_field,
                        "prompt for \"" + e.label + "\" is empty after label stripping");
          }
        }
      }
      if (context_words > 0) {
        if (pool_path.empty()) {
          throw Error(ErrorCode::empty_pool, "--random-context needs --word-pool");
        }
        const auto pool = read_text_file<std::vector<std::string>>(
            pool_path, [](std::istream& in) { return promptgen::read_word_pool(in); });
        for (std::size_t i = 0; i < classes.size(); ++i) {
          const std::uint64_t class_seed = seed + i;
          manifest.entries.push_back(
              {classes[i], promptgen::random_context(classes[i], pool, context_words, class_seed),
               "random_context:count=" + std::to_string(context_words) +
                   ",seed=" + std::to_string(class_seed)});
        }
      }
      if (manifest.entries.empty()) {
        throw Error(ErrorCode::empty_input,
                    "no prompt source: give --templates, --definitions or --random-context");
      }
      print_warnings(warnings, err);
      std::ostringstream text;
      promptgen::write_manifest(manifest, text);
      emit(text.str(), common.out, out);
    };
  });

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kInputError;
  }

  try {
    if (action) action();
    return kOk;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kInternalError;
  }
}

}  // namespace embedaudit::cli
