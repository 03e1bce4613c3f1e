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

#include <doctest.h>

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "embedaudit/cli.hpp"
#include "embedaudit/embed_store.hpp"
#include "embedaudit/ontolex.hpp"

using namespace embedaudit;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string test_data(const std::string& name) { return std::string(EMBEDAUDIT_TEST_DATA) + "/" + name; }
std::string fixture(const std::string& name) { return std::string(EMBEDAUDIT_FIXTURE_DATA) + "/" + name; }

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

class Workspace {
 public:
  Workspace() : dir_(fs::temp_directory_path() / ("embedaudit_cli_" + std::to_string(::getpid()) + "_" +
                                                  std::to_string(counter_++))) {
    fs::create_directories(dir_);
  }
  ~Workspace() { fs::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  void write(const std::string& name, const std::string& text) const {
    std::ofstream(path(name), std::ios::binary) << text;
  }

  // Orthogonal class axes, members at the axis with small deterministic
  // jitter. Labels get the exact axes.
  void separable(std::size_t classes, std::size_t per_class, std::size_t dim) const {
    std::mt19937_64 rng(5);
    std::normal_distribution<float> noise(0.0f, 0.05f);
    std::vector<std::string> ids, label_ids;
    std::vector<float> audio, labels;
    std::string csv = "id,label\n";
    for (std::size_t c = 0; c < classes; ++c) {
      label_ids.push_back("class" + std::to_string(c));
      for (std::size_t j = 0; j < dim; ++j) labels.push_back(j == c ? 1.0f : 0.0f);
      for (std::size_t r = 0; r < per_class; ++r) {
        ids.push_back("clip" + std::to_string(c) + "_" + std::to_string(r));
        csv += ids.back() + "," + label_ids.back() + "\n";
        for (std::size_t j = 0; j < dim; ++j) audio.push_back((j == c ? 1.0f : 0.0f) + noise(rng));
      }
    }
    save_embeddings(EmbeddingSet(ids, audio, dim), path("audio.emb"));
    save_embeddings(EmbeddingSet(label_ids, labels, dim), path("labels.emb"));
    write("audio.csv", csv);
  }

 private:
  static inline int counter_ = 0;
  fs::path dir_;
};

}  // namespace

TEST_CASE("validate") {
  auto ok = run({"validate", test_data("golden.emb")});
  CHECK(ok.code == 0);
  CHECK(ok.out.find("3 records, dim 3") != std::string::npos);

  auto truncated = run({"validate", test_data("truncated_record.emb")});
  CHECK(truncated.code == 1);
  CHECK(truncated.err.find("truncated") != std::string::npos);
  CHECK(truncated.err.find("truncated_record.emb") != std::string::npos);

  auto zero = run({"validate", test_data("zero_vector.emb")});
  CHECK(zero.code == 1);
  CHECK(zero.err.find("silent_clip") != std::string::npos);

  CHECK(run({"validate", test_data("missing.emb")}).code == 1);
}

TEST_CASE("usage errors exit with 1, help with 0") {
  CHECK(run({}).code == 1);
  CHECK(run({"frobnicate"}).code == 1);
  CHECK(run({"classify", "--audio", "x.emb"}).code == 1);
  CHECK(run({"--help"}).code == 0);
  CHECK(run({"--version"}).out.find(cli::kToolVersion) != std::string::npos);
}

TEST_CASE("classify on a separable fixture") {
  Workspace ws;
  ws.separable(4, 10, 6);
  const auto r = run({"classify", "--audio", ws.path("audio.emb"), "--audio-labels", ws.path("audio.csv"),
                      "--labels", ws.path("labels.emb"), "--topk", "1,4", "--rankings", "--no-timestamp",
                      "--out", ws.path("report.json")});
  REQUIRE(r.code == 0);
  const auto report = json::parse(slurp(ws.path("report.json")));
  CHECK(report["experiment"] == "classify");
  CHECK(report["results"]["top_k"]["1"] == 1.0);
  CHECK(report["results"]["top_k"]["4"] == 1.0);
  CHECK(report["results"]["roc_auc"] == 1.0);
  CHECK(report["results"]["rankings"].size() == 40);
  CHECK(report["parameters"]["topk"] == json::array({1, 4}));
  CHECK_FALSE(report.contains("timestamp"));
  CHECK(report["inputs"]["audio"]["sha256"].get<std::string>().size() == 64);

  SUBCASE("reports are byte-identical across runs without timestamps") {
    run({"classify", "--audio", ws.path("audio.emb"), "--audio-labels", ws.path("audio.csv"), "--labels",
         ws.path("labels.emb"), "--topk", "1,4", "--rankings", "--no-timestamp", "--out", ws.path("again.json")});
    CHECK(slurp(ws.path("report.json")) == slurp(ws.path("again.json")));
  }
  SUBCASE("timestamp present by default") {
    const auto t = run({"classify", "--audio", ws.path("audio.emb"), "--audio-labels", ws.path("audio.csv"),
                        "--labels", ws.path("labels.emb")});
    REQUIRE(t.code == 0);
    CHECK(json::parse(t.out).contains("timestamp"));
  }
  SUBCASE("k beyond the label count is an input error") {
    const auto t = run({"classify", "--audio", ws.path("audio.emb"), "--audio-labels", ws.path("audio.csv"),
                        "--labels", ws.path("labels.emb"), "--topk", "5"});
    CHECK(t.code == 1);
  }
  SUBCASE("unlabeled audio names the id and file") {
    ws.write("partial.csv", "id,label\nclip0_0,class0\n");
    const auto t = run({"classify", "--audio", ws.path("audio.emb"), "--audio-labels", ws.path("partial.csv"),
                        "--labels", ws.path("labels.emb")});
    CHECK(t.code == 1);
    CHECK(t.err.find("partial.csv") != std::string::npos);
    CHECK(t.err.find("clip0_1") != std::string::npos);
  }
  SUBCASE("extra label rows warn") {
    ws.write("extra.csv", slurp(ws.path("audio.csv")) + "ghost,class0\n");
    const auto t = run({"classify", "--audio", ws.path("audio.emb"), "--audio-labels", ws.path("extra.csv"),
                        "--labels", ws.path("labels.emb")});
    CHECK(t.code == 0);
    CHECK(t.err.find("ghost") != std::string::npos);
  }
}

TEST_CASE("classify with random scores is near chance") {
  Workspace ws;
  std::mt19937_64 rng(9);
  std::normal_distribution<float> g;
  std::vector<std::string> ids;
  std::vector<float> audio;
  std::string csv = "id,label\n";
  for (int i = 0; i < 10000; ++i) {
    ids.push_back("r" + std::to_string(i));
    csv += ids.back() + (i % 2 ? ",B\n" : ",A\n");
    for (int j = 0; j < 8; ++j) audio.push_back(g(rng));
  }
  save_embeddings(EmbeddingSet(ids, audio, 8), ws.path("audio.emb"));
  std::vector<float> labels;
  for (int j = 0; j < 16; ++j) labels.push_back(g(rng));
  save_embeddings(EmbeddingSet({"A", "B"}, labels, 8), ws.path("labels.emb"));
  ws.write("audio.csv", csv);
  const auto r = run({"classify", "--audio", ws.path("audio.emb"), "--audio-labels", ws.path("audio.csv"),
                      "--labels", ws.path("labels.emb"), "--topk", "1,2"});
  REQUIRE(r.code == 0);
  const auto report = json::parse(r.out);
  CHECK(std::abs(report["results"]["roc_auc"].get<double>() - 0.5) <= 0.02);
  CHECK(report["results"]["top_k"]["2"] == 1.0);
}

TEST_CASE("centroids, pairs and margins") {
  Workspace ws;
  ws.separable(3, 8, 5);
  const auto c = run({"centroids", "--audio", ws.path("audio.emb"), "--audio-labels", ws.path("audio.csv"),
                      "--out", ws.path("centroids.emb")});
  REQUIRE(c.code == 0);
  CHECK(run({"validate", ws.path("centroids.emb")}).code == 0);
  CHECK(load_embeddings(ws.path("centroids.emb")).ids() == std::vector<std::string>{"class0", "class1", "class2"});

  const auto cls = run({"classify", "--audio", ws.path("audio.emb"), "--audio-labels", ws.path("audio.csv"),
                        "--labels", ws.path("centroids.emb")});
  REQUIRE(cls.code == 0);
  CHECK(json::parse(cls.out)["results"]["top_k"]["1"] == 1.0);

  const auto p = run({"pairs", "--audio", ws.path("audio.emb"), "--audio-labels", ws.path("audio.csv"),
                      "--labels", ws.path("centroids.emb"), "--bins", "7", "--no-timestamp"});
  REQUIRE(p.code == 0);
  const auto pr = json::parse(p.out)["results"];
  CHECK(pr["bin_edges"].size() == 8);
  CHECK(pr["positive_pairs"] == 24);
  CHECK(pr["negative_pairs"] == 48);
  CHECK(pr["pooled_pair_auc"] == 1.0);
  CHECK(json::parse(p.out)["parameters"]["bins"] == 7);

  const auto m = run({"margins", "--audio", ws.path("audio.emb"), "--labels", ws.path("labels.emb"),
                      "--no-timestamp"});
  REQUIRE(m.code == 0);
  const auto mr = json::parse(m.out)["results"];
  CHECK(mr["margins"].size() == 24);
  CHECK(mr["counts"].size() == 50);
  CHECK(mr["median_margin"].get<double>() > 0.5);

  // A different-dimension (pre-joint style) space needs no extra flags.
  Workspace other;
  other.separable(3, 8, 9);
  const auto pre = run({"classify", "--audio", other.path("audio.emb"), "--audio-labels", other.path("audio.csv"),
                        "--labels", other.path("labels.emb")});
  CHECK(pre.code == 0);
  const auto mismatch = run({"classify", "--audio", other.path("audio.emb"), "--audio-labels",
                             other.path("audio.csv"), "--labels", ws.path("labels.emb")});
  CHECK(mismatch.code == 1);
  CHECK(mismatch.err.find("dimension_mismatch") != std::string::npos);
}

TEST_CASE("triplet generation and scoring") {
  Workspace ws;
  const auto g = run({"triplets-gen", "--ontology", fixture("ontology/tinysol_approx.json"), "--out",
                      ws.path("triplets.csv"), "--report", ws.path("stats.json"), "--no-timestamp"});
  REQUIRE(g.code == 0);
  CHECK(g.out.find("candidate_subsets=364") != std::string::npos);
  const auto stats = json::parse(slurp(ws.path("stats.json")))["results"];
  CHECK(stats["candidate_subsets"] == 364);
  CHECK(stats["retained"].get<std::size_t>() + stats["ambiguous"].get<std::size_t>() +
            stats["root_excluded"].get<std::size_t>() ==
        364);
  std::ifstream csv(ws.path("triplets.csv"));
  const auto triplets = ontolex::read_triplets(csv);
  CHECK(triplets.size() == stats["retained"].get<std::size_t>());

  // Embed each class as the indicator of its ancestors in the fixture tree.
  const auto tree = ontolex::load_ontology(fixture("ontology/tinysol_approx.json"));
  std::vector<std::string> ids;
  std::vector<float> values;
  for (auto leaf : tree.leaves()) {
    ids.push_back(tree.node(leaf).name);
    std::vector<float> v(tree.size(), 0.0f);
    for (std::optional<std::size_t> a = leaf; a && *a != 0; a = tree.node(*a).parent) v[*a] = 1.0f;
    values.insert(values.end(), v.begin(), v.end());
  }
  save_embeddings(EmbeddingSet(ids, values, tree.size()), ws.path("labels.emb"));
  const auto s = run({"triplets-score", "--triplets", ws.path("triplets.csv"), "--labels", ws.path("labels.emb"),
                      "--verdicts", "--no-timestamp"});
  REQUIRE(s.code == 0);
  const auto sr = json::parse(s.out)["results"];
  CHECK(sr["total"] == triplets.size());
  CHECK(sr["verdicts"].size() == triplets.size());
  CHECK(sr["accuracy"].get<double>() >= 0.0);
  CHECK(sr["accuracy"].get<double>() <= 1.0);

  ws.write("restrict.txt", "Violin\nViola\nOboe\nmissing\n");
  const auto bad = run({"triplets-gen", "--ontology", fixture("ontology/tinysol_approx.json"), "--restrict",
                        ws.path("restrict.txt"), "--out", ws.path("t2.csv")});
  CHECK(bad.code == 1);
  CHECK(bad.err.find("missing") != std::string::npos);
}

TEST_CASE("prompt manifests") {
  Workspace ws;
  const auto classes = fixture("prompts/tinysol_classes.txt");
  const auto r = run({"prompts", "--classes", classes, "--templates", fixture("prompts/templates.txt"), "--out",
                      ws.path("m.json")});
  REQUIRE(r.code == 0);
  const auto m = json::parse(slurp(ws.path("m.json")))["entries"];
  REQUIRE(m.size() == 4 * 14);
  CHECK(m[14]["prompt"] == "A Accordion track");
  CHECK(m[14]["provenance"] == "template:A {label} track");

  const auto s = run({"prompts", "--classes", classes, "--definitions", fixture("prompts/definitions_standin.csv"),
                      "--strip-label"});
  REQUIRE(s.code == 0);
  for (const auto& e : json::parse(s.out)["entries"]) {
    CHECK(e["provenance"] == "definition+strip_label");
    CHECK(e["prompt"].get<std::string>().starts_with("The is"));
  }

  auto random = [&] {
    return run({"prompts", "--classes", classes, "--random-context", "6", "--word-pool",
                fixture("prompts/lorem_pool.txt"), "--seed", "3"});
  };
  const auto a = random(), b = random();
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(json::parse(a.out)["entries"].size() == 14);

  CHECK(run({"prompts", "--classes", classes}).code == 1);
  CHECK(run({"prompts", "--classes", classes, "--random-context", "3"}).code == 1);
}
