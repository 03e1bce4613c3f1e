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

#include <random>
#include <set>
#include <sstream>

#include "embedaudit/error.hpp"
#include "embedaudit/promptgen.hpp"

using namespace embedaudit;
using namespace embedaudit::promptgen;

namespace {

bool has_whole_word(const std::string& text, const std::string& word) {
  auto lower = [](std::string s) {
    for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
  };
  auto is_word = [](char c) {
    const auto u = static_cast<unsigned char>(c);
    return u >= 0x80 || std::isalnum(u) || c == '_';
  };
  const std::string t = lower(text), w = lower(word);
  for (std::size_t at = t.find(w); at != std::string::npos; at = t.find(w, at + 1)) {
    const bool left = at == 0 || !is_word(t[at - 1]);
    const bool right = at + w.size() == t.size() || !is_word(t[at + w.size()]);
    if (left && right) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("expand substitutes every placeholder") {
  CHECK(expand({"A {label} track"}, {"violin"}).entries[0].prompt == "A violin track");
  CHECK(expand({"{label}"}, {"flute"}).entries[0].prompt == "flute");
  CHECK(expand({"{label} and {label}"}, {"oboe"}).entries[0].prompt == "oboe and oboe");

  Warnings w;
  const auto m = expand({"A static track"}, {"violin"}, "template", &w);
  CHECK(m.entries[0].prompt == "A static track");
  CHECK(w.size() == 1);

  const std::vector<std::string> classes{"violin", "flute", "oboe"};
  const auto many = expand({"Solo musical instrument sound of a {label}"}, classes, "t6");
  REQUIRE(many.entries.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(many.entries[i].label == classes[i]);
    CHECK(many.entries[i].provenance == "t6");
  }
  CHECK_THROWS_AS(expand({"x {label}"}, {}), Error);
  CHECK_THROWS_AS(expand({""}, {"violin"}), Error);
}

TEST_CASE("strip_label examples") {
  CHECK(strip_label("The violin is a bowed string instrument", "violin") ==
        "The is a bowed string instrument");
  CHECK(strip_label("Violin, the violin!", "violin") == ", the !");
  CHECK(strip_label("The violinist plays", "violin") == "The violinist plays");
  CHECK(strip_label("The French horn is a coiled horn", "French Horn") == "The is a coiled");

  Warnings w;
  CHECK(strip_label("A flute track", "violin", &w) == "A flute track");
  CHECK(w.size() == 1);
}

TEST_CASE("strip_label never leaves the label or double spaces") {
  const std::vector<std::string> vocab{"violin", "Violin", "VIOLIN", "the", "a", "bowed", "string",
                                       ",", "!", "-", "  ", "\t", "violinist", "cello", "french",
                                       "horn", "French", "_", "é", "."};
  const std::vector<std::string> labels{"violin", "french horn", "cello", "a", "string"};
  std::mt19937_64 rng(1000);
  std::uniform_int_distribution<std::size_t> word(0, vocab.size() - 1), len(0, 14), lab(0, labels.size() - 1);
  std::uniform_int_distribution<int> glue(0, 3);
  for (int trial = 0; trial < 1000; ++trial) {
    std::string text;
    for (std::size_t i = len(rng); i > 0; --i) {
      text += vocab[word(rng)];
      if (glue(rng) != 0) text += ' ';
    }
    const auto& label = labels[lab(rng)];
    const auto out = strip_label(text, label);
    CAPTURE(text);
    CAPTURE(label);
    std::istringstream words(label);
    for (std::string w; words >> w;) CHECK_FALSE(has_whole_word(out, w));
    CHECK(out.find("  ") == std::string::npos);
    CHECK(out.find('\t') == std::string::npos);
    if (!out.empty()) {
      CHECK(out.front() != ' ');
      CHECK(out.back() != ' ');
    }
  }
}

TEST_CASE("random_context") {
  CHECK(random_context("violin", {"lorem"}, 3, 123) == "violin lorem lorem lorem");

  const std::vector<std::string> pool{"lorem", "ipsum", "dolor", "sit", "amet",
                                      "consectetur", "adipiscing", "elit", "sed", "do"};
  const auto a = random_context("flute", pool, 5, 7);
  CHECK(a == random_context("flute", pool, 5, 7));
  CHECK(a.starts_with("flute "));
  std::istringstream in(a.substr(6));
  std::size_t n = 0;
  for (std::string w; in >> w; ++n) CHECK(std::find(pool.begin(), pool.end(), w) != pool.end());
  CHECK(n == 5);

  std::set<std::string> distinct;
  for (std::uint64_t seed = 0; seed < 100; ++seed) distinct.insert(random_context("flute", pool, 5, seed));
  CHECK(distinct.size() > 50);

  CHECK_THROWS_AS(random_context("flute", {}, 3, 1), Error);
  CHECK_THROWS_AS(random_context("flute", pool, 0, 1), Error);
}

TEST_CASE("input files") {
  std::istringstream templates("{label}\n\nA {label} track\n");
  CHECK(read_templates(templates).size() == 2);
  std::istringstream pool("lorem ipsum\n dolor\tsit\n");
  CHECK(read_word_pool(pool) == std::vector<std::string>{"lorem", "ipsum", "dolor", "sit"});
  std::istringstream dup("violin\nviolin\n");
  CHECK_THROWS_AS(read_classes(dup), Error);
  std::istringstream defs("label,definition\nViolin,\"The violin is small, and loud.\"\n");
  const auto d = read_definitions(defs);
  REQUIRE(d.size() == 1);
  CHECK(d[0].prompt == "The violin is small, and loud.");
  CHECK(d[0].provenance == "definition");
}

TEST_CASE("manifest json") {
  PromptManifest m{{{"Violin", "A Violin track", "template:A {label} track"}, {"Flute", "flute \"x\"", "p"}}};
  std::stringstream buf;
  write_manifest(m, buf);
  const auto back = read_manifest(buf);
  CHECK(back.entries == m.entries);
  std::istringstream bad(R"({"entries":[{"class":"x"}]})");
  CHECK_THROWS_AS(read_manifest(bad), Error);
}
