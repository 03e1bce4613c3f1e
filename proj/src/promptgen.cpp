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

#include "embedaudit/promptgen.hpp"

#include <iterator>
#include <random>
#include <sstream>

#include <json.hpp>

#include "embedaudit/error.hpp"
#include "embedaudit/text.hpp"

namespace embedaudit::promptgen {
namespace {

bool is_word_char(char c) {
  const auto u = static_cast<unsigned char>(c);
  return u >= 0x80 || u == '_' || (u >= '0' && u <= '9') || (u >= 'a' && u <= 'z') ||
         (u >= 'A' && u <= 'Z');
}

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

std::vector<std::string> split_whitespace(std::string_view text) {
  std::vector<std::string> out;
  std::istringstream in{std::string(text)};
  for (std::string w; in >> w;) out.push_back(std::move(w));
  return out;
}

// Removes whole-word, case-insensitive occurrences of `word`. Returns the
// number removed.
std::size_t remove_word(std::string& text, const std::string& word) {
  const std::string lowered = ascii_lower(text);
  const std::string needle = ascii_lower(word);
  std::string out;
  out.reserve(text.size());
  std::size_t removed = 0;
  std::size_t i = 0;
  while (i < text.size()) {
    const bool here = lowered.compare(i, needle.size(), needle) == 0 &&
                      (i == 0 || !is_word_char(text[i - 1])) &&
                      (i + needle.size() == text.size() || !is_word_char(text[i + needle.size()]));
    if (here) {
      i += needle.size();
      ++removed;
    } else {
      out.push_back(text[i++]);
    }
  }
  text = std::move(out);
  return removed;
}

std::string collapse_whitespace(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  for (char c : text) {
    if (is_space(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(c);
  }
  return out;
}

std::vector<std::string> read_nonblank_lines(std::istream& in) {
  std::vector<std::string> out;
  for (std::string line; std::getline(in, line);) {
    const auto t = trim(line);
    if (!t.empty()) out.emplace_back(t);
  }
  return out;
}

}  // namespace

PromptManifest expand(const PromptTemplate& tmpl, const std::vector<std::string>& classes,
                      const std::string& provenance, Warnings* warnings) {
  if (tmpl.pattern.empty()) throw Error(ErrorCode::empty_input, "empty prompt template");
  if (classes.empty()) throw Error(ErrorCode::empty_input, "no classes to expand");
  if (warnings && tmpl.pattern.find(kPlaceholder) == std::string::npos) {
    warnings->push_back("template \"" + tmpl.pattern + "\" has no " + std::string(kPlaceholder) +
                        " placeholder");
  }
  PromptManifest manifest;
  manifest.entries.reserve(classes.size());
  for (const auto& label : classes) {
    std::string prompt;
    std::string_view rest = tmpl.pattern;
    for (auto at = rest.find(kPlaceholder); at != std::string_view::npos;
         at = rest.find(kPlaceholder)) {
      prompt.append(rest.substr(0, at)).append(label);
      rest.remove_prefix(at + kPlaceholder.size());
    }
    prompt.append(rest);
    manifest.entries.push_back({label, std::move(prompt), provenance});
  }
  return manifest;
}

std::string strip_label(std::string_view text, std::string_view label, Warnings* warnings) {
  std::string out(text);
  const auto words = split_whitespace(label);
  std::size_t removed = 0;
  // Repeat until stable: a removal can expose a fresh whole-word match.
  for (bool changed = !words.empty(); changed;) {
    changed = false;
    for (const auto& w : words) {
      const std::size_t n = remove_word(out, w);
      removed += n;
      changed = changed || n > 0;
    }
  }
  if (warnings && removed == 0) {
    warnings->push_back("label \"" + std::string(label) + "\" does not occur in \"" +
                        std::string(text) + "\"");
  }
  return collapse_whitespace(out);
}

std::string random_context(std::string_view label, const std::vector<std::string>& word_pool,
                           std::size_t count, std::uint64_t seed) {
  if (word_pool.empty()) throw Error(ErrorCode::empty_pool, "random context word pool is empty");
  if (count == 0) throw Error(ErrorCode::out_of_range, "random context word count must be positive");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, word_pool.size() - 1);
  std::string out(label);
  for (std::size_t i = 0; i < count; ++i) out.append(" ").append(word_pool[pick(rng)]);
  return out;
}

std::vector<PromptTemplate> read_templates(std::istream& in) {
  std::vector<PromptTemplate> out;
  for (auto& line : read_nonblank_lines(in)) out.push_back({std::move(line)});
  if (out.empty()) throw Error(ErrorCode::empty_input, "template file has no templates");
  return out;
}

std::vector<std::string> read_word_pool(std::istream& in) {
  std::string all{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  auto words = split_whitespace(all);
  if (words.empty()) throw Error(ErrorCode::empty_pool, "word pool file has no words");
  return words;
}

std::vector<std::string> read_classes(std::istream& in) {
  auto classes = read_nonblank_lines(in);
  if (classes.empty()) throw Error(ErrorCode::empty_input, "class list is empty");
  for (std::size_t i = 0; i < classes.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (classes[i] == classes[j]) {
        throw Error(ErrorCode::duplicate_id, "class \"" + classes[i] + "\" listed twice");
      }
    }
  }
  return classes;
}

std::vector<PromptEntry> read_definitions(std::istream& in) {
  const auto rows = csv::parse(in);
  if (rows.empty() || rows.front() != csv::Row{"label", "definition"}) {
    throw Error(ErrorCode::missing_header, "expected header \"label,definition\"");
  }
  std::vector<PromptEntry> out;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& r = rows[i];
    if (r.size() != 2) {
      throw Error(ErrorCode::malformed_csv, "row " + std::to_string(i) + " has " +
                                                std::to_string(r.size()) + " fields, expected 2");
    }
    if (r[0].empty() || trim(r[1]).empty()) {
      throw Error(ErrorCode::empty_field, "row " + std::to_string(i) + " has an empty field");
    }
    out.push_back({r[0], r[1], "definition"});
  }
  return out;
}

void write_manifest(const PromptManifest& manifest, std::ostream& out) {
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& e : manifest.entries) {
    entries.push_back({{"class", e.label}, {"prompt", e.prompt}, {"provenance", e.provenance}});
  }
  out << nlohmann::json{{"entries", entries}}.dump(2) << '\n';
}

PromptManifest read_manifest(std::istream& in) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::malformed_manifest, std::string("invalid manifest JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("entries") || !doc["entries"].is_array()) {
    throw Error(ErrorCode::malformed_manifest, "manifest needs an \"entries\" array");
  }
  PromptManifest manifest;
  for (const auto& e : doc["entries"]) {
    if (!e.is_object() || !e.value("class", nlohmann::json()).is_string() ||
        !e.value("prompt", nlohmann::json()).is_string() ||
        !e.value("provenance", nlohmann::json()).is_string()) {
      throw Error(ErrorCode::malformed_manifest, "manifest entry needs string class, prompt, provenance");
    }
    PromptEntry entry{e["class"], e["prompt"], e["provenance"]};
    if (entry.label.empty() || entry.prompt.empty()) {
      throw Error(ErrorCode::empty_field, "manifest entry with an empty class or prompt");
    }
    manifest.entries.push_back(std::move(entry));
  }
  return manifest;
}

}  // namespace embedaudit::promptgen
