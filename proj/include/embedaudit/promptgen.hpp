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

// Prompt families for zero-shot evaluation: template expansion, label
// stripping, and label-plus-random-context prompts.

#include <cstdint>
#include <filesystem>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace embedaudit::promptgen {

inline constexpr std::string_view kPlaceholder = "{label}";

struct PromptTemplate {
  std::string pattern;
};

struct PromptEntry {
  std::string label;
  std::string prompt;
  std::string provenance;  // template / transform chain that produced the prompt

  friend bool operator==(const PromptEntry&, const PromptEntry&) = default;
};

struct PromptManifest {
  std::vector<PromptEntry> entries;
};

using Warnings = std::vector<std::string>;

/// Substitutes each class into every `{label}`, in class order. A template
/// without a placeholder is copied verbatim and a warning is recorded.
PromptManifest expand(const PromptTemplate& tmpl, const std::vector<std::string>& classes,
                      const std::string& provenance = "template", Warnings* warnings = nullptr);

/// Removes every case-insensitive whole-word occurrence of the label and of
/// each of its words, then collapses whitespace runs to one space and trims.
std::string strip_label(std::string_view text, std::string_view label,
                        Warnings* warnings = nullptr);

/// The label followed by `count` words drawn uniformly, with replacement,
/// from the pool. Deterministic for a given seed.
std::string random_context(std::string_view label, const std::vector<std::string>& word_pool,
                           std::size_t count, std::uint64_t seed);

// Input files.
std::vector<PromptTemplate> read_templates(std::istream& in);  // one per non-blank line
std::vector<std::string> read_word_pool(std::istream& in);     // whitespace separated
std::vector<std::string> read_classes(std::istream& in);       // one per non-blank line
/// CSV `label,definition`, returned in file order.
std::vector<PromptEntry> read_definitions(std::istream& in);

/// JSON: {"entries": [{"class": ..., "prompt": ..., "provenance": ...}, ...]}
void write_manifest(const PromptManifest& manifest, std::ostream& out);
PromptManifest read_manifest(std::istream& in);

}  // namespace embedaudit::promptgen
