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

#include <stdexcept>
#include <string>
#include <string_view>

namespace embedaudit {

/// Every rejected input maps to exactly one of these codes.
enum class ErrorCode {
  io,
  bad_magic,
  truncated,
  length_mismatch,
  zero_dimension,
  duplicate_id,
  empty_id,
  invalid_utf8,
  id_too_long,
  non_finite,
  zero_vector,
  dimension_mismatch,
  missing_header,
  empty_field,
  malformed_csv,
  unlabeled_id,
  unknown_label,
  empty_input,
  out_of_range,
  single_class,
  zero_centroid,
  empty_class,
  malformed_ontology,
  duplicate_name,
  empty_name,
  unknown_name,
  too_few_candidates,
  missing_embedding,
  ambiguous_id,
  empty_pool,
  malformed_manifest,
};

/// Stable snake_case name of a code, used verbatim in diagnostics.
std::string_view error_name(ErrorCode code);

/// An input or validation failure. Messages read "<name>: <detail>".
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail);

  ErrorCode code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }

  /// Same code, detail prefixed with context (typically a file path).
  Error with_context(const std::string& context) const;

 private:
  ErrorCode code_;
  std::string detail_;
};

}  // namespace embedaudit
