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

#include "embedaudit/error.hpp"

namespace embedaudit {

std::string_view error_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::io: return "io";
    case ErrorCode::bad_magic: return "bad_magic";
    case ErrorCode::truncated: return "truncated";
    case ErrorCode::length_mismatch: return "length_mismatch";
    case ErrorCode::zero_dimension: return "zero_dimension";
    case ErrorCode::duplicate_id: return "duplicate_id";
    case ErrorCode::empty_id: return "empty_id";
    case ErrorCode::invalid_utf8: return "invalid_utf8";
    case ErrorCode::id_too_long: return "id_too_long";
    case ErrorCode::non_finite: return "non_finite";
    case ErrorCode::zero_vector: return "zero_vector";
    case ErrorCode::dimension_mismatch: return "dimension_mismatch";
    case ErrorCode::missing_header: return "missing_header";
    case ErrorCode::empty_field: return "empty_field";
    case ErrorCode::malformed_csv: return "malformed_csv";
    case ErrorCode::unlabeled_id: return "unlabeled_id";
    case ErrorCode::unknown_label: return "unknown_label";
    case ErrorCode::empty_input: return "empty_input";
    case ErrorCode::out_of_range: return "out_of_range";
    case ErrorCode::single_class: return "single_class";
    case ErrorCode::zero_centroid: return "zero_centroid";
    case ErrorCode::empty_class: return "empty_class";
    case ErrorCode::malformed_ontology: return "malformed_ontology";
    case ErrorCode::duplicate_name: return "duplicate_name";
    case ErrorCode::empty_name: return "empty_name";
    case ErrorCode::unknown_name: return "unknown_name";
    case ErrorCode::too_few_candidates: return "too_few_candidates";
    case ErrorCode::missing_embedding: return "missing_embedding";
    case ErrorCode::ambiguous_id: return "ambiguous_id";
    case ErrorCode::empty_pool: return "empty_pool";
    case ErrorCode::malformed_manifest: return "malformed_manifest";
  }
  return "unknown";
}

Error::Error(ErrorCode code, const std::string& detail)
    : std::runtime_error(std::string(error_name(code)) + ": " + detail),
      code_(code),
      detail_(detail) {}

Error Error::with_context(const std::string& context) const {
  return Error(code_, context + ": " + detail_);
}

}  // namespace embedaudit
