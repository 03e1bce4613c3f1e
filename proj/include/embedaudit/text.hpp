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

#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace embedaudit {

// ASCII-only case folding; bytes >= 0x80 pass through unchanged.
std::string ascii_lower(std::string_view text);
std::string_view trim(std::string_view text);
bool is_valid_utf8(std::string_view text);

namespace csv {

using Row = std::vector<std::string>;

/// Parses RFC 4180 CSV: quoted fields may contain commas, newlines and
/// doubled quotes. Accepts LF or CRLF line ends and a leading UTF-8 BOM.
/// Blank lines are skipped. Throws Error{malformed_csv} on a bad quote.
std::vector<Row> parse(std::istream& in);

/// Quotes a field only when it contains a comma, quote, CR or LF.
std::string escape(std::string_view field);
void write_row(std::ostream& out, const Row& row);

}  // namespace csv
}  // namespace embedaudit
