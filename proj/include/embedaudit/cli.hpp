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

// Command-line front end. Every analysis command writes a JSON report with
// lexicographically ordered keys that records its inputs (path and SHA-256),
// its parameters, and its results.

#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

namespace embedaudit::cli {

inline constexpr const char* kToolVersion = "0.1.0";

enum ExitCode : int { kOk = 0, kInputError = 1, kInternalError = 2 };

struct InputFile {
  std::string path;
  std::string sha256;
};

struct AuditReport {
  std::string experiment;
  std::map<std::string, InputFile> inputs;  // role -> file
  nlohmann::json parameters = nlohmann::json::object();
  nlohmann::json results = nlohmann::json::object();
  std::optional<std::string> timestamp;  // absent under --no-timestamp

  nlohmann::json to_json() const;
};

/// Lowercase hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);

/// Runs one invocation; args excludes the program name. Returns an ExitCode.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace embedaudit::cli
