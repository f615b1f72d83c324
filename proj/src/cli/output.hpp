// Copyright 2026 The purify Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace purify::app {

/// 17 significant digits; parses back to the same double.
std::string format_double(double value);

/// Writes CSV rows preceded by a "# {header}" line and the column names.
class CsvWriter {
 public:
  CsvWriter(std::ostream& out, const nlohmann::json& header,
            const std::vector<std::string>& columns);

  using Cell = std::optional<std::string>;
  void row(const std::vector<Cell>& cells);

 private:
  std::ostream& out_;
};

/// Writes {"header": ...} followed by one JSON object per line.
class JsonlWriter {
 public:
  JsonlWriter(std::ostream& out, const nlohmann::json& header);
  void row(const nlohmann::json& record);

 private:
  std::ostream& out_;
};

/// Single JSON document with the header under "header".
void write_report(std::ostream& out, const nlohmann::json& header,
                  nlohmann::json body);

}  // namespace purify::app
