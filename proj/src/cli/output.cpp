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

#include "output.hpp"

#include <cstdio>
#include <ostream>

namespace purify::app {

std::string format_double(double value) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.17g", value);
  return buffer;
}

CsvWriter::CsvWriter(std::ostream& out, const nlohmann::json& header,
                     const std::vector<std::string>& columns)
    : out_(out) {
  out_ << "# " << header.dump() << '\n';
  for (std::size_t i = 0; i < columns.size(); ++i) {
    out_ << (i ? "," : "") << columns[i];
  }
  out_ << '\n';
}

void CsvWriter::row(const std::vector<Cell>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out_ << ',';
    if (cells[i]) out_ << *cells[i];
  }
  out_ << '\n';
}

JsonlWriter::JsonlWriter(std::ostream& out, const nlohmann::json& header)
    : out_(out) {
  out_ << nlohmann::json{{"header", header}}.dump() << '\n';
}

void JsonlWriter::row(const nlohmann::json& record) {
  out_ << record.dump() << '\n';
}

void write_report(std::ostream& out, const nlohmann::json& header,
                  nlohmann::json body) {
  nlohmann::json doc;
  doc["header"] = header;
  for (auto& [key, value] : body.items()) doc[key] = std::move(value);
  out << doc.dump(2) << '\n';
}

}  // namespace purify::app
