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

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace purify::app {

enum class Command { kSimulate, kClosedForm, kCatSweep, kOracleVerify };
enum class Format { kCsv, kJsonl };

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitVerification = 2;

/// Bad user input; maps to kExitValidation.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parsed command line. Only the fields of the selected command matter.
struct RunConfig {
  Command command = Command::kSimulate;

  // Source distribution: explicit list or generator ("geometric:base,M",
  // "uniform:M"); `preset` may also name "fig2".
  std::optional<std::string> source;
  std::optional<std::string> preset;
  std::optional<std::size_t> order;

  std::uint64_t seed = 0;
  std::size_t runs = 1;
  std::size_t workers = 1;
  std::size_t max_steps = 500;
  std::optional<double> stop_purity;
  std::optional<std::string> mode;  // "full" or "binary"
  std::optional<std::string> counts;
  std::optional<std::string> record;

  std::string r_grid = "0.2,0.5,0.8";
  std::string eta_f_grid = "0.6,0.9,0.99,1";
  double epsilon = 0.01;

  std::size_t modes = 1;
  std::optional<std::size_t> cutoff;
  std::size_t trials = 20;
  /// Negative control: compare the oracle with an engine that skips
  /// renormalization.
  bool corrupt_engine = false;

  std::optional<std::string> out;
  Format format = Format::kCsv;

  /// Canonical argument list that parses back to this config.
  std::vector<std::string> to_args() const;
};

/// Parses argv (without the program name). Throws ValidationError; returns
/// nullopt when help was requested and printed to `help_out`.
std::optional<RunConfig> parse_args(const std::vector<std::string>& args,
                                    std::ostream& help_out);

/// Runs the command. Primary output goes to `out` unless config.out is set;
/// warnings and secondary reports go to `diag`. Returns the exit code.
int execute(const RunConfig& config, std::ostream& out, std::ostream& diag);

/// parse_args + execute with ValidationError mapped to exit code 1.
int run_main(const std::vector<std::string>& args, std::ostream& out,
             std::ostream& diag);

/// Header block written at the top of every output file.
nlohmann::json header_json(const RunConfig& config);

/// "a,b,c" or "start:stop:count" (inclusive linspace).
std::vector<double> parse_grid(const std::string& text);

}  // namespace purify::app
