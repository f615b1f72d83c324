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

#include "purify/app.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "output.hpp"
#include "purify/catloss.hpp"
#include "purify/core.hpp"
#include "purify/trajectory.hpp"
#include "purify/verify.hpp"

namespace purify::app {

namespace {

constexpr double kRenormalizeWarning = 1e-9;
constexpr std::size_t kMaxOracleDimension = 4096;

const char* command_name(Command c) {
  switch (c) {
    case Command::kSimulate:
      return "simulate";
    case Command::kClosedForm:
      return "closed-form";
    case Command::kCatSweep:
      return "cat-sweep";
    case Command::kOracleVerify:
      return "oracle-verify";
  }
  return "?";
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, sep)) parts.push_back(item);
  return parts;
}

double parse_number(const std::string& text) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw ValidationError("not a number: '" + text + "'");
  }
}

std::uint64_t parse_count(const std::string& text) {
  if (text.empty() || text.find_first_not_of("0123456789") != std::string::npos) {
    throw ValidationError("not a non-negative integer: '" + text + "'");
  }
  return std::stoull(text);
}

std::vector<std::uint64_t> parse_counts(const std::string& text) {
  std::vector<std::uint64_t> out;
  for (const auto& part : split(text, ',')) out.push_back(parse_count(part));
  if (out.empty()) throw ValidationError("empty integer list");
  return out;
}

MixtureState from_generator(const std::string& text) {
  const auto colon = text.find(':');
  const std::string kind = text.substr(0, colon);
  const auto args = split(text.substr(colon + 1), ',');
  if (kind == "uniform" && args.size() == 1) {
    return MixtureState::uniform(parse_count(args[0]));
  }
  if (kind == "geometric" && args.size() == 2) {
    const double base = parse_number(args[0]);
    if (!(base > 0.0)) throw ValidationError("geometric base must be > 0");
    return MixtureState::geometric(base, parse_count(args[1]));
  }
  throw ValidationError("unknown generator '" + text +
                        "' (use geometric:base,M or uniform:M)");
}

MixtureState from_list(const std::string& text, std::ostream& diag) {
  std::vector<double> weights;
  for (const auto& part : split(text, ',')) {
    const double w = parse_number(part);
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw ValidationError("negative or non-finite probability '" + part + "'");
    }
    weights.push_back(w);
  }
  if (weights.empty()) throw ValidationError("empty probability list");
  double total = 0.0;
  for (double w : weights) total += w;
  if (!(total > 0.0)) throw ValidationError("probabilities sum to zero");
  if (std::abs(total - 1.0) > kRenormalizeWarning) {
    diag << "warning: source probabilities sum to " << format_double(total)
         << "; normalizing\n";
  }
  return MixtureState::normalized(std::move(weights));
}

MixtureState resolve_source(const RunConfig& config, std::ostream& diag) {
  if (config.source && config.preset) {
    throw ValidationError("give either --source or --preset, not both");
  }
  std::optional<MixtureState> state;
  if (config.preset) {
    if (*config.preset == "fig2") {
      state = MixtureState::geometric(std::exp(-1.0), 100);
    } else {
      state = from_generator(*config.preset);
    }
  } else if (config.source) {
    state = config.source->find(':') != std::string::npos
                ? from_generator(*config.source)
                : from_list(*config.source, diag);
  } else {
    throw ValidationError("a source distribution is required");
  }
  if (config.order && *config.order != state->order()) {
    throw ValidationError("--M does not match the source length");
  }
  return *state;
}

DetectionMode resolve_mode(const RunConfig& config) {
  const std::string mode = config.mode.value_or(
      config.preset && *config.preset == "fig2" ? "binary" : "full");
  if (mode == "full") return DetectionMode::kFullK;
  if (mode == "binary") return DetectionMode::kBinary;
  throw ValidationError("--mode must be 'full' or 'binary'");
}

nlohmann::json state_json(const MixtureState& s) {
  return nlohmann::json(std::vector<double>(s.probs().begin(), s.probs().end()));
}

// Opens config.out (or a derived path) or falls back to `fallback`.
class Sink {
 public:
  Sink(const std::optional<std::string>& path, std::ostream& fallback)
      : stream_(&fallback) {
    if (path) {
      file_.open(*path, std::ios::binary);
      if (!file_) throw ValidationError("cannot open output file " + *path);
      stream_ = &file_;
    }
  }
  std::ostream& stream() { return *stream_; }

 private:
  std::ofstream file_;
  std::ostream* stream_;
};

std::optional<std::string> with_suffix(const std::optional<std::string>& path,
                                       const char* suffix) {
  if (!path) return std::nullopt;
  return *path + suffix;
}

int run_simulate(const RunConfig& config, std::ostream& out,
                 std::ostream& diag) {
  const MixtureState source = resolve_source(config, diag);
  const DetectionMode mode = resolve_mode(config);
  if (config.stop_purity &&
      !(*config.stop_purity > 0.0 && *config.stop_purity <= 1.0)) {
    throw ValidationError("--stop-purity must lie in (0, 1]");
  }
  if (config.max_steps < 1) throw ValidationError("--max-steps must be >= 1");
  if (config.runs < 1) throw ValidationError("--runs must be >= 1");

  std::vector<TrajectoryResult> results;
  if (config.record) {
    std::vector<std::size_t> events;
    for (auto c : parse_counts(*config.record)) events.push_back(c);
    try {
      results.push_back(force_record(
          source, EventRecord(source.order(), std::move(events)), mode,
          config.stop_purity));
    } catch (const ImpossibleOutcome& e) {
      throw ValidationError(e.what());
    } catch (const std::out_of_range& e) {
      throw ValidationError(e.what());
    }
  } else {
    TrajectoryConfig tc;
    tc.seed = config.seed;
    tc.max_steps = config.max_steps;
    tc.mode = mode;
    tc.stop_purity = config.stop_purity;
    tc.source = source;
    results = run_trajectories(tc, config.runs, config.workers);
  }

  const nlohmann::json header = header_json(config);
  {
    Sink sink(config.out, out);
    auto event_cell = [&](const TrajectoryResult& r, std::size_t step)
        -> std::optional<std::string> {
      if (step == 0) return std::nullopt;
      return std::to_string(r.record.events()[step - 1]);
    };
    if (config.format == Format::kCsv) {
      CsvWriter csv(sink.stream(), header, {"run", "step", "entropy", "event"});
      for (std::size_t run = 0; run < results.size(); ++run) {
        const auto& r = results[run];
        for (std::size_t s = 0; s < r.entropy_trace.size(); ++s) {
          csv.row({std::to_string(run), std::to_string(s),
                   format_double(r.entropy_trace[s]), event_cell(r, s)});
        }
      }
    } else {
      JsonlWriter jsonl(sink.stream(), header);
      for (std::size_t run = 0; run < results.size(); ++run) {
        const auto& r = results[run];
        for (std::size_t s = 0; s < r.entropy_trace.size(); ++s) {
          nlohmann::json row{{"run", run}, {"step", s},
                             {"entropy", r.entropy_trace[s]}};
          const auto e = event_cell(r, s);
          row["event"] = e ? nlohmann::json(r.record.events()[s - 1])
                           : nlohmann::json(nullptr);
          jsonl.row(row);
        }
      }
    }
  }

  const EnsembleSummary summary = summarize(results, source.order());
  nlohmann::json body;
  body["summary"] = {{"runs", summary.runs},
                     {"purified_histogram", summary.purified_histogram},
                     {"mean_steps_to_purity", summary.mean_steps_to_purity},
                     {"fraction_purified", summary.fraction_purified}};
  body["event_encoding"] = mode == DetectionMode::kBinary
                               ? "0: k = 0, 1: k != 0"
                               : "k in [0, M]";
  if (results.size() == 1) {
    body["final_state"] = state_json(results.front().final_state);
    body["record"] = std::vector<std::size_t>(
        results.front().record.events().begin(),
        results.front().record.events().end());
  }
  Sink summary_sink(with_suffix(config.out, ".summary.json"), diag);
  write_report(summary_sink.stream(), header, std::move(body));
  return kExitOk;
}

int run_closed_form(const RunConfig& config, std::ostream& out,
                    std::ostream& diag) {
  const MixtureState source = resolve_source(config, diag);
  const DetectionMode mode = resolve_mode(config);
  if (!config.counts) throw ValidationError("--counts is required");
  const auto counts = parse_counts(*config.counts);

  std::optional<ConditionedState> result;
  std::uint64_t steps = 0;
  try {
    if (mode == DetectionMode::kBinary) {
      if (counts.size() != 2) {
        throw ValidationError("binary --counts takes 'j,q'");
      }
      BinaryRecord record(counts[0], counts[1]);
      steps = record.steps;
      result = state_from_binary_counts(source, record);
    } else {
      if (counts.size() != source.size()) {
        throw ValidationError("--counts needs M+1 entries s_0..s_M");
      }
      EventCounts ec(counts);
      steps = ec.steps();
      result = state_from_counts(source, ec);
    }
  } catch (const ImpossibleOutcome& e) {
    throw ValidationError(e.what());
  } catch (const std::invalid_argument& e) {
    throw ValidationError(e.what());
  }

  nlohmann::json body;
  body["result"] = {{"steps", steps},
                    {"state", state_json(result->state)},
                    {"probability", result->probability},
                    {"log_probability", result->log_probability},
                    {"entropy", von_neumann_entropy(result->state)}};
  Sink sink(config.out, out);
  write_report(sink.stream(), header_json(config), std::move(body));
  return kExitOk;
}

int run_cat_sweep(const RunConfig& config, std::ostream& out) {
  const auto rs = parse_grid(config.r_grid);
  const auto etas = parse_grid(config.eta_f_grid);
  for (double r : rs) {
    if (!(std::abs(r) <= 1.0)) throw ValidationError("r-grid values need |r| <= 1");
  }
  for (double eta : etas) {
    if (!(eta > 0.0 && eta <= 1.0)) {
      throw ValidationError("etaF-grid values must lie in (0, 1]");
    }
  }
  if (!(config.epsilon > 0.0)) throw ValidationError("--epsilon must be > 0");

  const std::vector<std::string> columns{
      "r",       "eta_F",        "R_low",  "R_high",
      "eta_min", "eta_required", "R1_zero", "status"};
  const nlohmann::json header = header_json(config);
  Sink sink(config.out, out);
  std::optional<CsvWriter> csv;
  std::optional<JsonlWriter> jsonl;
  if (config.format == Format::kCsv) {
    csv.emplace(sink.stream(), header, columns);
  } else {
    jsonl.emplace(sink.stream(), header);
  }

  for (double r : rs) {
    for (double eta : etas) {
      const double eta_min = cat::min_feedback_efficiency(r);
      const double eta_req = cat::required_efficiency(r, config.epsilon);
      const double first = cat::purity_step(r, r, BinaryEvent::kZero,
                                            cat::FeedbackModel{eta, false});
      std::optional<cat::Bounds> bounds;
      if (r != 0.0) bounds = cat::stationary_bounds(r, eta);
      const std::string status = bounds ? "ok" : "r=0: bounds undefined";
      if (csv) {
        auto opt = [](std::optional<double> v) -> CsvWriter::Cell {
          if (!v) return std::nullopt;
          return format_double(*v);
        };
        csv->row({format_double(r), format_double(eta),
                  opt(bounds ? std::optional(bounds->low) : std::nullopt),
                  opt(bounds ? std::optional(bounds->high) : std::nullopt),
                  format_double(eta_min), format_double(eta_req),
                  format_double(first), status});
      } else {
        nlohmann::json row{{"r", r},          {"eta_F", eta},
                           {"eta_min", eta_min}, {"eta_required", eta_req},
                           {"R1_zero", first}, {"status", status}};
        row["R_low"] = bounds ? nlohmann::json(bounds->low) : nullptr;
        row["R_high"] = bounds ? nlohmann::json(bounds->high) : nullptr;
        jsonl->row(row);
      }
    }
  }
  return kExitOk;
}

int run_oracle_verify(const RunConfig& config, std::ostream& out) {
  const std::size_t order = config.order.value_or(1);
  const std::size_t cutoff = config.cutoff.value_or(2 * (order + 1));
  if (config.modes < 1) throw ValidationError("--N must be >= 1");
  if (cutoff % (order + 1) != 0) {
    throw ValidationError("--cutoff must be a multiple of M+1 = " +
                          std::to_string(order + 1));
  }
  double dimension = 1.0;
  for (std::size_t j = 0; j < config.modes; ++j) dimension *= cutoff;
  if (dimension > kMaxOracleDimension) {
    throw ValidationError("cutoff^N exceeds " +
                          std::to_string(kMaxOracleDimension));
  }
  if (config.trials < 1) throw ValidationError("--trials must be >= 1");

  const auto engine = config.corrupt_engine
                          ? oracle::EngineVariant::kSkipRenormalization
                          : oracle::EngineVariant::kReference;
  const auto net = oracle::verify_network(order, config.modes, cutoff,
                                          config.trials, config.seed, engine);
  const auto single = oracle::verify_single_instant(
      order, config.modes, cutoff, config.trials, config.seed);

  nlohmann::json body;
  body["network"] = {
      {"M", net.order},
      {"N", net.modes},
      {"cutoff", net.cutoff},
      {"trials", net.trials},
      {"max_fidelity_deficit", net.max_fidelity_deficit},
      {"max_probability_deviation", net.max_probability_deviation},
      {"max_class_dependence", net.max_class_dependence},
      {"max_rotation_form_deviation", net.max_rotation_form_deviation},
      {"prefactor_measured_min", net.prefactor_min},
      {"prefactor_measured_max", net.prefactor_max},
      {"prefactor_expected", net.prefactor_expected},
      {"tolerance", oracle::kNetworkTolerance},
      {"passed", net.passed}};
  body["single_instant"] = {
      {"M", single.order},
      {"N", single.modes},
      {"cutoff", single.cutoff},
      {"trials", single.trials},
      {"max_fidelity_deficit", single.max_fidelity_deficit},
      {"max_probability_deviation", single.max_probability_deviation},
      {"tolerance", oracle::kSingleInstantTolerance},
      {"passed", single.passed}};
  const bool passed = net.passed && single.passed;
  body["passed"] = passed;
  Sink sink(config.out, out);
  write_report(sink.stream(), header_json(config), std::move(body));
  return passed ? kExitOk : kExitVerification;
}

}  // namespace

std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> values;
  const auto parts = split(text, ':');
  if (parts.size() == 3) {
    const double start = parse_number(parts[0]);
    const double stop = parse_number(parts[1]);
    const auto count = parse_count(parts[2]);
    if (count < 1) throw ValidationError("grid count must be >= 1");
    for (std::uint64_t i = 0; i < count; ++i) {
      values.push_back(count == 1 ? start
                                  : start + (stop - start) * static_cast<double>(i) /
                                                static_cast<double>(count - 1));
    }
    return values;
  }
  for (const auto& part : split(text, ',')) values.push_back(parse_number(part));
  if (values.empty()) throw ValidationError("empty grid");
  return values;
}

std::vector<std::string> RunConfig::to_args() const {
  std::vector<std::string> args{command_name(command)};
  auto add = [&](const char* flag, const std::string& value) {
    args.push_back(flag);
    args.push_back(value);
  };
  switch (command) {
    case Command::kSimulate:
    case Command::kClosedForm:
      if (source) add("--source", *source);
      if (preset) add("--preset", *preset);
      if (order) add("--M", std::to_string(*order));
      if (mode) add("--mode", *mode);
      if (command == Command::kClosedForm) {
        if (counts) add("--counts", *counts);
        break;
      }
      add("--seed", std::to_string(seed));
      add("--runs", std::to_string(runs));
      add("--workers", std::to_string(workers));
      add("--max-steps", std::to_string(max_steps));
      if (stop_purity) add("--stop-purity", format_double(*stop_purity));
      if (record) add("--record", *record);
      add("--format", format == Format::kCsv ? "csv" : "jsonl");
      break;
    case Command::kCatSweep:
      add("--r-grid", r_grid);
      add("--etaF-grid", eta_f_grid);
      add("--epsilon", format_double(epsilon));
      add("--format", format == Format::kCsv ? "csv" : "jsonl");
      break;
    case Command::kOracleVerify:
      add("--M", std::to_string(order.value_or(1)));
      add("--N", std::to_string(modes));
      add("--cutoff", std::to_string(cutoff.value_or(2 * (order.value_or(1) + 1))));
      add("--trials", std::to_string(trials));
      add("--seed", std::to_string(seed));
      if (corrupt_engine) args.push_back("--corrupt-engine");
      break;
  }
  return args;
}

nlohmann::json header_json(const RunConfig& config) {
  return {{"command", command_name(config.command)},
          {"args", config.to_args()},
          {"seed", config.seed},
          {"version", PURIFY_VERSION}};
}

std::optional<RunConfig> parse_args(const std::vector<std::string>& args,
                                    std::ostream& help_out) {
  RunConfig config;
  CLI::App app{"Iterative entanglement-purification simulator", "purify"};
  app.require_subcommand(1);

  std::string source, preset, mode, counts, record, out, format = "csv";
  std::size_t order = 0, cutoff = 0;
  double stop_purity = 1.0;

  auto add_source = [&](CLI::App* sub) {
    sub->add_option("--source", source,
                     "Probabilities p_0..p_M, or geometric:base,M / uniform:M");
    sub->add_option("--preset", preset, "fig2, geometric:base,M or uniform:M");
    sub->add_option("--M", order, "Truncation order (checked against source)");
    sub->add_option("--mode", mode, "full | binary")
        ->check(CLI::IsMember({"full", "binary"}));
  };
  auto add_output = [&](CLI::App* sub, bool with_format) {
    sub->add_option("--out", out, "Output path (default stdout)");
    if (with_format) {
      sub->add_option("--format", format, "csv | jsonl")
          ->check(CLI::IsMember({"csv", "jsonl"}));
    }
  };

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo purification runs");
  add_source(simulate);
  simulate->add_option("--seed", config.seed);
  simulate->add_option("--runs", config.runs);
  simulate->add_option("--workers", config.workers, "Threads (results do not depend on it)");
  simulate->add_option("--max-steps", config.max_steps);
  simulate->add_option("--stop-purity", stop_purity,
                       "Stop once max P_n reaches this (default: never)");
  simulate->add_option("--record", record, "Replay a fixed event record k1,k2,...");
  add_output(simulate, true);

  auto* closed = app.add_subcommand("closed-form", "State after a given count vector");
  add_source(closed);
  closed->add_option("--counts", counts, "s_0,..,s_M (full) or j,q (binary)")
      ->required();
  add_output(closed, false);

  auto* sweep = app.add_subcommand("cat-sweep", "Cat-state thresholds and bounds");
  sweep->add_option("--r-grid", config.r_grid, "r values: a,b,c or start:stop:count");
  sweep->add_option("--etaF-grid", config.eta_f_grid, "eta_F values");
  sweep->add_option("--epsilon", config.epsilon);
  add_output(sweep, true);

  auto* verify = app.add_subcommand("oracle-verify", "Fock-space oracle vs engine");
  verify->add_option("--M", order);
  verify->add_option("--N", config.modes);
  verify->add_option("--cutoff", cutoff);
  verify->add_option("--trials", config.trials);
  verify->add_option("--seed", config.seed);
  verify->add_flag("--corrupt-engine", config.corrupt_engine,
                   "Negative control: skip renormalization in the engine")
      ->group("");
  add_output(verify, false);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    help_out << app.help();
    return std::nullopt;
  } catch (const CLI::ParseError& e) {
    throw ValidationError(e.what());
  }

  CLI::App* chosen = app.get_subcommands().front();
  if (chosen == simulate) config.command = Command::kSimulate;
  if (chosen == closed) config.command = Command::kClosedForm;
  if (chosen == sweep) config.command = Command::kCatSweep;
  if (chosen == verify) config.command = Command::kOracleVerify;

  auto given = [&](const char* name) {
    return chosen->get_option_no_throw(name) != nullptr &&
           chosen->count(name) > 0;
  };
  if (given("--source")) config.source = source;
  if (given("--preset")) config.preset = preset;
  if (given("--M")) config.order = order;
  if (given("--mode")) config.mode = mode;
  if (given("--counts")) config.counts = counts;
  if (given("--record")) config.record = record;
  if (given("--stop-purity")) config.stop_purity = stop_purity;
  if (given("--cutoff")) config.cutoff = cutoff;
  if (given("--out")) config.out = out;
  config.format = format == "jsonl" ? Format::kJsonl : Format::kCsv;
  return config;
}

int execute(const RunConfig& config, std::ostream& out, std::ostream& diag) {
  switch (config.command) {
    case Command::kSimulate:
      return run_simulate(config, out, diag);
    case Command::kClosedForm:
      return run_closed_form(config, out, diag);
    case Command::kCatSweep:
      return run_cat_sweep(config, out);
    case Command::kOracleVerify:
      return run_oracle_verify(config, out);
  }
  return kExitValidation;
}

int run_main(const std::vector<std::string>& args, std::ostream& out,
             std::ostream& diag) {
  try {
    const auto config = parse_args(args, out);
    if (!config) return kExitOk;
    return execute(*config, out, diag);
  } catch (const ValidationError& e) {
    diag << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::invalid_argument& e) {
    diag << "error: " << e.what() << '\n';
    return kExitValidation;
  }
}

}  // namespace purify::app
