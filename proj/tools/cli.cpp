#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/core.h>
#include <json.hpp>

#include "darwinism/fragment_stats.hpp"
#include "darwinism/oracle.hpp"
#include "darwinism/parallel.hpp"
#include "darwinism/qcb.hpp"
#include "darwinism/report.hpp"
#include "darwinism/validation.hpp"

namespace darwinism::cli {

namespace {

using Json = nlohmann::ordered_json;

class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

std::string num(double x) { return fmt::format("{:.12g}", x); }

std::string num(std::optional<double> x) { return x ? num(*x) : std::string(); }

Json json_or_null(std::optional<double> x) { return x && std::isfinite(*x) ? Json(*x) : Json(); }

std::string join(const std::vector<std::string>& fields) {
  std::string line;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i > 0) line += ',';
    line += fields[i];
  }
  return line;
}

double parse_number(const std::string& text, const char* axis) {
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size() || !std::isfinite(value)) {
    throw InputError(fmt::format("malformed {} grid entry '{}'", axis, text));
  }
  return value;
}

std::int64_t parse_count(const std::string& text, const char* axis) {
  const double value = parse_number(text, axis);
  if (value < 0.0 || value != std::floor(value) || value > 9.0e15) {
    throw InputError(fmt::format("{} grid entry '{}' is not a non-negative integer", axis, text));
  }
  return static_cast<std::int64_t>(value);
}

/// Writes to the --out file when given, otherwise to the caller's stream.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback, bool append = false) {
    if (path.empty()) {
      stream_ = &fallback;
      return;
    }
    file_.open(path, append ? std::ios::app : std::ios::trunc);
    if (!file_) throw InputError("cannot open output file " + path);
    stream_ = &file_;
  }
  std::ostream& get() { return *stream_; }

 private:
  std::ofstream file_;
  std::ostream* stream_ = nullptr;
};

void check_format(const RunConfig& cfg) {
  if (cfg.format && *cfg.format != "csv" && *cfg.format != "json") {
    throw InputError("--format must be csv or json");
  }
}

// ---------------------------------------------------------------- redundancy

Json report_json(const RunConfig& cfg, const RedundancyReport& r) {
  Json j;
  j["n_good"] = cfg.spec.n_good;
  j["n_bad"] = cfg.spec.n_bad;
  j["gamma2_good"] = cfg.spec.gamma2_good;
  j["gamma2_bad"] = cfg.spec.gamma2_bad;
  j["p0"] = cfg.spec.p0;
  j["delta"] = cfg.delta;
  j["f_delta"] = r.f_delta ? Json(*r.f_delta) : Json();
  j["f_delta_interpolated"] = json_or_null(r.f_delta_interpolated);
  j["r_avg"] = json_or_null(r.r_avg);
  j["r_max_discrete"] = json_or_null(r.r_max);
  j["r_max_continuous"] = json_or_null(r.r_max_continuous);
  j["r_qcb"] = json_or_null(r.r_qcb);
  j["r_qcb_expanded"] = json_or_null(r.r_qcb_expanded);
  j["ratio_avg_over_max"] = json_or_null(ratio_avg_over_max(r));
  Json flags = Json::array();
  for (auto name : r.flags.names()) flags.push_back(std::string(name));
  j["validity_flags"] = flags;
  return j;
}

int cmd_redundancy(const RunConfig& cfg, std::ostream& out) {
  const DeficitSpec deficit(cfg.delta);
  const RedundancyReport r = full_redundancy_report(cfg.spec, deficit);
  Sink sink(cfg.out, out);
  if (cfg.format.value_or("json") == "json") {
    sink.get() << report_json(cfg, r).dump(2) << '\n';
    return kSuccess;
  }
  const auto flags = r.flags.names();
  std::string flag_text;
  for (std::size_t i = 0; i < flags.size(); ++i) {
    if (i > 0) flag_text += ';';
    flag_text += flags[i];
  }
  sink.get() << "f_delta,f_delta_interpolated,r_avg,r_max_discrete,r_max_continuous,r_qcb,"
                "r_qcb_expanded,ratio_avg_over_max,validity_flags\n";
  sink.get() << join({r.f_delta ? std::to_string(*r.f_delta) : std::string(),
                      num(r.f_delta_interpolated), num(r.r_avg), num(r.r_max),
                      num(r.r_max_continuous), num(r.r_qcb), num(r.r_qcb_expanded),
                      num(ratio_avg_over_max(r)), flag_text})
             << '\n';
  return kSuccess;
}

// --------------------------------------------------------------------- curve

struct CurveRow {
  std::int64_t fragment_size = 0;
  double avg_holevo = 0.0;
  std::optional<double> avg_mi;
  double qcb_holevo = 0.0;
  std::string method;
  std::optional<double> stderr_estimate;
};

int cmd_curve(const RunConfig& cfg, std::ostream& out) {
  const EnvironmentSpec& spec = cfg.spec;
  const std::int64_t fmax = cfg.fmax.value_or(spec.n_total());
  if (cfg.fmin < 0 || fmax < cfg.fmin || fmax > spec.n_total()) {
    throw InputError("fragment-size range must satisfy 0 <= fmin <= fmax <= n_total");
  }

  std::vector<CurveRow> rows;
  const auto count = static_cast<std::size_t>(fmax - cfg.fmin + 1);
  rows.reserve(count);

  if (cfg.method == "exact" || cfg.method == "monte-carlo") {
    const InfoCurve curve = cfg.method == "exact"
                                ? exact_curve(spec, cfg.fmin, fmax)
                                : monte_carlo_curve(spec, cfg.fmin, fmax, cfg.samples, cfg.seed);
    for (const auto& p : curve) {
      rows.push_back({p.fragment_size, p.avg_info, std::nullopt,
                      holevo_asymptotic(spec, p.fragment_size), std::string(to_string(p.method)),
                      p.stderr_estimate});
    }
  } else if (cfg.method == "qcb") {
    for (std::int64_t f = cfg.fmin; f <= fmax; ++f) {
      const double q = holevo_asymptotic(spec, f);
      rows.push_back({f, q, std::nullopt, q,
                      std::string(to_string(CurveMethod::kQcbAsymptotic)), std::nullopt});
    }
  } else if (cfg.method == "oracle") {
    const auto limits = oracle::OracleLimits::from_environment();
    const oracle::DenseState state = oracle::build_spec_state(spec, limits);
    for (std::int64_t f = cfg.fmin; f <= fmax; ++f) {
      const int k = static_cast<int>(f);
      rows.push_back(
          {f, oracle::all_fragment_average(state, k, oracle::FragmentQuantity::kHolevo, limits),
           oracle::all_fragment_average(state, k, oracle::FragmentQuantity::kMutualInformation,
                                        limits),
           holevo_asymptotic(spec, f), std::string(to_string(CurveMethod::kOracle)),
           std::nullopt});
    }
  } else {
    throw InputError("--method must be one of exact, monte-carlo, qcb, oracle");
  }

  Sink sink(cfg.out, out);
  if (cfg.format.value_or("csv") == "json") {
    Json arr = Json::array();
    for (const auto& r : rows) {
      Json j;
      j["fragment_size"] = r.fragment_size;
      j["avg_holevo_bits"] = r.avg_holevo;
      j["avg_mi_bits"] = json_or_null(r.avg_mi);
      j["qcb_holevo_bits"] = r.qcb_holevo;
      j["method"] = r.method;
      j["stderr"] = json_or_null(r.stderr_estimate);
      arr.push_back(std::move(j));
    }
    sink.get() << arr.dump(2) << '\n';
    return kSuccess;
  }
  sink.get() << "fragment_size,avg_holevo_bits,avg_mi_bits,qcb_holevo_bits,method,stderr\n";
  for (const auto& r : rows) {
    sink.get() << join({std::to_string(r.fragment_size), num(r.avg_holevo), num(r.avg_mi),
                        num(r.qcb_holevo), r.method, num(r.stderr_estimate)})
               << '\n';
  }
  return kSuccess;
}

// ------------------------------------------------------------------ validate

int cmd_validate(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  ValidationOptions options;
  options.limits = oracle::OracleLimits::from_environment();
  options.corrupt_check = cfg.corrupt_check;
  if (cfg.corrupt_check) {
    const auto& names = validation_check_names();
    if (std::find(names.begin(), names.end(), *cfg.corrupt_check) == names.end()) {
      throw InputError("unknown check '" + *cfg.corrupt_check + "'");
    }
  }
  const ValidationReport report = run_validation(cfg.spec, options);

  Json j;
  j["passed"] = report.passed();
  Json checks = Json::array();
  for (const auto& c : report.checks) {
    Json cj;
    cj["name"] = c.name;
    cj["max_deviation"] = c.max_deviation;
    cj["tolerance"] = c.tolerance;
    cj["passed"] = c.passed;
    checks.push_back(std::move(cj));
  }
  j["checks"] = checks;
  if (auto failed = report.first_failure()) j["first_failure"] = *failed;

  Sink sink(cfg.out, out);
  sink.get() << j.dump(2) << '\n';
  if (auto failed = report.first_failure()) {
    err << "validation failed: " << *failed << '\n';
    return kValidationFailed;
  }
  return kSuccess;
}

// --------------------------------------------------------------------- sweep

const std::vector<std::string> kSweepHeader = {
    "n_good",          "n_bad",           "gamma2_good",      "gamma2_bad",
    "p0",              "delta",           "status",           "f_delta",
    "r_avg",           "r_max_discrete",  "r_max_continuous", "r_qcb",
    "r_qcb_expanded",  "definition_ratio", "ratio_avg_over_max", "normalized_r_avg",
    "qcb_valid",       "max_formula_valid",
};

struct GridPoint {
  EnvironmentSpec spec;
  double delta = 0.1;

  std::string key() const {
    return join({std::to_string(spec.n_good), std::to_string(spec.n_bad), num(spec.gamma2_good),
                 num(spec.gamma2_bad), num(spec.p0), num(delta)});
  }
};

std::vector<std::string> sweep_row(const GridPoint& g) {
  const DeficitSpec deficit(g.delta);
  std::vector<std::string> row = {std::to_string(g.spec.n_good), std::to_string(g.spec.n_bad),
                                  num(g.spec.gamma2_good), num(g.spec.gamma2_bad),
                                  num(g.spec.p0), num(g.delta)};
  const DefinitionRatio ratio = definition_ratio(g.spec.gamma2_good);
  try {
    const RedundancyReport r = full_redundancy_report(g.spec, deficit);
    std::optional<double> normalized;
    if (r.r_avg && g.spec.n_good > 0 && !deficit.is_trivial()) {
      normalized = *r.r_avg * std::log(1.0 / g.delta) / static_cast<double>(g.spec.n_good);
    }
    const std::vector<std::string> tail = {
        "ok",
        r.f_delta ? std::to_string(*r.f_delta) : std::string(),
        num(r.r_avg),
        num(r.r_max),
        num(r.r_max_continuous),
        num(r.r_qcb),
        num(r.r_qcb_expanded),
        num(ratio.value),
        num(ratio_avg_over_max(r)),
        num(normalized),
        r.flags.test(ValidityFlag::kQcbValid) ? "1" : "0",
        r.flags.test(ValidityFlag::kMaxFormulaValid) ? "1" : "0",
    };
    row.insert(row.end(), tail.begin(), tail.end());
  } catch (const DeficitUnreachable&) {
    const std::vector<std::string> tail = {"deficit_unreachable", "", "", "", "", "", "",
                                           num(ratio.value), "", "", "0", "0"};
    row.insert(row.end(), tail.begin(), tail.end());
  }
  return row;
}

std::vector<GridPoint> sweep_grid(const RunConfig& cfg) {
  std::vector<std::int64_t> n_bads;
  for (const auto& t : cfg.n_bad_grid) n_bads.push_back(parse_count(t, "n-bad"));
  if (n_bads.empty()) n_bads.push_back(cfg.spec.n_bad);
  std::vector<double> gammas;
  for (const auto& t : cfg.gamma2_good_grid) gammas.push_back(parse_number(t, "gamma2-good"));
  if (gammas.empty()) gammas.push_back(cfg.spec.gamma2_good);
  std::vector<double> deltas;
  for (const auto& t : cfg.delta_grid) deltas.push_back(parse_number(t, "delta"));
  if (deltas.empty()) deltas.push_back(cfg.delta);

  std::vector<GridPoint> grid;
  for (auto nb : n_bads) {
    for (auto g : gammas) {
      for (auto d : deltas) {
        GridPoint p{cfg.spec, d};
        p.spec.n_bad = nb;
        p.spec.gamma2_good = g;
        validate_spec(p.spec);
        DeficitSpec{d};
        grid.push_back(p);
      }
    }
  }
  return grid;
}

// Keys of rows already present in a previous run's output.
std::set<std::string> existing_keys(const std::string& path) {
  std::set<std::string> keys;
  std::ifstream in(path);
  if (!in) return keys;
  std::string line;
  if (!std::getline(in, line)) return keys;
  if (line != join(kSweepHeader)) {
    throw InputError("existing output " + path + " has a different header; refusing to append");
  }
  while (std::getline(in, line)) {
    std::size_t pos = 0;
    for (int field = 0; field < 6 && pos != std::string::npos; ++field) {
      pos = line.find(',', pos + (field > 0 ? 1 : 0));
    }
    if (pos != std::string::npos) keys.insert(line.substr(0, pos));
  }
  return keys;
}

int cmd_sweep(const RunConfig& cfg, std::ostream& out) {
  const std::vector<GridPoint> grid = sweep_grid(cfg);
  const bool json = cfg.format.value_or("csv") == "json";

  std::set<std::string> done;
  bool write_header = true;
  if (!cfg.out.empty() && !json) {
    done = existing_keys(cfg.out);
    std::ifstream probe(cfg.out);
    write_header = !probe || probe.peek() == std::ifstream::traits_type::eof();
  }

  std::vector<GridPoint> todo;
  for (const auto& g : grid) {
    if (!done.count(g.key())) todo.push_back(g);
  }
  const auto rows = parallel_map(todo.size(), [&](std::size_t i) { return sweep_row(todo[i]); });

  Sink sink(cfg.out, out, /*append=*/!json);
  if (json) {
    Json arr = Json::array();
    for (const auto& row : rows) {
      Json j;
      for (std::size_t c = 0; c < kSweepHeader.size(); ++c) j[kSweepHeader[c]] = row[c];
      arr.push_back(std::move(j));
    }
    sink.get() << arr.dump(2) << '\n';
    return kSuccess;
  }
  if (write_header) sink.get() << join(kSweepHeader) << '\n';
  for (const auto& row : rows) sink.get() << join(row) << '\n';
  return kSuccess;
}

void emit_error(std::ostream& err, const std::string& kind, const std::string& message,
                const std::vector<std::string>& details = {}) {
  Json j;
  j["error"] = kind;
  j["message"] = message;
  if (!details.empty()) j["violations"] = details;
  if (kind == "deficit_unreachable") j["validity_flags"] = Json::array({"deficit_unreachable"});
  err << j.dump() << '\n';
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"Redundancy of pointer-state records in mixed good/bad spin environments",
               "darwinism"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Flat key=value file; command-line flags take precedence");

  app.add_option("--n-good", cfg.spec.n_good, "Number of good environment spins")
      ->capture_default_str();
  app.add_option("--n-bad", cfg.spec.n_bad, "Number of bad environment spins")
      ->capture_default_str();
  app.add_option("--gamma2-good", cfg.spec.gamma2_good, "Squared overlap per good spin")
      ->capture_default_str();
  app.add_option("--gamma2-bad", cfg.spec.gamma2_bad, "Squared overlap per bad spin")
      ->capture_default_str();
  app.add_option("--p0", cfg.spec.p0, "Probability of pointer state |0>")->capture_default_str();
  app.add_option("--delta", cfg.delta, "Information deficit in (0, 1]")->capture_default_str();
  app.add_option("--fmin", cfg.fmin, "Smallest fragment size of a curve")->capture_default_str();
  app.add_option("--fmax", cfg.fmax, "Largest fragment size of a curve (default n_total)");
  app.add_option("--method", cfg.method, "exact | monte-carlo | qcb | oracle")
      ->capture_default_str();
  app.add_option("--samples", cfg.samples, "Monte Carlo samples per fragment size")
      ->capture_default_str();
  app.add_option("--seed", cfg.seed, "Monte Carlo seed")->capture_default_str();
  app.add_option("--out", cfg.out, "Output path (default stdout)");
  app.add_option("--format", cfg.format, "csv | json");

  auto* redundancy = app.add_subcommand("redundancy", "Redundancy report for one spec")
                         ->fallthrough();
  auto* curve = app.add_subcommand("curve", "Averaged information against fragment size")
                    ->fallthrough();
  auto* validate = app.add_subcommand("validate", "Cross-check closed forms against the oracle")
                       ->fallthrough();
  validate->add_option("--corrupt-check", cfg.corrupt_check)->group("");
  auto* sweep = app.add_subcommand("sweep", "Redundancy variants over a parameter grid")
                    ->fallthrough();
  sweep->add_option("--n-bad-grid", cfg.n_bad_grid, "Comma-separated n_bad values")
      ->delimiter(',');
  sweep->add_option("--gamma2-good-grid", cfg.gamma2_good_grid,
                    "Comma-separated gamma2_good values")
      ->delimiter(',');
  sweep->add_option("--delta-grid", cfg.delta_grid, "Comma-separated delta values")
      ->delimiter(',');

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kSuccess;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kSuccess;
  } catch (const CLI::ParseError& e) {
    emit_error(err, "invalid_arguments", e.what());
    return kInputError;
  }

  try {
    check_format(cfg);
    validate_spec(cfg.spec);
    if (redundancy->parsed()) return cmd_redundancy(cfg, out);
    if (curve->parsed()) return cmd_curve(cfg, out);
    if (validate->parsed()) return cmd_validate(cfg, out, err);
    if (sweep->parsed()) return cmd_sweep(cfg, out);
  } catch (const SpecError& e) {
    emit_error(err, "invalid_spec", e.what(), e.violations());
    return kInputError;
  } catch (const DeficitUnreachable& e) {
    emit_error(err, "deficit_unreachable", e.what());
    return kDeficitUnreachable;
  } catch (const oracle::OracleCapExceeded& e) {
    emit_error(err, "oracle_cap_exceeded", e.what());
    return kInputError;
  } catch (const std::invalid_argument& e) {
    emit_error(err, "invalid_input", e.what());
    return kInputError;
  } catch (const std::domain_error& e) {
    emit_error(err, "invalid_input", e.what());
    return kInputError;
  }
  return kInputError;
}

}  // namespace darwinism::cli
