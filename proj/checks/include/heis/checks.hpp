#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "heis/grid.hpp"
#include "heis/spectral.hpp"

namespace heis::checks {

// Bad configuration or unknown check name (CLI exit code 2).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  int d = 1;
  int N_max = 32;
  GridSpec grid;  // 64^3 on [-6, 6]^3
  int lambda_nodes = 128;  // per sign
  double lambda_min = 1e-3, lambda_max = 8.0;
  std::uint64_t seed = 20240917;
  int threads = 0;  // 0: TBB default
  std::string out_dir;
  // "<check>.<quantity>" -> replacement bound
  std::map<std::string, double> tolerance;

  // key = value; keys as printed by to_text(), plus grid.L / grid.n shorthands and tol.<check>.<quantity>
  void set(const std::string& key, const std::string& value);
  // settings are applied on top of `base` (defaults when omitted)
  static RunConfig from_text(const std::string& text);
  static RunConfig from_text(const std::string& text, RunConfig base);
  static RunConfig from_file(const std::string& path);
  static RunConfig from_file(const std::string& path, RunConfig base);
  std::string to_text() const;  // canonical, one key per line
  std::string hash() const;     // FNV-1a of to_text(), hex
  void validate() const;        // throws ConfigError
  double memory_estimate_mb() const;

  LambdaGrid lambda_grid() const { return LambdaGrid::geometric(lambda_nodes, lambda_min, lambda_max, 1); }
  double tol(const std::string& check, const std::string& quantity, double fallback) const;
};

struct Measurement {
  std::string quantity;
  double value = 0.0;
  std::string relation;  // "<=", ">=", "in", "true", "info"
  double lo = 0.0, hi = 0.0;
  bool pass = true;
  bool timing = false;  // wall-clock values stay out of the CSV
};

struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

struct CheckReport {
  std::string name;
  int criterion = 0;
  std::string title;
  bool pass = false;
  std::vector<Measurement> values;
  std::vector<Table> tables;
  double runtime_s = 0.0;
  std::string config_hash;
  std::uint64_t seed = 0;
  std::string error;  // exception text when the check threw

  // one line: "[PASS] 04 plancherel  defect=... (<= 0.02) ..."
  std::string summary_line() const;
};

struct CheckInfo {
  std::string name;
  int criterion;
  std::string title;
  std::string columns;  // CSV columns of the extra tables, for --help
  std::function<void(const RunConfig&, CheckReport&)> run;
};

const std::vector<CheckInfo>& registry();
const CheckInfo* find_check(const std::string& name);
bool glob_match(const std::string& pattern, const std::string& name);

// Runs one check; exceptions other than ConfigError become a failed report.
CheckReport run_check(const std::string& name, const RunConfig& cfg);
// All checks whose name matches the glob, in registry order. Checks run concurrently
// when `parallel`; `on_done` is called from the calling thread in registry order.
std::vector<CheckReport> run_suite(const std::string& filter, const RunConfig& cfg, bool parallel = false,
                                   const std::function<void(const CheckReport&)>& on_done = {});

enum class ReportFormat { Csv, Json, Both };
// CSV: <dir>/<check>.csv (quantity,value,relation,lo,hi,pass) and <dir>/<check>_<table>.csv;
// JSON: <dir>/report.json with every report. Returns the files written.
std::vector<std::string> emit_report(const std::vector<CheckReport>& reports, ReportFormat fmt, const std::string& dir);
std::string report_json(const std::vector<CheckReport>& reports, const RunConfig& cfg);

}  // namespace heis::checks
