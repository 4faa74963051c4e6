#include <tbb/global_control.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include "CLI11.hpp"
#include "heis/checks.hpp"
#include "heis/hpdo.hpp"

namespace hc = heis::checks;

namespace {

std::string columns_help() {
  std::ostringstream os;
  os << "Artifacts (--out DIR):\n"
        "  <check>.csv           quantity,value,relation,lo,hi,pass   (relation: <=, >=, in, true, info)\n"
        "  <check>_<table>.csv   per-check tables:\n";
  for (const auto& c : hc::registry())
    if (!c.columns.empty()) os << "    " << c.name << "  " << c.columns << "\n";
  os << "  report.json           every report with runtimes and config hash\n"
        "  demo counterexample:  counterexample_demo.csv with S,sup\n"
        "Exit codes: 0 all pass, 1 check failure, 2 config error.\n";
  return os.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical checks for pseudodifferential operators on the Heisenberg group"};
  app.require_subcommand(1);
  app.footer(columns_help());

  std::string config_path, out_dir, format = "both";
  std::vector<std::string> overrides;
  int threads = -1;
  app.add_option("--config", config_path, "key = value config file")->check(CLI::ExistingFile);
  app.add_option("--out", out_dir, "directory for CSV/JSON artifacts");
  app.add_option("--threads", threads, "worker threads (0: all cores)")->check(CLI::NonNegativeNumber);
  app.add_option("--set", overrides, "config override key=value (repeatable)");
  app.add_option("--format", format, "artifact format")->check(CLI::IsMember({"csv", "json", "both"}));

  app.fallthrough();  // global options may follow the subcommand
  auto* list = app.add_subcommand("list", "list registered checks");
  auto* check = app.add_subcommand("check", "run one check by name");
  std::string check_name;
  check->add_option("name", check_name, "check name")->required();
  auto* suite = app.add_subcommand("suite", "run all checks matching a glob");
  std::string filter = "*";
  bool parallel = false;
  suite->add_option("filter", filter, "glob over check names, e.g. lp-*");
  suite->add_flag("--parallel", parallel, "run checks concurrently");
  auto* demo = app.add_subcommand("demo", "demonstrations");
  auto* cex = demo->add_subcommand("counterexample", "growth of s^N Op(|lambda|^{k+1/2}) f at w = (0, 0, s)");
  demo->require_subcommand(1);
  int k = 1, N = -1;
  cex->add_option("--k", k, "exponent k")->check(CLI::Range(0, 8));
  cex->add_option("--N", N, "power of s (default 2k + 4)")->check(CLI::Range(0, 40));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  hc::RunConfig cfg;
  try {
    if (!config_path.empty()) cfg = hc::RunConfig::from_file(config_path);
    for (const auto& kv : overrides) {
      auto eq = kv.find('=');
      if (eq == std::string::npos) throw hc::ConfigError("--set expects key=value, got '" + kv + "'");
      cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (threads >= 0) cfg.threads = threads;
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    cfg.validate();
  } catch (const hc::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  }
  std::unique_ptr<tbb::global_control> gc;
  if (cfg.threads > 0) gc = std::make_unique<tbb::global_control>(tbb::global_control::max_allowed_parallelism, cfg.threads);

  if (*list) {
    for (const auto& c : hc::registry()) std::printf("%-19s %2d  %s\n", c.name.c_str(), c.criterion, c.title.c_str());
    return 0;
  }

  auto fmt = format == "csv" ? hc::ReportFormat::Csv : format == "json" ? hc::ReportFormat::Json : hc::ReportFormat::Both;
  std::printf("config %s, memory estimate %.0f MB\n", cfg.hash().c_str(), cfg.memory_estimate_mb());

  try {
    if (*cex) {
      if (N < 0) N = 2 * k + 4;
      auto rows = heis::counterexample_demo(k, N);
      std::ostringstream csv;
      csv << "S,sup\n";
      bool inc = true;
      for (std::size_t i = 0; i < rows.size(); ++i) {
        char line[64];
        std::snprintf(line, sizeof line, "%.17g,%.17g\n", rows[i].S, rows[i].sup);
        csv << line;
        if (i > 0) inc = inc && rows[i].sup > rows[i - 1].sup;
      }
      std::cout << csv.str() << (inc ? "strictly increasing\n" : "not strictly increasing\n");
      if (!cfg.out_dir.empty()) {
        hc::CheckReport r;
        r.name = "counterexample_demo";
        r.pass = inc;
        hc::Table t{"rows", {"S", "sup"}, {}};
        for (const auto& row : rows) t.rows.push_back({row.S, row.sup});
        r.tables.push_back(t);
        for (const auto& f : hc::emit_report({r}, hc::ReportFormat::Csv, cfg.out_dir)) std::printf("wrote %s\n", f.c_str());
      }
      return inc ? 0 : 1;
    }

    std::vector<hc::CheckReport> reports;
    auto print = [](const hc::CheckReport& r) {
      std::printf("%s  (%.1f s)\n", r.summary_line().c_str(), r.runtime_s);
      std::fflush(stdout);
    };
    if (*check) {
      reports.push_back(hc::run_check(check_name, cfg));
      print(reports.back());
    } else {
      reports = hc::run_suite(filter, cfg, parallel, print);
      if (reports.empty()) throw hc::ConfigError("no check matches '" + filter + "'");
    }
    if (!cfg.out_dir.empty()) {
      if (fmt != hc::ReportFormat::Json) hc::emit_report(reports, hc::ReportFormat::Csv, cfg.out_dir);
      if (fmt != hc::ReportFormat::Csv) {
        // written here rather than by emit_report so the config text goes along
        std::filesystem::create_directories(cfg.out_dir);
        std::ofstream js(cfg.out_dir + "/report.json");
        js << hc::report_json(reports, cfg) << "\n";
      }
    }
    int failed = 0;
    for (const auto& r : reports) failed += !r.pass;
    std::printf("%zu checks, %d failed\n", reports.size(), failed);
    return failed ? 1 : 0;
  } catch (const hc::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  }
}
