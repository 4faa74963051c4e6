// Runs every acceptance criterion at the default configuration, one line per criterion.
//
// --known-infeasible <check>.<quantity> names a measurement that is expected to fail (see README).
// Criteria still print FAIL for it; the exit status is 0 only when every failing measurement is
// on that list and every listed measurement does fail, so an unrelated regression or a stale
// entry both turn the run red.
#include <cstdio>
#include <cstring>
#include <set>
#include <string>

#include "heis/checks.hpp"

namespace hc = heis::checks;

int main(int argc, char** argv) {
  hc::RunConfig cfg;
  std::string filter = "*";
  std::set<std::string> known;
  for (int i = 1; i < argc; ++i) {
    if (!std::strcmp(argv[i], "--out") && i + 1 < argc) cfg.out_dir = argv[++i];
    else if (!std::strcmp(argv[i], "--filter") && i + 1 < argc) filter = argv[++i];
    else if (!std::strcmp(argv[i], "--known-infeasible") && i + 1 < argc) known.insert(argv[++i]);
    else {
      std::fprintf(stderr, "usage: heis_acceptance [--out DIR] [--filter GLOB] [--known-infeasible CHECK.QUANTITY]...\n");
      return 2;
    }
  }
  int failed = 0, unexpected = 0;
  std::set<std::string> seen;
  auto reports = hc::run_suite(filter, cfg, false, [&](const hc::CheckReport& r) {
    std::printf("%s  (%.1f s)\n", r.summary_line().c_str(), r.runtime_s);
    failed += !r.pass;
    if (!r.error.empty()) ++unexpected;
    for (const auto& m : r.values) {
      if (m.pass) continue;
      std::string key = r.name + "." + m.quantity;
      if (known.count(key)) {
        seen.insert(key);
        std::printf("    known infeasible: %s\n", key.c_str());
      } else {
        ++unexpected;
      }
    }
    std::fflush(stdout);
  });
  if (!cfg.out_dir.empty()) hc::emit_report(reports, hc::ReportFormat::Both, cfg.out_dir);
  std::printf("%zu criteria, %d failed\n", reports.size(), failed);
  int stale = 0;
  for (const auto& k : known) {
    bool ran = false;
    for (const auto& r : reports) ran |= k.rfind(r.name + ".", 0) == 0;
    if (ran && !seen.count(k)) {
      std::printf("known-infeasible entry now passes: %s\n", k.c_str());
      ++stale;
    }
  }
  if (known.empty()) return failed ? 1 : 0;
  return unexpected || stale ? 1 : 0;
}
