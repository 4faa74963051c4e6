#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "heis/checks.hpp"

using namespace heis::checks;

namespace {
std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}
}  // namespace

TEST_SUITE("checks") {
  TEST_CASE("config text round trip and hash") {
    auto c = RunConfig::from_text("# desk\nN_max = 24\ngrid.L = 5   # cube\ngrid.n = 48\nseed = 7\ntol.plancherel.relative_defect = 0.03\n");
    CHECK(c.N_max == 24);
    CHECK(c.grid.Lx == 5.0);
    CHECK(c.grid.ns == 48);
    CHECK(c.seed == 7);
    CHECK(c.tol("plancherel", "relative_defect", 0.02) == 0.03);
    CHECK(c.tol("plancherel", "other", 0.02) == 0.02);
    auto back = RunConfig::from_text(c.to_text());
    CHECK(back.to_text() == c.to_text());
    CHECK(back.hash() == c.hash());
    CHECK(RunConfig{}.hash() != c.hash());
    CHECK_NOTHROW(c.validate());
    CHECK(c.memory_estimate_mb() > 0.0);
  }

  TEST_CASE("bad configuration is rejected") {
    CHECK_THROWS_AS(RunConfig::from_text("nonsense = 1"), ConfigError);
    CHECK_THROWS_AS(RunConfig::from_text("N_max = abc"), ConfigError);
    CHECK_THROWS_AS(RunConfig::from_text("no equals sign"), ConfigError);
    CHECK_THROWS_AS(RunConfig::from_file("/nonexistent/heis.cfg"), ConfigError);
    auto c = RunConfig::from_text("grid.n = 1");
    CHECK_THROWS_AS(c.validate(), ConfigError);
    CHECK_THROWS_AS(run_check("no-such-check", RunConfig{}), ConfigError);
  }

  TEST_CASE("glob matching") {
    CHECK(glob_match("*", "lp-bony"));
    CHECK(glob_match("lp-*", "lp-bony"));
    CHECK(glob_match("lp-b?ny", "lp-bony"));
    CHECK_FALSE(glob_match("lp-*", "moyal"));
    CHECK_FALSE(glob_match("lp", "lp-bony"));
  }

  TEST_CASE("registry covers every criterion once") {
    const auto& reg = registry();
    CHECK(reg.size() == 19);
    for (std::size_t i = 0; i < reg.size(); ++i) {
      CHECK(reg[i].criterion == static_cast<int>(i) + 1);
      CHECK(find_check(reg[i].name) == &reg[i]);
    }
  }

  TEST_CASE("runs are deterministic and artifacts are written") {
    RunConfig cfg;
    auto dir = std::filesystem::temp_directory_path() / "heis_unit_checks";
    std::filesystem::remove_all(dir);
    auto a = run_suite("group-axioms", cfg);
    auto b = run_suite("moyal", cfg);
    REQUIRE(a.size() == 1);
    REQUIRE(b.size() == 1);
    CHECK(a[0].pass);
    CHECK(b[0].pass);
    CHECK(a[0].config_hash == cfg.hash());
    CHECK(a[0].summary_line().rfind("[PASS] 01", 0) == 0);
    auto files = emit_report(b, ReportFormat::Both, (dir / "one").string());
    auto again = emit_report(run_suite("moyal", cfg), ReportFormat::Both, (dir / "two").string());
    REQUIRE(files.size() == again.size());
    CHECK(slurp(dir / "one" / "moyal.csv") == slurp(dir / "two" / "moyal.csv"));
    CHECK(slurp(dir / "one" / "moyal.csv").rfind("quantity,value,relation,lo,hi,pass", 0) == 0);
    CHECK(std::filesystem::exists(dir / "one" / "report.json"));
    std::filesystem::remove_all(dir);
  }
}
