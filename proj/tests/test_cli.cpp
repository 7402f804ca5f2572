#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <string>

#include "doctest.h"
#include "json.hpp"
#include "kosmann/checks.hpp"
#include "kosmann/error.hpp"
#include "kosmann/tomlmini.hpp"

using namespace kosmann;

namespace {

std::string fixture(const std::string& name) {
  return std::string(KOSMANN_FIXTURES) + "/" + name;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(KOSMANN_CLI) + " " + args;
  const int status = std::system(cmd.c_str());
  REQUIRE(status != -1);
  return WEXITSTATUS(status);
}

nlohmann::json stripped(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  nlohmann::json r = nlohmann::json::parse(in);
  r.erase("runtime_ms");
  if (r.contains("checks"))
    for (auto& c : r["checks"]) c.erase("runtime_ms");
  return r;
}

}  // namespace

TEST_CASE("section files parse into ordered sections") {
  const TomlDocument doc = parse_toml(
      "# header comment\n"
      "[alpha]\n"
      "name = \"first\"\n"
      "count = -3.5\n"
      "flag = true\n"
      "row = [1, 2, [3, \"x\"]]\n"
      "\n"
      "[beta.gamma]\n"
      "empty = []\n"
      "multi = [\n"
      "  1,\n"
      "  2,\n"
      "]\n");
  REQUIRE(doc.sections.size() == 2);
  const TomlSection& a = doc.sections[0];
  CHECK(a.name == "alpha");
  CHECK(a.entries.size() == 4);
  CHECK(a.find("name")->str == "first");
  CHECK(a.find("count")->num == -3.5);
  CHECK(a.find("flag")->boolean);
  const TomlValue& row = *a.find("row");
  REQUIRE(row.items.size() == 3);
  CHECK(row.items[2].items[1].str == "x");
  CHECK(doc.find("beta.gamma")->find("empty")->items.empty());
  CHECK(doc.find("beta.gamma")->find("multi")->items.size() == 2);
  CHECK(doc.find("missing") == nullptr);
}

TEST_CASE("section files reject malformed input with line numbers") {
  const auto fails_with = [](const std::string& text, const std::string& what) {
    try {
      parse_toml(text);
      FAIL("expected a parse error for: " << text);
    } catch (const ParseError& e) {
      CHECK(std::string(e.what()).find(what) != std::string::npos);
    }
  };
  fails_with("key = 1\n", "outside any section");
  fails_with("[a]\nkey = 1\nkey = 2\n", "line 3");
  fails_with("[a]\n[a]\n", "duplicate section");
  fails_with("[a]\nkey = \"unterminated\n", "line 2");
  fails_with("[a]\nkey = 1 trailing\n", "line 2");
  fails_with("[a]\nkey = [1, 2\n\n", "array");
}

TEST_CASE("every bundled geometry file loads and validates") {
  for (const char* name : {"flat2d.geo", "flat4d.geo", "s2.geo", "s3_hopf.geo",
                           "schwarzschild.geo", "product_s2xs1.geo", "warped.geo"}) {
    CAPTURE(name);
    const GeometrySpec spec = load_spec(fixture(name));
    const int n = spec.chart.dim();
    CHECK(n >= 2);
    CHECK(spec.sig.dim() == n);
    CHECK(spec.coframe.dim() == n);
    CHECK(!spec.vfields.empty());
    CHECK(!spec.expect.suites.empty());
    for (const auto& [suite, want] : spec.expect.suites) {
      CHECK(is_suite_name(suite));
      CHECK(want);
    }
  }
  const GeometrySpec sch = load_spec(fixture("schwarzschild.geo"));
  CHECK(sch.chart.coords == std::vector<std::string>{"t", "r", "th", "ph"});
  CHECK(sch.sig.p == 1);
  CHECK(sch.find_field("tshift") != nullptr);
  CHECK(sch.find_field("absent") == nullptr);
}

TEST_CASE("loader diagnostics carry the file location") {
  const auto fails_with = [](const std::string& text, const std::string& what) {
    try {
      load_spec_text(text, "mem.geo");
      FAIL("expected a validation error mentioning: " << what);
    } catch (const Error& e) {
      CHECK(std::string(e.what()).find("mem.geo") != std::string::npos);
      CHECK(std::string(e.what()).find(what) != std::string::npos);
    }
  };
  fails_with("[coframe]\nrows = []\n", "no [chart");
  fails_with("[chart.c]\ncoords = [\"x\"]\nbox = [[-1, 1]]\nsignature = [0, 2]\n"
             "[coframe]\nrows = [[\"1\"]]\n",
             "signature");
  fails_with("[chart.c]\ncoords = [\"x\"]\nbox = [[1, -1]]\nsignature = [0, 1]\n"
             "[coframe]\nrows = [[\"1\"]]\n",
             "lo >= hi");
  fails_with("[chart.c]\ncoords = [\"x\"]\nbox = [[-1, 1]]\nsignature = [0, 1]\n"
             "[coframe]\nrows = [[\"1\", \"0\"]]\n",
             "row has 2 components");
  fails_with("[chart.c]\ncoords = [\"x\"]\nbox = [[-1, 1]]\nsignature = [0, 1]\n"
             "[coframe]\nrows = [[\"sin(q)\"]]\n",
             "unknown identifier");
  fails_with("[chart.c]\ncoords = [\"x\"]\nbox = [[-1, 1]]\nsignature = [0, 1]\n"
             "[coframe]\nrows = [[\"1\"]]\n[kk]\nfields = [\"ghost\"]\nperiods = [1]\n",
             "unknown vector field");
  fails_with("[chart.c]\ncoords = [\"x\"]\nbox = [[-1, 1]]\nsignature = [0, 1]\n"
             "[coframe]\nrows = [[\"1\"]]\n[expect]\nbogus = true\n",
             "not a check suite");
}

TEST_CASE("suite registry and direct suite runs") {
  CHECK(is_suite_name("killing"));
  CHECK(is_suite_name("all"));
  CHECK(!is_suite_name("bogus"));
  CHECK(suite_names().size() == 11);

  const GeometrySpec spec = load_spec(fixture("schwarzschild.geo"));
  SuiteConfig cfg;
  const auto records = run_suite(spec, "killing", cfg);
  REQUIRE(records.size() == spec.vfields.size());
  CHECK(records_pass(records));
  for (const auto& r : records) {
    CHECK(r.anchor == "killing-equivalence");
    CHECK(r.worst.size() == 4);
  }
  CHECK(records[0].name == "killing:tshift");
  CHECK(records[0].residual < 1e-9);

  CHECK_THROWS_AS(static_cast<void>(run_suite(spec, "kk-reduce", cfg)),
                  ValidationError);
  CHECK_THROWS_AS(static_cast<void>(run_suite(spec, "bogus", cfg)),
                  ValidationError);
}

TEST_CASE("reports are deterministic for a fixed seed") {
  const GeometrySpec spec = load_spec(fixture("s2.geo"));
  SuiteConfig cfg;
  cfg.seed = 777;
  const auto r1 = run_suite(spec, "covariance", cfg);
  const auto r2 = run_suite(spec, "covariance", cfg);
  const std::string j1 = check_report_json(spec, "covariance", cfg, r1, 0.0);
  const std::string j2 = check_report_json(spec, "covariance", cfg, r2, 0.0);
  nlohmann::json a = nlohmann::json::parse(j1);
  nlohmann::json b = nlohmann::json::parse(j2);
  for (auto* r : {&a, &b})
    for (auto& c : (*r)["checks"]) c.erase("runtime_ms");
  CHECK(a == b);

  cfg.seed = 778;
  const auto r3 = run_suite(spec, "covariance", cfg);
  bool changed = false;
  for (std::size_t i = 0; i < r1.size(); ++i)
    if (r1[i].residual != r3[i].residual) changed = true;
  CHECK(changed);
}

TEST_CASE("command line: check, reduce, oracle, exit codes") {
  CHECK(run_cli("check " + fixture("flat2d.geo") +
                " --suite killing --out /tmp/kosmann_cli_a.json") == 0);
  CHECK(run_cli("check " + fixture("flat2d.geo") +
                " --suite killing --out /tmp/kosmann_cli_b.json") == 0);
  const nlohmann::json a = stripped("/tmp/kosmann_cli_a.json");
  CHECK(a == stripped("/tmp/kosmann_cli_b.json"));
  CHECK(a["tool"] == "kosmann");
  CHECK(a["suite"] == "killing");
  CHECK(a["pass"].is_boolean());
  CHECK(a["checks"].size() == 3);

  CHECK(run_cli("reduce " + fixture("product_s2xs1.geo") +
                " --out /tmp/kosmann_cli_red.json") == 0);
  const nlohmann::json red = stripped("/tmp/kosmann_cli_red.json");
  CHECK(red["fiber_rank"] == 1);
  CHECK(red["pass"] == true);
  CHECK(std::abs(red["scalar"]["values"][0].get<double>() - 1.0) < 1e-9);
  CHECK(std::abs(red["monopole"]["value"].get<double>()) < 1e-6);

  CHECK(run_cli("oracle " + fixture("s2.geo") +
                " --group so2 --out /tmp/kosmann_cli_or.json") == 0);
  const nlohmann::json orc = stripped("/tmp/kosmann_cli_or.json");
  CHECK(orc["group"] == "so2");
  CHECK(orc["total_dim"] == 3);
  CHECK(orc["lift_residual"].get<double>() < 1e-9);

  CHECK(run_cli("check /does/not/exist.geo --suite killing 2> /dev/null") == 2);
  CHECK(run_cli("check " + fixture("flat2d.geo") +
                " --suite bogus 2> /dev/null") == 2);
  CHECK(run_cli("check " + fixture("flat2d.geo") +
                " --suite kk-reduce 2> /dev/null") == 2);
  CHECK(run_cli("oracle " + fixture("flat4d.geo") +
                " --group so3 2> /dev/null") == 2);

  std::ofstream bad("/tmp/kosmann_cli_bad.geo");
  bad << "[chart.c]\ncoords = [\"x\", \"y\"]\nbox = [[-1, 1], [-1, 1]]\n"
         "signature = [0, 2]\n\n[coframe]\nrows = [[\"1\", \"0\"], [\"0\", \"1\"]]\n\n"
         "[vectorfield.dil]\ncomps = [\"x\", \"y\"]\nkilling = true\n";
  bad.close();
  CHECK(run_cli("check /tmp/kosmann_cli_bad.geo --suite killing > /dev/null") == 1);
}
