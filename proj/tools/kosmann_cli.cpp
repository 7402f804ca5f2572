// Command-line front end: load a geometry file, run check suites or the
// reduction/oracle pipelines, emit a JSON report.  Exit codes: 0 all pass,
// 1 a check failed, 2 the file or the invocation is bad, 3 internal bug.

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "kosmann/checks.hpp"
#include "kosmann/error.hpp"

namespace {

std::uint64_t env_seed() {
  if (const char* env = std::getenv("KOSMANN_SEED")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end == env || *end != '\0')
      throw kosmann::ValidationError("KOSMANN_SEED is not an unsigned integer");
    return v;
  }
  return 4242;
}

void emit(const std::string& json, const std::string& outPath) {
  if (outPath.empty()) {
    std::cout << json;
    return;
  }
  std::ofstream f(outPath, std::ios::binary);
  if (!f) throw kosmann::ValidationError("cannot write '" + outPath + "'");
  f << json;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace kosmann;

  CLI::App app{"chart-level consistency checks for covariant Lie derivatives"};
  app.require_subcommand(1);

  std::string specPath, outPath, suite = "all", groupTag = "so2";
  std::uint64_t seed = 0;
  double tolVal = 0.0;

  CLI::App* check = app.add_subcommand("check", "run a named check suite");
  check->add_option("spec", specPath, "geometry file")->required();
  check->add_option("--suite", suite, "suite name, or 'all' for the file's list");
  CLI::Option* checkSeed = check->add_option("--seed", seed, "random draw seed");
  CLI::Option* checkTol = check->add_option("--tol", tolVal, "override every pass threshold");
  check->add_option("--out", outPath, "write the report here instead of stdout");

  CLI::App* reduce = app.add_subcommand("reduce", "split the coframe along the fiber action");
  reduce->add_option("spec", specPath, "geometry file")->required();
  CLI::Option* reduceSeed = reduce->add_option("--seed", seed, "random draw seed");
  reduce->add_option("--out", outPath, "write the report here instead of stdout");

  CLI::App* oracle = app.add_subcommand("oracle", "compare against the bundle-level lift");
  oracle->add_option("spec", specPath, "geometry file")->required();
  oracle->add_option("--group", groupTag, "structure group")
      ->check(CLI::IsMember({"so2", "so11", "so3"}));
  CLI::Option* oracleSeed = oracle->add_option("--seed", seed, "random draw seed");
  CLI::Option* oracleTol = oracle->add_option("--tol", tolVal, "override every pass threshold");
  oracle->add_option("--out", outPath, "write the report here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (check->parsed()) {
      if (!is_suite_name(suite)) throw ValidationError("unknown suite '" + suite + "'");
      const GeometrySpec spec = load_spec(specPath);
      SuiteConfig cfg;
      cfg.seed = checkSeed->count() ? seed : env_seed();
      if (checkTol->count()) cfg.tol = tolVal;
      const auto t0 = std::chrono::steady_clock::now();
      const std::vector<CheckRecord> records = run_suite(spec, suite, cfg);
      const double ms =
          std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
              .count();
      emit(check_report_json(spec, suite, cfg, records, ms), outPath);
      return records_pass(records) ? 0 : 1;
    }
    if (reduce->parsed()) {
      const GeometrySpec spec = load_spec(specPath);
      const RenderedReport rep =
          reduction_report(spec, reduceSeed->count() ? seed : env_seed());
      emit(rep.json, outPath);
      return rep.pass ? 0 : 1;
    }
    const GeometrySpec spec = load_spec(specPath);
    std::optional<double> tol;
    if (oracleTol->count()) tol = tolVal;
    const RenderedReport rep = oracle_report(spec, group_from_tag(groupTag),
                                             oracleSeed->count() ? seed : env_seed(), tol);
    emit(rep.json, outPath);
    return rep.pass ? 0 : 1;
  } catch (const InternalError& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  }
}
