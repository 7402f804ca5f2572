#pragma once

// Named check suites over a loaded geometry file, and the deterministic JSON
// reports the command-line tool emits.  Every residual in a report is printed
// with 17 significant digits and keys keep a fixed order, so reports are
// byte-stable for a given (file, suite, seed) apart from runtime fields.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "kosmann/geospec.hpp"
#include "kosmann/oracle.hpp"

namespace kosmann {

struct CheckRecord {
  std::string name;    // "torsion", "killing:rotation", ...
  std::string anchor;  // stable tag for what property the check pins down
  bool pass = false;
  double residual = 0.0;
  std::vector<double> worst;  // sample point of the worst residual, may be empty
  std::string note;
  double runtimeMs = 0.0;
};

struct SuiteConfig {
  std::uint64_t seed = 4242;
  std::optional<double> tol;  // overrides every pass threshold when set
};

const std::vector<std::string>& suite_names();
bool is_suite_name(const std::string& name);

// Runs one suite (or "all": the suites the file's expectations name).
// Throws ValidationError when the file lacks what the suite needs.
std::vector<CheckRecord> run_suite(const GeometrySpec& spec,
                                   const std::string& suite,
                                   const SuiteConfig& cfg);

bool records_pass(const std::vector<CheckRecord>& records);

std::string check_report_json(const GeometrySpec& spec, const std::string& suite,
                              const SuiteConfig& cfg,
                              const std::vector<CheckRecord>& records,
                              double totalMs);

struct RenderedReport {
  bool pass = false;
  std::string json;
};

// The reduction pipeline on the file's [kk] block: connection split, adapted
// frame, scalar and flux expectations.
RenderedReport reduction_report(const GeometrySpec& spec, std::uint64_t seed);

// Bundle-lift comparison over the file's chart with seeded random data.
RenderedReport oracle_report(const GeometrySpec& spec, GroupKind kind,
                             std::uint64_t seed, std::optional<double> tol);

}  // namespace kosmann
