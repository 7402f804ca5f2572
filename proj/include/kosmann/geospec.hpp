#pragma once

// Geometry description files: a chart with box and signature, an orthonormal
// coframe, named vector fields and gauge matrices, an optional reduction
// block and spinor fields, tolerance overrides, and the expected verdicts
// that make a file self-checking.  Loading fully validates the file; every
// diagnostic carries the file name and line.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "kosmann/frame.hpp"
#include "kosmann/spinor.hpp"

namespace kosmann {

struct ChartSpec {
  std::string name;
  std::vector<std::string> coords;
  std::vector<std::array<double, 2>> box;
  int dim() const { return static_cast<int>(coords.size()); }
};

struct VectorFieldSpec {
  std::string name;
  VectorField field;
  std::optional<bool> killing;  // expected verdict, when the file states one
};

struct GaugeSpec {
  std::string name;
  FormField gamma;
};

struct KKSpec {
  bool present = false;
  std::vector<std::string> fieldNames;
  std::vector<double> periods;
  std::vector<int> monopoleAxes;  // empty: no flux quadrature configured
  std::vector<std::array<double, 2>> monopoleBounds;
};

struct SpinorSpec {
  std::string name;
  SpinorForm psi;
};

struct ExpectSpec {
  std::vector<std::pair<std::string, bool>> suites;
  std::optional<SF> phi;        // expected reduction scalar, on the base chart
  std::optional<double> monopole;
};

struct GeometrySpec {
  std::string path;
  ChartSpec chart;
  Signature sig;
  Coframe coframe;
  std::vector<VectorFieldSpec> vfields;
  std::vector<GaugeSpec> gauges;
  KKSpec kk;
  std::vector<SpinorSpec> spinors;
  std::vector<std::pair<std::string, double>> tolerances;
  ExpectSpec expect;

  const VectorFieldSpec* find_field(const std::string& name) const;
  double tolerance(const std::string& key, double fallback) const;
  std::vector<std::vector<double>> points(int count, std::uint64_t seed) const;
};

GeometrySpec load_spec(const std::string& path);
GeometrySpec load_spec_text(const std::string& text, const std::string& displayPath);

}  // namespace kosmann
