#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace kosmann {

struct Chart {
  std::string name;
  std::vector<std::string> coords;
  std::vector<std::array<double, 2>> box;  // one [lo, hi] per coordinate
  int dim() const { return static_cast<int>(coords.size()); }
};

// Deterministic low-discrepancy points in the chart box (Halton with a
// seed-derived rotation), inset from the boundary so closed-box fixtures do
// not evaluate on coordinate singularities at the edges.
std::vector<std::vector<double>> sample_points(const Chart& chart, int count,
                                               std::uint64_t seed);

std::vector<std::vector<double>> sample_box(
    const std::vector<std::array<double, 2>>& box, int count, std::uint64_t seed);

}  // namespace kosmann
