#include "kosmann/chart.hpp"

#include <cmath>

#include "kosmann/error.hpp"

namespace kosmann {

namespace {

double radical_inverse(std::uint64_t i, std::uint64_t base) {
  double r = 0.0, f = 1.0 / static_cast<double>(base);
  while (i > 0) {
    r += f * static_cast<double>(i % base);
    i /= base;
    f /= static_cast<double>(base);
  }
  return r;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

}  // namespace

std::vector<std::vector<double>> sample_box(
    const std::vector<std::array<double, 2>>& box, int count, std::uint64_t seed) {
  static const std::uint64_t primes[] = {2, 3, 5, 7, 11, 13, 17, 19};
  const std::size_t dim = box.size();
  if (dim > 8) throw ValidationError("sample grid supports at most 8 dimensions");
  std::vector<double> shift(dim);
  for (std::size_t j = 0; j < dim; ++j)
    shift[j] = static_cast<double>(splitmix64(seed ^ (0x51ed2701ull + j)) >> 11) * 0x1.0p-53;
  std::vector<std::vector<double>> pts;
  pts.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    std::vector<double> p(dim);
    for (std::size_t j = 0; j < dim; ++j) {
      double u = radical_inverse(static_cast<std::uint64_t>(i) + 1, primes[j]) + shift[j];
      u -= std::floor(u);
      p[j] = box[j][0] + (0.05 + 0.9 * u) * (box[j][1] - box[j][0]);
    }
    pts.push_back(std::move(p));
  }
  return pts;
}

std::vector<std::vector<double>> sample_points(const Chart& chart, int count,
                                               std::uint64_t seed) {
  return sample_box(chart.box, count, seed);
}

}  // namespace kosmann
