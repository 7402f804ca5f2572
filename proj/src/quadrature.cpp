#include "kosmann/quadrature.hpp"

#include <cmath>

#include "kosmann/error.hpp"

namespace kosmann {

namespace {

double pairwise_sum(const double* v, std::size_t n) {
  if (n <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += v[i];
    return s;
  }
  const std::size_t half = n / 2;
  return pairwise_sum(v, half) + pairwise_sum(v + half, n - half);
}

}  // namespace

QuadRule gauss_legendre(int n) {
  if (n < 1) throw ValidationError("gauss_legendre: need at least one node");
  QuadRule r;
  r.x.assign(static_cast<std::size_t>(n), 0.0);
  r.w.assign(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(M_PI * (static_cast<double>(i) + 0.75) /
                        (static_cast<double>(n) + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    r.x[static_cast<std::size_t>(i)] = -x;
    r.x[static_cast<std::size_t>(n - 1 - i)] = x;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    r.w[static_cast<std::size_t>(i)] = w;
    r.w[static_cast<std::size_t>(n - 1 - i)] = w;
  }
  return r;
}

double integrate_box(const SF& f, const std::vector<int>& axes,
                     const std::vector<std::array<double, 2>>& bounds,
                     std::vector<double> basePoint, int nodesPerDim) {
  const std::size_t d = axes.size();
  if (d == 0 || d != bounds.size())
    throw ValidationError("integrate_box: axes and bounds must match and be nonempty");
  for (int ax : axes)
    if (ax < 0 || ax >= static_cast<int>(basePoint.size()))
      throw ValidationError("integrate_box: axis outside the chart");

  const QuadRule rule = gauss_legendre(nodesPerDim);
  std::vector<double> mid(d), half(d);
  double scale = 1.0;
  for (std::size_t i = 0; i < d; ++i) {
    mid[i] = 0.5 * (bounds[i][0] + bounds[i][1]);
    half[i] = 0.5 * (bounds[i][1] - bounds[i][0]);
    scale *= half[i];
  }

  std::vector<std::size_t> idx(d, 0);
  std::vector<double> terms;
  terms.reserve(static_cast<std::size_t>(std::pow(nodesPerDim, static_cast<int>(d))));
  for (;;) {
    double w = 1.0;
    for (std::size_t i = 0; i < d; ++i) {
      basePoint[static_cast<std::size_t>(axes[i])] = mid[i] + half[i] * rule.x[idx[i]];
      w *= rule.w[idx[i]];
    }
    terms.push_back(w * sf_value(f, basePoint));
    std::size_t i = 0;
    for (; i < d; ++i) {
      if (++idx[i] < rule.x.size()) break;
      idx[i] = 0;
    }
    if (i == d) break;
  }
  return scale * pairwise_sum(terms.data(), terms.size());
}

}  // namespace kosmann
