// Independent reference implementations used only by the tests. Each one
// deliberately takes a different route from the library code it checks.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

namespace oracles {

// Exact projection onto the monotone (optionally nonnegative) cone by
// enumerating all 2^(p-1) contiguous block partitions: the projection is
// piecewise constant at blockwise weighted means, so it appears among the
// feasible candidates and attains the minimal objective.
inline std::vector<double> brute_force_isotonic(std::span<const double> x,
                                                std::span<const double> w,
                                                bool nonneg) {
  const std::size_t p = x.size();
  if (p == 0 || p > 20) throw std::invalid_argument("oracle: p in [1, 20]");
  std::vector<double> best;
  double best_obj = std::numeric_limits<double>::infinity();
  const std::size_t masks = std::size_t{1} << (p - 1);
  std::vector<double> candidate(p);
  for (std::size_t mask = 0; mask < masks; ++mask) {
    std::size_t start = 0;
    bool feasible = true;
    double prev = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < p && feasible; ++i) {
      const bool boundary = i + 1 == p || (mask >> i) & 1;
      if (!boundary) continue;
      double ws = 0.0, wx = 0.0;
      for (std::size_t j = start; j <= i; ++j) {
        ws += w[j];
        wx += w[j] * x[j];
      }
      double value = wx / ws;
      if (nonneg) value = std::max(value, 0.0);
      if (value > prev) feasible = false;
      prev = value;
      for (std::size_t j = start; j <= i; ++j) candidate[j] = value;
      start = i + 1;
    }
    if (!feasible) continue;
    double obj = 0.0;
    for (std::size_t i = 0; i < p; ++i) {
      const double d = x[i] - candidate[i];
      obj += w[i] * d * d;
    }
    if (obj < best_obj) {
      best_obj = obj;
      best = candidate;
    }
  }
  return best;
}

// Least concave majorant slopes by the geometric construction: upper convex
// hull of the CUSUM points (0, 0), (1, S_1), ..., (p, S_p) via a monotone
// chain, then per-index segment slopes, clamped at zero.
inline std::vector<double> lcm_slopes_geometric(std::span<const double> x) {
  const std::size_t p = x.size();
  std::vector<double> sx(p + 1, 0.0), sy(p + 1, 0.0);
  for (std::size_t i = 0; i < p; ++i) {
    sx[i + 1] = static_cast<double>(i + 1);
    sy[i + 1] = sy[i] + x[i];
  }
  std::vector<std::size_t> hull;  // indices of hull vertices
  for (std::size_t i = 0; i <= p; ++i) {
    while (hull.size() >= 2) {
      const std::size_t a = hull[hull.size() - 2], b = hull.back();
      // Keep the chain concave: drop b when it lies on or below chord a-i.
      const double cross = (sx[b] - sx[a]) * (sy[i] - sy[a]) -
                           (sy[b] - sy[a]) * (sx[i] - sx[a]);
      if (cross >= 0.0)
        hull.pop_back();
      else
        break;
    }
    hull.push_back(i);
  }
  std::vector<double> slopes(p, 0.0);
  for (std::size_t k = 0; k + 1 < hull.size(); ++k) {
    const std::size_t a = hull[k], b = hull[k + 1];
    const double slope = (sy[b] - sy[a]) / (sx[b] - sx[a]);
    for (std::size_t i = a; i < b; ++i) slopes[i] = std::max(slope, 0.0);
  }
  return slopes;
}

// Direct evaluation of the min-max average display (triple loop).
inline std::vector<double> min_max_naive(std::span<const double> x) {
  const std::size_t p = x.size();
  std::vector<double> out(p);
  for (std::size_t i = 0; i < p; ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t h = 0; h <= i; ++h) {
      double worst = -std::numeric_limits<double>::infinity();
      for (std::size_t j = i; j < p; ++j) {
        double s = 0.0;
        for (std::size_t l = h; l <= j; ++l) s += x[l];
        worst = std::max(worst, s / static_cast<double>(j - h + 1));
      }
      best = std::min(best, worst);
    }
    out[i] = std::max(best, 0.0);
  }
  return out;
}

// 1-D maximizer on [lo, hi] by golden-section search.
inline double golden_section_max(const std::function<double(double)>& f,
                                 double lo, double hi, double tol = 1e-10) {
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - phi * (b - a), d = a + phi * (b - a);
  while (b - a > tol) {
    if (f(c) > f(d)) {
      b = d;
    } else {
      a = c;
    }
    c = b - phi * (b - a);
    d = a + phi * (b - a);
  }
  return (a + b) / 2.0;
}

// 1-D maximizer over a uniform grid.
inline double grid_max(const std::function<double(double)>& f, double lo,
                       double hi, double step) {
  double best_x = lo, best_f = -std::numeric_limits<double>::infinity();
  for (double x = lo; x <= hi + 1e-15; x += step) {
    const double v = f(x);
    if (v > best_f) {
      best_f = v;
      best_x = x;
    }
  }
  return best_x;
}

// Classical modified Gram-Schmidt of the Vandermonde matrix, as an
// independent orthogonalization route for the polynomial basis.
inline std::vector<std::vector<double>> mgs_vandermonde(
    std::span<const double> x, std::size_t m) {
  const std::size_t n = x.size();
  std::vector<std::vector<double>> cols(m, std::vector<double>(n));
  for (std::size_t j = 0; j < m; ++j)
    for (std::size_t i = 0; i < n; ++i)
      cols[j][i] = std::pow(x[i], static_cast<double>(j));
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t k = 0; k < j; ++k) {
      double dot = 0.0;
      for (std::size_t i = 0; i < n; ++i) dot += cols[j][i] * cols[k][i];
      for (std::size_t i = 0; i < n; ++i) cols[j][i] -= dot * cols[k][i];
    }
    double norm = 0.0;
    for (double v : cols[j]) norm += v * v;
    norm = std::sqrt(norm);
    for (double& v : cols[j]) v /= norm;
  }
  return cols;
}

}  // namespace oracles
