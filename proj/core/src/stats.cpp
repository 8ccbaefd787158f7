#include "isoeb/stats.hpp"

#include <boost/math/distributions/chi_squared.hpp>

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace isoeb {

double pairwise_sum(std::span<const double> x) {
  const std::size_t n = x.size();
  if (n == 0) return 0.0;
  if (n <= 8) {
    double s = 0.0;
    for (double v : x) s += v;
    return s;
  }
  const std::size_t half = n / 2;
  return pairwise_sum(x.subspan(0, half)) + pairwise_sum(x.subspan(half));
}

MeanSe mean_se(std::span<const double> x) {
  MeanSe out;
  out.n = x.size();
  if (out.n == 0) return out;
  out.mean = pairwise_sum(x) / static_cast<double>(out.n);
  if (out.n < 2) return out;
  std::vector<double> sq(out.n);
  for (std::size_t i = 0; i < out.n; ++i) {
    const double d = x[i] - out.mean;
    sq[i] = d * d;
  }
  const double var =
      pairwise_sum(sq) / static_cast<double>(out.n - 1);
  out.se = std::sqrt(var / static_cast<double>(out.n));
  return out;
}

double normal_cdf(double x) {
  return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

double chi_squared_cdf(double k, double x) {
  if (x <= 0.0) return 0.0;
  boost::math::chi_squared dist(k);
  return boost::math::cdf(dist, x);
}

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("fit_line: need two equal-length samples");
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  LineFit f;
  f.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  f.intercept = (sy - f.slope * sx) / n;
  return f;
}

int ceil_log2(double x) {
  if (!(x > 0.0)) throw std::invalid_argument("ceil_log2: x must be > 0");
  int k = 0;
  while (std::ldexp(1.0, k) < x) ++k;
  while (std::ldexp(1.0, k - 1) >= x) --k;
  return k;
}

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace isoeb
