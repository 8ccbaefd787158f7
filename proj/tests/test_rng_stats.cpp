#include <doctest.h>

#include <cmath>
#include <vector>

#include "isoeb/rng.hpp"
#include "isoeb/stats.hpp"

using namespace isoeb;

TEST_CASE("identical (seed, stream) reproduces identical draws") {
  RngStream a(42, 7), b(42, 7);
  for (int i = 0; i < 1000; ++i) CHECK(a.normal() == b.normal());
}

TEST_CASE("distinct streams are decorrelated") {
  RngStream a(42, 0), b(42, 1);
  const int n = 20000;
  double dot = 0.0;
  for (int i = 0; i < n; ++i) dot += a.normal() * b.normal();
  // correlation ~ N(0, 1/n); 5 sigma band
  CHECK(std::abs(dot / n) < 5.0 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("uniform stays in (0, 1]") {
  RngStream rng(1, 0);
  for (int i = 0; i < 10000; ++i) {
    const double u = rng.uniform();
    CHECK(u > 0.0);
    CHECK(u <= 1.0);
  }
}

TEST_CASE("normal moments") {
  RngStream rng(3, 0);
  const int n = 200000;
  std::vector<double> draws(n);
  for (double& d : draws) d = rng.normal();
  const MeanSe ms = mean_se(draws);
  CHECK(std::abs(ms.mean) < 4.0 * ms.se);
  double var = 0.0;
  for (double d : draws) var += d * d;
  var /= n;
  CHECK(var == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("pairwise sum is order-deterministic and accurate") {
  std::vector<double> x(10001);
  for (std::size_t i = 0; i < x.size(); ++i)
    x[i] = (i % 2 == 0 ? 1.0 : -1.0) / static_cast<double>(i + 1);
  const double s1 = pairwise_sum(x);
  const double s2 = pairwise_sum(x);
  CHECK(s1 == s2);
  double plain = 0.0;
  for (double v : x) plain += v;
  CHECK(s1 == doctest::Approx(plain).epsilon(1e-12));
}

TEST_CASE("ceil_log2 exact at powers of two") {
  CHECK(ceil_log2(1.0) == 0);
  CHECK(ceil_log2(2.0) == 1);
  CHECK(ceil_log2(8.0) == 3);
  CHECK(ceil_log2(8.000001) == 4);
  CHECK(ceil_log2(7.999999) == 3);
  CHECK(ceil_log2(0.5) == -1);
}

TEST_CASE("chi-square cdf reference points") {
  // P(chi^2_1 <= 1) = 0.682689..., P(chi^2_100 <= 100) ~ 0.5188
  CHECK(chi_squared_cdf(1, 1) == doctest::Approx(0.6826894921).epsilon(1e-8));
  CHECK(chi_squared_cdf(100, 100) == doctest::Approx(0.5188).epsilon(1e-3));
}

TEST_CASE("fmt17 round-trips doubles") {
  const double values[] = {0.1, 1.0 / 3.0, 1e-300, 12345.6789, -2.5e17};
  for (double v : values) {
    const std::string s = fmt17(v);
    CHECK(std::stod(s) == v);
  }
}
