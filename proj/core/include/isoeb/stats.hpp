#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace isoeb {

/// Pairwise (cascade) summation. Used wherever bit-reproducible aggregation
/// is required regardless of how replicates were scheduled across workers.
double pairwise_sum(std::span<const double> x);

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;  // standard error of the mean
  std::size_t n = 0;
};

/// Sample mean and its standard error, aggregated by pairwise summation.
MeanSe mean_se(std::span<const double> x);

/// Standard normal CDF.
double normal_cdf(double x);

/// P(chi^2_k <= x).
double chi_squared_cdf(double k, double x);

/// Ordinary least squares slope/intercept of y on x.
struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
};
LineFit fit_line(std::span<const double> x, std::span<const double> y);

/// Smallest integer k with 2^k >= x (x > 0). Exact, no floating log.
int ceil_log2(double x);

/// Format with 17 significant digits (round-trip exact for doubles).
std::string fmt17(double v);

/// FNV-1a 64-bit digest, hex-encoded. Used for manifests and config hashes.
std::string fnv1a_hex(std::string_view bytes);

}  // namespace isoeb
