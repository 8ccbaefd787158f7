#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "isoeb/rng.hpp"

namespace isoeb {

/// A Gaussian sequence observation y_i = theta_i + eps_i with
/// eps_i ~ N(0, sigma2 / n_effective), i = 1..p.
struct SequenceProblem {
  std::vector<double> y;
  double noise_var = 1.0;    // lambda = sigma2 / n_effective
  double n_effective = 1.0;  // effective sample size n
  double sigma2 = 1.0;
  std::optional<std::vector<double>> truth;  // theta, simulation only

  std::size_t dim() const { return y.size(); }
};

/// Ordered sparse class: at most s nonzero coefficients with nonincreasing
/// squared magnitudes bounded by R.
struct OrderedSparseClass {
  std::size_t s = 1;
  double R = 1.0;
  std::size_t p = 1;
};

/// Ellipsoid { theta : sum_i i^{2 beta} theta_i^2 <= R^2 }, beta > 1/2.
struct SobolevEllipsoid {
  double beta = 1.0;
  double R = 1.0;
  std::size_t p = 1;
};

/// Checks the three class predicates exactly: head squared magnitudes
/// nonincreasing, theta_1^2 <= R, zero tail after some k <= s.
bool in_ordered_sparse_class(std::span<const double> theta,
                             const OrderedSparseClass& cls);

bool in_sobolev_ellipsoid(std::span<const double> theta,
                          const SobolevEllipsoid& ell);

/// Draws k uniform on {1..s}, k amplitudes i.i.d. uniform on [0, sqrt(R)]
/// with random signs, magnitudes sorted in decreasing order, zero tail.
std::vector<double> sample_ordered_sparse(const OrderedSparseClass& cls,
                                          RngStream& rng);

/// Gaussian coefficients with variance proportional to i^{-2 beta - 1},
/// rescaled onto the ellipsoid when the constraint is violated. With
/// `monotone` the magnitudes are rearranged in decreasing order (which can
/// only reduce the ellipsoid norm, so membership is preserved).
std::vector<double> sample_sobolev(const SobolevEllipsoid& ell, RngStream& rng,
                                   bool monotone = false);

/// Deterministic extremal members of the ordered sparse class, used by the
/// risk laboratory to approximate suprema over the class.
enum class AdversarialProfile {
  FlatAtSqrtR,     // theta_i = sqrt(R) for i <= s
  GeometricDecay,  // theta_i^2 = R * 2^{-(i-1)} for i <= s
  SingleSpike,     // theta_1 = sqrt(R)
};

std::vector<double> adversarial_theta(AdversarialProfile profile,
                                      const OrderedSparseClass& cls);

/// y = theta + eps with eps i.i.d. N(0, sigma2 / n_effective); records theta.
SequenceProblem simulate(std::span<const double> theta, double sigma2,
                         double n_effective, RngStream& rng);

}  // namespace isoeb
