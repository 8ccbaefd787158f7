#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace isoeb {

/// Nonincreasing, nonnegative local variance sequence.
struct VarianceProfile {
  std::vector<double> v;       // v[0] >= v[1] >= ... >= 0
  std::optional<double> cap;   // upper bound R when the profile was truncated
};

/// Target cone for the isotonic projection.
enum class Cone {
  Nonincreasing,        // v1 >= v2 >= ... >= vp
  NonincreasingNonneg,  // additionally vp >= 0
};

struct IsotonicBlock {
  std::size_t begin = 0;  // [begin, end)
  std::size_t end = 0;
  double value = 0.0;  // pooled weighted mean over the block
};

struct IsotonicFit {
  std::vector<double> values;
  std::vector<IsotonicBlock> blocks;
  double objective = 0.0;  // sum_i w_i (x_i - v_i)^2
};

/// Weighted least-squares projection of x onto the chosen monotone cone,
/// computed by pool-adjacent-violators in O(p).
///
/// The nonnegative variant clamps the monotone fit at zero afterwards. The
/// clamp is exact for this cone: max(v, 0) maps the nonincreasing cone into
/// the nonincreasing-nonnegative cone, is the Euclidean projection onto
/// {v >= 0}, and leaves every cone element fixed, so
/// ||x - clamp(P(x))|| <= ||x - P(x) + (clamp(P(x)) - P(x))|| attains the
/// constrained minimum (clamping only moves pooled values below zero up to
/// the boundary, where the KKT conditions of the clamped blocks still hold).
IsotonicFit pava(std::span<const double> x, std::span<const double> w,
                 Cone cone);

/// Unit-weight overload.
IsotonicFit pava(std::span<const double> x, Cone cone);

/// Left-slope sequence of the least concave majorant of the cumulative sum
/// of x, clamped at zero:
///   out_i = ( min_{h <= i} max_{j >= i} mean(x_h..x_j) )_+ .
/// Direct dynamic-programming evaluation of the min-max form, O(p^2).
std::vector<double> min_max_slopes(std::span<const double> x);

/// Local variance profile from squared observations: applies the min-max
/// slope construction to x_squared - lambda. Entries are nonnegative and
/// nonincreasing.
VarianceProfile lcm_cusum_tau(std::span<const double> x_squared,
                              double lambda);

}  // namespace isoeb
