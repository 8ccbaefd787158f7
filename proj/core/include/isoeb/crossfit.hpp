#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "isoeb/isotonic.hpp"
#include "isoeb/rng.hpp"
#include "isoeb/sequence.hpp"

namespace isoeb {

/// Gaussian cloning: one observation split into two independent copies.
///
/// Additive: y_pm = y +- z with z ~ N(0, lambda); each clone has noise
/// variance 2 lambda around theta and y_plus + y_minus = 2 y.
/// Scaled:   y_pm = (y +- z) / sqrt(2); each clone has noise variance lambda
/// around theta / sqrt(2) and y_plus + y_minus = sqrt(2) y.
struct ClonePair {
  std::vector<double> y_plus;
  std::vector<double> y_minus;
  double clone_noise_var = 0.0;  // 2 lambda (additive) or lambda (scaled)
};

enum class CloneVariant { Additive, Scaled };

ClonePair clone_split(const SequenceProblem& problem, RngStream& rng,
                      CloneVariant variant = CloneVariant::Additive);

/// Dyadic bins from a capped pilot fit. Thresholds are t_m = 2^m nu for
/// m = 0..M with M = 1 + ceil(log2(1 + R/nu)), so t_0 = nu and t_M > R + nu.
/// Index i lands in the bin m with t_m <= min(pilot_i, R) + nu < t_{m+1};
/// the per-index weights are 1 / t_{m(i)}.
struct DyadicBinning {
  double nu = 0.0;
  double cap = 0.0;  // R used to cap the pilot
  std::size_t M = 0;
  std::vector<double> thresholds;    // size M + 1
  std::vector<std::size_t> bin_of;   // size p, values in [0, M)
  std::vector<double> weights;       // size p, w_i = 1 / t_{m(i)}
  std::vector<double> pilot;         // capped pilot fit (diagnostic)
};

/// Bins from the unweighted isotonic pilot of the fold-1 variance proxies.
DyadicBinning pilot_bins(std::span<const double> x_fold1, double nu, double R);

/// Weighted isotonic fit of the fold-2 proxies under the bin weights,
/// truncated at R: min(pava(x, w, nonincreasing_nonneg), R) coordinatewise.
VarianceProfile fit_variance_profile(std::span<const double> x_fold2,
                                     const DyadicBinning& bins, double R);

/// Diagonal Gaussian posterior under prior variances tau_i^2 = profile.v[i]
/// and noise variance lambda:
///   mean_i = v_i / (v_i + lambda) * y_i,  var_i = lambda v_i / (v_i + lambda).
struct EBPosterior {
  std::vector<double> mean;
  std::vector<double> var;
  double lambda = 0.0;
};

EBPosterior posterior_shrink(std::span<const double> y_apply,
                             const VarianceProfile& profile, double lambda);

/// Full cross-fit pipeline: clone, square-proxy on the fitting clone, pilot
/// bins, weighted isotonic variance profile truncated at R, posterior-mean
/// shrinkage applied to the independent clone.
///
/// Outputs are always in theta units: under the scaled variant the internal
/// half-scale profile (which targets theta^2 / 2) is doubled and the
/// posterior is rescaled by sqrt(2), which reproduces the additive variant
/// exactly. `bins` stays on the clone scale of the chosen variant.
struct CrossfitResult {
  EBPosterior posterior;     // estimate of theta and posterior variances
  DyadicBinning bins;
  VarianceProfile profile;   // estimate of V_i = theta_i^2, capped at R
};

CrossfitResult crossfit_estimate(const SequenceProblem& problem, double R,
                                 RngStream& rng,
                                 CloneVariant variant = CloneVariant::Additive);

/// Heuristic cap for when no bound R is known: the largest fold-1 proxy
/// value (positive part), in theta^2 units. The pipeline then proceeds as in
/// crossfit_estimate with that cap.
CrossfitResult crossfit_estimate_auto_cap(
    const SequenceProblem& problem, RngStream& rng,
    CloneVariant variant = CloneVariant::Additive);

/// True iff every index satisfies t_m <= V_i + nu < t_{m+1} for its assigned
/// bin (simulation-mode check; V must be on the same scale as the bins).
bool b1_holds(const DyadicBinning& bins, const VarianceProfile& truth,
              double nu);

/// Margin condition: with m* the dyadic index of V_i + nu, requires
/// t_{m*}(1 + kappa) <= V_i + nu <= t_{m*+1}(1 - kappa) for every i.
/// kappa must lie in (0, 1/4).
bool margin_holds(const VarianceProfile& truth, double nu, double kappa);

/// Tail estimate of the noise level over the zero coordinates i > s:
/// sigma2_hat = n / (p - s) * sum_{i > s} y_i^2. Returns (sigma2_hat,
/// lambda_hat = sigma2_hat / n).
std::pair<double, double> tail_sigma2(std::span<const double> y, std::size_t s,
                                      double n_effective);

/// Odd/even cross-fit estimator for unknown sigma^2: the variance profile at
/// coordinate i <= s is fit on the opposite parity fold (so it is independent
/// of y_i), tail coordinates are estimated as exactly zero.
struct UnknownSigmaFit {
  std::vector<double> mean;     // theta_hat, zero for i > s
  std::vector<double> var;      // lambda_hat * weight_i, zero for i > s
  std::vector<double> profile;  // (V_hat_i)_+ used at each head coordinate
  double sigma2_hat = 0.0;
  double lambda_hat = 0.0;
};

UnknownSigmaFit crossfit_unknown_sigma(const SequenceProblem& problem,
                                       std::size_t s);

}  // namespace isoeb
