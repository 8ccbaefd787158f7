#include "isoeb/crossfit.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "isoeb/shrinkage.hpp"
#include "isoeb/stats.hpp"

namespace isoeb {

ClonePair clone_split(const SequenceProblem& problem, RngStream& rng,
                      CloneVariant variant) {
  const double lambda = problem.noise_var;
  if (!(lambda > 0.0))
    throw std::invalid_argument("clone_split: noise_var must be > 0");
  const std::size_t p = problem.dim();
  const double sd = std::sqrt(lambda);
  ClonePair pair;
  pair.y_plus.resize(p);
  pair.y_minus.resize(p);
  const double scale =
      variant == CloneVariant::Scaled ? 1.0 / std::sqrt(2.0) : 1.0;
  pair.clone_noise_var =
      variant == CloneVariant::Scaled ? lambda : 2.0 * lambda;
  for (std::size_t i = 0; i < p; ++i) {
    const double z = sd * rng.normal();
    pair.y_plus[i] = (problem.y[i] + z) * scale;
    pair.y_minus[i] = (problem.y[i] - z) * scale;
  }
  return pair;
}

DyadicBinning pilot_bins(std::span<const double> x_fold1, double nu,
                         double R) {
  if (!(nu > 0.0)) throw std::invalid_argument("pilot_bins: nu must be > 0");
  if (!(R > 0.0)) throw std::invalid_argument("pilot_bins: R must be > 0");
  if (x_fold1.empty())
    throw std::invalid_argument("pilot_bins: empty input");

  DyadicBinning bins;
  bins.nu = nu;
  bins.cap = R;
  bins.M = static_cast<std::size_t>(1 + ceil_log2(1.0 + R / nu));
  bins.thresholds.resize(bins.M + 1);
  for (std::size_t m = 0; m <= bins.M; ++m)
    bins.thresholds[m] = std::ldexp(nu, static_cast<int>(m));

  const IsotonicFit pilot = pava(x_fold1, Cone::NonincreasingNonneg);
  const std::size_t p = x_fold1.size();
  bins.pilot.resize(p);
  bins.bin_of.resize(p);
  bins.weights.resize(p);
  for (std::size_t i = 0; i < p; ++i) {
    bins.pilot[i] = std::min(pilot.values[i], R);
    const double level = bins.pilot[i] + nu;
    // level in [nu, R + nu) subset of [t_0, t_M), and the capped pilot is
    // nonincreasing, so bin indices are nonincreasing in i (contiguous bins).
    std::size_t m = 0;
    while (m + 1 < bins.M && level >= bins.thresholds[m + 1]) ++m;
    bins.bin_of[i] = m;
    bins.weights[i] = 1.0 / bins.thresholds[m];
  }
  return bins;
}

VarianceProfile fit_variance_profile(std::span<const double> x_fold2,
                                     const DyadicBinning& bins, double R) {
  if (x_fold2.size() != bins.weights.size())
    throw std::invalid_argument(
        "fit_variance_profile: bins do not cover the input range");
  if (!(R > 0.0))
    throw std::invalid_argument("fit_variance_profile: R must be > 0");
  const IsotonicFit fit =
      pava(x_fold2, bins.weights, Cone::NonincreasingNonneg);
  VarianceProfile profile;
  profile.cap = R;
  profile.v.resize(x_fold2.size());
  for (std::size_t i = 0; i < x_fold2.size(); ++i)
    profile.v[i] = std::min(fit.values[i], R);
  return profile;
}

EBPosterior posterior_shrink(std::span<const double> y_apply,
                             const VarianceProfile& profile, double lambda) {
  if (!(lambda > 0.0))
    throw std::invalid_argument("posterior_shrink: lambda must be > 0");
  if (y_apply.size() != profile.v.size())
    throw std::invalid_argument("posterior_shrink: profile length mismatch");
  EBPosterior post;
  post.lambda = lambda;
  post.mean.resize(y_apply.size());
  post.var.resize(y_apply.size());
  for (std::size_t i = 0; i < y_apply.size(); ++i) {
    const double v = profile.v[i];
    const double w = std::isinf(v) ? 1.0 : v / (v + lambda);
    post.mean[i] = w * y_apply[i];
    post.var[i] = lambda * w;
  }
  return post;
}

namespace {

CrossfitResult run_clone_pipeline(const ClonePair& clones, double cap_theta,
                                  bool scaled) {
  const double nu = clones.clone_noise_var;
  // On the clone scale the proxies are unbiased for the working profile:
  // theta^2 under the additive variant, theta^2 / 2 under the scaled one
  // (clone means are theta / sqrt(2) there), hence the halved cap.
  const double cap = scaled ? cap_theta / 2.0 : cap_theta;

  std::vector<double> proxy(clones.y_plus.size());
  for (std::size_t i = 0; i < proxy.size(); ++i)
    proxy[i] = clones.y_plus[i] * clones.y_plus[i] - nu;

  CrossfitResult result;
  result.bins = pilot_bins(proxy, nu, cap);
  result.profile = fit_variance_profile(proxy, result.bins, cap);
  result.posterior = posterior_shrink(clones.y_minus, result.profile, nu);

  if (scaled) {
    // De-scale into theta units; this reproduces the additive pipeline
    // exactly (same z draw, all stages positively homogeneous).
    for (double& v : result.profile.v) v *= 2.0;
    result.profile.cap = cap_theta;
    const double root2 = std::sqrt(2.0);
    for (double& m : result.posterior.mean) m *= root2;
    for (double& v : result.posterior.var) v *= 2.0;
    result.posterior.lambda = 2.0 * nu;
  }
  return result;
}

}  // namespace

CrossfitResult crossfit_estimate(const SequenceProblem& problem, double R,
                                 RngStream& rng, CloneVariant variant) {
  if (!(R > 0.0))
    throw std::invalid_argument("crossfit_estimate: cap R must be > 0");
  const bool scaled = variant == CloneVariant::Scaled;
  const ClonePair clones = clone_split(problem, rng, variant);
  return run_clone_pipeline(clones, R, scaled);
}

CrossfitResult crossfit_estimate_auto_cap(const SequenceProblem& problem,
                                          RngStream& rng,
                                          CloneVariant variant) {
  const bool scaled = variant == CloneVariant::Scaled;
  const ClonePair clones = clone_split(problem, rng, variant);
  const double nu = clones.clone_noise_var;
  double cap = 0.0;
  for (double y : clones.y_plus) cap = std::max(cap, y * y - nu);
  if (scaled) cap *= 2.0;           // back to theta^2 units
  cap = std::max(cap, problem.noise_var);  // keep the cap positive
  return run_clone_pipeline(clones, cap, scaled);
}

bool b1_holds(const DyadicBinning& bins, const VarianceProfile& truth,
              double nu) {
  if (truth.v.size() != bins.bin_of.size())
    throw std::invalid_argument("b1_holds: profile length mismatch");
  for (std::size_t i = 0; i < truth.v.size(); ++i) {
    const std::size_t m = bins.bin_of[i];
    const double level = truth.v[i] + nu;
    if (!(bins.thresholds[m] <= level && level < bins.thresholds[m + 1]))
      return false;
  }
  return true;
}

bool margin_holds(const VarianceProfile& truth, double nu, double kappa) {
  if (!(kappa > 0.0 && kappa < 0.25))
    throw std::invalid_argument("margin_holds: kappa must be in (0, 1/4)");
  if (!(nu > 0.0))
    throw std::invalid_argument("margin_holds: nu must be > 0");
  for (double v : truth.v) {
    const double level = v + nu;
    // m* is the dyadic index with 2^m nu <= level < 2^{m+1} nu.
    int m = 0;
    while (std::ldexp(nu, m + 1) <= level) ++m;
    const double t_lo = std::ldexp(nu, m);
    const double t_hi = std::ldexp(nu, m + 1);
    if (!(t_lo * (1.0 + kappa) <= level && level <= t_hi * (1.0 - kappa)))
      return false;
  }
  return true;
}

std::pair<double, double> tail_sigma2(std::span<const double> y,
                                      std::size_t s, double n_effective) {
  const std::size_t p = y.size();
  if (s < 1 || s >= p)
    throw std::invalid_argument("tail_sigma2: need 1 <= s < p");
  if (!(n_effective > 0.0))
    throw std::invalid_argument("tail_sigma2: n_effective must be > 0");
  double sum = 0.0;
  for (std::size_t i = s; i < p; ++i) sum += y[i] * y[i];
  const double sigma2_hat = n_effective * sum / static_cast<double>(p - s);
  return {sigma2_hat, sigma2_hat / n_effective};
}

namespace {

// Isotonic fit over the full head range with the loss restricted to the
// given fold: solves argmin over nonincreasing v in R^s of
// sum_{i in fold} (x_i - v_i)^2. Coordinates outside the fold are free, so
// one minimizer extends the fold fit as a left step function; that is the
// representative returned here.
std::vector<double> fold_restricted_isotonic(std::span<const double> x,
                                             const std::vector<std::size_t>& fold) {
  std::vector<double> sub(fold.size());
  for (std::size_t j = 0; j < fold.size(); ++j) sub[j] = x[fold[j]];
  const IsotonicFit fit = pava(sub, Cone::Nonincreasing);

  std::vector<double> full(x.size());
  std::size_t j = 0;
  double current = fit.values.front();
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (j < fold.size() && fold[j] == i) {
      current = fit.values[j];
      ++j;
    }
    full[i] = current;
  }
  return full;
}

}  // namespace

UnknownSigmaFit crossfit_unknown_sigma(const SequenceProblem& problem,
                                       std::size_t s) {
  const std::size_t p = problem.dim();
  if (s < 1 || s >= p)
    throw std::invalid_argument("crossfit_unknown_sigma: need 1 <= s < p");

  UnknownSigmaFit fit;
  auto [sigma2_hat, lambda_hat] =
      tail_sigma2(problem.y, s, problem.n_effective);
  fit.sigma2_hat = sigma2_hat;
  fit.lambda_hat = lambda_hat;
  fit.mean.assign(p, 0.0);
  fit.var.assign(p, 0.0);
  fit.profile.assign(p, 0.0);

  std::vector<double> proxy(s);
  for (std::size_t i = 0; i < s; ++i)
    proxy[i] = problem.y[i] * problem.y[i] - lambda_hat;

  // 1-based odd/even folds over the head block.
  std::vector<std::size_t> odd, even;
  for (std::size_t i = 0; i < s; ++i)
    ((i % 2 == 0) ? odd : even).push_back(i);

  std::vector<double> v_for_odd, v_for_even;
  if (!even.empty()) v_for_odd = fold_restricted_isotonic(proxy, even);
  if (!odd.empty()) v_for_even = fold_restricted_isotonic(proxy, odd);

  for (std::size_t i = 0; i < s; ++i) {
    double v_hat;
    if (i % 2 == 0) {
      // s = 1 leaves the opposite fold empty; fall back to the global EB
      // scale on the head coordinate, which gives (y^2 - lambda_hat)_+.
      if (even.empty()) {
        v_hat = lambda_hat > 0.0
                    ? eb_global_tau2(std::span(&problem.y[i], 1), lambda_hat)
                              .tau2 *
                          lambda_hat
                    : problem.y[i] * problem.y[i];
      } else {
        v_hat = v_for_odd[i];
      }
    } else {
      v_hat = v_for_even[i];
    }
    const double v_plus = std::max(v_hat, 0.0);
    fit.profile[i] = v_plus;
    const double w =
        v_plus + lambda_hat > 0.0 ? v_plus / (v_plus + lambda_hat) : 0.0;
    fit.mean[i] = w * problem.y[i];
    fit.var[i] = lambda_hat * w;
  }
  return fit;
}

}  // namespace isoeb
