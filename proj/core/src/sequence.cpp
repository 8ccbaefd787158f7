#include "isoeb/sequence.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace isoeb {

namespace {

void validate(const OrderedSparseClass& cls) {
  if (cls.p < 1 || cls.s < 1 || cls.s > cls.p)
    throw std::invalid_argument("ordered sparse class: need 1 <= s <= p");
  if (cls.R < 0.0)
    throw std::invalid_argument("ordered sparse class: R must be >= 0");
}

void validate(const SobolevEllipsoid& ell) {
  if (ell.p < 1) throw std::invalid_argument("sobolev ellipsoid: p >= 1");
  if (!(ell.beta > 0.5))
    throw std::invalid_argument("sobolev ellipsoid: beta must be > 1/2");
  if (ell.R < 0.0)
    throw std::invalid_argument("sobolev ellipsoid: R must be >= 0");
}

}  // namespace

bool in_ordered_sparse_class(std::span<const double> theta,
                             const OrderedSparseClass& cls) {
  if (theta.size() != cls.p) return false;
  std::size_t k = theta.size();
  while (k > 0 && theta[k - 1] == 0.0) --k;
  if (k > cls.s) return false;
  // The amplitude comparison tolerates one rounding of sqrt(R)^2; ordering
  // and the zero tail are exact.
  if (k > 0 && theta[0] * theta[0] > cls.R * (1.0 + 1e-12)) return false;
  for (std::size_t i = 0; i + 1 < k; ++i)
    if (theta[i] * theta[i] < theta[i + 1] * theta[i + 1]) return false;
  return true;
}

bool in_sobolev_ellipsoid(std::span<const double> theta,
                          const SobolevEllipsoid& ell) {
  if (theta.size() != ell.p) return false;
  double sum = 0.0;
  for (std::size_t i = 0; i < theta.size(); ++i)
    sum += std::pow(static_cast<double>(i + 1), 2.0 * ell.beta) * theta[i] *
           theta[i];
  return sum <= ell.R * ell.R * (1.0 + 1e-12);
}

std::vector<double> sample_ordered_sparse(const OrderedSparseClass& cls,
                                          RngStream& rng) {
  validate(cls);
  std::vector<double> theta(cls.p, 0.0);
  const std::size_t k = 1 + std::min<std::size_t>(
      static_cast<std::size_t>(rng.uniform() * static_cast<double>(cls.s)),
      cls.s - 1);
  const double amp = std::sqrt(cls.R);
  std::vector<double> mags(k);
  for (double& m : mags) m = amp * rng.uniform();
  std::sort(mags.begin(), mags.end(), std::greater<>());
  for (std::size_t i = 0; i < k; ++i) {
    const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
    theta[i] = sign * mags[i];
  }
  return theta;
}

std::vector<double> sample_sobolev(const SobolevEllipsoid& ell, RngStream& rng,
                                   bool monotone) {
  validate(ell);
  std::vector<double> theta(ell.p, 0.0);
  if (ell.R == 0.0) return theta;

  // Variance R^2 i^{-2 beta - 1} / H_p gives expected ellipsoid norm exactly
  // R^2, so roughly half the draws land outside and are pulled back to the
  // boundary.
  double harmonic = 0.0;
  for (std::size_t i = 1; i <= ell.p; ++i)
    harmonic += 1.0 / static_cast<double>(i);
  double norm2 = 0.0;
  for (std::size_t i = 0; i < ell.p; ++i) {
    const double var = ell.R * ell.R *
                       std::pow(static_cast<double>(i + 1), -2.0 * ell.beta - 1.0) /
                       harmonic;
    theta[i] = std::sqrt(var) * rng.normal();
    norm2 += std::pow(static_cast<double>(i + 1), 2.0 * ell.beta) * theta[i] *
             theta[i];
  }
  if (norm2 > ell.R * ell.R) {
    const double scale = ell.R / std::sqrt(norm2);
    for (double& t : theta) t *= scale;
  }
  if (monotone) {
    std::sort(theta.begin(), theta.end(),
              [](double a, double b) { return std::abs(a) > std::abs(b); });
  }
  return theta;
}

std::vector<double> adversarial_theta(AdversarialProfile profile,
                                      const OrderedSparseClass& cls) {
  validate(cls);
  std::vector<double> theta(cls.p, 0.0);
  switch (profile) {
    case AdversarialProfile::FlatAtSqrtR:
      for (std::size_t i = 0; i < cls.s; ++i) theta[i] = std::sqrt(cls.R);
      break;
    case AdversarialProfile::GeometricDecay:
      for (std::size_t i = 0; i < cls.s; ++i)
        theta[i] = std::sqrt(cls.R * std::ldexp(1.0, -static_cast<int>(i)));
      break;
    case AdversarialProfile::SingleSpike:
      theta[0] = std::sqrt(cls.R);
      break;
  }
  return theta;
}

SequenceProblem simulate(std::span<const double> theta, double sigma2,
                         double n_effective, RngStream& rng) {
  if (!(sigma2 > 0.0))
    throw std::invalid_argument("simulate: sigma2 must be > 0");
  if (!(n_effective > 0.0))
    throw std::invalid_argument("simulate: n_effective must be > 0");
  SequenceProblem problem;
  problem.sigma2 = sigma2;
  problem.n_effective = n_effective;
  problem.noise_var = sigma2 / n_effective;
  const double sd = std::sqrt(problem.noise_var);
  problem.y.resize(theta.size());
  for (std::size_t i = 0; i < theta.size(); ++i)
    problem.y[i] = theta[i] + sd * rng.normal();
  problem.truth = std::vector<double>(theta.begin(), theta.end());
  return problem;
}

}  // namespace isoeb
