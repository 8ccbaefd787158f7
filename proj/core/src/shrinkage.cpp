#include "isoeb/shrinkage.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace isoeb {

namespace {

double squared_norm(std::span<const double> y) {
  double s = 0.0;
  for (double v : y) s += v * v;
  return s;
}

void validate(const SpectralDesign& design) {
  if (design.d.empty())
    throw std::invalid_argument("spectral design: empty spectrum");
  if (design.alpha_hat.size() != design.d.size())
    throw std::invalid_argument("spectral design: d/alpha length mismatch");
  if (!(design.sigma2 > 0.0))
    throw std::invalid_argument("spectral design: sigma2 must be > 0");
  for (std::size_t i = 0; i < design.d.size(); ++i) {
    if (!(design.d[i] > 0.0))
      throw std::invalid_argument("spectral design: d must be > 0");
    if (i > 0 && design.d[i] > design.d[i - 1])
      throw std::invalid_argument("spectral design: d must be nonincreasing");
  }
}

}  // namespace

GlobalEBResult eb_global_tau2(std::span<const double> y, double sigma2) {
  if (!(sigma2 > 0.0))
    throw std::invalid_argument("eb_global_tau2: sigma2 must be > 0");
  if (y.empty()) throw std::invalid_argument("eb_global_tau2: empty input");
  const double energy = squared_norm(y);
  const double benchmark = static_cast<double>(y.size()) * sigma2;
  GlobalEBResult out;
  out.collapsed = energy <= benchmark;
  // (energy - benchmark)/benchmark rather than energy/benchmark - 1: the
  // difference of two doubles is either 0 or at least one ulp, so the sign
  // of tau2 agrees with the collapse flag exactly.
  out.tau2 = out.collapsed ? 0.0 : (energy - benchmark) / benchmark;
  return out;
}

ShrinkageFit stein_positive_part(std::span<const double> y, double t) {
  const std::size_t p = y.size();
  if (p < 3)
    throw std::domain_error("stein_positive_part: requires p >= 3");
  if (t < 0.0)
    throw std::invalid_argument("stein_positive_part: t must be >= 0");
  const double energy = squared_norm(y);
  const double kappa =
      energy > 0.0 ? std::min(1.0, t * static_cast<double>(p - 2) / energy)
                   : 1.0;
  const double weight = 1.0 - kappa;
  ShrinkageFit fit;
  fit.rule = ShrinkageRule::SteinPositivePart;
  fit.weights.assign(p, weight);
  fit.estimate.resize(p);
  for (std::size_t i = 0; i < p; ++i) fit.estimate[i] = weight * y[i];
  fit.hyper = {{"t", t}, {"kappa", kappa}, {"energy", energy}};
  return fit;
}

ShrinkageFit grr_weights(const SpectralDesign& design,
                         std::span<const double> k) {
  validate(design);
  const std::size_t r = design.d.size();
  if (k.size() != r)
    throw std::invalid_argument("grr_weights: penalty length mismatch");
  ShrinkageFit fit;
  fit.rule = ShrinkageRule::GeneralizedRidge;
  fit.weights.resize(r);
  fit.estimate.resize(r);
  for (std::size_t i = 0; i < r; ++i) {
    if (k[i] < 0.0)
      throw std::invalid_argument("grr_weights: penalties must be >= 0");
    const double d2 = design.d[i] * design.d[i];
    fit.weights[i] = std::isinf(k[i]) ? 0.0 : d2 / (d2 + k[i]);
    fit.estimate[i] = fit.weights[i] * design.alpha_hat[i];
  }
  return fit;
}

std::vector<double> adaptive_penalty(const SpectralDesign& design) {
  validate(design);
  const std::size_t r = design.d.size();
  std::vector<double> k(r);
  for (std::size_t i = 0; i < r; ++i) {
    const double z = design.d[i] * design.alpha_hat[i];
    const double z2 = z * z;
    k[i] = z2 > design.sigma2
               ? design.d[i] * design.d[i] * design.sigma2 /
                     (z2 - design.sigma2)
               : std::numeric_limits<double>::infinity();
  }
  return k;
}

double weight_family(double t, WeightFamily family) {
  const double t2 = t * t;
  switch (family) {
    case WeightFamily::GRN:
      return t2 > 0.0 ? 1.0 / (1.0 + 1.0 / t2) : 0.0;
    case WeightFamily::GRI1: {
      if (t2 == 0.0) return 0.0;
      const double a = 1.0 + 1.0 / t2;
      return 1.0 / (1.0 + a * a / t2);
    }
    case WeightFamily::GRI: {
      // Hemmerle's rule as printed: W = [ (1 - sqrt(1 - 4 t^-2)) / 2 * t^2 ]^-1
      // for t^2 > 4, else 0. See the README note on the bracket scope.
      if (!(t2 > 4.0)) return 0.0;
      const double root = std::sqrt(1.0 - 4.0 / t2);
      return 1.0 / ((1.0 - root) / 2.0 * t2);
    }
    case WeightFamily::GRP:
      return t2 > 2.0 ? 1.0 : 0.0;
    case WeightFamily::GRC:
      return t2 > 1.0 ? 1.0 - 1.0 / t2 : 0.0;
  }
  throw std::invalid_argument("weight_family: unknown family");
}

ShrinkageFit pcr_weights(const SpectralDesign& design, std::size_t K) {
  validate(design);
  const std::size_t r = design.d.size();
  if (K < 1 || K > r)
    throw std::invalid_argument("pcr_weights: K out of range");
  const double cutoff = design.d[K - 1] * design.d[K - 1];
  ShrinkageFit fit;
  fit.rule = ShrinkageRule::PCR;
  fit.weights.resize(r);
  fit.estimate.resize(r);
  for (std::size_t i = 0; i < r; ++i) {
    fit.weights[i] = design.d[i] * design.d[i] >= cutoff ? 1.0 : 0.0;
    fit.estimate[i] = fit.weights[i] * design.alpha_hat[i];
  }
  fit.hyper = {{"K", static_cast<double>(K)}, {"cutoff", cutoff}};
  return fit;
}

double g_prior_weight(double g) {
  if (g < 0.0) throw std::invalid_argument("g_prior_weight: g must be >= 0");
  if (std::isinf(g)) return 1.0;
  return g / (1.0 + g);
}

double global_local_weight(double tau2, double lambda2, double d2) {
  if (tau2 < 0.0 || lambda2 < 0.0 || d2 < 0.0)
    throw std::invalid_argument("global_local_weight: negative input");
  const double s = tau2 * lambda2 * d2;
  if (std::isinf(s)) return 1.0;
  return s / (1.0 + s);
}

double effective_dof(std::span<const double> eigenvalues, double tau_w2) {
  if (eigenvalues.empty())
    throw std::invalid_argument("effective_dof: empty spectrum");
  if (!(tau_w2 > 0.0))
    throw std::invalid_argument("effective_dof: tau_w2 must be > 0");
  double gamma = static_cast<double>(eigenvalues.size());
  for (double lambda : eigenvalues) {
    if (!(lambda > 0.0))
      throw std::invalid_argument("effective_dof: eigenvalues must be > 0");
    gamma -= tau_w2 / (lambda + tau_w2);
  }
  return gamma;
}

}  // namespace isoeb
