#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace isoeb {

enum class ShrinkageRule {
  GlobalEB,
  SteinPositivePart,
  GeneralizedRidge,
  PCR,
  GPrior,
  Table1,
};

/// Per-coordinate multiplicative shrinkage: estimate_i = weight_i * input_i
/// with every weight in [0, 1].
struct ShrinkageFit {
  std::vector<double> weights;
  std::vector<double> estimate;
  ShrinkageRule rule = ShrinkageRule::GlobalEB;
  std::map<std::string, double> hyper;
};

/// Canonical-coordinate view of a regression design X = U D W^T:
/// singular values d (positive, nonincreasing) and OLS coefficients
/// alpha_hat of the rotated parameter.
struct SpectralDesign {
  std::vector<double> d;
  std::vector<double> alpha_hat;
  double sigma2 = 1.0;
};

struct GlobalEBResult {
  double tau2 = 0.0;
  bool collapsed = false;  // tau2 == 0, equivalently ||y||^2 <= p sigma2
};

/// Type-II ML estimate of the global prior scale under
/// theta_i ~ N(0, tau^2 sigma^2):  tau2 = (||y||^2 / (p sigma^2) - 1)_+ .
/// The collapse flag is computed from ||y||^2 <= p sigma^2 directly so the
/// equivalence is exact replicate by replicate.
GlobalEBResult eb_global_tau2(std::span<const double> y, double sigma2);

/// Positive-part shrinkage with weight (1 - t (p-2) / ||y||^2)_+ applied to
/// every coordinate; t = 1 recovers the classical rule. Requires p >= 3.
ShrinkageFit stein_positive_part(std::span<const double> y, double t);

/// Generalized ridge weights kappa_i = d_i^2 / (d_i^2 + k_i). An infinite
/// penalty is a valid input and yields weight exactly zero.
ShrinkageFit grr_weights(const SpectralDesign& design,
                         std::span<const double> k);

/// Marginal-likelihood penalties k_i = d_i^2 sigma^2 / (z_i^2 - sigma^2)
/// where z_i = d_i alpha_hat_i; weak signals (z_i^2 <= sigma^2) get an
/// infinite-penalty sentinel, i.e. weight zero under grr_weights.
std::vector<double> adaptive_penalty(const SpectralDesign& design);

enum class WeightFamily { GRN, GRI1, GRI, GRP, GRC };

/// Classical shrinkage weight W(t) for the chosen family. Threshold rules
/// use strict inequalities, so boundary points fall in the zero branch.
double weight_family(double t, WeightFamily family);

/// First-K indicator weights under nonincreasing singular values; components
/// tied with d_K are kept.
ShrinkageFit pcr_weights(const SpectralDesign& design, std::size_t K);

/// Common shrinkage factor g / (1 + g).
double g_prior_weight(double g);

/// Global-local shrinkage factor
/// kappa = tau^2 lambda^2 d^2 / (1 + tau^2 lambda^2 d^2).
double global_local_weight(double tau2, double lambda2, double d2);

/// Effective number of parameters
/// gamma = k - sum_a tau_w^2 / (lambda_a + tau_w^2).
double effective_dof(std::span<const double> eigenvalues, double tau_w2);

}  // namespace isoeb
