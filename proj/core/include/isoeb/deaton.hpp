#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace isoeb {

/// Polynomial basis orthonormal with respect to the empirical distribution
/// of the design points: sum_i psi_j(x_i) psi_k(x_i) = delta_jk. Column j
/// (0-based) has exact degree j; values are built from the three-term
/// recurrence whose coefficients are stored alongside the evaluated matrix.
class OrthoBasis {
 public:
  /// n x m matrix entry Q[i][j] = psi_j(x_i).
  double q(std::size_t i, std::size_t j) const { return q_[i * m_ + j]; }
  std::size_t n() const { return n_; }
  std::size_t m() const { return m_; }
  const std::vector<double>& design_points() const { return x_; }
  const std::vector<double>& recurrence_alpha() const { return alpha_; }
  const std::vector<double>& recurrence_beta() const { return beta_; }

  /// theta_hat = Q^T y.
  std::vector<double> project(std::span<const double> y) const;
  /// Q theta.
  std::vector<double> expand(std::span<const double> theta) const;
  /// Evaluate all m basis polynomials at an arbitrary point.
  std::vector<double> evaluate(double x) const;

 private:
  friend OrthoBasis build_basis(std::span<const double> x, std::size_t m);
  std::size_t n_ = 0, m_ = 0;
  std::vector<double> x_;
  std::vector<double> q_;      // row-major n x m
  std::vector<double> alpha_;  // recurrence shifts, size m-1
  std::vector<double> beta_;   // recurrence norms, size m-1
  double norm0_ = 1.0;
};

/// Builds the degree-(m-1) orthonormal basis; requires n > m and at least
/// m + 1 distinct design points.
OrthoBasis build_basis(std::span<const double> x, std::size_t m);

struct DeatonOptions {
  double gamma = 2.0;        // prior degrees of freedom per coefficient
  double beta_prior = 5.0;   // scale in W_{m+1} = rss + 2 / beta
  double gamma_sigma = 2.0;  // enters the default n_bar = n - m + 2 gamma_sigma
  std::optional<double> n_bar;
  std::optional<double> sigma2;  // overrides 1 / kappa_iso_{m+1}
};

struct DeatonFit {
  std::vector<double> theta_hat;            // OLS, Q^T y
  std::vector<double> kappa_unconstrained;  // (2 gamma - 1) / theta_hat^2
  std::vector<double> kappa_iso;            // nondecreasing, <= kappa_last
  std::vector<double> z_hat;                // kappa_iso * sigma2_hat, in [0,1]
  std::vector<double> theta_shrunk;         // (1 - z_hat) * theta_hat
  std::vector<double> fitted;               // Q theta_shrunk
  double kappa_last_unconstrained = 0.0;    // n_bar / W_last
  double kappa_last_iso = 0.0;
  double sigma2_hat = 0.0;
  double rss = 0.0;
  double W_last = 0.0;
  double n_bar = 0.0;
};

/// Order-restricted empirical Bayes polynomial regression: OLS in the
/// empirical orthonormal basis, unconstrained precision estimates, isotonic
/// adjustment under kappa_1 <= ... <= kappa_m <= kappa_{m+1}, then shrinkage
/// z_j = kappa_j^iso * sigma2_hat clamped to [0, 1].
DeatonFit deaton_fit(std::span<const double> x, std::span<const double> y,
                     std::size_t m, const DeatonOptions& options = {});

/// Marginal log-likelihood (up to a constant):
///   (n_bar / 2) log kappa_last - kappa_last W_last / 2
///   + sum_j { (gamma_j - 1/2) log kappa_j - kappa_j theta_hat_j^2 / 2 }.
double deaton_loglik(std::span<const double> kappa, double kappa_last,
                     std::span<const double> theta_hat, double W_last,
                     std::span<const double> gamma, double n_bar);

}  // namespace isoeb
