#include "isoeb/deaton.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

namespace isoeb {

std::vector<double> OrthoBasis::project(std::span<const double> y) const {
  if (y.size() != n_) throw std::invalid_argument("OrthoBasis: length mismatch");
  std::vector<double> theta(m_, 0.0);
  for (std::size_t j = 0; j < m_; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < n_; ++i) s += q(i, j) * y[i];
    theta[j] = s;
  }
  return theta;
}

std::vector<double> OrthoBasis::expand(std::span<const double> theta) const {
  if (theta.size() != m_)
    throw std::invalid_argument("OrthoBasis: coefficient length mismatch");
  std::vector<double> out(n_, 0.0);
  for (std::size_t i = 0; i < n_; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < m_; ++j) s += q(i, j) * theta[j];
    out[i] = s;
  }
  return out;
}

std::vector<double> OrthoBasis::evaluate(double x) const {
  std::vector<double> psi(m_, 0.0);
  psi[0] = norm0_;
  if (m_ > 1) {
    psi[1] = (x - alpha_[0]) * psi[0] / beta_[0];
    for (std::size_t j = 2; j < m_; ++j)
      psi[j] = ((x - alpha_[j - 1]) * psi[j - 1] -
                beta_[j - 2] * psi[j - 2]) /
               beta_[j - 1];
  }
  return psi;
}

OrthoBasis build_basis(std::span<const double> x, std::size_t m) {
  const std::size_t n = x.size();
  if (m < 1 || n <= m)
    throw std::invalid_argument("build_basis: need n > m >= 1");
  std::set<double> distinct(x.begin(), x.end());
  if (distinct.size() < m + 1)
    throw std::invalid_argument(
        "build_basis: rank error, need at least m + 1 distinct points");

  // Stieltjes procedure under the discrete inner product <f,g> = sum f g:
  //   psi_0 = 1 / sqrt(n)
  //   beta_j psi_j = (x - alpha_{j-1}) psi_{j-1} - beta_{j-1} psi_{j-2}
  // with alpha the Rayleigh shifts and beta the normalizing norms.
  OrthoBasis basis;
  basis.n_ = n;
  basis.m_ = m;
  basis.x_.assign(x.begin(), x.end());
  basis.q_.assign(n * m, 0.0);
  basis.norm0_ = 1.0 / std::sqrt(static_cast<double>(n));
  for (std::size_t i = 0; i < n; ++i) basis.q_[i * m] = basis.norm0_;

  std::vector<double> prev(n, 0.0), cur(n, basis.norm0_), next(n);
  for (std::size_t j = 1; j < m; ++j) {
    double alpha = 0.0;
    for (std::size_t i = 0; i < n; ++i) alpha += x[i] * cur[i] * cur[i];
    for (std::size_t i = 0; i < n; ++i) {
      next[i] = (x[i] - alpha) * cur[i];
      if (j >= 2) next[i] -= basis.beta_[j - 2] * prev[i];
    }
    double norm2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) norm2 += next[i] * next[i];
    const double beta = std::sqrt(norm2);
    if (!(beta > 0.0))
      throw std::invalid_argument("build_basis: rank error in recurrence");
    for (std::size_t i = 0; i < n; ++i) {
      next[i] /= beta;
      basis.q_[i * m + j] = next[i];
    }
    basis.alpha_.push_back(alpha);
    basis.beta_.push_back(beta);
    prev = cur;
    cur = next;
  }
  return basis;
}

namespace {

// Order-restricted maximizer of a sum of terms a_j log(k) - b_j k subject to
// k_1 <= ... <= k_q. Pool-adjacent-violators with pooled value
// (sum a) / (sum b); b_j = 0 encodes an unconstrained (infinite) maximizer,
// which pooling resolves whenever any later b_j is positive.
std::vector<double> pava_log_linear(const std::vector<double>& a,
                                    const std::vector<double>& b) {
  struct Block {
    std::size_t begin, end;
    double asum, bsum;
    double value() const {
      return bsum > 0.0 ? asum / bsum
                        : std::numeric_limits<double>::infinity();
    }
  };
  std::vector<Block> stack;
  for (std::size_t j = 0; j < a.size(); ++j) {
    Block blk{j, j + 1, a[j], b[j]};
    // Nondecreasing target: pool while the previous block sits strictly
    // above the new one.
    while (!stack.empty() && stack.back().value() > blk.value()) {
      blk.begin = stack.back().begin;
      blk.asum += stack.back().asum;
      blk.bsum += stack.back().bsum;
      stack.pop_back();
    }
    stack.push_back(blk);
  }
  std::vector<double> out(a.size());
  for (const Block& blk : stack)
    for (std::size_t j = blk.begin; j < blk.end; ++j) out[j] = blk.value();
  return out;
}

}  // namespace

DeatonFit deaton_fit(std::span<const double> x, std::span<const double> y,
                     std::size_t m, const DeatonOptions& options) {
  if (y.size() != x.size())
    throw std::invalid_argument("deaton_fit: x/y length mismatch");
  if (!(options.gamma > 0.5))
    throw std::invalid_argument("deaton_fit: gamma must exceed 1/2");
  if (!(options.beta_prior > 0.0))
    throw std::invalid_argument("deaton_fit: beta_prior must be > 0");

  const OrthoBasis basis = build_basis(x, m);
  const std::size_t n = x.size();

  DeatonFit fit;
  fit.theta_hat = basis.project(y);
  const std::vector<double> ols_curve = basis.expand(fit.theta_hat);
  double rss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - ols_curve[i];
    rss += r * r;
  }
  fit.rss = rss;
  fit.W_last = rss + 2.0 / options.beta_prior;
  fit.n_bar = options.n_bar.value_or(static_cast<double>(n) -
                                     static_cast<double>(m) +
                                     2.0 * options.gamma_sigma);
  if (!(fit.n_bar > 0.0))
    throw std::invalid_argument("deaton_fit: n_bar must be > 0");

  fit.kappa_unconstrained.resize(m);
  for (std::size_t j = 0; j < m; ++j) {
    const double t2 = fit.theta_hat[j] * fit.theta_hat[j];
    fit.kappa_unconstrained[j] =
        t2 > 0.0 ? (2.0 * options.gamma - 1.0) / t2
                 : std::numeric_limits<double>::infinity();
  }
  fit.kappa_last_unconstrained = fit.n_bar / fit.W_last;

  // The likelihood term for kappa_j is (gamma - 1/2) log k - (theta^2/2) k,
  // and for kappa_{m+1} it is (n_bar/2) log k - (W/2) k, so the constrained
  // maximizer is the log-linear PAVA over those (a, b) pairs.
  std::vector<double> a(m + 1), b(m + 1);
  for (std::size_t j = 0; j < m; ++j) {
    a[j] = options.gamma - 0.5;
    b[j] = fit.theta_hat[j] * fit.theta_hat[j] / 2.0;
  }
  a[m] = fit.n_bar / 2.0;
  b[m] = fit.W_last / 2.0;
  std::vector<double> iso = pava_log_linear(a, b);
  fit.kappa_iso.assign(iso.begin(), iso.begin() + static_cast<long>(m));
  fit.kappa_last_iso = iso[m];

  fit.sigma2_hat = options.sigma2.value_or(1.0 / fit.kappa_last_iso);
  fit.z_hat.resize(m);
  fit.theta_shrunk.resize(m);
  for (std::size_t j = 0; j < m; ++j) {
    fit.z_hat[j] = std::clamp(fit.kappa_iso[j] * fit.sigma2_hat, 0.0, 1.0);
    fit.theta_shrunk[j] = (1.0 - fit.z_hat[j]) * fit.theta_hat[j];
  }
  fit.fitted = basis.expand(fit.theta_shrunk);
  return fit;
}

double deaton_loglik(std::span<const double> kappa, double kappa_last,
                     std::span<const double> theta_hat, double W_last,
                     std::span<const double> gamma, double n_bar) {
  if (kappa.size() != theta_hat.size() || kappa.size() != gamma.size())
    throw std::invalid_argument("deaton_loglik: length mismatch");
  if (!(kappa_last > 0.0))
    throw std::domain_error("deaton_loglik: kappa_last must be > 0");
  double ll = 0.5 * n_bar * std::log(kappa_last) - 0.5 * kappa_last * W_last;
  for (std::size_t j = 0; j < kappa.size(); ++j) {
    if (!(kappa[j] > 0.0))
      throw std::domain_error("deaton_loglik: kappa must be > 0");
    ll += (gamma[j] - 0.5) * std::log(kappa[j]) -
          0.5 * kappa[j] * theta_hat[j] * theta_hat[j];
  }
  return ll;
}

}  // namespace isoeb
