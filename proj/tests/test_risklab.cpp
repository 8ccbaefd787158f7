#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "isoeb/crossfit.hpp"
#include "isoeb/risklab.hpp"
#include "isoeb/stats.hpp"

using namespace isoeb;
using namespace isoeb::risklab;

TEST_CASE("zero estimator on the zero truth has exactly zero risk") {
  ExperimentConfig config;
  config.estimator = EstimatorKind::Zero;
  config.replicates = 50;
  config.seed = 1;
  config.sweep = {{1, 8, 1.0, 1.0, 1.0}};
  config.profiles = {AdversarialProfile::SingleSpike};
  const RiskReport report = run_risk(config);
  // Risk against the spike truth is exactly ||theta||^2 = R
  CHECK(report.cells[0].risk == doctest::Approx(1.0));
  CHECK(report.cells[0].se == 0.0);
}

TEST_CASE("oracle risk matches the closed-form identity") {
  const SweepCell cell{3, 32, 2.0, 1.0, 4.0};
  const OrderedSparseClass cls{cell.s, cell.R, cell.p};
  const std::vector<double> theta =
      adversarial_theta(AdversarialProfile::GeometricDecay, cls);
  const double expected = oracle_risk_formula(theta, cell.lambda());

  const std::size_t reps = 20000;
  std::vector<double> losses(reps);
  for (std::size_t r = 0; r < reps; ++r) {
    RngStream rng(501, r);
    const SequenceProblem problem = simulate(theta, cell.sigma2, cell.n, rng);
    const std::vector<double> est =
        estimate_once(EstimatorKind::Oracle, problem, cell, rng);
    double loss = 0.0;
    for (std::size_t i = 0; i < theta.size(); ++i) {
      const double d = est[i] - theta[i];
      loss += d * d;
    }
    losses[r] = loss;
  }
  const MeanSe ms = mean_se(losses);
  CHECK(std::abs(ms.mean - expected) <= 3.0 * ms.se);
}

TEST_CASE("risk transfer inequality holds with cross-fit independence") {
  // E||theta_hat - theta_or||^2 <= sum E[(V_hat - V)^2 / (V + 2 lambda)]
  const SweepCell cell{4, 24, 2.0, 1.0, 2.0};
  const OrderedSparseClass cls{cell.s, cell.R, cell.p};
  const std::vector<double> theta =
      adversarial_theta(AdversarialProfile::GeometricDecay, cls);
  const double lambda = cell.lambda();
  const double nu = 2.0 * lambda;

  const std::size_t reps = 20000;
  std::vector<double> lhs(reps), rhs(reps);
  for (std::size_t r = 0; r < reps; ++r) {
    RngStream rng(502, r);
    const SequenceProblem problem = simulate(theta, cell.sigma2, cell.n, rng);
    const ClonePair clones = clone_split(problem, rng, CloneVariant::Additive);
    std::vector<double> proxy(problem.dim());
    for (std::size_t i = 0; i < problem.dim(); ++i)
      proxy[i] = clones.y_plus[i] * clones.y_plus[i] - nu;
    const DyadicBinning bins = pilot_bins(proxy, nu, cell.R);
    const VarianceProfile profile =
        fit_variance_profile(proxy, bins, cell.R);

    // profile invariants and per-replicate truncation monotonicity
    const IsotonicFit raw = pava(proxy, bins.weights, Cone::NonincreasingNonneg);
    for (std::size_t i = 0; i < problem.dim(); ++i) {
      REQUIRE(profile.v[i] >= 0.0);
      REQUIRE(profile.v[i] <= cell.R);
      if (i > 0) REQUIRE(profile.v[i] <= profile.v[i - 1]);
      const double v_true = theta[i] * theta[i];  // <= R by construction
      const double e_raw = (raw.values[i] - v_true) * (raw.values[i] - v_true);
      const double e_cap = (profile.v[i] - v_true) * (profile.v[i] - v_true);
      REQUIRE(e_cap <= e_raw + 1e-15);
    }

    double a = 0.0, b = 0.0;
    for (std::size_t i = 0; i < problem.dim(); ++i) {
      const double v_true = theta[i] * theta[i];
      const double w_hat = profile.v[i] / (profile.v[i] + nu);
      const double w_or = v_true / (v_true + nu);
      const double d = (w_hat - w_or) * clones.y_minus[i];
      a += d * d;
      const double dv = profile.v[i] - v_true;
      b += dv * dv / (v_true + nu);
    }
    lhs[r] = a;
    rhs[r] = b;
  }
  const MeanSe ml = mean_se(lhs);
  const MeanSe mr = mean_se(rhs);
  const double combined_se = std::sqrt(ml.se * ml.se + mr.se * mr.se);
  CHECK(ml.mean <= mr.mean + 3.0 * combined_se);
}

TEST_CASE("assouad bound values") {
  SUBCASE("s = 1 at unit noise") {
    const AssouadBound bound = assouad_lower({1, 8, 1.0, 1.0, 1.0});
    CHECK(bound.applicable);
    CHECK(bound.value == doctest::Approx(0.0793276).epsilon(1e-4));
  }
  SUBCASE("s = 0 edge gives zero") {
    const AssouadBound bound = assouad_lower({0, 8, 1.0, 1.0, 1.0});
    CHECK(bound.value == 0.0);
  }
  SUBCASE("hypothesis violated reports inapplicable") {
    const AssouadBound bound = assouad_lower({1, 8, 0.5, 1.0, 1.0});
    CHECK_FALSE(bound.applicable);
  }
}

TEST_CASE("hypercube truths sit at +-sqrt(lambda)") {
  const SweepCell cell{3, 10, 2.0, 1.0, 4.0};
  RngStream rng(503, 0);
  const std::vector<double> theta = assouad_hypercube_theta(cell, rng);
  const double a = std::sqrt(cell.lambda());
  for (std::size_t i = 0; i < 3; ++i)
    CHECK(std::abs(theta[i]) == doctest::Approx(a));
  for (std::size_t i = 3; i < 10; ++i) CHECK(theta[i] == 0.0);
}

TEST_CASE("collapse probability for p = 1 matches the chi-square value") {
  const CollapseCheck check = collapse_probability(1, 1.0, 40000, 504);
  CHECK(check.reference == doctest::Approx(0.6826894921).epsilon(1e-6));
  CHECK(std::abs(check.frequency - check.reference) <=
        3.0 * check.binomial_se);
}

TEST_CASE("collapse frequency is invariant under joint scaling") {
  // scaling (y, sigma2) jointly leaves the criterion unchanged; seeds align
  const CollapseCheck a = collapse_probability(5, 1.0, 5000, 505);
  const CollapseCheck b = collapse_probability(5, 4.0, 5000, 505);
  CHECK(a.frequency == doctest::Approx(b.frequency));
}

TEST_CASE("risk report bytes are deterministic") {
  ExperimentConfig config;
  config.estimator = EstimatorKind::Crossfit;
  config.replicates = 200;
  config.seed = 7;
  config.sweep = {{2, 16, 2.0, 1.0, 2.0}};
  config.threads = 2;
  const std::string a = to_json_string(run_risk(config));
  config.threads = 1;
  const std::string b = to_json_string(run_risk(config));
  CHECK(a == b);
}

TEST_CASE("every estimator runs on a small cell") {
  ExperimentConfig config;
  config.replicates = 30;
  config.seed = 11;
  config.sweep = {{2, 12, 2.0, 1.0, 2.0}};
  config.profiles = {AdversarialProfile::GeometricDecay};
  for (EstimatorKind kind :
       {EstimatorKind::Crossfit, EstimatorKind::CrossfitUnknownSigma,
        EstimatorKind::Oracle, EstimatorKind::GlobalEB, EstimatorKind::Stein,
        EstimatorKind::Zero}) {
    config.estimator = kind;
    const RiskReport report = run_risk(config);
    CHECK(report.cells.size() == 1);
    CHECK(report.cells[0].risk >= 0.0);
    CHECK(report.cells[0].se >= 0.0);
  }
}

TEST_CASE("estimator/class mismatches are config errors") {
  ExperimentConfig config;
  config.replicates = 5;
  config.estimator = EstimatorKind::Stein;
  config.sweep = {{1, 2, 1.0, 1.0, 1.0}};  // p < 3
  CHECK_THROWS_AS(run_risk(config), std::invalid_argument);
  config.estimator = EstimatorKind::CrossfitUnknownSigma;
  config.sweep = {{4, 4, 1.0, 1.0, 1.0}};  // s == p
  CHECK_THROWS_AS(run_risk(config), std::invalid_argument);
  config.estimator = EstimatorKind::Zero;
  config.sweep = {};
  CHECK_THROWS_AS(run_risk(config), std::invalid_argument);
}

TEST_CASE("estimator names round-trip") {
  for (EstimatorKind kind :
       {EstimatorKind::Crossfit, EstimatorKind::CrossfitUnknownSigma,
        EstimatorKind::Oracle, EstimatorKind::GlobalEB, EstimatorKind::Stein,
        EstimatorKind::Zero}) {
    CHECK(estimator_from_name(estimator_name(kind)) == kind);
  }
  CHECK_THROWS_AS(estimator_from_name("nope"), std::invalid_argument);
}

TEST_CASE("b1 failure is zero when nu dominates R") {
  const OrderedSparseClass cls{2, 0.5, 16};
  const std::vector<double> n_grid{0.25};  // nu = 8 >> R
  const auto rows = b1_margin_frequency(cls, 1.0, n_grid, 0.2, 200, 506);
  CHECK(rows[0].b1_fail_freq == 0.0);
}

TEST_CASE("boundary-placed truths fail B1 more often than margin-safe ones") {
  const OrderedSparseClass cls{2, 4.0, 32};
  const std::vector<double> n_grid{8.0};
  const auto safe = b1_margin_frequency(cls, 1.0, n_grid, 0.2, 400, 507, true);
  const auto boundary =
      b1_margin_frequency(cls, 1.0, n_grid, 0.2, 400, 507, false);
  CHECK(boundary[0].b1_fail_freq >= safe[0].b1_fail_freq);
  CHECK(boundary[0].b1_fail_freq > 0.05);
}

TEST_CASE("prediction norm identity across random designs") {
  const PredictionNormResult result = prediction_norm_check(100, 508);
  CHECK(result.designs.size() == 100);
  bool saw_rank_deficient = false;
  for (const auto& row : result.designs) {
    CHECK(row.abs_diff <= 1e-8 * std::max(1.0, row.canonical_norm));
    if (row.r < std::min(row.n, row.p)) saw_rank_deficient = true;
  }
  CHECK(saw_rank_deficient);
  // contraction rerun in canonical coordinates comes along for free
  REQUIRE_FALSE(result.canonical_contraction.empty());
  for (const auto& row : result.canonical_contraction) {
    CHECK(row.violations == 0);
    CHECK(row.monotone);
  }
}

TEST_CASE("identity design makes canonical and original coordinates equal") {
  const std::size_t p = 6;
  Eigen::MatrixXd X = Eigen::MatrixXd::Identity(p, p);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(
      X, Eigen::ComputeThinU | Eigen::ComputeThinV);
  RngStream rng(513, 0);
  Eigen::VectorXd beta(p), beta0(p);
  for (std::size_t i = 0; i < p; ++i) {
    beta(static_cast<Eigen::Index>(i)) = rng.normal();
    beta0(static_cast<Eigen::Index>(i)) = rng.normal();
  }
  const Eigen::VectorXd theta = svd.singularValues().asDiagonal() *
                                (svd.matrixV().transpose() * beta);
  const Eigen::VectorXd theta0 = svd.singularValues().asDiagonal() *
                                 (svd.matrixV().transpose() * beta0);
  CHECK((X * (beta - beta0)).norm() ==
        doctest::Approx((theta - theta0).norm()).epsilon(1e-12));
  // the rotation is a signed permutation of the identity, so coordinate
  // magnitudes carry over unchanged
  for (std::size_t i = 0; i < p; ++i) {
    double mag = std::abs(theta(static_cast<Eigen::Index>(i)));
    bool found = false;
    for (std::size_t j = 0; j < p; ++j)
      if (std::abs(std::abs(beta(static_cast<Eigen::Index>(j))) - mag) < 1e-12)
        found = true;
    CHECK(found);
  }
}

TEST_CASE("contraction masses obey the Markov bound and monotonicity") {
  const OrderedSparseClass cls{2, 2.0, 24};
  const double sigma2 = 1.0, n = 4.0;
  const double eps2 = static_cast<double>(cls.s) * sigma2 / n;
  const std::vector<double> M_grid{1.0, 2.0, 4.0, 8.0};
  const auto rows = contraction_check(cls, sigma2, n, M_grid, std::sqrt(eps2),
                                      100, 1500, 509);
  REQUIRE(rows.size() == M_grid.size());
  for (const auto& row : rows) {
    CHECK(row.violations == 0);
    CHECK(row.monotone);
  }
  for (std::size_t k = 1; k < rows.size(); ++k)
    CHECK(rows[k].mean_mass <= rows[k - 1].mean_mass + 1e-12);
  CHECK(rows.back().mean_mass <= 0.05);  // mass -> 0 as M grows
}

TEST_CASE("sobolev sweep with zero radius stays near zero risk") {
  const SobolevEllipsoid ell{1.0, 0.0, 64};
  const std::vector<double> n_grid{16.0, 64.0};
  const SobolevSweepResult result = sobolev_sweep(ell, 1.0, n_grid, 200, 510);
  for (const auto& row : result.rows) {
    const double lambda = 1.0 / row.n;
    CHECK(row.risk <= 4.0 * lambda * std::log(std::exp(1.0) * 64.0));
  }
}

TEST_CASE("unknown-sigma risk tracks the two-term bound shape") {
  // risk <= C [ s lambda log(ep/s) log(1 + R n / sigma^2) + lambda + sR/(p-s) ]
  // with one constant across the (s, p) grid.
  double max_ratio = 0.0;
  for (std::size_t s : {1, 2, 4}) {
    for (std::size_t p : {32, 128}) {
      ExperimentConfig config;
      config.estimator = EstimatorKind::CrossfitUnknownSigma;
      config.replicates = 2000;
      config.seed = 511;
      config.sweep = {{s, p, 4.0, 1.0, 8.0}};
      const RiskReport report = run_risk(config);
      for (const CellResult& c : report.cells) {
        const double lam = c.cell.lambda();
        const double shape =
            risk_bound(c.cell) +
            (lam + static_cast<double>(c.cell.s) * c.cell.R /
                       static_cast<double>(c.cell.p - c.cell.s));
        max_ratio = std::max(max_ratio, c.risk / shape);
      }
    }
  }
  CHECK(max_ratio <= 2.0);
}

TEST_CASE("b1 failure frequency is non-increasing in n") {
  const OrderedSparseClass cls{2, 4.0, 32};
  const std::vector<double> n_grid{2.0, 8.0, 32.0};
  const auto rows = b1_margin_frequency(cls, 1.0, n_grid, 0.2, 2000, 512);
  REQUIRE(rows.size() == 3);
  CHECK(rows[1].b1_fail_freq <= rows[0].b1_fail_freq + 0.05);
  CHECK(rows[2].b1_fail_freq <= rows[1].b1_fail_freq + 0.05);
  // the margin argument kappa^2 nu / (R + nu) decreases along the grid
  CHECK(rows[1].margin_arg < rows[0].margin_arg);
  CHECK(rows[2].margin_arg < rows[1].margin_arg);
}

TEST_CASE("risk bound formula") {
  const SweepCell cell{2, 64, 4.0, 1.0, 8.0};
  const double expect = 2.0 * (1.0 / 8.0) * std::log(std::exp(1.0) * 32.0) *
                        std::log1p(32.0);
  CHECK(risk_bound(cell) == doctest::Approx(expect));
}
