#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "isoeb/crossfit.hpp"
#include "isoeb/sequence.hpp"

namespace isoeb::risklab {

enum class EstimatorKind {
  Crossfit,
  CrossfitUnknownSigma,
  Oracle,    // shrinkage with the true variance profile on the clone
  GlobalEB,  // single global scale from eb_global_tau2
  Stein,     // positive-part rule at the problem's noise level
  Zero,
};

std::string estimator_name(EstimatorKind kind);
EstimatorKind estimator_from_name(const std::string& name);

/// One grid point of the sweep: class parameters and noise level.
struct SweepCell {
  std::size_t s = 1;
  std::size_t p = 16;
  double R = 1.0;
  double sigma2 = 1.0;
  double n = 1.0;

  double lambda() const { return sigma2 / n; }
};

struct ExperimentConfig {
  EstimatorKind estimator = EstimatorKind::Crossfit;
  int replicates = 10000;
  std::uint64_t seed = 0;
  std::vector<SweepCell> sweep;
  std::vector<AdversarialProfile> profiles = {
      AdversarialProfile::FlatAtSqrtR, AdversarialProfile::GeometricDecay,
      AdversarialProfile::SingleSpike};
  std::size_t threads = 0;  // 0 = hardware concurrency
};

/// Rate benchmark s * lambda * log(ep/s) * log(1 + R n / sigma^2).
double risk_bound(const SweepCell& cell);

/// Closed-form risk of the oracle rule on a variance-2*lambda clone:
/// sum_i 2 lambda V_i / (V_i + 2 lambda).
double oracle_risk_formula(std::span<const double> theta, double lambda);

struct CellResult {
  SweepCell cell;
  std::string profile;
  double risk = 0.0;
  double se = 0.0;
  double bound = 0.0;
  double ratio = 0.0;  // risk / bound
  double collapse_freq = 0.0;
  double b1_fail_freq = 0.0;
  double margin_fail_freq = 0.0;  // margin at kappa = 0.2, deterministic
};

struct RiskReport {
  std::string estimator;
  std::uint64_t seed = 0;
  int replicates = 0;
  std::string config_hash;
  std::vector<CellResult> cells;
};

/// Monte Carlo risk over every (cell, adversarial profile) pair.
/// Replicates run on independent RNG substreams and are aggregated by
/// deterministic pairwise summation, so the report is byte-reproducible
/// for a fixed config and seed regardless of thread count.
RiskReport run_risk(const ExperimentConfig& config);

std::string to_json_string(const RiskReport& report);
std::string to_csv_long(const RiskReport& report);

/// One estimator evaluation; exposed for the acceptance suite.
struct ReplicateEvents {
  bool collapsed = false;
  bool b1_failed = false;
};
std::vector<double> estimate_once(EstimatorKind kind,
                                  const SequenceProblem& problem,
                                  const SweepCell& cell, RngStream& rng,
                                  ReplicateEvents* events = nullptr);

/// Assouad hypercube lower bound c * s * lambda with c = Phi(-1)/2,
/// applicable when sigma^2 / n <= R.
struct AssouadBound {
  double value = 0.0;
  bool applicable = false;
};
AssouadBound assouad_lower(const SweepCell& cell);

/// Random hypercube vertex: theta_i in {+-sqrt(lambda)} for i <= s, else 0.
std::vector<double> assouad_hypercube_theta(const SweepCell& cell,
                                            RngStream& rng);

struct CollapseCheck {
  double frequency = 0.0;
  double reference = 0.0;  // P(chi^2_p <= p)
  double binomial_se = 0.0;
};
/// Frequency of global-EB collapse under the null, against the chi-square law.
CollapseCheck collapse_probability(std::size_t p, double sigma2,
                                   int replicates, std::uint64_t seed);

struct ContractionRow {
  double M = 0.0;
  double mean_mass = 0.0;
  double mean_bound = 0.0;
  double max_excess = 0.0;  // max over replicates of mass - bound - 3 se
  int violations = 0;       // replicates with positive excess
  bool monotone = true;     // masses nonincreasing in M within each replicate
};
/// Posterior mass outside the M * eps_n ball versus the conditional Markov
/// bound (||m - theta0||^2 + tr V) / (M eps_n)^2, estimated by sampling the
/// diagonal Gaussian posterior of the cross-fit estimator.
std::vector<ContractionRow> contraction_check(
    const OrderedSparseClass& cls, double sigma2, double n,
    std::span<const double> M_grid, double eps_n, int replicates,
    int posterior_draws, std::uint64_t seed);

struct SobolevRow {
  double n = 0.0;
  double risk = 0.0;
  double se = 0.0;
};
struct SobolevSweepResult {
  std::vector<SobolevRow> rows;
  double fitted_slope = 0.0;
  double theoretical_slope = 0.0;  // -2 beta / (2 beta + 1)
};
/// Cross-fit risk on the boundary profile theta_i^2 = R^2 i^{-2 beta - 1}/H_p
/// across the n grid, with the fitted log-log slope.
SobolevSweepResult sobolev_sweep(const SobolevEllipsoid& ell, double sigma2,
                                 std::span<const double> n_grid,
                                 int replicates, std::uint64_t seed);

struct PredNormRow {
  std::size_t n = 0;
  std::size_t p = 0;
  std::size_t r = 0;
  double prediction_norm = 0.0;
  double canonical_norm = 0.0;
  double abs_diff = 0.0;
};
struct PredictionNormResult {
  std::vector<PredNormRow> designs;
  // contraction_check rerun on the canonical coordinates of the last
  // full-rank design; by the norm identity this is posterior contraction in
  // prediction norm.
  std::vector<ContractionRow> canonical_contraction;
};
/// ||X(beta - beta0)|| versus ||theta - theta0|| across random designs,
/// including rank-deficient ones, plus the canonical-coordinate contraction
/// table.
PredictionNormResult prediction_norm_check(int num_designs,
                                           std::uint64_t seed);

struct B1FrequencyRow {
  double n = 0.0;
  double nu = 0.0;
  double margin_arg = 0.0;  // kappa^2 nu / (R + nu)
  double b1_fail_freq = 0.0;
};
/// B1 failure frequency across the n grid. Truths are margin-satisfying
/// class members obtained by sample filtering, or deliberately placed on a
/// dyadic boundary when margin_filtered is false.
std::vector<B1FrequencyRow> b1_margin_frequency(
    const OrderedSparseClass& cls, double sigma2,
    std::span<const double> n_grid, double kappa, int replicates,
    std::uint64_t seed, bool margin_filtered = true);

}  // namespace isoeb::risklab
