// Command-line front end: simulate, isoreg, shrink, crossfit, deaton, risklab.
// Every run writes its outputs plus a <subcommand>_manifest.json recording
// the flags, seed, and input digests; re-running a manifest reproduces the
// outputs byte for byte (timestamp aside).

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "isoeb/crossfit.hpp"
#include "isoeb/deaton.hpp"
#include "isoeb/io.hpp"
#include "isoeb/isotonic.hpp"
#include "isoeb/risklab.hpp"
#include "isoeb/sequence.hpp"
#include "isoeb/shrinkage.hpp"
#include "isoeb/stats.hpp"
#include "isoeb/version.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

struct GlobalOpts {
  std::string output_dir = ".";
  std::uint64_t seed = 0;
  std::map<std::string, std::string> flags;
  std::map<std::string, std::string> input_digests;
};

std::uint64_t default_seed() {
  if (const char* env = std::getenv("ISOEB_SEED"))
    return std::strtoull(env, nullptr, 10);
  return 0;
}

std::string timestamp_now() {
  char buf[32];
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string out_path(const GlobalOpts& opts, const std::string& name) {
  fs::create_directories(opts.output_dir);
  return (fs::path(opts.output_dir) / name).string();
}

void note_input(GlobalOpts& opts, const std::string& path,
                const std::string& contents) {
  opts.input_digests[path] = isoeb::fnv1a_hex(contents);
}

void write_manifest(const GlobalOpts& opts, const std::string& subcommand) {
  isoeb::RunManifest manifest;
  manifest.subcommand = subcommand;
  manifest.flags = opts.flags;
  manifest.seed = opts.seed;
  manifest.input_digests = opts.input_digests;
  manifest.version = ISOEB_VERSION;
  manifest.timestamp = timestamp_now();
  isoeb::write_file(out_path(opts, subcommand + "_manifest.json"),
                    isoeb::manifest_to_json(manifest));
}

// ---------------------------------------------------------------- simulate

struct ClassSpec {
  std::string kind;  // sparse | sobolev | zero
  std::size_t s = 1;
  double R = 1.0;
  double beta = 1.0;
};

ClassSpec parse_class_spec(const std::string& text) {
  ClassSpec spec;
  const auto colon = text.find(':');
  spec.kind = text.substr(0, colon);
  if (spec.kind != "sparse" && spec.kind != "sobolev" && spec.kind != "zero")
    throw CLI::ValidationError("--class", "unknown class '" + spec.kind + "'");
  if (colon == std::string::npos) return spec;
  std::string rest = text.substr(colon + 1);
  std::size_t pos = 0;
  while (pos < rest.size()) {
    auto next = rest.find(',', pos);
    if (next == std::string::npos) next = rest.size();
    const std::string kv = rest.substr(pos, next - pos);
    const auto eq = kv.find('=');
    if (eq == std::string::npos)
      throw CLI::ValidationError("--class", "expected key=value in '" + kv + "'");
    const std::string key = kv.substr(0, eq);
    const double value = std::stod(kv.substr(eq + 1));
    if (key == "s") spec.s = static_cast<std::size_t>(value);
    else if (key == "R") spec.R = value;
    else if (key == "beta") spec.beta = value;
    else throw CLI::ValidationError("--class", "unknown key '" + key + "'");
    pos = next + 1;
  }
  return spec;
}

int run_simulate(GlobalOpts& opts, std::size_t p, double sigma2, double n,
                 const std::string& class_text, const std::string& profile) {
  const ClassSpec spec = parse_class_spec(class_text);
  isoeb::RngStream rng(opts.seed, 0);
  std::vector<double> theta;
  if (spec.kind == "zero") {
    theta.assign(p, 0.0);
  } else if (spec.kind == "sparse") {
    const isoeb::OrderedSparseClass cls{spec.s, spec.R, p};
    if (profile == "random") theta = sample_ordered_sparse(cls, rng);
    else if (profile == "flat")
      theta = adversarial_theta(isoeb::AdversarialProfile::FlatAtSqrtR, cls);
    else if (profile == "geometric")
      theta =
          adversarial_theta(isoeb::AdversarialProfile::GeometricDecay, cls);
    else if (profile == "spike")
      theta = adversarial_theta(isoeb::AdversarialProfile::SingleSpike, cls);
    else
      throw CLI::ValidationError("--profile", "unknown profile");
  } else {
    theta = sample_sobolev({spec.beta, spec.R, p}, rng, true);
  }
  const isoeb::SequenceProblem problem =
      isoeb::simulate(theta, sigma2, n, rng);
  isoeb::write_file(out_path(opts, "problem.csv"),
                    isoeb::problem_to_csv(problem));
  isoeb::write_file(out_path(opts, "problem.json"),
                    isoeb::problem_to_json(problem, opts.seed));
  write_manifest(opts, "simulate");
  return 0;
}

// ------------------------------------------------------------------ isoreg

int run_isoreg(GlobalOpts& opts, const std::string& input,
               const std::string& cone_name, const std::string& mode,
               double lambda) {
  const std::string text = isoeb::read_file(input);
  note_input(opts, input, text);
  const isoeb::CsvTable table = isoeb::parse_csv(text, input);
  const std::vector<double> x = table.require("x");

  if (mode == "lcm") {
    const isoeb::VarianceProfile tau = isoeb::lcm_cusum_tau(x, lambda);
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < x.size(); ++i)
      rows.push_back({static_cast<double>(i + 1), x[i], tau.v[i]});
    isoeb::write_csv_file(out_path(opts, "isoreg_fit.csv"),
                          {"index", "x", "fitted"}, rows);
    write_manifest(opts, "isoreg");
    return 0;
  }

  std::vector<double> w(x.size(), 1.0);
  if (table.column("w")) w = table.require("w");
  const isoeb::Cone cone = cone_name == "noninc-nonneg"
                               ? isoeb::Cone::NonincreasingNonneg
                               : isoeb::Cone::Nonincreasing;
  const isoeb::IsotonicFit fit = isoeb::pava(x, w, cone);
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < x.size(); ++i)
    rows.push_back({static_cast<double>(i + 1), x[i], w[i], fit.values[i]});
  isoeb::write_csv_file(out_path(opts, "isoreg_fit.csv"),
                        {"index", "x", "w", "fitted"}, rows);
  std::vector<std::vector<double>> blocks;
  for (const isoeb::IsotonicBlock& b : fit.blocks)
    blocks.push_back({static_cast<double>(b.begin + 1),
                      static_cast<double>(b.end), b.value});
  isoeb::write_csv_file(out_path(opts, "isoreg_blocks.csv"),
                        {"start", "end", "value"}, blocks);
  write_manifest(opts, "isoreg");
  return 0;
}

// ------------------------------------------------------------------ shrink

int run_shrink(GlobalOpts& opts, const std::string& input,
               const std::string& rule, double sigma2, double t, double g,
               std::size_t K, double k_const, bool adaptive) {
  const std::string text = isoeb::read_file(input);
  note_input(opts, input, text);
  const isoeb::CsvTable table = isoeb::parse_csv(text, input);

  std::vector<double> in_values;
  std::vector<double> weights;
  ordered_json hyper;
  hyper["rule"] = rule;

  if (rule == "global-eb") {
    in_values = table.require("y");
    const isoeb::GlobalEBResult eb = isoeb::eb_global_tau2(in_values, sigma2);
    const double w = eb.tau2 / (1.0 + eb.tau2);
    weights.assign(in_values.size(), w);
    hyper["tau2"] = eb.tau2;
    hyper["collapsed"] = eb.collapsed;
    hyper["sigma2"] = sigma2;
  } else if (rule == "stein") {
    in_values = table.require("y");
    const isoeb::ShrinkageFit fit = isoeb::stein_positive_part(in_values, t);
    weights = fit.weights;
    hyper["t"] = t;
    hyper["kappa"] = fit.hyper.at("kappa");
  } else if (rule == "grr" || rule == "pcr") {
    isoeb::SpectralDesign design;
    design.d = table.require("d");
    if (table.column("alpha")) {
      design.alpha_hat = table.require("alpha");
    } else {
      // rotated data z = d * alpha
      const std::vector<double> z = table.require("z");
      design.alpha_hat.resize(z.size());
      for (std::size_t i = 0; i < z.size(); ++i)
        design.alpha_hat[i] = z[i] / design.d[i];
    }
    design.sigma2 = sigma2;
    in_values = design.alpha_hat;
    if (rule == "pcr") {
      weights = isoeb::pcr_weights(design, K).weights;
      hyper["K"] = K;
    } else if (adaptive) {
      const std::vector<double> k = isoeb::adaptive_penalty(design);
      weights = isoeb::grr_weights(design, k).weights;
      hyper["adaptive"] = true;
    } else {
      std::vector<double> k(design.d.size(), k_const);
      if (table.column("k")) k = table.require("k");
      weights = isoeb::grr_weights(design, k).weights;
      hyper["k"] = k_const;
    }
  } else if (rule == "gprior") {
    in_values = table.require("y");
    weights.assign(in_values.size(), isoeb::g_prior_weight(g));
    hyper["g"] = g;
  } else if (rule.rfind("table1:", 0) == 0) {
    const std::string family_name = rule.substr(7);
    isoeb::WeightFamily family;
    if (family_name == "GRN") family = isoeb::WeightFamily::GRN;
    else if (family_name == "GRI1") family = isoeb::WeightFamily::GRI1;
    else if (family_name == "GRI") family = isoeb::WeightFamily::GRI;
    else if (family_name == "GRP") family = isoeb::WeightFamily::GRP;
    else if (family_name == "GRC") family = isoeb::WeightFamily::GRC;
    else throw CLI::ValidationError("--rule", "unknown table1 family");
    in_values = table.require("y");
    weights.resize(in_values.size());
    for (std::size_t i = 0; i < in_values.size(); ++i)
      weights[i] = isoeb::weight_family(in_values[i], family);
    hyper["family"] = family_name;
  } else {
    throw CLI::ValidationError("--rule", "unknown rule '" + rule + "'");
  }

  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < in_values.size(); ++i)
    rows.push_back({static_cast<double>(i + 1), in_values[i], weights[i],
                    weights[i] * in_values[i]});
  isoeb::write_csv_file(out_path(opts, "shrink.csv"),
                        {"index", "input", "weight", "estimate"}, rows);
  isoeb::write_file(out_path(opts, "shrink_hyper.json"),
                    hyper.dump(2) + "\n");
  write_manifest(opts, "shrink");
  return 0;
}

// ---------------------------------------------------------------- crossfit

int run_crossfit(GlobalOpts& opts, const std::string& input, double sigma2,
                 double n, const std::string& cap, const std::string& variant,
                 bool unknown_sigma, std::size_t s, double kappa) {
  const std::string text = isoeb::read_file(input);
  note_input(opts, input, text);
  const isoeb::CsvTable table = isoeb::parse_csv(text, input);
  const isoeb::SequenceProblem problem =
      isoeb::problem_from_csv(table, sigma2, n);

  ordered_json out;
  out["sigma2"] = sigma2;
  out["n_effective"] = n;

  if (unknown_sigma) {
    const isoeb::UnknownSigmaFit fit =
        isoeb::crossfit_unknown_sigma(problem, s);
    out["mode"] = "unknown-sigma";
    out["s"] = s;
    out["sigma2_hat"] = fit.sigma2_hat;
    out["lambda_hat"] = fit.lambda_hat;
    out["profile"] = fit.profile;
    out["posterior_mean"] = fit.mean;
    out["posterior_var"] = fit.var;
  } else {
    const isoeb::CloneVariant clone_variant =
        variant == "scaled" ? isoeb::CloneVariant::Scaled
                            : isoeb::CloneVariant::Additive;
    isoeb::RngStream rng(opts.seed, 0);
    const isoeb::CrossfitResult result =
        cap == "auto"
            ? isoeb::crossfit_estimate_auto_cap(problem, rng, clone_variant)
            : isoeb::crossfit_estimate(problem, std::stod(cap), rng,
                                       clone_variant);
    out["mode"] = "known-sigma";
    out["variant"] = variant;
    out["cap"] = result.profile.cap ? *result.profile.cap : 0.0;
    out["profile"] = result.profile.v;
    ordered_json bins;
    bins["nu"] = result.bins.nu;
    bins["M"] = result.bins.M;
    bins["thresholds"] = result.bins.thresholds;
    bins["bin_of"] = result.bins.bin_of;
    bins["weights"] = result.bins.weights;
    out["bins"] = std::move(bins);
    out["posterior_mean"] = result.posterior.mean;
    out["posterior_var"] = result.posterior.var;
    out["posterior_lambda"] = result.posterior.lambda;
    if (problem.truth) {
      // B1/margin are evaluated on the clone scale of the chosen variant.
      const double scale =
          clone_variant == isoeb::CloneVariant::Scaled ? 0.5 : 1.0;
      isoeb::VarianceProfile truth;
      truth.v.resize(problem.dim());
      for (std::size_t i = 0; i < problem.dim(); ++i)
        truth.v[i] =
            scale * (*problem.truth)[i] * (*problem.truth)[i];
      out["b1_holds"] = isoeb::b1_holds(result.bins, truth, result.bins.nu);
      out["margin_holds"] =
          isoeb::margin_holds(truth, result.bins.nu, kappa);
      out["margin_kappa"] = kappa;
    }
  }
  isoeb::write_file(out_path(opts, "crossfit.json"), out.dump(2) + "\n");
  write_manifest(opts, "crossfit");
  return 0;
}

// ------------------------------------------------------------------ deaton

int run_deaton(GlobalOpts& opts, const std::string& input, std::size_t degree,
               double gamma, double beta, std::optional<double> nbar,
               std::optional<double> sigma2) {
  const std::string text = isoeb::read_file(input);
  note_input(opts, input, text);
  const isoeb::CsvTable table = isoeb::parse_csv(text, input);
  const std::vector<double> x = table.require("x");
  const std::vector<double> y = table.require("y");

  isoeb::DeatonOptions options;
  options.gamma = gamma;
  options.beta_prior = beta;
  options.n_bar = nbar;
  options.sigma2 = sigma2;
  const isoeb::DeatonFit fit = isoeb::deaton_fit(x, y, degree, options);

  std::vector<std::vector<double>> coef;
  for (std::size_t j = 0; j < degree; ++j)
    coef.push_back({static_cast<double>(j + 1), fit.theta_hat[j],
                    fit.kappa_unconstrained[j], fit.kappa_iso[j],
                    fit.z_hat[j], fit.theta_shrunk[j]});
  isoeb::write_csv_file(
      out_path(opts, "deaton_coefficients.csv"),
      {"j", "theta_hat", "kappa_hat", "kappa_iso", "z_hat", "theta_shrunk"},
      coef);

  // Dense fitted curve for plotting.
  const isoeb::OrthoBasis basis = isoeb::build_basis(x, degree);
  const auto [lo_it, hi_it] = std::minmax_element(x.begin(), x.end());
  std::vector<std::vector<double>> curve;
  std::vector<double> cx, cy;
  const int grid = 200;
  for (int i = 0; i < grid; ++i) {
    const double xv =
        *lo_it + (*hi_it - *lo_it) * static_cast<double>(i) / (grid - 1);
    const std::vector<double> psi = basis.evaluate(xv);
    double fv = 0.0;
    for (std::size_t j = 0; j < degree; ++j)
      fv += psi[j] * fit.theta_shrunk[j];
    curve.push_back({xv, fv});
    cx.push_back(xv);
    cy.push_back(fv);
  }
  isoeb::write_csv_file(out_path(opts, "deaton_curve.csv"), {"x", "fitted"},
                        curve);
  isoeb::write_file(
      out_path(opts, "deaton_curve.svg"),
      isoeb::render_svg_chart({{"shrunk fit", cx, cy}}, "x", "fitted"));

  ordered_json hyper;
  hyper["degree"] = degree;
  hyper["gamma"] = gamma;
  hyper["beta"] = beta;
  hyper["n_bar"] = fit.n_bar;
  hyper["W_last"] = fit.W_last;
  hyper["rss"] = fit.rss;
  hyper["kappa_last_unconstrained"] = fit.kappa_last_unconstrained;
  hyper["kappa_last_iso"] = fit.kappa_last_iso;
  hyper["sigma2_hat"] = fit.sigma2_hat;
  isoeb::write_file(out_path(opts, "deaton_hyper.json"), hyper.dump(2) + "\n");
  write_manifest(opts, "deaton");
  return 0;
}

// ----------------------------------------------------------------- risklab

isoeb::risklab::ExperimentConfig config_from_json(const std::string& text,
                                                  const std::string& origin) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::runtime_error(origin + ": " + e.what());
  }
  isoeb::risklab::ExperimentConfig config;
  config.estimator = isoeb::risklab::estimator_from_name(
      j.value("estimator", std::string("crossfit")));
  config.replicates = j.value("replicates", 10000);
  config.seed = j.value("seed", std::uint64_t{0});
  config.threads = j.value("threads", std::size_t{0});
  if (j.contains("profiles")) {
    config.profiles.clear();
    for (const auto& name : j.at("profiles")) {
      const std::string s = name.get<std::string>();
      if (s == "flat")
        config.profiles.push_back(isoeb::AdversarialProfile::FlatAtSqrtR);
      else if (s == "geometric")
        config.profiles.push_back(isoeb::AdversarialProfile::GeometricDecay);
      else if (s == "spike")
        config.profiles.push_back(isoeb::AdversarialProfile::SingleSpike);
      else
        throw std::runtime_error(origin + ": unknown profile '" + s + "'");
    }
  }
  for (const auto& cell : j.at("sweep")) {
    isoeb::risklab::SweepCell c;
    c.s = cell.at("s").get<std::size_t>();
    c.p = cell.at("p").get<std::size_t>();
    c.R = cell.at("R").get<double>();
    c.sigma2 = cell.value("sigma2", 1.0);
    c.n = cell.value("n", 1.0);
    config.sweep.push_back(c);
  }
  return config;
}

struct RisklabFlags {
  std::string estimator = "crossfit";
  int replicates = 10000;
  std::vector<std::size_t> s{1};
  std::vector<std::size_t> p{64};
  double R = 1.0;
  double sigma2 = 1.0;
  std::vector<double> n{1.0};
};

int run_risklab(GlobalOpts& opts, const std::string& config_path,
                std::size_t threads, const RisklabFlags& flags) {
  isoeb::risklab::ExperimentConfig config;
  if (!config_path.empty()) {
    const std::string text = isoeb::read_file(config_path);
    note_input(opts, config_path, text);
    config = config_from_json(text, config_path);
  } else {
    config.estimator = isoeb::risklab::estimator_from_name(flags.estimator);
    config.replicates = flags.replicates;
    config.seed = opts.seed;
    for (std::size_t s : flags.s)
      for (std::size_t p : flags.p)
        for (double n : flags.n)
          config.sweep.push_back({s, p, flags.R, flags.sigma2, n});
  }
  if (threads != 0) config.threads = threads;
  const isoeb::risklab::RiskReport report = isoeb::risklab::run_risk(config);

  isoeb::write_file(out_path(opts, "risk_report.json"),
                    isoeb::risklab::to_json_string(report));
  isoeb::write_file(out_path(opts, "risk_report.csv"),
                    isoeb::risklab::to_csv_long(report));

  // Plot-ready curves: worst profile per cell, keyed by s and by n.
  std::map<double, std::pair<double, double>> by_s, by_n;
  for (const auto& cell : report.cells) {
    auto& vs = by_s[static_cast<double>(cell.cell.s)];
    vs.first = std::max(vs.first, cell.risk);
    vs.second = std::max(vs.second, cell.se);
    auto& vn = by_n[cell.cell.n];
    vn.first = std::max(vn.first, cell.risk);
    vn.second = std::max(vn.second, cell.se);
  }
  std::vector<std::vector<double>> rows_s, rows_n;
  isoeb::SvgSeries series_s{"risk", {}, {}}, series_n{"risk", {}, {}};
  for (const auto& [s, v] : by_s) {
    rows_s.push_back({s, v.first, v.second});
    series_s.x.push_back(s);
    series_s.y.push_back(v.first);
  }
  for (const auto& [n, v] : by_n) {
    rows_n.push_back({n, v.first, v.second});
    series_n.x.push_back(n);
    series_n.y.push_back(v.first);
  }
  isoeb::write_csv_file(out_path(opts, "risk_vs_s.csv"), {"s", "risk", "se"},
                        rows_s);
  isoeb::write_csv_file(out_path(opts, "risk_vs_n.csv"), {"n", "risk", "se"},
                        rows_n);
  if (series_s.x.size() >= 2)
    isoeb::write_file(out_path(opts, "risk_vs_s.svg"),
                      isoeb::render_svg_chart({series_s}, "s", "risk", true));
  if (series_n.x.size() >= 2)
    isoeb::write_file(out_path(opts, "risk_vs_n.svg"),
                      isoeb::render_svg_chart({series_n}, "n", "risk", true));
  write_manifest(opts, "risklab");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Isotonic empirical Bayes shrinkage toolkit"};
  app.set_version_flag("--version", ISOEB_VERSION);
  app.require_subcommand(1);
  app.fallthrough();  // --seed / --output-dir may trail the subcommand

  GlobalOpts opts;
  opts.seed = default_seed();
  app.add_option("--output-dir", opts.output_dir, "Directory for outputs");
  app.add_option("--seed", opts.seed,
                 "RNG seed (default from ISOEB_SEED env var)");

  // simulate
  auto* sim = app.add_subcommand("simulate", "Draw a sequence problem");
  std::size_t sim_p = 16;
  double sim_sigma2 = 1.0, sim_n = 1.0;
  std::string sim_class = "sparse:s=2,R=4";
  std::string sim_profile = "random";
  sim->add_option("--p", sim_p, "Dimension");
  sim->add_option("--sigma2", sim_sigma2, "Noise variance sigma^2");
  sim->add_option("--n", sim_n, "Effective sample size");
  sim->add_option("--class", sim_class,
                  "sparse:s=..,R=.. | sobolev:beta=..,R=.. | zero");
  sim->add_option("--profile", sim_profile,
                  "random | flat | geometric | spike");

  // isoreg
  auto* iso = app.add_subcommand("isoreg", "Isotonic projection of a column");
  std::string iso_input, iso_cone = "noninc", iso_mode = "pava";
  double iso_lambda = 0.0;
  iso->add_option("--input", iso_input, "CSV with column x (optional w)")
      ->required();
  iso->add_option("--cone", iso_cone, "noninc | noninc-nonneg");
  iso->add_option("--mode", iso_mode, "pava | lcm");
  iso->add_option("--lambda", iso_lambda, "Centering for lcm mode");

  // shrink
  auto* shr = app.add_subcommand("shrink", "Closed-form shrinkage rules");
  std::string shr_input, shr_rule = "global-eb";
  double shr_sigma2 = 1.0, shr_t = 1.0, shr_g = 1.0, shr_k = 1.0;
  std::size_t shr_K = 1;
  bool shr_adaptive = false;
  shr->add_option("--input", shr_input, "CSV with column y (or d, alpha)")
      ->required();
  shr->add_option("--rule", shr_rule,
                  "global-eb | stein | grr | pcr | gprior | table1:<family>");
  shr->add_option("--sigma2", shr_sigma2, "Noise variance");
  shr->add_option("--t", shr_t, "Stein multiplier");
  shr->add_option("--g", shr_g, "g-prior parameter");
  shr->add_option("--K", shr_K, "PCR component count");
  shr->add_option("--k", shr_k, "Constant ridge penalty");
  shr->add_flag("--adaptive", shr_adaptive,
                "Marginal-likelihood penalties for grr");

  // crossfit
  auto* cf = app.add_subcommand("crossfit", "Cross-fit isotonic EB shrinkage");
  std::string cf_input, cf_cap = "auto", cf_variant = "additive";
  double cf_sigma2 = 1.0, cf_n = 1.0, cf_kappa = 0.2;
  bool cf_unknown = false;
  std::size_t cf_s = 1;
  cf->add_option("--input", cf_input, "CSV with column y (optional theta)")
      ->required();
  cf->add_option("--sigma2", cf_sigma2, "Known noise variance");
  cf->add_option("--n", cf_n, "Effective sample size");
  cf->add_option("--cap", cf_cap, "Profile cap R, or 'auto'");
  cf->add_option("--variant", cf_variant, "additive | scaled");
  cf->add_flag("--unknown-sigma", cf_unknown, "Tail-estimate sigma^2");
  cf->add_option("--s", cf_s, "Head size for --unknown-sigma");
  cf->add_option("--kappa", cf_kappa, "Margin parameter for diagnostics");

  // deaton
  auto* dea = app.add_subcommand("deaton",
                                 "Order-restricted EB polynomial regression");
  std::string dea_input;
  std::size_t dea_degree = 4;
  double dea_gamma = 2.0, dea_beta = 5.0;
  std::optional<double> dea_nbar, dea_sigma2;
  double dea_nbar_raw = 0.0, dea_sigma2_raw = 0.0;
  dea->add_option("--input", dea_input, "CSV with columns x, y")->required();
  dea->add_option("--degree", dea_degree, "Number of basis polynomials");
  dea->add_option("--gamma", dea_gamma, "Prior degrees of freedom");
  dea->add_option("--beta", dea_beta, "Prior scale in W");
  auto* nbar_opt = dea->add_option("--nbar", dea_nbar_raw, "Override n_bar");
  auto* s2_opt = dea->add_option("--sigma2", dea_sigma2_raw,
                                 "Override sigma^2 in z = kappa sigma^2");

  // risklab
  auto* lab = app.add_subcommand("risklab", "Monte Carlo risk experiments");
  std::string lab_config;
  std::size_t lab_threads = 0;
  RisklabFlags lab_flags;
  lab->add_option("--config", lab_config,
                  "JSON experiment config (overrides the cell flags)");
  lab->add_option("--threads", lab_threads, "Worker threads (0 = auto)");
  lab->add_option("--estimator", lab_flags.estimator,
                  "crossfit | crossfit-unknown-sigma | oracle | global-eb | "
                  "stein | zero");
  lab->add_option("--replicates", lab_flags.replicates, "MC replicates");
  lab->add_option("--s", lab_flags.s, "Sparsity grid");
  lab->add_option("--p", lab_flags.p, "Dimension grid");
  lab->add_option("--R", lab_flags.R, "Amplitude bound");
  lab->add_option("--sigma2", lab_flags.sigma2, "Noise variance");
  lab->add_option("--n", lab_flags.n, "Effective sample size grid");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);  // prints the usage message
    return 2;
  }

  for (const CLI::Option* opt : app.get_options())
    if (opt->count() > 0)
      opts.flags[opt->get_name()] = opt->as<std::string>();
  CLI::App* sub = app.get_subcommands().front();
  for (const CLI::Option* opt : sub->get_options())
    if (opt->count() > 0)
      opts.flags[opt->get_name()] = opt->as<std::string>();

  try {
    if (*sim)
      return run_simulate(opts, sim_p, sim_sigma2, sim_n, sim_class,
                          sim_profile);
    if (*iso)
      return run_isoreg(opts, iso_input, iso_cone, iso_mode, iso_lambda);
    if (*shr)
      return run_shrink(opts, shr_input, shr_rule, shr_sigma2, shr_t, shr_g,
                        shr_K, shr_k, shr_adaptive);
    if (*cf) {
      return run_crossfit(opts, cf_input, cf_sigma2, cf_n, cf_cap, cf_variant,
                          cf_unknown, cf_s, cf_kappa);
    }
    if (*dea) {
      if (nbar_opt->count() > 0) dea_nbar = dea_nbar_raw;
      if (s2_opt->count() > 0) dea_sigma2 = dea_sigma2_raw;
      return run_deaton(opts, dea_input, dea_degree, dea_gamma, dea_beta,
                        dea_nbar, dea_sigma2);
    }
    if (*lab) return run_risklab(opts, lab_config, lab_threads, lab_flags);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
