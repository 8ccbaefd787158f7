#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <vector>

#include "isoeb/rng.hpp"
#include "isoeb/sequence.hpp"
#include "isoeb/stats.hpp"

using namespace isoeb;

TEST_CASE("single-spike profile is the max-energy class member") {
  const OrderedSparseClass cls{1, 4.0, 3};
  const std::vector<double> theta =
      adversarial_theta(AdversarialProfile::SingleSpike, cls);
  CHECK(theta == std::vector<double>{2.0, 0.0, 0.0});
  CHECK(in_ordered_sparse_class(theta, cls));
}

TEST_CASE("R = 0 forces the zero vector") {
  const OrderedSparseClass cls{3, 0.0, 3};
  RngStream rng(1, 0);
  const std::vector<double> theta = sample_ordered_sparse(cls, rng);
  CHECK(theta == std::vector<double>(3, 0.0));
}

TEST_CASE("sampled ordered-sparse members pass the class predicates") {
  const OrderedSparseClass cls{2, 1.0, 8};
  RngStream rng(2, 0);
  for (int it = 0; it < 500; ++it) {
    const std::vector<double> theta = sample_ordered_sparse(cls, rng);
    CHECK(in_ordered_sparse_class(theta, cls));
  }
}

TEST_CASE("invalid sparse classes are rejected") {
  RngStream rng(3, 0);
  CHECK_THROWS_AS(sample_ordered_sparse({5, 1.0, 3}, rng),
                  std::invalid_argument);
  CHECK_THROWS_AS(sample_ordered_sparse({1, -1.0, 3}, rng),
                  std::invalid_argument);
  CHECK_THROWS_AS(sample_sobolev({0.5, 1.0, 4}, rng), std::invalid_argument);
}

TEST_CASE("sobolev sampler respects the ellipsoid") {
  const SobolevEllipsoid ell{1.0, 1.0, 16};
  RngStream rng(4, 0);
  int boundary_hits = 0;
  for (int it = 0; it < 500; ++it) {
    const std::vector<double> theta = sample_sobolev(ell, rng);
    CHECK(in_sobolev_ellipsoid(theta, ell));
    double norm = 0.0;
    for (std::size_t i = 0; i < theta.size(); ++i)
      norm += std::pow(static_cast<double>(i + 1), 2.0) * theta[i] * theta[i];
    if (norm > 1.0 - 1e-9) ++boundary_hits;
  }
  // Rescaled draws land exactly on the boundary; both branches must occur.
  CHECK(boundary_hits > 50);
  CHECK(boundary_hits < 450);
}

TEST_CASE("sobolev R = 0 gives the zero vector") {
  RngStream rng(5, 0);
  const std::vector<double> theta = sample_sobolev({1.0, 0.0, 8}, rng);
  CHECK(theta == std::vector<double>(8, 0.0));
}

TEST_CASE("boundary draws satisfy the constraint to 1e-12") {
  const SobolevEllipsoid ell{1.0, 1.0, 2};
  RngStream rng(6, 0);
  for (int it = 0; it < 200; ++it) {
    const std::vector<double> theta = sample_sobolev(ell, rng);
    const double norm =
        theta[0] * theta[0] + 4.0 * theta[1] * theta[1];
    CHECK(norm <= 1.0 + 1e-12);
  }
}

TEST_CASE("monotone rearrangement keeps the envelope") {
  const SobolevEllipsoid ell{1.0, 2.0, 12};
  RngStream rng(7, 0);
  for (int it = 0; it < 200; ++it) {
    const std::vector<double> theta = sample_sobolev(ell, rng, true);
    for (std::size_t i = 0; i + 1 < theta.size(); ++i)
      CHECK(std::abs(theta[i]) >= std::abs(theta[i + 1]));
    CHECK(in_sobolev_ellipsoid(theta, ell));
    for (std::size_t i = 0; i < theta.size(); ++i)
      CHECK(theta[i] * theta[i] <=
            ell.R * ell.R *
                    std::pow(static_cast<double>(i + 1), -2.0 * ell.beta) +
                1e-12);
  }
}

TEST_CASE("simulate records the truth and the noise level") {
  RngStream rng(8, 0);
  const std::vector<double> theta{1.0, -2.0, 0.5};
  const SequenceProblem problem = simulate(theta, 2.0, 4.0, rng);
  CHECK(problem.noise_var == doctest::Approx(0.5));
  REQUIRE(problem.truth.has_value());
  CHECK(*problem.truth == theta);
}

TEST_CASE("vanishing-noise limit reproduces theta") {
  RngStream rng(9, 0);
  const std::vector<double> theta{1.0, -1.0, 3.0};
  const SequenceProblem problem = simulate(theta, 1.0, 1e18, rng);
  for (std::size_t i = 0; i < theta.size(); ++i)
    CHECK(std::abs(problem.y[i] - theta[i]) < 1e-6);
}

TEST_CASE("fixed seed reproduces the same y") {
  const std::vector<double> theta{0.5, 0.25};
  RngStream a(10, 3), b(10, 3);
  const SequenceProblem pa = simulate(theta, 1.0, 1.0, a);
  const SequenceProblem pb = simulate(theta, 1.0, 1.0, b);
  CHECK(pa.y == pb.y);
}

TEST_CASE("null sample mean within Monte Carlo error") {
  const std::size_t reps = 100000;
  std::vector<double> means(reps);
  for (std::size_t r = 0; r < reps; ++r) {
    RngStream rng(11, r);
    const SequenceProblem problem =
        simulate(std::vector<double>(1, 0.0), 1.0, 1.0, rng);
    means[r] = problem.y[0];
  }
  const MeanSe ms = mean_se(means);
  CHECK(std::abs(ms.mean) <= 4.0 * ms.se);
}

TEST_CASE("empirical noise variance within 5 percent") {
  const std::size_t reps = 100000;
  const double sigma2 = 2.0, n_eff = 8.0;
  std::vector<double> sq(reps);
  for (std::size_t r = 0; r < reps; ++r) {
    RngStream rng(12, r);
    const SequenceProblem problem =
        simulate(std::vector<double>(1, 0.0), sigma2, n_eff, rng);
    sq[r] = problem.y[0] * problem.y[0];
  }
  const double var = mean_se(sq).mean;
  CHECK(var == doctest::Approx(sigma2 / n_eff).epsilon(0.05));
}

TEST_CASE("simulate validates its arguments") {
  RngStream rng(13, 0);
  const std::vector<double> theta{1.0};
  CHECK_THROWS_AS(simulate(theta, 0.0, 1.0, rng), std::invalid_argument);
  CHECK_THROWS_AS(simulate(theta, 1.0, 0.0, rng), std::invalid_argument);
}

TEST_CASE("adversarial profiles are class members") {
  const OrderedSparseClass cls{4, 2.5, 10};
  for (auto profile :
       {AdversarialProfile::FlatAtSqrtR, AdversarialProfile::GeometricDecay,
        AdversarialProfile::SingleSpike}) {
    const std::vector<double> theta = adversarial_theta(profile, cls);
    CHECK(in_ordered_sparse_class(theta, cls));
  }
}
