#include <cmath>
#include <random>

#include <doctest.h>

#include "zzaloha/stationary.hpp"

using namespace zzaloha;

namespace {

// Test-side oracle: plain left multiplication for a fixed step count,
// independent of the library's stopping logic.
Vectord power_oracle(const Matrixd& p, long steps) {
  Eigen::RowVectorXd x = Eigen::RowVectorXd::Constant(p.rows(), 1.0 / double(p.rows()));
  for (long i = 0; i < steps; ++i) {
    x = x * p;
    x /= x.sum();
  }
  return x.transpose();
}

TransitionMatrix<double> hand_matrix(Matrixd probs) {
  TransitionMatrix<double> chain;
  chain.params = validate_params(int(probs.rows()) - 1, 0.5, 0.5, Variant::ZigzagPaper);
  chain.probs = std::move(probs);
  return chain;
}

}  // namespace

TEST_CASE("M=1 chain puts all stationary mass at the empty state") {
  for (Variant v : {Variant::AlohaBaseline, Variant::ZigzagPaper, Variant::ZigzagStrict}) {
    const auto chain = build_transition_matrix(validate_params(1, 0.3, 0.5, v));
    for (SolveMethod method : {SolveMethod::Direct, SolveMethod::PowerIteration}) {
      const auto dist = solve_stationary(chain, method);
      CHECK(std::abs(dist.pi(0) - 1.0) <= 1e-14);
      CHECK(std::abs(dist.pi(1)) <= 1e-14);
      CHECK(dist.residual <= 1e-10);
    }
  }
}

TEST_CASE("symmetric two-state chain has the uniform distribution") {
  Matrixd p(2, 2);
  p << 0.5, 0.5, 0.5, 0.5;
  const auto chain = hand_matrix(p);
  const auto direct = solve_stationary_direct(chain);
  CHECK(direct.pi(0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(direct.pi(1) == doctest::Approx(0.5).epsilon(1e-14));
  const auto power = solve_stationary_power(chain);
  CHECK(power.pi(0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(power.method == SolveMethod::PowerIteration);
  CHECK(direct.iterations == 0);
  CHECK(power.iterations > 0);
}

TEST_CASE("direct solve matches a ten-million-step oracle") {
  const auto chain = build_zigzag_paper(validate_params(2, 0.2, 0.5, Variant::ZigzagPaper));
  const Vectord oracle = power_oracle(chain.probs, 10'000'000);
  const auto direct = solve_stationary_direct(chain);
  CHECK((direct.pi - oracle).cwiseAbs().maxCoeff() <= 1e-9);
  const auto power = solve_stationary_power(chain);
  CHECK((power.pi - oracle).cwiseAbs().maxCoeff() <= 1e-9);
}

TEST_CASE("direct and power iteration agree across random models") {
  std::mt19937 gen(361);
  std::uniform_real_distribution<double> prob(0.02, 0.98);
  std::uniform_int_distribution<int> users(1, 50);
  const std::vector<Variant> variants = {Variant::AlohaBaseline, Variant::ZigzagPaper,
                                         Variant::ZigzagStrict};
  for (int draw = 0; draw < 12; ++draw) {
    const auto params =
        validate_params(users(gen), prob(gen), prob(gen), variants[draw % variants.size()]);
    const auto chain = build_transition_matrix(params);
    const auto direct = solve_stationary_direct(chain);
    const auto power = solve_stationary_power(chain);
    CHECK((direct.pi - power.pi).cwiseAbs().maxCoeff() <= 1e-8);
    CHECK(std::abs(direct.pi.sum() - 1.0) <= 1e-12);
    CHECK(direct.pi.minCoeff() >= 0.0);
    // stationary flow balance against the matrix-exact drift
    CHECK(std::abs(chain_exact_drift(chain).dot(direct.pi)) <= 1e-10);
  }
}

TEST_CASE("solution is invariant under the replaced normalization row") {
  const auto chain = build_zigzag_paper(validate_params(8, 0.1, 0.4, Variant::ZigzagPaper));
  const auto reference = solve_stationary_direct(chain);
  for (int row = 0; row <= 8; ++row) {
    SolveOptions opts;
    opts.normalization_row = row;
    const auto dist = solve_stationary_direct(chain, opts);
    CHECK((dist.pi - reference.pi).cwiseAbs().maxCoeff() <= 1e-9);
  }
  SolveOptions bad;
  bad.normalization_row = 9;
  CHECK_THROWS_AS(solve_stationary_direct(chain, bad), OutOfRangeError);
}

TEST_CASE("reducible matrices are rejected instead of answered") {
  Matrixd identity = Matrixd::Identity(3, 3);  // three absorbing states
  CHECK_THROWS_AS(solve_stationary_direct(hand_matrix(identity)), SingularSystemError);
  Matrixd split(3, 3);  // two separate recurrent classes
  split << 0.5, 0.5, 0.0,
           0.5, 0.5, 0.0,
           0.0, 0.0, 1.0;
  CHECK_THROWS_AS(solve_stationary_direct(hand_matrix(split)), SingularSystemError);
}

TEST_CASE("power iteration reports non-convergence at a tiny cap") {
  const auto chain = build_zigzag_paper(validate_params(10, 0.01, 0.8, Variant::ZigzagPaper));
  SolveOptions opts;
  opts.max_power_iterations = 10;
  CHECK_THROWS_AS(solve_stationary_power(chain, opts), NotConvergedError);
}

TEST_CASE("total variation distance") {
  Vectord v(2), w(2), u(2);
  v << 0.5, 0.5;
  w << 0.75, 0.25;
  u << 1.0, 0.0;
  Vectord flipped(2);
  flipped << 0.0, 1.0;
  CHECK(total_variation_distance(v, v) == 0.0);
  CHECK(total_variation_distance(u, flipped) == 1.0);
  CHECK(total_variation_distance(v, w) == doctest::Approx(0.25).epsilon(1e-15));
  Vectord three = Vectord::Constant(3, 1.0 / 3);
  CHECK_THROWS_AS(total_variation_distance(v, three), LengthMismatchError);
  Vectord unnormalized(2);
  unnormalized << 0.5, 0.6;
  CHECK_THROWS_AS(total_variation_distance(v, unnormalized), OutOfRangeError);
}
