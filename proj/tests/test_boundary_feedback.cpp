#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "oracles.hpp"
#include "vfp/boundary_feedback.hpp"

using namespace vfp;

namespace {

GridFunction random_state(const PhaseGrid& g, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  GridFunction h(g);
  for (double& x : h.values()) x = nd(rng);
  return h;
}

}  // namespace

TEST_CASE("feedback factories") {
  CHECK(FeedbackMatrix::periodic().is_periodic());
  CHECK_FALSE(FeedbackMatrix::reflective().is_periodic());
  const FeedbackMatrix s = FeedbackMatrix::symmetric(0.3);
  CHECK(s.k00 == 0.3);
  CHECK(s.k11 == 0.3);
  CHECK(s.k01 == doctest::Approx(0.7));
  CHECK(s.k10_0 == doctest::Approx(0.7));
  FeedbackMatrix bad = FeedbackMatrix::periodic();
  bad.k10 = std::nan("");
  CHECK_THROWS_AS(bad.require_finite(), std::invalid_argument);
}

TEST_CASE("incoming traces follow the feedback relations") {
  const PhaseGrid g = build_grid(8, 16, 8.0);
  std::mt19937_64 rng(3);
  DistributionState s{random_state(g, rng), 0.0};
  const FeedbackMatrix K = FeedbackMatrix::constant(0.2, 0.8, 0.4, 0.6);
  const BoundaryTraces tr = incoming_values(s, g, K);
  for (std::size_t j = 0; j < g.nv; ++j) {
    const std::size_t m = g.mirror(j);
    if (g.v_nodes[j] > 0) {
      CHECK(tr.at0[j] == doctest::Approx(K.k00 * s.h(0, m) + K.k10 * s.h(g.nx - 1, j)));
      CHECK(tr.at1[j] == s.h(g.nx - 1, j));
    } else {
      CHECK(tr.at1[j] == doctest::Approx(K.k01 * s.h(0, j) + K.k11 * s.h(g.nx - 1, m)));
      CHECK(tr.at0[j] == s.h(0, j));
    }
  }
}

TEST_CASE("derivative traces flip the sign of the reflection terms") {
  const PhaseGrid g = build_grid(16, 16, 8.0);
  std::mt19937_64 rng(5);
  DistributionState s{random_state(g, rng), 0.0};
  const FeedbackMatrix K = FeedbackMatrix::constant(0.5, 0.5, 0.25, 0.75);
  const BoundaryTraces d = derivative_traces(s, g, K);
  for (std::size_t j = 0; j < g.nv; ++j) {
    const std::size_t m = g.mirror(j);
    if (g.v_nodes[j] > 0)
      CHECK(d.at0[j] == doctest::Approx(-K.k00 * d.at0[m] + K.k10 * d.at1[j]));
    else
      CHECK(d.at1[j] == doctest::Approx(K.k01 * d.at0[j] - K.k11 * d.at1[m]));
  }
  CHECK(derivative_bc_residual(s, g, K) > 1e-3);
}

TEST_CASE("smooth periodic states satisfy the periodic derivative relations") {
  // One-sided stencils at the two ends see the same periodic data.
  const PhaseGrid g = build_grid(64, 32, 8.0);
  DistributionState s{sample(g, [](double x, double v) { return std::sin(2 * oracle::pi * x) * std::exp(-v * v / 4); }),
                      0.0};
  CHECK(derivative_bc_residual(s, g, FeedbackMatrix::periodic()) < 1e-10);
}

TEST_CASE("boundary functionals of a Maxwellian state") {
  const PhaseGrid g = build_grid(8, 256, 8.0);
  DistributionState s{sample(g, [](double, double v) { return std::sqrt(maxwellian(v)); }), 0.0};
  const BoundaryFunctionals bf = boundary_functionals(s, g);
  // (1/2) int_{v<0} |v| M dv = 1 / (2 sqrt(2 pi)); midpoint error is O(dv^2).
  const double exact = 0.5 / std::sqrt(2 * oracle::pi);
  CHECK(bf.A == doctest::Approx(exact).epsilon(1e-3));
  CHECK(bf.B == bf.A);
  CHECK(bf.A_x == doctest::Approx(0.0).epsilon(1e-20));
  CHECK(std::abs(bf.A - exact) < 0.01 * g.dv * g.dv);
}

TEST_CASE("C_B formula") {
  CHECK(compute_cb(4, 1, 9, 4).value() == doctest::Approx((1.0 + 1.0) / (2.0 * 3 * 5)));
  CHECK(compute_cb(1, 1, 1, 1).value() == 0.0);
  CHECK_FALSE(compute_cb(0, 0, 1, 1).has_value());
  CHECK_FALSE(compute_cb(1, 1, 0, 0).has_value());
  CHECK_THROWS_AS(compute_cb(-1, 1, 1, 1), std::invalid_argument);
}

TEST_CASE("I vanishes for the periodic matrix") {
  CHECK(evaluate_I(FeedbackMatrix::periodic(), 0.3, 0.1, 2.0, 0.4, 0.05) == 0.0);
}

TEST_CASE("symmetric profile: I <= 0 exactly when a <= C_B") {
  // For k00 = k11 = k, I = 2k(1-k) [ -(sA - sB)^2 - (sAx - sBx)^2 + 2a (sA + sB)(sAx + sBx) ].
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.01, 2.0), uk(0.05, 0.95);
  for (int trial = 0; trial < 200; ++trial) {
    const double A = u(rng), B = u(rng), Ax = u(rng), Bx = u(rng), k = uk(rng);
    const double cb = compute_cb(A, B, Ax, Bx).value();
    const FeedbackMatrix K = FeedbackMatrix::symmetric(k);
    const double sa = std::sqrt(A), sb = std::sqrt(B), sax = std::sqrt(Ax), sbx = std::sqrt(Bx);
    for (double a : {0.5 * cb, cb, 1.5 * cb + 1e-3}) {
      const double expect =
          2 * k * (1 - k) * (-(sa - sb) * (sa - sb) - (sax - sbx) * (sax - sbx) + 2 * a * (sa + sb) * (sax + sbx));
      const double I = evaluate_I(K, A, B, Ax, Bx, a);
      CHECK(I == doctest::Approx(expect).epsilon(1e-9).scale(1.0));
      if (a < cb) CHECK(I <= 1e-12);
      if (a > cb) CHECK(I > 0.0);
    }
  }
}

TEST_CASE("zero-flux feedback balances u at the two ends") {
  const PhaseGrid g = build_grid(16, 32, 8.0);
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    double k00, k01, k10, k11;
    oracle::random_stochastic_rows(rng, k00, k01, k10, k11);
    const FeedbackMatrix K = FeedbackMatrix::constant(k00, k01, k10, k11);
    DistributionState s{random_state(g, rng), 0.0};
    CHECK(flux_balance(s, g, K) < 1e-12);
  }
  DistributionState s{random_state(g, rng), 0.0};
  CHECK(flux_balance(s, g, FeedbackMatrix::constant(0.5, 0.2, 1.0, 0.0)) > 1e-6);
}

TEST_CASE("limit quadratics") {
  const QuadraticResiduals p = limit_quadratics(FeedbackMatrix::periodic());
  CHECK(p.pass);
  const QuadraticResiduals r = limit_quadratics(FeedbackMatrix::reflective());
  CHECK_FALSE(r.pass);
  CHECK(r.first == 0.0);
  CHECK(r.second == 4.0);
  const QuadraticResiduals s = limit_quadratics(FeedbackMatrix::symmetric(0.5));
  CHECK(s.first == 0.0);
  CHECK(s.second == doctest::Approx(2.0));
  CHECK_FALSE(s.pass);
}

TEST_CASE("theorem selection") {
  SUBCASE("periodic") {
    const ConstraintReport r = check_constraints(FeedbackMatrix::periodic(), std::nullopt, 0.05);
    CHECK(r.theorem_selected == Theorem::periodic_large_field);
    CHECK(r.const2_pass);
    CHECK(r.constraint3.pass);
  }
  SUBCASE("reflective entries outside the small-field profile are rejected with a reason") {
    const ConstraintReport r = check_constraints(FeedbackMatrix::constant(1.5, -0.5, -0.5, 1.5), std::nullopt, 0.05);
    CHECK(r.theorem_selected == Theorem::none);
    REQUIRE_FALSE(r.reasons.empty());
    CHECK(r.reasons.front().find("k00 = 1.5") != std::string::npos);
  }
  SUBCASE("symmetric without a trajectory is provisional") {
    const ConstraintReport r = check_constraints(FeedbackMatrix::symmetric(0.5), std::nullopt, 0.05);
    CHECK(r.theorem_selected == Theorem::small_field);
    CHECK(r.profile_small_field);
    CHECK_FALSE(r.warnings.empty());
  }
  SUBCASE("symmetric with a trajectory where a exceeds C_B") {
    const ConstraintReport r = check_constraints(FeedbackMatrix::symmetric(0.5), TrajectoryWorst{0.01, 0.0}, 0.05);
    CHECK(r.theorem_selected == Theorem::none);
    CHECK(r.a_below_cb == false);
  }
  SUBCASE("symmetric with a compliant trajectory") {
    const ConstraintReport r = check_constraints(FeedbackMatrix::symmetric(0.5), TrajectoryWorst{0.2, -1.0}, 0.05);
    CHECK(r.theorem_selected == Theorem::small_field);
    CHECK(r.a_below_cb == true);
  }
  SUBCASE("epsilon = 0 uses the limit matrix only") {
    const ConstraintReport r = check_constraints(FeedbackMatrix::periodic(), std::nullopt, 0.05, 0.0);
    CHECK(r.theorem_selected == Theorem::epsilon_zero);
  }
  SUBCASE("non-finite entries") {
    FeedbackMatrix K = FeedbackMatrix::periodic();
    K.k00 = INFINITY;
    const ConstraintReport r = check_constraints(K, std::nullopt, 0.05);
    CHECK(r.theorem_selected == Theorem::none);
  }
  CHECK(std::string(to_string(Theorem::small_field)) == "small-field");
}

TEST_CASE("worked boundary examples") {
  const PhaseGrid g = build_grid(8, 16, 8.0);
  DistributionState s{GridFunction(g), 0.0};
  for (std::size_t j = 0; j < g.nv; ++j) {
    s.h(0, j) = 2.0;
    s.h(g.nx - 1, j) = 4.0;
  }
  const BoundaryTraces tr = incoming_values(s, g, FeedbackMatrix::symmetric(0.5));
  for (std::size_t j = g.nv / 2; j < g.nv; ++j) CHECK(tr.at0[j] == 3.0);

  const DistributionState zero{GridFunction(g), 0.0};
  const BoundaryFunctionals bf = boundary_functionals(zero, g);
  CHECK(bf.A == 0.0);
  CHECK(bf.B == 0.0);
  CHECK(bf.A_x == 0.0);
  CHECK(bf.B_x == 0.0);
  CHECK(flux_balance(zero, g, FeedbackMatrix::constant(0.7, 0.5, 0.1, 0.3)) == 0.0);

  CHECK(compute_cb(1, 0, 1, 0).value() == 1.0);
  CHECK(evaluate_I(FeedbackMatrix::symmetric(0.5), 1, 0, 1, 0, 0.1) == doctest::Approx(-0.9).epsilon(1e-14));

  std::mt19937_64 rng(1);
  DistributionState r{random_state(g, rng), 0.0};
  CHECK(flux_balance(r, g, FeedbackMatrix::constant(0.7, 0.5, 0.5, 0.5)) > 1e-6);

  const DistributionState flat{sample(g, [](double, double v) { return std::exp(-v * v / 4); }), 0.0};
  CHECK(derivative_bc_residual(flat, g, FeedbackMatrix::symmetric(0.3)) < 1e-13);
}
