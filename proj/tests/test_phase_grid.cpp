#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "oracles.hpp"
#include "vfp/phase_grid.hpp"

using namespace vfp;

TEST_CASE("grid construction rejects bad sizes") {
  CHECK_THROWS_WITH_AS(build_grid(2, 64, 8.0), "nx must be at least 4", std::invalid_argument);
  CHECK_THROWS_WITH_AS(build_grid(64, 63, 8.0), "nv must be even", std::invalid_argument);
  CHECK_THROWS_WITH_AS(build_grid(64, 6, 8.0), "nv must be at least 8", std::invalid_argument);
  CHECK_THROWS_AS(build_grid(64, 64, 0.0), std::invalid_argument);
}

TEST_CASE("a truncated velocity box that cuts the Maxwellian tail is refused") {
  try {
    build_grid(64, 64, 3.0);
    FAIL("expected an exception");
  } catch (const std::invalid_argument& e) {
    const std::string msg = e.what();
    CHECK(msg.find("vmax") != std::string::npos);
  }
  const double vr = required_vmax(1e-12);
  CHECK(maxwellian(vr) <= 1e-12 * (1 + 1e-12));
  CHECK(maxwellian(vr * 0.999) > 1e-12);
}

TEST_CASE("nodes are cell centered and mirror exactly") {
  const PhaseGrid g = build_grid(16, 32, 8.0);
  CHECK(g.dx == doctest::Approx(1.0 / 16));
  CHECK(g.dv == doctest::Approx(0.5));
  CHECK(g.x_nodes.front() == doctest::Approx(g.dx / 2));
  CHECK(g.v_nodes.front() == doctest::Approx(-8.0 + g.dv / 2));
  for (std::size_t j = 0; j < g.nv; ++j) {
    CHECK(g.v_nodes[j] == -g.v_nodes[g.mirror(j)]);
    CHECK(g.maxw[j] == g.maxw[g.mirror(j)]);
    CHECK(g.sqrt_maxw[j] * g.sqrt_maxw[j] == doctest::Approx(g.maxw[j]).epsilon(1e-14));
  }
}

TEST_CASE("midpoint sums of the Maxwellian moments are spectrally accurate") {
  const PhaseGrid g = build_grid(8, 64, 8.0);
  double m0 = 0.0, m2 = 0.0;
  for (std::size_t j = 0; j < g.nv; ++j) {
    m0 += g.maxw[j] * g.dv;
    m2 += g.v_nodes[j] * g.v_nodes[j] * g.maxw[j] * g.dv;
  }
  CHECK(m0 == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(m2 == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("grid function layout is velocity major") {
  GridFunction f(5, 8, 0.0);
  f(3, 2) = 7.0;
  CHECK(f.values()[2 * 5 + 3] == 7.0);
  CHECK(f.row(2)[3] == 7.0);
}

TEST_CASE("weighted norms of sqrt(M) converge to their Gaussian values") {
  // ||psi0||^2 = 1, ||d_v psi0||^2 = 1/4, ||v psi0||^2 = 1, so omega = 9/4.
  double prev = 1.0;
  for (std::size_t nv : {64u, 128u, 256u}) {
    const PhaseGrid g = build_grid(8, nv, 8.0);
    const GridFunction h = sample(g, [](double, double v) { return oracle::hermite_functions(0, v)[0]; });
    const WeightedNormReport n = norms(h, g);
    CHECK(n.l2 == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(n.v_norm == doctest::Approx(n.l2).epsilon(1e-12));  // no x dependence
    const double err = std::abs(n.omega - 2.25);
    CHECK(err < 0.02 * 64.0 / nv);
    CHECK(err < prev);
    prev = err;
  }
}

TEST_CASE("V norm picks up the x derivative") {
  const PhaseGrid g = build_grid(256, 64, 8.0);
  const GridFunction h = sample(g, [](double x, double v) {
    return std::cos(2 * oracle::pi * x) * oracle::hermite_functions(0, v)[0];
  });
  const WeightedNormReport n = norms(h, g);
  // 1/2 * (1 + 4 pi^2)
  CHECK(n.v_norm == doctest::Approx(0.5 * (1 + 4 * oracle::pi * oracle::pi)).epsilon(1e-3));
  CHECK(n.v_omega > n.v_norm);
}

TEST_CASE("norms reject non-finite input") {
  const PhaseGrid g = build_grid(8, 16, 8.0);
  GridFunction h(g, 0.0);
  h(1, 1) = std::nan("");
  CHECK_THROWS_AS(norms(h, g), std::invalid_argument);
}

TEST_CASE("derivative stencils are exact on quadratics") {
  const double h = 0.1;
  std::vector<double> f(10);
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double x = (i + 0.5) * h;
    f[i] = 3 * x * x - x + 2;
  }
  const std::vector<double> d = derivative_1d(f, h);
  for (std::size_t i = 0; i < f.size(); ++i) CHECK(d[i] == doctest::Approx(6 * (i + 0.5) * h - 1).epsilon(1e-12));
  // Face derivatives extrapolate to x = 0 and x = 1 from the nearest three cells.
  CHECK(left_face_derivative(f[0], f[1], f[2], h) == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(right_face_derivative(f[7], f[8], f[9], h) == doctest::Approx(5.0).epsilon(1e-12));
}

TEST_CASE("face derivative formulas are second order") {
  const double h = 1e-2;
  auto f = [](double x) { return std::sin(3 * x); };
  const double x0 = 0.3;
  const double l2 = left_face_derivative(f(x0 + h / 2), f(x0 + 3 * h / 2), f(x0 + 5 * h / 2), h);
  CHECK(l2 == doctest::Approx(3 * std::cos(3 * x0)).epsilon(1e-3));
  const double r = right_face_derivative(f(x0 - 5 * h / 2), f(x0 - 3 * h / 2), f(x0 - h / 2), h);
  CHECK(r == doctest::Approx(3 * std::cos(3 * x0)).epsilon(1e-3));
}

TEST_CASE("inner product matches the squared norm") {
  const PhaseGrid g = build_grid(16, 32, 8.0);
  const GridFunction h = sample(g, [](double x, double v) { return std::sin(x) * std::exp(-v * v / 4); });
  CHECK(inner(h, h, g) == doctest::Approx(norms(h, g).l2).epsilon(1e-14));
}

TEST_CASE("worked grid examples") {
  const PhaseGrid g = build_grid(64, 64, 8.0);
  CHECK(g.dv == 0.25);
  CHECK(g.v_nodes.front() == -7.875);
  CHECK(g.v_nodes.back() == 7.875);
  CHECK(maxwellian(0.0) == doctest::Approx(0.3989422804).epsilon(1e-10));
  CHECK(maxwellian(2.0) == maxwellian(-2.0));
  const PhaseGrid g128 = build_grid(4, 128, 8.0);
  double s = 0.0;
  for (std::size_t j = 0; j < g128.nv; ++j) s += g128.maxw[j] * g128.dv;
  CHECK(std::abs(s - 1.0) < 1e-10);
}

TEST_CASE("norms of zero and of v sqrt(M)") {
  const PhaseGrid g = build_grid(8, 64, 8.0);
  const WeightedNormReport z = norms(GridFunction(g), g);
  CHECK(z.l2 == 0.0);
  CHECK(z.omega == 0.0);
  CHECK(z.v_norm == 0.0);
  CHECK(z.v_omega == 0.0);
  const GridFunction h = sample(g, [](double, double v) { return v * std::sqrt(maxwellian(v)); });
  CHECK(std::abs(norms(h, g).l2 - 1.0) < 1e-8);
}
