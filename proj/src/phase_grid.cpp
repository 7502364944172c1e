#include "vfp/phase_grid.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace vfp {

namespace {

double sum_sq(const GridFunction& g) {
  double s = 0.0;
  for (double x : g.values()) s += x * x;
  return s;
}

double sum_sq_v_weighted(const GridFunction& g, const PhaseGrid& grid) {
  double s = 0.0;
  for (std::size_t j = 0; j < grid.nv; ++j) {
    const double v = grid.v_nodes[j];
    double r = 0.0;
    for (double x : g.row(j)) r += x * x;
    s += v * v * r;
  }
  return s;
}

}  // namespace

double maxwellian(double v) {
  return std::exp(-0.5 * v * v) / std::sqrt(2.0 * std::numbers::pi);
}

double required_vmax(double tail_tol) {
  if (!(tail_tol > 0.0) || tail_tol >= 1.0 / std::sqrt(2.0 * std::numbers::pi))
    throw std::invalid_argument("tail_tol must lie in (0, M(0))");
  return std::sqrt(-2.0 * std::log(tail_tol * std::sqrt(2.0 * std::numbers::pi)));
}

PhaseGrid build_grid(std::size_t nx, std::size_t nv, double vmax, double tail_tol) {
  if (nx < 4) throw std::invalid_argument("nx must be at least 4");
  if (nv % 2 != 0) throw std::invalid_argument("nv must be even");
  if (nv < 8) throw std::invalid_argument("nv must be at least 8");
  if (!(vmax > 0.0) || !std::isfinite(vmax)) throw std::invalid_argument("vmax must be positive");
  if (!(tail_tol > 0.0)) throw std::invalid_argument("tail_tol must be positive");
  if (!(maxwellian(vmax) < tail_tol)) {
    std::ostringstream msg;
    msg << "Maxwellian tail too heavy: M(" << vmax << ") = " << maxwellian(vmax)
        << " >= tail_tol " << tail_tol << "; need vmax > " << required_vmax(tail_tol);
    throw std::invalid_argument(msg.str());
  }

  PhaseGrid g;
  g.nx = nx;
  g.nv = nv;
  g.vmax = vmax;
  g.dx = 1.0 / static_cast<double>(nx);
  g.dv = 2.0 * vmax / static_cast<double>(nv);
  g.x_nodes.resize(nx);
  for (std::size_t i = 0; i < nx; ++i) g.x_nodes[i] = (static_cast<double>(i) + 0.5) * g.dx;

  // Build the negative half and mirror it so v_j + v_{nv-1-j} == 0 bitwise.
  g.v_nodes.resize(nv);
  for (std::size_t j = 0; j < nv / 2; ++j) {
    const double v = -vmax + (static_cast<double>(j) + 0.5) * g.dv;
    g.v_nodes[j] = v;
    g.v_nodes[nv - 1 - j] = -v;
  }
  g.w_v.assign(nv, g.dv);
  g.maxw.resize(nv);
  g.sqrt_maxw.resize(nv);
  for (std::size_t j = 0; j < nv; ++j) {
    g.maxw[j] = maxwellian(g.v_nodes[j]);
    g.sqrt_maxw[j] = std::sqrt(g.maxw[j]);
  }
  return g;
}

void require_finite(const GridFunction& g, const char* what) {
  for (double x : g.values())
    if (!std::isfinite(x)) throw std::invalid_argument(std::string(what) + ": non-finite value");
}

double left_face_derivative(double f0, double f1, double f2, double h) {
  return (-2.0 * f0 + 3.0 * f1 - f2) / h;
}

double right_face_derivative(double fn3, double fn2, double fn1, double h) {
  return (2.0 * fn1 - 3.0 * fn2 + fn3) / h;
}

std::vector<double> derivative_1d(std::span<const double> f, double h) {
  const std::size_t n = f.size();
  std::vector<double> d(n, 0.0);
  if (n < 3) return d;
  d[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
  for (std::size_t i = 1; i + 1 < n; ++i) d[i] = (f[i + 1] - f[i - 1]) / (2.0 * h);
  d[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * h);
  return d;
}

GridFunction d_dx(const GridFunction& g, const PhaseGrid& grid) {
  GridFunction out(grid);
  for (std::size_t j = 0; j < grid.nv; ++j) {
    auto d = derivative_1d(g.row(j), grid.dx);
    auto r = out.row(j);
    for (std::size_t i = 0; i < grid.nx; ++i) r[i] = d[i];
  }
  return out;
}

GridFunction d_dv(const GridFunction& g, const PhaseGrid& grid) {
  GridFunction out(grid);
  const std::size_t nv = grid.nv;
  const double h = grid.dv;
  for (std::size_t i = 0; i < grid.nx; ++i) {
    out(i, 0) = (-3.0 * g(i, 0) + 4.0 * g(i, 1) - g(i, 2)) / (2.0 * h);
    for (std::size_t j = 1; j + 1 < nv; ++j) out(i, j) = (g(i, j + 1) - g(i, j - 1)) / (2.0 * h);
    out(i, nv - 1) = (3.0 * g(i, nv - 1) - 4.0 * g(i, nv - 2) + g(i, nv - 3)) / (2.0 * h);
  }
  return out;
}

double inner(const GridFunction& a, const GridFunction& b, const PhaseGrid& grid) {
  if (!a.matches(grid) || !b.matches(grid)) throw std::invalid_argument("inner: shape mismatch");
  double s = 0.0;
  auto va = a.values();
  auto vb = b.values();
  for (std::size_t k = 0; k < va.size(); ++k) s += va[k] * vb[k];
  return s * grid.dx * grid.dv;
}

WeightedNormReport norms(const GridFunction& g, const PhaseGrid& grid) {
  if (!g.matches(grid)) throw std::invalid_argument("norms: shape mismatch");
  require_finite(g, "norms");
  const double w = grid.dx * grid.dv;
  const GridFunction gx = d_dx(g, grid);
  const GridFunction gv = d_dv(g, grid);
  const GridFunction gxv = d_dv(gx, grid);

  WeightedNormReport r;
  r.l2 = sum_sq(g) * w;
  r.omega = r.l2 + (sum_sq(gv) + sum_sq_v_weighted(g, grid)) * w;
  const double gx2 = sum_sq(gx) * w;
  r.v_norm = r.l2 + gx2;
  r.v_omega = r.omega + gx2 + (sum_sq(gxv) + sum_sq_v_weighted(gx, grid)) * w;
  return r;
}

}  // namespace vfp
