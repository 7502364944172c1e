#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace vfp {

inline constexpr double kDefaultTailTol = 1e-12;

// Standard Gaussian equilibrium.
double maxwellian(double v);

// Smallest |v| with M(v) < tail_tol.
double required_vmax(double tail_tol);

// Cell-centered grid on [0,1] x [-vmax, vmax]. Indices are 0-based here:
// x_i = (i + 1/2) dx, v_j = -vmax + (j + 1/2) dv.
struct PhaseGrid {
  std::size_t nx = 0;
  std::size_t nv = 0;
  double vmax = 0.0;
  double dx = 0.0;
  double dv = 0.0;
  std::vector<double> x_nodes;
  std::vector<double> v_nodes;
  std::vector<double> w_v;
  std::vector<double> maxw;
  std::vector<double> sqrt_maxw;

  std::size_t mirror(std::size_t j) const { return nv - 1 - j; }
  std::size_t size() const { return nx * nv; }
};

PhaseGrid build_grid(std::size_t nx, std::size_t nv, double vmax,
                     double tail_tol = kDefaultTailTol);

// Values on the phase grid, stored velocity-major: (i, j) lives at j*nx + i,
// so each velocity row is contiguous in x.
class GridFunction {
 public:
  GridFunction() = default;
  GridFunction(std::size_t nx, std::size_t nv, double fill = 0.0)
      : nx_(nx), nv_(nv), data_(nx * nv, fill) {}
  explicit GridFunction(const PhaseGrid& g, double fill = 0.0)
      : GridFunction(g.nx, g.nv, fill) {}

  double& operator()(std::size_t i, std::size_t j) { return data_[j * nx_ + i]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[j * nx_ + i]; }

  std::span<double> row(std::size_t j) { return {data_.data() + j * nx_, nx_}; }
  std::span<const double> row(std::size_t j) const { return {data_.data() + j * nx_, nx_}; }

  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }

  std::size_t nx() const { return nx_; }
  std::size_t nv() const { return nv_; }
  bool matches(const PhaseGrid& g) const { return nx_ == g.nx && nv_ == g.nv; }

 private:
  std::size_t nx_ = 0;
  std::size_t nv_ = 0;
  std::vector<double> data_;
};

template <class F>
GridFunction sample(const PhaseGrid& g, F&& f) {
  GridFunction out(g);
  for (std::size_t j = 0; j < g.nv; ++j)
    for (std::size_t i = 0; i < g.nx; ++i) out(i, j) = f(g.x_nodes[i], g.v_nodes[j]);
  return out;
}

struct WeightedNormReport {
  double l2 = 0.0;
  double omega = 0.0;
  double v_norm = 0.0;
  double v_omega = 0.0;
};

// Squared norms by midpoint quadrature. Throws on non-finite input.
WeightedNormReport norms(const GridFunction& g, const PhaseGrid& grid);

// <a, b> over the phase grid.
double inner(const GridFunction& a, const GridFunction& b, const PhaseGrid& grid);

// Second-order derivative of cell values: central inside, one-sided 3-point at the ends.
std::vector<double> derivative_1d(std::span<const double> f, double h);
GridFunction d_dx(const GridFunction& g, const PhaseGrid& grid);
GridFunction d_dv(const GridFunction& g, const PhaseGrid& grid);

// Derivative at the end faces x=0 / x=1 from the three nearest cell centers.
double left_face_derivative(double f0, double f1, double f2, double h);
double right_face_derivative(double fn3, double fn2, double fn1, double h);

void require_finite(const GridFunction& g, const char* what);

}  // namespace vfp
