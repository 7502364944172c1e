#include "vfp/kinetic_operators.hpp"

#include <cmath>
#include <stdexcept>

namespace vfp {

CollisionOperator::CollisionOperator(const PhaseGrid& grid, CollisionStencil stencil)
    : nx_(grid.nx),
      nv_(grid.nv),
      dx_(grid.dx),
      dv_(grid.dv),
      sqrt_m_(grid.sqrt_maxw),
      stencil_(stencil),
      lower_(grid.nv, 0.0),
      diag_(grid.nv, 0.0),
      upper_(grid.nv, 0.0) {
  const std::size_t nv = nv_;
  const double dv2 = dv_ * dv_;

  if (stencil == CollisionStencil::strong) {
    for (std::size_t j = 0; j < nv; ++j) {
      const double v = grid.v_nodes[j];
      diag_[j] = -2.0 / dv2 + (0.5 - 0.25 * v * v);
      if (j > 0) lower_[j] = 1.0 / dv2;
      if (j + 1 < nv) upper_[j] = 1.0 / dv2;
    }
    return;
  }

  // W_{j+1/2} = dv * sum_{k<=j} (-v_k M_k): the exact discrete flux of M that
  // makes (v sqrt M) an eigenvector. Accumulate the left half, mirror the rest.
  face_w_.assign(nv - 1, 0.0);
  double acc = 0.0;
  for (std::size_t j = 0; j < nv / 2; ++j) {
    acc += -grid.v_nodes[j] * grid.maxw[j] * dv_;
    face_w_[j] = acc;
  }
  for (std::size_t j = nv / 2; j + 1 < nv; ++j) face_w_[j] = face_w_[nv - 2 - j];

  for (std::size_t j = 0; j < nv; ++j) {
    const double wp = j + 1 < nv ? face_w_[j] : 0.0;
    const double wm = j > 0 ? face_w_[j - 1] : 0.0;
    diag_[j] = -(wp + wm) / (grid.maxw[j] * dv2);
    if (j + 1 < nv) upper_[j] = wp / (sqrt_m_[j] * sqrt_m_[j + 1] * dv2);
    if (j > 0) lower_[j] = wm / (sqrt_m_[j] * sqrt_m_[j - 1] * dv2);
  }
}

GridFunction CollisionOperator::apply(const GridFunction& h) const {
  if (h.nx() != nx_ || h.nv() != nv_) throw std::invalid_argument("collision: shape mismatch");
  GridFunction out(nx_, nv_);
  for (std::size_t j = 0; j < nv_; ++j) {
    auto o = out.row(j);
    auto c = h.row(j);
    for (std::size_t i = 0; i < nx_; ++i) o[i] = diag_[j] * c[i];
    if (j > 0) {
      auto m = h.row(j - 1);
      for (std::size_t i = 0; i < nx_; ++i) o[i] += lower_[j] * m[i];
    }
    if (j + 1 < nv_) {
      auto p = h.row(j + 1);
      for (std::size_t i = 0; i < nx_; ++i) o[i] += upper_[j] * p[i];
    }
  }
  return out;
}

double CollisionOperator::dissipation(const GridFunction& h) const {
  if (h.nx() != nx_ || h.nv() != nv_) throw std::invalid_argument("collision: shape mismatch");
  if (stencil_ == CollisionStencil::strong) {
    const GridFunction lh = apply(h);
    double s = 0.0;
    auto a = lh.values();
    auto b = h.values();
    for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
    return -s * dx_ * dv_;
  }
  // sum over faces of W (g_{j+1} - g_j)^2 / dv with g = h / sqrt(M); the
  // sqrt(W) factor is folded in first so the tails never over- or underflow.
  double s = 0.0;
  for (std::size_t j = 0; j + 1 < nv_; ++j) {
    const double sw = std::sqrt(face_w_[j]);
    const double cl = sw / sqrt_m_[j];
    const double cr = sw / sqrt_m_[j + 1];
    auto lo = h.row(j);
    auto hi = h.row(j + 1);
    for (std::size_t i = 0; i < nx_; ++i) {
      const double d = cr * hi[i] - cl * lo[i];
      s += d * d;
    }
  }
  return s / dv_ * dx_;
}

MacroState moments(const DistributionState& state, const PhaseGrid& grid) {
  if (!state.h.matches(grid)) throw std::invalid_argument("moments: shape mismatch");
  MacroState m;
  m.t = state.t;
  m.sigma.assign(grid.nx, 0.0);
  m.u.assign(grid.nx, 0.0);
  for (std::size_t j = 0; j < grid.nv; ++j) {
    const double ws = grid.sqrt_maxw[j] * grid.w_v[j];
    const double wu = grid.v_nodes[j] * ws;
    auto r = state.h.row(j);
    for (std::size_t i = 0; i < grid.nx; ++i) {
      m.sigma[i] += ws * r[i];
      m.u[i] += wu * r[i];
    }
  }
  return m;
}

GridFunction project_pi(const DistributionState& state, const PhaseGrid& grid) {
  const MacroState m = moments(state, grid);
  GridFunction out(grid);
  for (std::size_t j = 0; j < grid.nv; ++j) {
    auto r = out.row(j);
    for (std::size_t i = 0; i < grid.nx; ++i) r[i] = m.sigma[i] * grid.sqrt_maxw[j];
  }
  return out;
}

GridFunction collision_L(const DistributionState& state, const PhaseGrid& grid) {
  return CollisionOperator(grid).apply(state.h);
}

CoercivityReport coercivity_check(const DistributionState& state, const PhaseGrid& grid,
                                  double lambda) {
  const CollisionOperator op(grid);
  const GridFunction pi = project_pi(state, grid);
  GridFunction g = state.h;
  auto gv = g.values();
  auto pv = pi.values();
  for (std::size_t k = 0; k < gv.size(); ++k) gv[k] -= pv[k];

  const WeightedNormReport n = norms(g, grid);
  CoercivityReport r;
  r.lhs = op.dissipation(state.h);
  r.rhs1 = lambda * n.omega;
  // omega = l2 + |d_v g|^2 + |v g|^2, so the second form is omega - 2 l2.
  r.rhs2 = lambda * (n.omega - 2.0 * n.l2);
  return r;
}

}  // namespace vfp
