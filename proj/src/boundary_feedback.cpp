#include "vfp/boundary_feedback.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace vfp {

namespace {

std::string fmt(double x) {
  std::ostringstream s;
  s.precision(6);
  s << x;
  return s.str();
}

bool near(double a, double b) { return std::abs(a - b) <= kConstraintTol; }

struct FaceDerivatives {
  std::vector<double> d0, d1;
};

FaceDerivatives face_derivatives(const DistributionState& state, const PhaseGrid& grid) {
  const std::size_t n = grid.nx;
  FaceDerivatives fd;
  fd.d0.resize(grid.nv);
  fd.d1.resize(grid.nv);
  for (std::size_t j = 0; j < grid.nv; ++j) {
    auto r = state.h.row(j);
    fd.d0[j] = left_face_derivative(r[0], r[1], r[2], grid.dx);
    fd.d1[j] = right_face_derivative(r[n - 3], r[n - 2], r[n - 1], grid.dx);
  }
  return fd;
}

}  // namespace

FeedbackMatrix FeedbackMatrix::constant(double k00, double k01, double k10, double k11) {
  FeedbackMatrix K;
  K.k00 = K.k00_0 = k00;
  K.k01 = K.k01_0 = k01;
  K.k10 = K.k10_0 = k10;
  K.k11 = K.k11_0 = k11;
  return K;
}

bool FeedbackMatrix::is_periodic() const {
  return k00 == 0.0 && k11 == 0.0 && k01 == 1.0 && k10 == 1.0;
}

void FeedbackMatrix::require_finite() const {
  for (double k : {k00, k01, k10, k11, k00_0, k01_0, k10_0, k11_0})
    if (!std::isfinite(k)) throw std::invalid_argument("feedback matrix entries must be finite");
}

BoundaryTraces incoming_values(const DistributionState& state, const PhaseGrid& grid,
                               const FeedbackMatrix& K) {
  const std::size_t n = grid.nx;
  BoundaryTraces tr;
  tr.at0.resize(grid.nv);
  tr.at1.resize(grid.nv);
  for (std::size_t j = 0; j < grid.nv; ++j) {
    tr.at0[j] = state.h(0, j);
    tr.at1[j] = state.h(n - 1, j);
  }
  for (std::size_t j = 0; j < grid.nv; ++j) {
    const std::size_t m = grid.mirror(j);
    if (grid.v_nodes[j] > 0.0)
      tr.at0[j] = K.k00 * state.h(0, m) + K.k10 * state.h(n - 1, j);
    else
      tr.at1[j] = K.k01 * state.h(0, j) + K.k11 * state.h(n - 1, m);
  }
  return tr;
}

BoundaryTraces derivative_traces(const DistributionState& state, const PhaseGrid& grid,
                                 const FeedbackMatrix& K) {
  const FaceDerivatives fd = face_derivatives(state, grid);
  BoundaryTraces tr{fd.d0, fd.d1};
  for (std::size_t j = 0; j < grid.nv; ++j) {
    const std::size_t m = grid.mirror(j);
    if (grid.v_nodes[j] > 0.0)
      tr.at0[j] = -K.k00 * fd.d0[m] + K.k10 * fd.d1[j];
    else
      tr.at1[j] = K.k01 * fd.d0[j] - K.k11 * fd.d1[m];
  }
  return tr;
}

BoundaryFunctionals boundary_functionals(const DistributionState& state, const PhaseGrid& grid) {
  if (!state.h.matches(grid)) throw std::invalid_argument("boundary_functionals: shape mismatch");
  const std::size_t n = grid.nx;
  const FaceDerivatives fd = face_derivatives(state, grid);
  BoundaryFunctionals bf;
  for (std::size_t j = 0; j < grid.nv; ++j) {
    const double v = grid.v_nodes[j];
    const double w = 0.5 * std::abs(v) * grid.w_v[j];
    if (v < 0.0) {
      const double h0 = state.h(0, j);
      bf.A += w * h0 * h0;
      bf.A_x += w * fd.d0[j] * fd.d0[j];
    } else {
      const double h1 = state.h(n - 1, j);
      bf.B += w * h1 * h1;
      bf.B_x += w * fd.d1[j] * fd.d1[j];
    }
  }
  return bf;
}

std::optional<double> compute_cb(double A, double B, double A_x, double B_x) {
  if (A < 0.0 || B < 0.0 || A_x < 0.0 || B_x < 0.0)
    throw std::invalid_argument("compute_cb: boundary functionals must be nonnegative");
  const double sa = std::sqrt(A), sb = std::sqrt(B);
  const double sax = std::sqrt(A_x), sbx = std::sqrt(B_x);
  const double den = 2.0 * (sa + sb) * (sax + sbx);
  if (den == 0.0) return std::nullopt;
  return ((sa - sb) * (sa - sb) + (sax - sbx) * (sax - sbx)) / den;
}

double evaluate_I(const FeedbackMatrix& K, double A, double B, double A_x, double B_x, double a) {
  const double k00 = K.k00, k11 = K.k11;
  const double sa = std::sqrt(A), sb = std::sqrt(B);
  const double sax = std::sqrt(A_x), sbx = std::sqrt(B_x);
  const double line1 = -2.0 * k00 * (1.0 - k00) * (A + A_x) - 2.0 * k11 * (1.0 - k11) * (B + B_x);
  const double line2 = 2.0 * (std::abs(k11 * (1.0 - k00)) + std::abs(k00 * (1.0 - k11))) *
                       (std::sqrt(A * B) + std::sqrt(A_x * B_x));
  const double line3 = 4.0 * a * (std::abs(1.0 - k11) * sb + std::abs(1.0 - k00) * sa) *
                       (std::abs(k00) * sax + std::abs(k11) * sbx);
  return line1 + line2 + line3;
}

double flux_balance(const DistributionState& state, const PhaseGrid& grid, const FeedbackMatrix& K) {
  const BoundaryTraces tr = incoming_values(state, grid, K);
  double u0 = 0.0, u1 = 0.0;
  for (std::size_t j = 0; j < grid.nv; ++j) {
    const double w = grid.v_nodes[j] * grid.sqrt_maxw[j] * grid.w_v[j];
    u0 += w * tr.at0[j];
    u1 += w * tr.at1[j];
  }
  return std::abs(u1 - u0);
}

double derivative_bc_residual(const DistributionState& state, const PhaseGrid& grid,
                              const FeedbackMatrix& K) {
  const FaceDerivatives fd = face_derivatives(state, grid);
  const BoundaryTraces rel = derivative_traces(state, grid, K);
  double res = 0.0;
  for (std::size_t j = 0; j < grid.nv; ++j) {
    if (grid.v_nodes[j] > 0.0)
      res = std::max(res, std::abs(fd.d0[j] - rel.at0[j]));
    else
      res = std::max(res, std::abs(fd.d1[j] - rel.at1[j]));
  }
  return res;
}

const char* to_string(Theorem t) {
  switch (t) {
    case Theorem::small_field: return "small-field";
    case Theorem::periodic_large_field: return "periodic-large-field";
    case Theorem::epsilon_zero: return "epsilon-zero";
    case Theorem::none: return "none";
  }
  return "none";
}

QuadraticResiduals limit_quadratics(const FeedbackMatrix& K) {
  QuadraticResiduals q;
  const double prod = K.k10_0 * K.k01_0;
  q.first = (1.0 - K.k00_0) * (1.0 - K.k11_0) - prod;
  q.second = (1.0 + K.k00_0) * (1.0 + K.k11_0) - prod;
  q.pass = std::abs(q.first) <= kConstraintTol && std::abs(q.second) <= kConstraintTol;
  return q;
}

ConstraintReport check_constraints(const FeedbackMatrix& K,
                                   const std::optional<TrajectoryWorst>& trajectory_worst,
                                   double a, double epsilon) {
  ConstraintReport r;
  r.const1 = limit_quadratics(K);
  r.constraint3 = r.const1;
  r.row0_residual = K.k00 + K.k01 - 1.0;
  r.row1_residual = K.k10 + K.k11 - 1.0;
  r.const2_pass = std::abs(r.row0_residual) <= kConstraintTol &&
                  std::abs(r.row1_residual) <= kConstraintTol;

  bool finite = true;
  for (double k : {K.k00, K.k01, K.k10, K.k11, K.k00_0, K.k01_0, K.k10_0, K.k11_0})
    finite = finite && std::isfinite(k);
  if (!finite) {
    r.reasons.push_back("feedback matrix has non-finite entries");
    return r;
  }

  r.profile_periodic = K.is_periodic();
  std::vector<std::string> profile_issues;
  if (K.k00 < 0.0 || K.k00 > 1.0) profile_issues.push_back("k00 = " + fmt(K.k00) + " not in [0,1]");
  if (!near(K.k11, K.k00)) profile_issues.push_back("k11 = " + fmt(K.k11) + " differs from k00 = " + fmt(K.k00));
  if (!near(K.k01, 1.0 - K.k00)) profile_issues.push_back("k01 = " + fmt(K.k01) + " differs from 1 - k00 = " + fmt(1.0 - K.k00));
  if (!near(K.k10, 1.0 - K.k00)) profile_issues.push_back("k10 = " + fmt(K.k10) + " differs from 1 - k00 = " + fmt(1.0 - K.k00));
  r.profile_small_field = profile_issues.empty();

  if (trajectory_worst) {
    r.const3_value = trajectory_worst->max_I;
    r.const3_pass = trajectory_worst->max_I <= kConstraintTol;
    r.a_below_cb = a <= trajectory_worst->min_cb;
  }

  if (epsilon == 0.0) {
    if (r.constraint3.pass) {
      r.theorem_selected = Theorem::epsilon_zero;
    } else {
      r.reasons.push_back("limit matrix violates the no-boundary-layer quadratics: residuals " +
                          fmt(r.constraint3.first) + ", " + fmt(r.constraint3.second));
    }
    return r;
  }

  if (r.profile_periodic) {
    r.theorem_selected = Theorem::periodic_large_field;
    return r;
  }

  if (!r.profile_small_field) {
    for (auto& s : profile_issues) r.reasons.push_back(s + " (small-field profile)");
    r.reasons.push_back("matrix is not the periodic profile (k00 = k11 = 0, k01 = k10 = 1)");
    if (!r.const2_pass)
      r.reasons.push_back("row sums differ from 1: residuals " + fmt(r.row0_residual) + ", " +
                          fmt(r.row1_residual));
    return r;
  }

  if (!r.const1.pass)
    r.warnings.push_back("limit matrix violates the no-boundary-layer quadratics (residuals " +
                         fmt(r.const1.first) + ", " + fmt(r.const1.second) +
                         "): a boundary layer is expected as epsilon -> 0");
  if (!trajectory_worst) {
    r.warnings.push_back("a <= C_B(t) cannot be certified a priori; verify along the trajectory");
    r.theorem_selected = Theorem::small_field;
    return r;
  }
  if (!*r.a_below_cb) {
    r.reasons.push_back("a = " + fmt(a) + " exceeds min_t C_B(t) = " + fmt(trajectory_worst->min_cb));
    return r;
  }
  if (!r.const3_pass) {
    r.reasons.push_back("boundary form I(t) reaches " + fmt(trajectory_worst->max_I) + " > 0");
    return r;
  }
  r.theorem_selected = Theorem::small_field;
  return r;
}

}  // namespace vfp
