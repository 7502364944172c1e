#pragma once

#include <optional>
#include <string>
#include <vector>

#include "vfp/kinetic_operators.hpp"
#include "vfp/phase_grid.hpp"

namespace vfp {

inline constexpr double kConstraintTol = 1e-12;

// Feedback matrix K(eps) and its limit K0. Incoming traces:
//   h(0, v) = k00 h(0, -v) + k10 h(1, v)   for v > 0
//   h(1, v) = k01 h(0, v)  + k11 h(1, -v)  for v < 0
struct FeedbackMatrix {
  double k00 = 0.0, k01 = 1.0, k10 = 1.0, k11 = 0.0;
  double k00_0 = 0.0, k01_0 = 1.0, k10_0 = 1.0, k11_0 = 0.0;

  static FeedbackMatrix constant(double k00, double k01, double k10, double k11);
  static FeedbackMatrix periodic() { return constant(0.0, 1.0, 1.0, 0.0); }
  static FeedbackMatrix reflective() { return constant(1.0, 0.0, 0.0, 1.0); }
  // k00 = k11 = k, k01 = k10 = 1 - k.
  static FeedbackMatrix symmetric(double k) { return constant(k, 1.0 - k, 1.0 - k, k); }

  bool is_periodic() const;
  void require_finite() const;
};

// Full velocity traces at x = 0 and x = 1: outgoing entries are the boundary
// cell values, incoming entries come from K.
struct BoundaryTraces {
  std::vector<double> at0;
  std::vector<double> at1;
};

BoundaryTraces incoming_values(const DistributionState& state, const PhaseGrid& grid,
                               const FeedbackMatrix& K);

// Same relations with the k00 and k11 terms sign-flipped, applied to one-sided
// face derivatives of the cell profile.
BoundaryTraces derivative_traces(const DistributionState& state, const PhaseGrid& grid,
                                 const FeedbackMatrix& K);

struct BoundaryFunctionals {
  double A = 0.0, B = 0.0, A_x = 0.0, B_x = 0.0;
  std::optional<double> C_B;
  double I = 0.0;
  double flux_residual = 0.0;
};

// A, B, A_x, B_x from outgoing traces only (C_B, I, flux_residual left unset).
BoundaryFunctionals boundary_functionals(const DistributionState& state, const PhaseGrid& grid);

std::optional<double> compute_cb(double A, double B, double A_x, double B_x);

double evaluate_I(const FeedbackMatrix& K, double A, double B, double A_x, double B_x, double a);

// |u(t,1) - u(t,0)| on the full traces.
double flux_balance(const DistributionState& state, const PhaseGrid& grid, const FeedbackMatrix& K);

// Max-norm residual of the derivative feedback relations on the incoming half of each face.
double derivative_bc_residual(const DistributionState& state, const PhaseGrid& grid,
                              const FeedbackMatrix& K);

enum class Theorem { small_field, periodic_large_field, epsilon_zero, none };
const char* to_string(Theorem t);

struct TrajectoryWorst {
  double min_cb = 0.0;  // over records where C_B is defined
  double max_I = 0.0;
};

struct QuadraticResiduals {
  double first = 0.0;   // (1 - k00)(1 - k11) - k10 k01
  double second = 0.0;  // (1 + k00)(1 + k11) - k10 k01
  bool pass = false;
};

struct ConstraintReport {
  QuadraticResiduals const1;       // on K0
  double row0_residual = 0.0;      // k00 + k01 - 1
  double row1_residual = 0.0;      // k10 + k11 - 1
  bool const2_pass = false;
  std::optional<double> const3_value;  // worst I along a trajectory, if supplied
  bool const3_pass = true;
  std::optional<bool> a_below_cb;      // a <= min C_B, if a trajectory was supplied
  QuadraticResiduals constraint3;  // same quadratics on K0 (limit boundary layer test)
  bool profile_small_field = false;  // k00 = k11 in [0,1], k01 = k10 = 1 - k00
  bool profile_periodic = false;
  Theorem theorem_selected = Theorem::none;
  std::vector<std::string> reasons;
  std::vector<std::string> warnings;
};

QuadraticResiduals limit_quadratics(const FeedbackMatrix& K);

// Never throws. epsilon = 0 selects the limit-only profile when constraint3 holds.
ConstraintReport check_constraints(const FeedbackMatrix& K,
                                   const std::optional<TrajectoryWorst>& trajectory_worst,
                                   double a, double epsilon = 1.0);

}  // namespace vfp
