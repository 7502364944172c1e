#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "vfp/boundary_feedback.hpp"
#include "vfp/kernels.hpp"
#include "vfp/kinetic_operators.hpp"
#include "vfp/phase_grid.hpp"
#include "vfp/stability_constants.hpp"

namespace vfp {

enum class InitialFamily { cosine_density, odd_flux, constant_density, custom_table };

struct InitialCondition {
  InitialFamily family = InitialFamily::cosine_density;
  double amplitude = 1.0;
  double phase = 0.0;
  int mode = 1;
  GridFunction table;  // f0 on the grid, custom_table only
};

enum class TransportScheme {
  muscl,    // van Leer limited second-order upwind
  upwind1,  // first-order upwind
};

struct SimConfig {
  std::size_t nx = 64;
  std::size_t nv = 64;
  double vmax = 8.0;
  double tail_tol = kDefaultTailTol;
  double epsilon = 1.0;
  FeedbackMatrix K = FeedbackMatrix::periodic();
  FieldSpec field;
  double lambda = kCoercivityLambda;
  double C_s = 1.0;
  double a = 0.05;
  double t_end = 1.0;
  double dt = 0.0;              // 0 selects the largest stable step
  std::size_t output_every = 0;  // 0 selects about 200 records
  InitialCondition initial;
  TransportScheme transport = TransportScheme::muscl;
  bool exploratory = false;
};

struct EnergyRecord {
  double t = 0.0;
  double l2 = 0.0;
  double v_norm = 0.0;
  double E_h = 0.0;
  double cross_term = 0.0;
  double mass = 0.0;
  double A = 0.0, B = 0.0, A_x = 0.0, B_x = 0.0;
  std::optional<double> C_B;
  double I = 0.0;
  double flux_residual = 0.0;
  double envelope = 0.0;
  // Boundary part of the energy inequality, as written and divided by epsilon.
  double boundary_rate = 0.0;
  double boundary_rate_scaled = 0.0;
  // int_0^t (u(s,1) - u(s,0)) ds from the scheme's face fluxes.
  double flux_integral = 0.0;
  bool equivalence_ok = true;
  bool cross_bound_ok = true;
};

struct RunValidation {
  bool ok = false;
  FieldValidation field;
  ConstraintReport constraints;
  std::optional<AdmissibleInterval> interval;
  double xi = 0.0;
  std::vector<std::string> reasons;
  std::vector<std::string> warnings;
};

RunValidation validate_config(const SimConfig& cfg);

class KineticSolver {
 public:
  // kt = nullptr picks kernels::active().
  explicit KineticSolver(SimConfig cfg, const kernels::KernelTable* kt = nullptr);

  const SimConfig& config() const { return cfg_; }
  const PhaseGrid& grid() const { return grid_; }
  const CollisionOperator& collision() const { return op_; }
  double dt() const { return dt_; }
  double dt_bound() const { return dt_bound_; }
  std::size_t total_steps() const { return steps_; }
  std::size_t output_every() const { return output_every_; }
  double xi() const { return xi_; }
  double flux_integral() const { return flux_integral_; }

  DistributionState prepare_initial() const;

  // One IMEX step in place: transport and field explicit, collision implicit.
  void advance(DistributionState& s);
  DistributionState step(const DistributionState& s);

  EnergyRecord compute_energy(const DistributionState& s, double h0_V2) const;

  // Steps to t_end; validation failures throw ValidationError unless exploratory.
  std::vector<EnergyRecord> run(DistributionState* final_state = nullptr);

  // Implicit collision solve (I - dt/eps^2 L) y = rhs in place, exposed for tests.
  void solve_collision(GridFunction& rhs) const;

 private:
  void factorize();

  SimConfig cfg_;
  PhaseGrid grid_;
  CollisionOperator op_;
  const kernels::KernelTable* kt_;
  double dt_ = 0.0;
  double dt_bound_ = 0.0;
  std::size_t steps_ = 0;
  std::size_t output_every_ = 1;
  double xi_ = 0.0;
  double flux_integral_ = 0.0;

  std::vector<double> tri_a_, tri_den_, tri_cp_;
  std::vector<double> field_coef_, field_up_, field_dn_;
  bool has_field_ = false;
  std::vector<double> ext_, faces_, zeros_;
  GridFunction next_;
};

std::vector<EnergyRecord> run(const SimConfig& cfg);

}  // namespace vfp
