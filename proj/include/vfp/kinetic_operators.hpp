#pragma once

#include <vector>

#include "vfp/phase_grid.hpp"

namespace vfp {

inline constexpr double kCoercivityLambda = 0.25;

struct DistributionState {
  GridFunction h;  // f / sqrt(M)
  double t = 0.0;
};

struct MacroState {
  std::vector<double> sigma;
  std::vector<double> u;
  double t = 0.0;
};

enum class CollisionStencil {
  // Flux form with face weights built from discrete first moments of M.
  // sqrt(M) is an exact null vector and v*sqrt(M) an exact eigenvector (-1).
  flux,
  // Plain three-point second difference plus the (1/2 - v^2/4) potential,
  // zero ghost values. Kept for comparison.
  strong,
};

// Tridiagonal velocity operator L h = d_vv h + (1/2 - v^2/4) h, applied at every x.
class CollisionOperator {
 public:
  explicit CollisionOperator(const PhaseGrid& grid, CollisionStencil stencil = CollisionStencil::flux);

  // lower[j] multiplies h_{j-1}, upper[j] multiplies h_{j+1}; lower[0] = upper[nv-1] = 0.
  const std::vector<double>& lower() const { return lower_; }
  const std::vector<double>& diag() const { return diag_; }
  const std::vector<double>& upper() const { return upper_; }
  CollisionStencil stencil() const { return stencil_; }

  GridFunction apply(const GridFunction& h) const;

  // -<L h, h> in summation-by-parts form (nonnegative by construction for the flux stencil).
  double dissipation(const GridFunction& h) const;

 private:
  std::size_t nx_, nv_;
  double dx_, dv_;
  std::vector<double> sqrt_m_;
  CollisionStencil stencil_;
  std::vector<double> face_w_;  // W_{j+1/2}, j = 0..nv-2
  std::vector<double> lower_, diag_, upper_;
};

// Pi h = sigma * sqrt(M).
GridFunction project_pi(const DistributionState& state, const PhaseGrid& grid);
MacroState moments(const DistributionState& state, const PhaseGrid& grid);
GridFunction collision_L(const DistributionState& state, const PhaseGrid& grid);

struct CoercivityReport {
  double lhs = 0.0;   // -<L h, h>
  double rhs1 = 0.0;  // lambda * ||(1-Pi) h||_omega^2
  double rhs2 = 0.0;  // lambda * (||d_v g||^2 + ||v g||^2 - ||g||^2), g = (1-Pi) h
};

CoercivityReport coercivity_check(const DistributionState& state, const PhaseGrid& grid,
                                  double lambda = kCoercivityLambda);

}  // namespace vfp
