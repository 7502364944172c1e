#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "vfp/boundary_feedback.hpp"
#include "vfp/stability_constants.hpp"

namespace vfp {

enum class MacroInitial { cosine, constant, zero };

enum class MacroClosure {
  periodic,
  // sigma(0) = k10 sigma(1), sigma_x(0) = k10 sigma_x(1) through scaled ghosts; experimental.
  twisted,
};

struct MacroConfig {
  std::size_t nx = 64;
  FieldSpec field;
  FeedbackMatrix K0 = FeedbackMatrix::periodic();  // limit entries (k.._0) are used
  double t_end = 1.0;
  double dt = 0.0;  // 0 selects the explicit bound (or dx^2 in implicit mode)
  bool implicit = false;
  MacroInitial initial = MacroInitial::cosine;
  double amplitude = 1.0;
  double phase = 0.0;
  int mode = 1;
  std::size_t output_every = 0;  // 0: only the initial and final snapshots
};

struct MacroSnapshot {
  double t = 0.0;
  std::vector<double> sigma;
};

struct MacroRun {
  std::vector<double> x;
  std::vector<MacroSnapshot> snapshots;
  MacroClosure closure = MacroClosure::periodic;
  double dt = 0.0;
  std::size_t steps = 0;
};

// Throws ValidationError when K0 violates the no-boundary-layer quadratics.
MacroClosure macro_closure(const MacroConfig& cfg);

double macro_dt_bound(const MacroConfig& cfg);

std::vector<double> macro_initial(const MacroConfig& cfg);

// One explicit (or backward Euler when cfg.implicit) finite-volume step.
std::vector<double> step_macro(std::span<const double> sigma, const MacroConfig& cfg, double dt);

// Snapshots every output_every steps plus the end time. When `times` is
// non-empty, snapshots are taken exactly at those times instead (steps are
// shortened to land on them).
MacroRun run_macro(const MacroConfig& cfg, std::span<const double> times = {});

// Solves a cyclic tridiagonal system with corner entries alpha (row 0, col n-1)
// and beta (row n-1, col 0). a[0] and c[n-1] are ignored.
std::vector<double> solve_cyclic_tridiagonal(std::span<const double> a, std::span<const double> b,
                                             std::span<const double> c, double alpha, double beta,
                                             std::span<const double> rhs);

}  // namespace vfp
