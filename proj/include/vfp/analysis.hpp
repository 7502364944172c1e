#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vfp/kinetic_solver.hpp"
#include "vfp/macro_solver.hpp"

namespace vfp {

struct FitWindow {
  double t_lo = 0.0;
  double t_hi = 0.0;
};

// Default: drop the first 10% of t_end.
FitWindow default_window(std::span<const EnergyRecord> records);

struct DecayFit {
  double rate = 0.0;  // -slope / 2 of ln v_norm
  double intercept = 0.0;
  double r2 = 0.0;
  std::size_t used = 0;
  bool truncated = false;
  std::string notice;
};

// Least squares of ln(v_norm) against t inside the window. Records at or below
// the floor end the window (notice set). Throws if fewer than 5 points remain.
DecayFit fit_decay_rate(std::span<const EnergyRecord> records, FitWindow window,
                        double floor = 1e-300);

struct EnvelopeCheck {
  double max_violation = 0.0;
  std::optional<double> first_violation_t;
};

EnvelopeCheck check_envelope(std::span<const EnergyRecord> records, double xi, double h0_V2);

struct LayerIndicator {
  double value = 0.0;
  bool saturated = false;  // interior error below 1e-14
  double boundary_error = 0.0;
  double interior_error = 0.0;
};

LayerIndicator boundary_layer_indicator(std::span<const double> sigma_kin,
                                        std::span<const double> sigma_macro,
                                        std::size_t margin_cells = 3);

// sqrt(sum (a-b)^2 dx), dx = 1/n.
double l2_difference(std::span<const double> a, std::span<const double> b);

struct ApStudyConfig {
  SimConfig kinetic;               // shared grid, field, initial data, t_end
  FeedbackMatrix macro_K0 = FeedbackMatrix::periodic();
  std::vector<double> epsilons{0.5, 0.1, 0.02};
  std::size_t margin_cells = 3;
  bool parallel = true;
};

struct ApRow {
  double epsilon = 0.0;
  double l2_diff = 0.0;
  LayerIndicator layer;
  std::vector<double> sigma_kin;
};

struct ApStudy {
  std::vector<ApRow> rows;  // epsilon descending
  std::vector<double> sigma_macro;
  std::vector<double> x;
};

ApStudy ap_study(const ApStudyConfig& cfg);

// Macro configuration matching a kinetic configuration (grid, field, initial density).
MacroConfig macro_from_kinetic(const SimConfig& k, const FeedbackMatrix& K0);

}  // namespace vfp
