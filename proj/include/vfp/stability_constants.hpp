#pragma once

#include <optional>
#include <string>
#include <vector>

namespace vfp {

enum class FieldFamily { zero, sine };

// E(x) = c sin(2 pi x) for the sine family, time independent.
struct FieldSpec {
  FieldFamily family = FieldFamily::zero;
  double amplitude = 0.0;

  double at(double x) const;
  // 2 * max(|E|_inf, |E_x|_inf, |E_xxx|_inf), analytic.
  double c_e() const;
  double sup_norm() const;
};

struct FieldValidation {
  double C_E = 0.0;
  double bound = 0.0;  // lambda C_s / 8
  bool pass = false;
  std::vector<std::string> reasons;
};

FieldValidation validate_field(const FieldSpec& spec, double lambda, double C_s);

enum class AdmissibleMode { small_field, periodic };

struct AdmissibleInterval {
  double lower = 0.0;
  double upper = 0.0;
  bool empty = false;
  bool cb_limited = false;  // upper bound set by C_B_min
  std::string reason;

  bool contains(double a) const { return !empty && a > lower && a < upper; }
};

// Throws std::invalid_argument when 3 C_s - 2 C_E <= 0.
AdmissibleInterval admissible_a(double lambda, double C_s, double C_E, AdmissibleMode mode,
                                std::optional<double> C_B_min = std::nullopt);

// Branch values of the rate, no admissibility check. kinetic is +inf when epsilon = 0.
struct XiBranches {
  double kinetic = 0.0;
  double macro = 0.0;
  double value() const { return kinetic < macro ? kinetic : macro; }
};
XiBranches xi_branches(double lambda, double C_E, double C_s, double a, double epsilon);

// Rejects a outside the periodic-mode interval, naming the violated bound.
double compute_xi(double lambda, double C_E, double C_s, double a, double epsilon);

double decay_envelope(double t, double h0_V2, double xi);

struct StabilityConstants {
  double lambda = 0.25;
  double C_s = 1.0;
  double C_E = 0.0;
  double a = 0.05;
  double epsilon = 1.0;
  double xi = 0.0;
  AdmissibleInterval a_interval;
};

}  // namespace vfp
