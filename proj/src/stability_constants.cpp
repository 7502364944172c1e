#include "vfp/stability_constants.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace vfp {

namespace {

std::string fmt(double x) {
  std::ostringstream s;
  s.precision(8);
  s << x;
  return s.str();
}

}  // namespace

double FieldSpec::at(double x) const {
  switch (family) {
    case FieldFamily::zero: return 0.0;
    case FieldFamily::sine: return amplitude * std::sin(2.0 * std::numbers::pi * x);
  }
  throw std::invalid_argument("unsupported field family");
}

double FieldSpec::sup_norm() const {
  return family == FieldFamily::zero ? 0.0 : std::abs(amplitude);
}

double FieldSpec::c_e() const {
  if (family == FieldFamily::zero) return 0.0;
  if (family != FieldFamily::sine) throw std::invalid_argument("unsupported field family");
  const double pi = std::numbers::pi;
  const double c = std::abs(amplitude);
  const double m = std::max({c, 2.0 * pi * c, 8.0 * pi * pi * pi * c});
  return 2.0 * m;
}

FieldValidation validate_field(const FieldSpec& spec, double lambda, double C_s) {
  if (spec.family != FieldFamily::zero && spec.family != FieldFamily::sine)
    throw std::invalid_argument("unsupported field family");
  FieldValidation r;
  r.C_E = spec.c_e();
  r.bound = lambda * C_s / 8.0;
  // sin(2 pi x) vanishes at both ends and its second derivative is periodic, so the
  // boundary identities hold analytically for both families.
  r.pass = r.C_E <= r.bound;
  if (!r.pass)
    r.reasons.push_back("field bound violated: C_E = " + fmt(r.C_E) +
                        " > lambda C_s / 8 = " + fmt(r.bound) +
                        " (|E|, |E_x|, |E_xxx| <= C_E/2 <= lambda C_s/16)");
  return r;
}

AdmissibleInterval admissible_a(double lambda, double C_s, double C_E, AdmissibleMode mode,
                                std::optional<double> C_B_min) {
  const double den = 3.0 * C_s - 2.0 * C_E;
  if (!(den > 0.0))
    throw std::invalid_argument("admissible_a: requires 3 C_s - 2 C_E > 0 (got " + fmt(den) + ")");
  AdmissibleInterval r;
  r.lower = 4.0 * C_E / den;
  const double field_upper = (lambda - C_E) / 4.0;
  r.upper = field_upper;
  if (mode == AdmissibleMode::small_field && C_B_min && *C_B_min < field_upper) {
    r.upper = *C_B_min;
    r.cb_limited = true;
  }
  if (r.lower >= r.upper) {
    r.empty = true;
    if (r.cb_limited)
      r.reason = "empty interval: C_B_min = " + fmt(*C_B_min) + " <= lower bound " + fmt(r.lower) +
                 "; requires C_E < 3C_s/2 - 3C_s/(2 + C_B) = " +
                 fmt(1.5 * C_s - 3.0 * C_s / (2.0 + *C_B_min));
    else
      r.reason = "empty interval: lower bound " + fmt(r.lower) + " >= (lambda - C_E)/4 = " +
                 fmt(field_upper);
  }
  return r;
}

XiBranches xi_branches(double lambda, double C_E, double C_s, double a, double epsilon) {
  XiBranches b;
  b.macro = (a * (3.0 * C_s - 2.0 * C_E) - 4.0 * C_E) / 8.0;
  b.kinetic = epsilon == 0.0 ? std::numeric_limits<double>::infinity()
                             : (lambda - C_E - 4.0 * a) / (epsilon * epsilon);
  return b;
}

double compute_xi(double lambda, double C_E, double C_s, double a, double epsilon) {
  if (!(epsilon >= 0.0)) throw std::invalid_argument("compute_xi: epsilon must be >= 0");
  const AdmissibleInterval iv = admissible_a(lambda, C_s, C_E, AdmissibleMode::periodic);
  if (!(a > iv.lower))
    throw std::invalid_argument("compute_xi: a = " + fmt(a) + " violates the lower bound 4C_E/(3C_s-2C_E) = " +
                                fmt(iv.lower));
  if (!(a < iv.upper))
    throw std::invalid_argument("compute_xi: a = " + fmt(a) + " violates the upper bound (lambda-C_E)/4 = " +
                                fmt(iv.upper));
  return xi_branches(lambda, C_E, C_s, a, epsilon).value();
}

double decay_envelope(double t, double h0_V2, double xi) {
  return 1.25 * h0_V2 * std::exp(-2.0 * xi * t);
}

}  // namespace vfp
