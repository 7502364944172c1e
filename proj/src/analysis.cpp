#include "vfp/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "vfp/errors.hpp"

namespace vfp {

FitWindow default_window(std::span<const EnergyRecord> records) {
  if (records.empty()) return {};
  const double t_end = records.back().t;
  return {0.1 * t_end, t_end};
}

DecayFit fit_decay_rate(std::span<const EnergyRecord> records, FitWindow window, double floor) {
  DecayFit fit;
  std::vector<double> ts, ys;
  for (const EnergyRecord& r : records) {
    if (r.t < window.t_lo || r.t > window.t_hi) continue;
    if (!(r.v_norm > floor)) {
      fit.truncated = true;
      std::ostringstream s;
      s << "window truncated at t = " << r.t << ": v_norm = " << r.v_norm << " <= " << floor;
      fit.notice = s.str();
      break;
    }
    ts.push_back(r.t);
    ys.push_back(std::log(r.v_norm));
  }
  if (ts.size() < 5) {
    std::ostringstream s;
    s << "fit_decay_rate: only " << ts.size() << " usable records in [" << window.t_lo << ", "
      << window.t_hi << "]";
    if (fit.truncated) s << " (" << fit.notice << ")";
    throw std::invalid_argument(s.str());
  }
  const double n = static_cast<double>(ts.size());
  double mt = 0.0, my = 0.0;
  for (std::size_t k = 0; k < ts.size(); ++k) {
    mt += ts[k];
    my += ys[k];
  }
  mt /= n;
  my /= n;
  double stt = 0.0, sty = 0.0, syy = 0.0;
  for (std::size_t k = 0; k < ts.size(); ++k) {
    stt += (ts[k] - mt) * (ts[k] - mt);
    sty += (ts[k] - mt) * (ys[k] - my);
    syy += (ys[k] - my) * (ys[k] - my);
  }
  if (stt == 0.0) throw std::invalid_argument("fit_decay_rate: records share a single time");
  const double slope = sty / stt;
  fit.intercept = my - slope * mt;
  fit.rate = -0.5 * slope;
  double ssr = 0.0;
  for (std::size_t k = 0; k < ts.size(); ++k) {
    const double e = ys[k] - (fit.intercept + slope * ts[k]);
    ssr += e * e;
  }
  fit.r2 = syy > 0.0 ? 1.0 - ssr / syy : 1.0;
  fit.used = ts.size();
  return fit;
}

EnvelopeCheck check_envelope(std::span<const EnergyRecord> records, double xi, double h0_V2) {
  EnvelopeCheck c;
  c.max_violation = -std::numeric_limits<double>::infinity();
  for (const EnergyRecord& r : records) {
    const double d = r.v_norm - decay_envelope(r.t, h0_V2, xi);
    c.max_violation = std::max(c.max_violation, d);
    if (d > 0.0 && !c.first_violation_t) c.first_violation_t = r.t;
  }
  if (records.empty()) c.max_violation = 0.0;
  return c;
}

double l2_difference(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.empty()) throw std::invalid_argument("l2_difference: size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s / static_cast<double>(a.size()));
}

LayerIndicator boundary_layer_indicator(std::span<const double> sigma_kin,
                                        std::span<const double> sigma_macro,
                                        std::size_t margin_cells) {
  const std::size_t n = sigma_kin.size();
  if (n != sigma_macro.size()) throw std::invalid_argument("layer indicator: size mismatch");
  if (margin_cells == 0 || 3 * margin_cells > n)
    throw std::invalid_argument("layer indicator: margin does not fit the grid");
  LayerIndicator li;
  for (std::size_t i = 0; i < margin_cells; ++i) {
    li.boundary_error = std::max(li.boundary_error, std::abs(sigma_kin[i] - sigma_macro[i]));
    const std::size_t k = n - 1 - i;
    li.boundary_error = std::max(li.boundary_error, std::abs(sigma_kin[k] - sigma_macro[k]));
  }
  for (std::size_t i = n / 3; i < n - n / 3; ++i)
    li.interior_error = std::max(li.interior_error, std::abs(sigma_kin[i] - sigma_macro[i]));
  if (li.interior_error < 1e-14) {
    li.saturated = true;
    li.value = 0.0;
  } else {
    li.value = li.boundary_error / li.interior_error;
  }
  return li;
}

MacroConfig macro_from_kinetic(const SimConfig& k, const FeedbackMatrix& K0) {
  MacroConfig m;
  m.nx = k.nx;
  m.field = k.field;
  m.K0 = K0;
  m.t_end = k.t_end;
  m.amplitude = k.initial.amplitude;
  m.phase = k.initial.phase;
  m.mode = k.initial.mode;
  switch (k.initial.family) {
    case InitialFamily::cosine_density: m.initial = MacroInitial::cosine; break;
    // Both have zero density once the mean is removed.
    case InitialFamily::odd_flux:
    case InitialFamily::constant_density: m.initial = MacroInitial::zero; break;
    case InitialFamily::custom_table:
      throw ConfigError("ap study needs a parametric initial family (custom tables have no macro counterpart)");
  }
  return m;
}

ApStudy ap_study(const ApStudyConfig& cfg) {
  if (cfg.epsilons.empty()) throw ConfigError("ap study needs at least one epsilon");
  for (double e : cfg.epsilons)
    if (!(e > 0.0)) throw ConfigError("ap study epsilons must be positive");

  ApStudy out;
  const MacroConfig mc = macro_from_kinetic(cfg.kinetic, cfg.macro_K0);
  const double t_end = cfg.kinetic.t_end;
  const MacroRun mr = run_macro(mc, std::span<const double>(&t_end, 1));
  out.sigma_macro = mr.snapshots.back().sigma;
  out.x = mr.x;

  std::vector<double> eps = cfg.epsilons;
  std::sort(eps.begin(), eps.end(), std::greater<>());

  auto one = [&cfg, &out](double e) {
    SimConfig sc = cfg.kinetic;
    sc.epsilon = e;
    sc.exploratory = true;
    sc.output_every = std::numeric_limits<std::size_t>::max();
    KineticSolver solver(sc);
    DistributionState fin;
    solver.run(&fin);
    ApRow row;
    row.epsilon = e;
    row.sigma_kin = moments(fin, solver.grid()).sigma;
    row.l2_diff = l2_difference(row.sigma_kin, out.sigma_macro);
    row.layer = boundary_layer_indicator(row.sigma_kin, out.sigma_macro, cfg.margin_cells);
    return row;
  };

  if (cfg.parallel) {
    std::vector<std::future<ApRow>> jobs;
    for (double e : eps) jobs.push_back(std::async(std::launch::async, one, e));
    for (auto& j : jobs) out.rows.push_back(j.get());
  } else {
    for (double e : eps) out.rows.push_back(one(e));
  }
  return out;
}

}  // namespace vfp
