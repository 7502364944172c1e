#include "vfp/macro_solver.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "vfp/errors.hpp"

namespace vfp {

namespace {

struct Ghosts {
  double left_scale;   // ghost left  = left_scale * sigma[n-1]
  double right_scale;  // ghost right = right_scale * sigma[0]
};

Ghosts ghosts(const MacroConfig& cfg, MacroClosure closure) {
  if (closure == MacroClosure::periodic) return {1.0, 1.0};
  return {cfg.K0.k10_0, 1.0 / cfg.K0.k10_0};
}

void check_shape(const MacroConfig& cfg) {
  if (cfg.nx < 4) throw std::invalid_argument("macro nx must be at least 4");
}

}  // namespace

MacroClosure macro_closure(const MacroConfig& cfg) {
  const QuadraticResiduals q = limit_quadratics(cfg.K0);
  if (!q.pass) {
    std::ostringstream s;
    s << "limit matrix violates the no-boundary-layer quadratics: (1-k00)(1-k11) - k10 k01 = "
      << q.first << ", (1+k00)(1+k11) - k10 k01 = " << q.second;
    throw ValidationError({s.str()});
  }
  const FeedbackMatrix& K = cfg.K0;
  if (K.k00_0 == 0.0 && K.k11_0 == 0.0 && K.k01_0 == 1.0 && K.k10_0 == 1.0)
    return MacroClosure::periodic;
  if (K.k10_0 == 0.0) throw ValidationError({"limit closure needs k10 != 0"});
  return MacroClosure::twisted;
}

double macro_dt_bound(const MacroConfig& cfg) {
  check_shape(cfg);
  const double dx = 1.0 / static_cast<double>(cfg.nx);
  return 0.45 * dx * dx / (1.0 + 0.5 * dx * cfg.field.sup_norm());
}

std::vector<double> macro_initial(const MacroConfig& cfg) {
  check_shape(cfg);
  const double dx = 1.0 / static_cast<double>(cfg.nx);
  std::vector<double> s(cfg.nx, 0.0);
  for (std::size_t i = 0; i < cfg.nx; ++i) {
    const double x = (static_cast<double>(i) + 0.5) * dx;
    switch (cfg.initial) {
      case MacroInitial::cosine:
        s[i] = cfg.amplitude * std::cos(2.0 * std::numbers::pi * cfg.mode * x + cfg.phase);
        break;
      case MacroInitial::constant: s[i] = cfg.amplitude; break;
      case MacroInitial::zero: s[i] = 0.0; break;
    }
  }
  return s;
}

std::vector<double> solve_cyclic_tridiagonal(std::span<const double> a, std::span<const double> b,
                                             std::span<const double> c, double alpha, double beta,
                                             std::span<const double> rhs) {
  const std::size_t n = b.size();
  if (n < 3 || a.size() != n || c.size() != n || rhs.size() != n)
    throw std::invalid_argument("cyclic tridiagonal: need n >= 3 and matching sizes");

  auto thomas = [&](const std::vector<double>& diag, const std::vector<double>& r) {
    std::vector<double> cp(n), x(n);
    double den = diag[0];
    cp[0] = c[0] / den;
    x[0] = r[0] / den;
    for (std::size_t i = 1; i < n; ++i) {
      den = diag[i] - a[i] * cp[i - 1];
      cp[i] = c[i] / den;
      x[i] = (r[i] - a[i] * x[i - 1]) / den;
    }
    for (std::size_t i = n - 1; i-- > 0;) x[i] -= cp[i] * x[i + 1];
    return x;
  };

  // A = T + u v^T with u = (gamma, 0, .., beta), v = (1, 0, .., alpha/gamma).
  const double gamma = -b[0];
  std::vector<double> diag(b.begin(), b.end());
  diag[0] -= gamma;
  diag[n - 1] -= alpha * beta / gamma;
  std::vector<double> r(rhs.begin(), rhs.end());
  std::vector<double> u(n, 0.0);
  u[0] = gamma;
  u[n - 1] = beta;
  std::vector<double> y = thomas(diag, r);
  std::vector<double> z = thomas(diag, u);
  const double vy = y[0] + alpha * y[n - 1] / gamma;
  const double vz = z[0] + alpha * z[n - 1] / gamma;
  const double f = vy / (1.0 + vz);
  for (std::size_t i = 0; i < n; ++i) y[i] -= f * z[i];
  return y;
}

std::vector<double> step_macro(std::span<const double> sigma, const MacroConfig& cfg, double dt) {
  check_shape(cfg);
  const std::size_t n = cfg.nx;
  if (sigma.size() != n) throw std::invalid_argument("step_macro: sigma has the wrong length");
  if (!(dt > 0.0)) throw std::invalid_argument("step_macro: dt must be positive");
  const double dx = 1.0 / static_cast<double>(n);
  const MacroClosure closure = macro_closure(cfg);
  const Ghosts gh = ghosts(cfg, closure);

  // Face field values E_{i-1/2}, i = 0..n.
  std::vector<double> ef(n + 1);
  for (std::size_t i = 0; i <= n; ++i) ef[i] = cfg.field.at(static_cast<double>(i) * dx);

  if (!cfg.implicit) {
    const double bound = macro_dt_bound(cfg);
    if (dt > bound * (1.0 + 1e-12)) {
      std::ostringstream s;
      s << "macro dt = " << dt << " exceeds the explicit bound " << bound;
      throw std::invalid_argument(s.str());
    }
    std::vector<double> ext(n + 2);
    ext[0] = gh.left_scale * sigma[n - 1];
    std::copy(sigma.begin(), sigma.end(), ext.begin() + 1);
    ext[n + 1] = gh.right_scale * sigma[0];
    std::vector<double> flux(n + 1);
    for (std::size_t f = 0; f <= n; ++f)
      flux[f] = (ext[f + 1] - ext[f]) / dx + ef[f] * 0.5 * (ext[f] + ext[f + 1]);
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = sigma[i] + dt * (flux[i + 1] - flux[i]) / dx;
    return out;
  }

  std::vector<double> a(n), b(n), c(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double lo = (1.0 / dx - 0.5 * ef[i]) / dx;
    const double up = (1.0 / dx + 0.5 * ef[i + 1]) / dx;
    const double di = (-2.0 / dx + 0.5 * ef[i + 1] - 0.5 * ef[i]) / dx;
    a[i] = -dt * lo;
    b[i] = 1.0 - dt * di;
    c[i] = -dt * up;
  }
  const double alpha = a[0] * gh.left_scale;
  const double beta = c[n - 1] * gh.right_scale;
  return solve_cyclic_tridiagonal(a, b, c, alpha, beta, sigma);
}

MacroRun run_macro(const MacroConfig& cfg, std::span<const double> times) {
  check_shape(cfg);
  if (!(cfg.t_end >= 0.0)) throw std::invalid_argument("macro t_end must be nonnegative");
  MacroRun run;
  run.closure = macro_closure(cfg);
  const double dx = 1.0 / static_cast<double>(cfg.nx);
  run.x.resize(cfg.nx);
  for (std::size_t i = 0; i < cfg.nx; ++i) run.x[i] = (static_cast<double>(i) + 0.5) * dx;

  const double bound = macro_dt_bound(cfg);
  double dt = cfg.dt > 0.0 ? cfg.dt : (cfg.implicit ? 0.1 * dx : bound);
  if (!cfg.implicit && dt > bound * (1.0 + 1e-12)) {
    std::ostringstream s;
    s << "macro dt = " << dt << " exceeds the explicit bound " << bound;
    throw std::invalid_argument(s.str());
  }

  std::vector<double> sigma = macro_initial(cfg);
  double t = 0.0;

  if (!times.empty()) {
    std::vector<double> ts(times.begin(), times.end());
    if (!std::is_sorted(ts.begin(), ts.end()) || ts.front() < 0.0)
      throw std::invalid_argument("macro output times must be sorted and nonnegative");
    for (double target : ts) {
      while (t < target) {
        const double remaining = target - t;
        const std::size_t k = static_cast<std::size_t>(std::ceil(remaining / dt - 1e-9));
        const double h = remaining / static_cast<double>(std::max<std::size_t>(k, 1));
        sigma = step_macro(sigma, cfg, h);
        ++run.steps;
        t = k <= 1 ? target : t + h;
      }
      run.snapshots.push_back({target, sigma});
    }
    run.dt = dt;
    return run;
  }

  std::size_t steps = 0;
  if (cfg.t_end > 0.0) {
    steps = static_cast<std::size_t>(std::ceil(cfg.t_end / dt - 1e-9));
    steps = std::max<std::size_t>(steps, 1);
    dt = cfg.t_end / static_cast<double>(steps);
  }
  run.dt = dt;
  run.steps = steps;
  run.snapshots.push_back({0.0, sigma});
  for (std::size_t k = 1; k <= steps; ++k) {
    sigma = step_macro(sigma, cfg, dt);
    t = static_cast<double>(k) * dt;
    if ((cfg.output_every > 0 && k % cfg.output_every == 0) || k == steps)
      run.snapshots.push_back({k == steps ? cfg.t_end : t, sigma});
  }
  return run;
}

}  // namespace vfp
