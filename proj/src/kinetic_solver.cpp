#include "vfp/kinetic_solver.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "vfp/errors.hpp"

namespace vfp {

namespace {

constexpr double kCflMuscl = 0.45;
constexpr double kCflUpwind = 0.9;
constexpr double kFieldCfl = 0.9;
constexpr double kEquivTol = 1e-10;

std::string fmt(double x) {
  std::ostringstream s;
  s.precision(10);
  s << x;
  return s.str();
}

std::size_t step_count(double t_end, double dt) {
  if (t_end <= 0.0) return 0;
  const double q = t_end / dt;
  auto n = static_cast<std::size_t>(std::ceil(q - 1e-9 * q));
  return std::max<std::size_t>(n, 1);
}

}  // namespace

RunValidation validate_config(const SimConfig& cfg) {
  RunValidation r;
  r.field = validate_field(cfg.field, cfg.lambda, cfg.C_s);
  for (const auto& s : r.field.reasons) r.reasons.push_back(s);
  if (!(cfg.epsilon > 0.0 && cfg.epsilon <= 1.0))
    r.reasons.push_back("epsilon = " + fmt(cfg.epsilon) + " outside (0, 1]");
  if (!(cfg.C_s > 0.0 && cfg.C_s <= 1.0))
    r.reasons.push_back("C_s = " + fmt(cfg.C_s) + " outside (0, 1]");
  if (!(cfg.a > 0.0)) r.reasons.push_back("a must be positive");

  r.constraints = check_constraints(cfg.K, std::nullopt, cfg.a, cfg.epsilon);
  for (const auto& s : r.constraints.reasons) r.reasons.push_back(s);
  for (const auto& s : r.constraints.warnings) r.warnings.push_back(s);

  const AdmissibleMode mode = r.constraints.theorem_selected == Theorem::small_field
                                  ? AdmissibleMode::small_field
                                  : AdmissibleMode::periodic;
  try {
    r.interval = admissible_a(cfg.lambda, cfg.C_s, r.field.C_E, mode);
    if (r.interval->empty)
      r.reasons.push_back(r.interval->reason);
    else if (!r.interval->contains(cfg.a))
      r.reasons.push_back("a = " + fmt(cfg.a) + " outside the admissible interval (" +
                          fmt(r.interval->lower) + ", " + fmt(r.interval->upper) + ")");
  } catch (const std::invalid_argument& e) {
    r.reasons.push_back(e.what());
  }
  r.xi = xi_branches(cfg.lambda, r.field.C_E, cfg.C_s, cfg.a, cfg.epsilon).value();
  if (!(r.xi > 0.0)) r.reasons.push_back("decay rate xi = " + fmt(r.xi) + " is not positive");
  r.ok = r.reasons.empty();
  return r;
}

KineticSolver::KineticSolver(SimConfig cfg, const kernels::KernelTable* kt)
    : cfg_(std::move(cfg)),
      grid_(build_grid(cfg_.nx, cfg_.nv, cfg_.vmax, cfg_.tail_tol)),
      op_(grid_),
      kt_(kt != nullptr ? kt : &kernels::active()) {
  if (!(cfg_.epsilon > 0.0) || !std::isfinite(cfg_.epsilon))
    throw std::invalid_argument("kinetic solver requires epsilon > 0 (epsilon = 0 is macro-only)");
  if (!(cfg_.t_end >= 0.0) || !std::isfinite(cfg_.t_end))
    throw std::invalid_argument("t_end must be a finite nonnegative number");
  if (cfg_.dt < 0.0) throw std::invalid_argument("dt must be positive (or 0 for auto)");
  cfg_.K.require_finite();

  const std::size_t nx = grid_.nx, nv = grid_.nv;
  const double eps = cfg_.epsilon;
  const double cfl = cfg_.transport == TransportScheme::muscl ? kCflMuscl : kCflUpwind;
  double vabs = 0.0;
  for (double v : grid_.v_nodes) vabs = std::max(vabs, std::abs(v));
  dt_bound_ = cfl * eps * grid_.dx / vabs;

  field_up_.assign(nv, 0.0);
  field_dn_.assign(nv, 0.0);
  for (std::size_t j = 0; j < nv; ++j) {
    const double v2 = grid_.v_nodes[j] * grid_.v_nodes[j];
    if (j + 1 < nv) {
      const double w = grid_.v_nodes[j + 1];
      field_up_[j] = std::exp(-0.25 * (w * w - v2));
    }
    if (j > 0) {
      const double w = grid_.v_nodes[j - 1];
      field_dn_[j] = std::exp(-0.25 * (w * w - v2));
    }
  }
  const double esup = cfg_.field.sup_norm();
  has_field_ = esup > 0.0;
  if (has_field_) {
    double rmax = 0.0;
    for (std::size_t j = 0; j < nv; ++j) rmax = std::max(rmax, field_up_[j] + field_dn_[j]);
    dt_bound_ = std::min(dt_bound_, kFieldCfl * eps * 2.0 * grid_.dv / (esup * rmax));
  }

  if (cfg_.dt > 0.0) {
    if (cfg_.dt > dt_bound_ * (1.0 + 1e-12))
      throw std::invalid_argument("dt = " + fmt(cfg_.dt) + " exceeds the stability bound " +
                                  fmt(dt_bound_));
    steps_ = step_count(cfg_.t_end, cfg_.dt);
    dt_ = steps_ > 0 ? cfg_.t_end / static_cast<double>(steps_) : cfg_.dt;
  } else {
    steps_ = step_count(cfg_.t_end, dt_bound_);
    dt_ = steps_ > 0 ? cfg_.t_end / static_cast<double>(steps_) : dt_bound_;
  }
  output_every_ = cfg_.output_every > 0 ? cfg_.output_every : std::max<std::size_t>(1, steps_ / 200);

  const double C_E = cfg_.field.c_e();
  xi_ = xi_branches(cfg_.lambda, C_E, cfg_.C_s, cfg_.a, eps).value();

  if (has_field_) {
    field_coef_.resize(nx);
    for (std::size_t i = 0; i < nx; ++i)
      field_coef_[i] = dt_ * cfg_.field.at(grid_.x_nodes[i]) / (eps * 2.0 * grid_.dv);
  }
  ext_.assign(nx + 2, 0.0);
  faces_.assign(nv * (nx + 1), 0.0);
  zeros_.assign(nx, 0.0);
  next_ = GridFunction(grid_);
  factorize();
}

void KineticSolver::factorize() {
  const std::size_t nv = grid_.nv;
  const double tau = dt_ / (cfg_.epsilon * cfg_.epsilon);
  tri_a_.assign(nv, 0.0);
  tri_den_.assign(nv, 0.0);
  tri_cp_.assign(nv, 0.0);
  const auto& lo = op_.lower();
  const auto& di = op_.diag();
  const auto& up = op_.upper();
  double cp_prev = 0.0;
  for (std::size_t j = 0; j < nv; ++j) {
    const double a = -tau * lo[j];
    const double b = 1.0 - tau * di[j];
    const double c = -tau * up[j];
    const double den = j == 0 ? b : b - a * cp_prev;
    tri_a_[j] = a;
    tri_den_[j] = den;
    tri_cp_[j] = c / den;
    cp_prev = tri_cp_[j];
  }
}

void KineticSolver::solve_collision(GridFunction& rhs) const {
  kt_->thomas_batched(tri_a_.data(), tri_den_.data(), tri_cp_.data(), grid_.nv,
                      rhs.values().data(), grid_.nx);
}

DistributionState KineticSolver::prepare_initial() const {
  const PhaseGrid& g = grid_;
  const InitialCondition& ic = cfg_.initial;
  const double two_pi = 2.0 * std::numbers::pi;
  DistributionState s{GridFunction(g), 0.0};

  switch (ic.family) {
    case InitialFamily::cosine_density:
      for (std::size_t j = 0; j < g.nv; ++j)
        for (std::size_t i = 0; i < g.nx; ++i)
          s.h(i, j) = ic.amplitude * std::cos(two_pi * ic.mode * g.x_nodes[i] + ic.phase) * g.sqrt_maxw[j];
      break;
    case InitialFamily::odd_flux:
      for (std::size_t j = 0; j < g.nv; ++j)
        for (std::size_t i = 0; i < g.nx; ++i)
          s.h(i, j) = ic.amplitude * std::sin(two_pi * ic.mode * g.x_nodes[i] + ic.phase) *
                      g.v_nodes[j] * g.sqrt_maxw[j];
      break;
    case InitialFamily::constant_density:
      for (std::size_t j = 0; j < g.nv; ++j)
        for (std::size_t i = 0; i < g.nx; ++i) s.h(i, j) = ic.amplitude * g.sqrt_maxw[j];
      break;
    case InitialFamily::custom_table:
      if (!ic.table.matches(g)) throw std::invalid_argument("custom initial table has the wrong shape");
      require_finite(ic.table, "custom initial table");
      for (std::size_t j = 0; j < g.nv; ++j)
        for (std::size_t i = 0; i < g.nx; ++i) s.h(i, j) = ic.table(i, j) / g.sqrt_maxw[j];
      break;
  }

  // Zero total mass of f: remove c M with c = mass / sum_j M_j dv.
  double mass = 0.0, mtot = 0.0;
  for (std::size_t j = 0; j < g.nv; ++j) {
    double r = 0.0;
    for (double x : s.h.row(j)) r += x;
    mass += r * g.sqrt_maxw[j] * g.dv * g.dx;
    mtot += g.maxw[j] * g.dv;
  }
  const double c = mass / mtot;
  if (c != 0.0)
    for (std::size_t j = 0; j < g.nv; ++j)
      for (double& x : s.h.row(j)) x -= c * g.sqrt_maxw[j];
  require_finite(s.h, "initial data");
  return s;
}

void KineticSolver::advance(DistributionState& s) {
  const PhaseGrid& g = grid_;
  const std::size_t nx = g.nx, nv = g.nv, nf = nx + 1;
  const FeedbackMatrix& K = cfg_.K;
  GridFunction& h = s.h;
  if (!h.matches(g)) throw std::invalid_argument("advance: state does not match the grid");

  // Outgoing and interior face values. Ghost cells apply K to cell values for
  // every v; they only feed the limiter next to the boundary.
  for (std::size_t j = 0; j < nv; ++j) {
    const std::size_t m = g.mirror(j);
    auto row = h.row(j);
    double* f = faces_.data() + j * nf;
    const bool pos = g.v_nodes[j] > 0.0;
    if (cfg_.transport == TransportScheme::muscl) {
      ext_[0] = K.k00 * h(0, m) + K.k10 * h(nx - 1, j);
      std::copy(row.begin(), row.end(), ext_.begin() + 1);
      ext_[nx + 1] = K.k01 * h(0, j) + K.k11 * h(nx - 1, m);
      if (pos)
        kt_->limited_faces(ext_.data() + 1, nx, 1.0, f + 1);
      else
        kt_->limited_faces(ext_.data() + 1, nx, -1.0, f);
    } else {
      std::copy(row.begin(), row.end(), pos ? f + 1 : f);
    }
  }
  // Incoming boundary faces from the outgoing face values.
  double dflux = 0.0;
  for (std::size_t j = 0; j < nv; ++j) {
    const std::size_t m = g.mirror(j);
    double* f = faces_.data() + j * nf;
    const double* fm = faces_.data() + m * nf;
    if (g.v_nodes[j] > 0.0)
      f[0] = K.k00 * fm[0] + K.k10 * f[nx];
    else
      f[nx] = K.k01 * f[0] + K.k11 * fm[nx];
  }
  for (std::size_t j = 0; j < nv; ++j) {
    const double* f = faces_.data() + j * nf;
    dflux += g.v_nodes[j] * g.sqrt_maxw[j] * g.dv * (f[nx] - f[0]);
  }

  for (std::size_t j = 0; j < nv; ++j) {
    const double nu = dt_ * g.v_nodes[j] / (cfg_.epsilon * g.dx);
    kt_->flux_update(h.row(j).data(), faces_.data() + j * nf, nx, nu, next_.row(j).data());
  }

  if (has_field_) {
    for (std::size_t j = 0; j < nv; ++j) {
      const double* up = j + 1 < nv ? h.row(j + 1).data() : zeros_.data();
      const double* dn = j > 0 ? h.row(j - 1).data() : zeros_.data();
      kt_->field_update(up, field_up_[j], dn, field_dn_[j], field_coef_.data(), nx,
                        next_.row(j).data());
    }
  }

  solve_collision(next_);

  double check = 0.0;
  for (double x : next_.values()) check += x * x;
  if (!std::isfinite(check))
    throw NumericalError("non-finite values after step at t = " + fmt(s.t + dt_));

  std::swap(h, next_);
  s.t += dt_;
  flux_integral_ += dt_ * dflux;
}

DistributionState KineticSolver::step(const DistributionState& s) {
  DistributionState out = s;
  advance(out);
  return out;
}

EnergyRecord KineticSolver::compute_energy(const DistributionState& s, double h0_V2) const {
  const PhaseGrid& g = grid_;
  EnergyRecord r;
  r.t = s.t;
  const WeightedNormReport n = norms(s.h, g);
  r.l2 = n.l2;
  r.v_norm = n.v_norm;

  const MacroState mom = moments(s, g);
  const std::vector<double> dsig = derivative_1d(mom.sigma, g.dx);
  double cross = 0.0, u2 = 0.0, ds2 = 0.0;
  for (std::size_t i = 0; i < g.nx; ++i) {
    cross += mom.u[i] * dsig[i];
    u2 += mom.u[i] * mom.u[i];
    ds2 += dsig[i] * dsig[i];
  }
  r.cross_term = cross * g.dx;
  const double ae = cfg_.a * cfg_.epsilon;
  r.E_h = 0.5 * r.v_norm + ae * r.cross_term;

  double mass = 0.0;
  for (std::size_t i = 0; i < g.nx; ++i) mass += mom.sigma[i];
  r.mass = mass * g.dx;

  const BoundaryFunctionals bf = boundary_functionals(s, g);
  r.A = bf.A;
  r.B = bf.B;
  r.A_x = bf.A_x;
  r.B_x = bf.B_x;
  r.C_B = compute_cb(bf.A, bf.B, bf.A_x, bf.B_x);
  r.I = evaluate_I(cfg_.K, bf.A, bf.B, bf.A_x, bf.B_x, cfg_.a);
  r.flux_residual = flux_balance(s, g, cfg_.K);
  r.envelope = decay_envelope(s.t, h0_V2, xi_);

  const double scale = std::max(r.v_norm, 1e-300);
  r.equivalence_ok = r.E_h >= 0.5 * (1.0 - ae) * r.v_norm - kEquivTol * scale &&
                     r.E_h <= 0.5 * (1.0 + ae) * r.v_norm + kEquivTol * scale;
  r.cross_bound_ok = std::abs(r.cross_term) <= 0.5 * (u2 + ds2) * g.dx + kEquivTol * scale &&
                     0.5 * (u2 + ds2) * g.dx <= 0.5 * r.v_norm + kEquivTol * scale;

  const BoundaryTraces tr = incoming_values(s, g, cfg_.K);
  const BoundaryTraces dtr = derivative_traces(s, g, cfg_.K);
  double t1 = 0.0, t2 = 0.0, u0 = 0.0, u1 = 0.0, ux0 = 0.0, ux1 = 0.0;
  for (std::size_t j = 0; j < g.nv; ++j) {
    const double v = g.v_nodes[j];
    const double w = g.dv;
    t1 += 0.5 * v * (tr.at1[j] * tr.at1[j] - tr.at0[j] * tr.at0[j]) * w;
    t2 += 0.5 * v * (dtr.at1[j] * dtr.at1[j] - dtr.at0[j] * dtr.at0[j]) * w;
    const double wu = v * g.sqrt_maxw[j] * w;
    u0 += wu * tr.at0[j];
    u1 += wu * tr.at1[j];
    ux0 += wu * dtr.at0[j];
    ux1 += wu * dtr.at1[j];
  }
  r.boundary_rate = -t1 - t2 - cfg_.a * (u1 * ux1 - u0 * ux0);
  r.boundary_rate_scaled = r.boundary_rate / cfg_.epsilon;
  r.flux_integral = flux_integral_;
  return r;
}

std::vector<EnergyRecord> KineticSolver::run(DistributionState* final_state) {
  if (!cfg_.exploratory) {
    const RunValidation v = validate_config(cfg_);
    if (!v.ok) throw ValidationError(v.reasons);
  }
  DistributionState s = prepare_initial();
  const double h0 = norms(s.h, grid_).v_norm;
  flux_integral_ = 0.0;
  std::vector<EnergyRecord> records;
  records.reserve(steps_ / output_every_ + 2);
  records.push_back(compute_energy(s, h0));
  for (std::size_t k = 1; k <= steps_; ++k) {
    advance(s);
    s.t = static_cast<double>(k) * dt_;
    if (k % output_every_ == 0 || k == steps_) records.push_back(compute_energy(s, h0));
  }
  if (final_state != nullptr) *final_state = std::move(s);
  return records;
}

std::vector<EnergyRecord> run(const SimConfig& cfg) {
  KineticSolver solver(cfg);
  return solver.run();
}

}  // namespace vfp
