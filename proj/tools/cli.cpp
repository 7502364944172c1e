#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

#include "vfp/config.hpp"
#include "vfp/errors.hpp"
#include "vfp/stability_constants.hpp"

namespace vfp::cli {

namespace {

using nlohmann::json;

struct Condition {
  std::string name;
  std::string status;  // pass, fail, warn, pending
  std::string detail;
};

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw ConfigError("cannot open output file '" + path + "'");
  return f;
}

json num(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

}  // namespace

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_kinetic_csv(std::ostream& os, const std::vector<EnergyRecord>& records) {
  os << "t,l2,v_norm,E_h,cross_term,mass,A,B,A_x,B_x,C_B,I,flux_residual,envelope\n";
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (const EnergyRecord& r : records) {
    const double vals[] = {r.t, r.l2, r.v_norm, r.E_h, r.cross_term, r.mass, r.A, r.B, r.A_x,
                           r.B_x, r.C_B.value_or(nan), r.I, r.flux_residual, r.envelope};
    bool first = true;
    for (double v : vals) {
      if (!first) os << ',';
      os << format_number(v);
      first = false;
    }
    os << '\n';
  }
}

void write_macro_csv(std::ostream& os, const MacroRun& run) {
  os << "t,x,sigma\n";
  for (const MacroSnapshot& s : run.snapshots)
    for (std::size_t i = 0; i < s.sigma.size(); ++i)
      os << format_number(s.t) << ',' << format_number(run.x[i]) << ',' << format_number(s.sigma[i])
         << '\n';
}

void write_ap_csv(std::ostream& os, const ApStudy& study) {
  os << "epsilon,l2_diff,layer_indicator,layer_saturated\n";
  for (const ApRow& r : study.rows)
    os << format_number(r.epsilon) << ',' << format_number(r.l2_diff) << ','
       << format_number(r.layer.value) << ',' << (r.layer.saturated ? 1 : 0) << '\n';
}

int cmd_check(const Options& o, std::ostream& out, std::ostream&) {
  const ConfigFile cf = ConfigFile::load(o.config);
  const SimConfig c = sim_config_from(cf);
  std::vector<Condition> conds;

  const FieldValidation fv = validate_field(c.field, c.lambda, c.C_s);
  {
    std::ostringstream d;
    d << "C_E = " << format_number(fv.C_E) << ", lambda C_s/8 = " << format_number(fv.bound)
      << ", margin = " << format_number(fv.bound - fv.C_E);
    for (const auto& r : fv.reasons) d << "; " << r;
    conds.push_back({"electric field bound", fv.pass ? "pass" : "fail", d.str()});
  }
  {
    const bool ok = c.epsilon >= 0.0 && c.epsilon <= 1.0;
    conds.push_back({"epsilon in [0,1]", ok ? "pass" : "fail", "epsilon = " + format_number(c.epsilon)});
  }
  {
    const bool ok = c.C_s > 0.0 && c.C_s <= 1.0;
    conds.push_back({"Poincare constant C_s in (0,1]", ok ? "pass" : "fail", "C_s = " + format_number(c.C_s)});
  }

  const ConstraintReport cr = check_constraints(c.K, std::nullopt, c.a, c.epsilon);
  {
    std::ostringstream d;
    d << "theorem = " << to_string(cr.theorem_selected);
    for (const auto& r : cr.reasons) d << "; " << r;
    conds.push_back({"feedback profile", cr.theorem_selected == Theorem::none ? "fail" : "pass", d.str()});
  }
  {
    std::ostringstream d;
    d << "residuals (" << format_number(cr.const1.first) << ", " << format_number(cr.const1.second) << ")";
    // Outside the periodic profile the limit quadratics only predict a boundary layer.
    const std::string st = cr.const1.pass ? "pass" : "warn";
    conds.push_back({"limit quadratics on K0 (no boundary layer)", st, d.str()});
  }
  {
    std::ostringstream d;
    d << "k00+k01-1 = " << format_number(cr.row0_residual) << ", k10+k11-1 = " << format_number(cr.row1_residual);
    conds.push_back({"row sums (zero boundary flux)", cr.const2_pass ? "pass" : "fail", d.str()});
  }
  if (cr.profile_periodic) {
    conds.push_back({"boundary form I(t) <= 0", "pass", "identically zero for the periodic matrix"});
  } else if (cr.theorem_selected == Theorem::small_field) {
    conds.push_back({"boundary form I(t) <= 0", "pending", "holds when a <= C_B(t); verify on a trajectory"});
    conds.push_back({"a <= C_B(t)", "pending", "C_B depends on the solution; checked a posteriori by run-kinetic"});
  }

  const AdmissibleMode mode = cr.theorem_selected == Theorem::small_field ? AdmissibleMode::small_field
                                                                          : AdmissibleMode::periodic;
  std::optional<AdmissibleInterval> iv;
  try {
    iv = admissible_a(c.lambda, c.C_s, fv.C_E, mode);
    std::ostringstream d;
    d << "(" << format_number(iv->lower) << ", " << format_number(iv->upper) << "), a = " << format_number(c.a);
    if (iv->empty) d << "; " << iv->reason;
    conds.push_back({"a inside admissible interval", iv->contains(c.a) ? "pass" : "fail", d.str()});
  } catch (const std::invalid_argument& e) {
    conds.push_back({"a inside admissible interval", "fail", e.what()});
  }
  const XiBranches xb = xi_branches(c.lambda, fv.C_E, c.C_s, c.a, c.epsilon);
  conds.push_back({"decay rate xi > 0", xb.value() > 0.0 ? "pass" : "fail",
                   "xi = " + format_number(xb.value())});

  bool any_fail = false, any_warn = false;
  for (const auto& k : conds) {
    any_fail = any_fail || k.status == "fail";
    any_warn = any_warn || k.status == "warn" || k.status == "pending";
  }
  for (const auto& w : cr.warnings) (void)w, any_warn = true;

  std::ostringstream text;
  text << "condition report for " << o.config << "\n";
  for (const auto& k : conds) text << "  [" << k.status << "] " << k.name << ": " << k.detail << "\n";
  for (const auto& w : cr.warnings) text << "  warning: " << w << "\n";
  text << "selected theorem: " << to_string(cr.theorem_selected) << "\n";
  if (iv && !iv->empty)
    text << "admissible a: (" << format_number(iv->lower) << ", " << format_number(iv->upper) << ")\n";
  text << "xi: " << format_number(xb.value()) << " (kinetic branch " << format_number(xb.kinetic)
       << ", macro branch " << format_number(xb.macro) << ")\n";
  const int code = any_fail || (o.strict && any_warn) ? kConditionFailure : kOk;
  text << "result: " << (code == kOk ? "PASS" : "FAIL") << "\n";

  json j;
  j["config"] = o.config;
  j["theorem_selected"] = to_string(cr.theorem_selected);
  j["C_E"] = num(fv.C_E);
  j["a"] = num(c.a);
  j["epsilon"] = num(c.epsilon);
  j["xi"] = num(xb.value());
  j["xi_kinetic_branch"] = num(xb.kinetic);
  j["xi_macro_branch"] = num(xb.macro);
  if (iv) j["a_interval"] = {{"lower", num(iv->lower)}, {"upper", num(iv->upper)}, {"empty", iv->empty}};
  j["conditions"] = json::array();
  for (const auto& k : conds)
    j["conditions"].push_back({{"name", k.name}, {"status", k.status}, {"detail", k.detail}});
  j["warnings"] = cr.warnings;
  j["const1_residuals"] = {num(cr.const1.first), num(cr.const1.second)};
  j["row_sum_residuals"] = {num(cr.row0_residual), num(cr.row1_residual)};
  j["pass"] = code == kOk;

  if (!o.out.empty()) {
    auto f = open_out(o.out);
    f << text.str();
    auto fj = open_out(o.out + ".json");
    fj << j.dump(2) << "\n";
  }
  if (!o.quiet) {
    out << text.str();
    if (o.out.empty()) out << j.dump(2) << "\n";
  }
  return code;
}

int cmd_run_kinetic(const Options& o, std::ostream& out, std::ostream& err) {
  const ConfigFile cf = ConfigFile::load(o.config);
  const SimConfig c = sim_config_from(cf);
  if (o.out.empty()) throw ConfigError("run-kinetic needs --out PATH");
  auto f = open_out(o.out);

  KineticSolver solver(c);
  const std::vector<EnergyRecord> recs = solver.run();
  write_kinetic_csv(f, recs);
  f.flush();
  if (!f) throw ConfigError("failed writing '" + o.out + "'");

  std::vector<std::string> warnings;
  const RunValidation v = validate_config(c);
  double min_cb = std::numeric_limits<double>::infinity();
  double max_I = -std::numeric_limits<double>::infinity();
  bool equiv = true;
  for (const auto& r : recs) {
    if (r.C_B) min_cb = std::min(min_cb, *r.C_B);
    max_I = std::max(max_I, r.I);
    equiv = equiv && r.equivalence_ok && r.cross_bound_ok;
  }
  if (!equiv) warnings.push_back("energy equivalence bound violated beyond 1e-10 relative");
  if (v.constraints.theorem_selected == Theorem::small_field) {
    if (std::isfinite(min_cb) && c.a > min_cb)
      warnings.push_back("a = " + format_number(c.a) + " exceeds min_t C_B(t) = " + format_number(min_cb));
    if (max_I > kConstraintTol) warnings.push_back("boundary form I(t) reached " + format_number(max_I));
  }
  if (v.ok) {
    const double h0 = recs.front().v_norm;
    for (const auto& r : recs)
      if (r.v_norm > 1.05 * r.envelope) {
        warnings.push_back("v_norm exceeds the decay envelope (+5%) at t = " + format_number(r.t));
        break;
      }
    (void)h0;
  }
  if (!o.quiet) {
    out << "run-kinetic: " << recs.size() << " records, " << solver.total_steps() << " steps, dt = "
        << format_number(solver.dt()) << ", xi = " << format_number(solver.xi()) << ", kernels = "
        << kernels::active().name << "\n";
    for (const auto& w : v.warnings) out << "  note: " << w << "\n";
  }
  for (const auto& w : warnings) err << "warning: " << w << "\n";
  return o.strict && !warnings.empty() ? kConditionFailure : kOk;
}

int cmd_run_macro(const Options& o, std::ostream& out, std::ostream&) {
  const ConfigFile cf = ConfigFile::load(o.config);
  const MacroConfig m = macro_config_from(cf);
  if (o.out.empty()) throw ConfigError("run-macro needs --out PATH");
  auto f = open_out(o.out);
  const MacroRun run = run_macro(m);
  write_macro_csv(f, run);
  if (!o.quiet) {
    out << "run-macro: " << run.snapshots.size() << " snapshots, " << run.steps << " steps, closure = "
        << (run.closure == MacroClosure::periodic ? "periodic" : "twisted (experimental)") << "\n";
  }
  return kOk;
}

int cmd_ap_sweep(const Options& o, std::ostream& out, std::ostream& err) {
  const ConfigFile cf = ConfigFile::load(o.config);
  const ApStudyConfig a = ap_config_from(cf);
  if (o.out.empty()) throw ConfigError("ap-sweep needs --out PATH");
  auto f = open_out(o.out);
  const ApStudy st = ap_study(a);
  write_ap_csv(f, st);

  bool monotone = true;
  for (std::size_t k = 1; k < st.rows.size(); ++k)
    monotone = monotone && st.rows[k].l2_diff <= st.rows[k - 1].l2_diff;
  if (!o.quiet) {
    out << "ap-sweep:\n";
    for (const auto& r : st.rows)
      out << "  epsilon = " << format_number(r.epsilon) << "  |sigma_kin - sigma_macro| = "
          << format_number(r.l2_diff) << "  layer indicator = " << format_number(r.layer.value)
          << (r.layer.saturated ? " (saturated)" : "") << "\n";
  }
  if (!monotone) {
    err << "warning: difference column is not nonincreasing as epsilon decreases\n";
    if (o.strict) return kConditionFailure;
  }
  return kOk;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Boundary-feedback stabilization toolkit for the linear Vlasov-Fokker-Planck equation",
               "vfp"};
  app.require_subcommand(1);
  Options o;
  auto add_common = [&o](CLI::App* sub, bool needs_out) {
    sub->add_option("--config", o.config, "configuration file")->required();
    auto* opt = sub->add_option("--out", o.out, "output file");
    if (needs_out) opt->required();
    sub->add_flag("--strict", o.strict, "fail on any condition warning");
    sub->add_flag("--quiet", o.quiet, "suppress the summary on stdout");
  };
  auto* check = app.add_subcommand("check", "check every stabilization hypothesis for a configuration");
  add_common(check, false);
  auto* kin = app.add_subcommand("run-kinetic", "run the kinetic solver and write energy records as CSV");
  add_common(kin, true);
  auto* mac = app.add_subcommand("run-macro", "run the drift-diffusion limit solver and write (t, x, sigma) CSV");
  add_common(mac, true);
  auto* ap = app.add_subcommand("ap-sweep", "compare kinetic and limit densities across epsilon");
  add_common(ap, true);

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kUsageError;
  }

  try {
    if (check->parsed()) return cmd_check(o, out, err);
    if (kin->parsed()) return cmd_run_kinetic(o, out, err);
    if (mac->parsed()) return cmd_run_macro(o, out, err);
    if (ap->parsed()) return cmd_ap_sweep(o, out, err);
  } catch (const ValidationError& e) {
    err << "validation failed:\n";
    for (const auto& r : e.reasons()) err << "  " << r << "\n";
    return kConditionFailure;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kConditionFailure;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kUsageError;
  } catch (const std::invalid_argument& e) {
    err << "config error: " << e.what() << "\n";
    return kUsageError;
  }
  return kUsageError;
}

}  // namespace vfp::cli
