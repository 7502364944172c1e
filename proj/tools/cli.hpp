#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "vfp/analysis.hpp"
#include "vfp/kinetic_solver.hpp"
#include "vfp/macro_solver.hpp"

namespace vfp::cli {

enum ExitCode : int { kOk = 0, kConditionFailure = 1, kUsageError = 2 };

// Entry point shared by the executable and the tests.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

struct Options {
  std::string config;
  std::string out;
  bool strict = false;
  bool quiet = false;
};

int cmd_check(const Options& o, std::ostream& out, std::ostream& err);
int cmd_run_kinetic(const Options& o, std::ostream& out, std::ostream& err);
int cmd_run_macro(const Options& o, std::ostream& out, std::ostream& err);
int cmd_ap_sweep(const Options& o, std::ostream& out, std::ostream& err);

// Writers used by the commands (17 significant digits, '.' separator).
std::string format_number(double x);
void write_kinetic_csv(std::ostream& os, const std::vector<EnergyRecord>& records);
void write_macro_csv(std::ostream& os, const MacroRun& run);
void write_ap_csv(std::ostream& os, const ApStudy& study);

}  // namespace vfp::cli
