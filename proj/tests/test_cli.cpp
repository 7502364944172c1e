#include <doctest.h>

#include <json.hpp>

#include <unistd.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "vfp/config.hpp"
#include "vfp/errors.hpp"

using namespace vfp;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result invoke(std::vector<std::string> args) {
  std::ostringstream o, e;
  const int code = cli::run(args, o, e);
  return {code, o.str(), e.str()};
}

fs::path scratch() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / ("vfp_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string write_file(const std::string& name, const std::string& body) {
  const fs::path p = scratch() / name;
  std::ofstream(p) << body;
  return p.string();
}

std::string slurp(const std::string& path) {
  std::ifstream f(path);
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

const char* kSmall = R"(
[grid]
nx = 16
nv = 16
vmax = 8
[kinetic]
epsilon = 1
t_end = 0.02
[feedback]
profile = periodic
[field]
family = sine
amplitude = 1e-5
[constants]
a = 0.05
)";

}  // namespace

TEST_CASE("config parser") {
  const ConfigFile cf = ConfigFile::parse("# c\n[grid]\nnx = 32 ; trailing\n[field]\nfamily = Sine\n", "t.cfg");
  CHECK(cf.count("grid", "nx", 0) == 32);
  CHECK(cf.word("field", "family", "") == "sine");
  CHECK(cf.number("grid", "vmax", 8.0) == 8.0);
  CHECK_THROWS_WITH_AS(ConfigFile::parse("nx = 3\n", "t.cfg"), doctest::Contains("t.cfg:1"), ConfigError);
  CHECK_THROWS_WITH_AS(ConfigFile::parse("[a]\nx=1\nx=2\n", "t.cfg"), doctest::Contains("t.cfg:3"), ConfigError);
  CHECK_THROWS_AS(ConfigFile::parse("[a\n"), ConfigError);
  const ConfigFile bad = ConfigFile::parse("[grid]\nnx = many\n", "b.cfg");
  CHECK_THROWS_WITH_AS(bad.count("grid", "nx", 0), doctest::Contains("b.cfg:2"), ConfigError);
  CHECK_THROWS_WITH_AS(sim_config_from(ConfigFile::parse("[grid]\nnxx = 3\n", "u.cfg")), doctest::Contains("nxx"),
                       ConfigError);
}

TEST_CASE("config builders") {
  const SimConfig c = sim_config_from(ConfigFile::parse(kSmall));
  CHECK(c.nx == 16);
  CHECK(c.field.family == FieldFamily::sine);
  CHECK(c.K.is_periodic());
  const SimConfig s = sim_config_from(ConfigFile::parse("[feedback]\nprofile = symmetric\nk = 0.25\n"));
  CHECK(s.K.k00 == 0.25);
  CHECK(s.K.k01 == 0.75);
  CHECK_THROWS_AS(sim_config_from(ConfigFile::parse("[feedback]\nprofile = symmetric\n")), ConfigError);
  const ApStudyConfig a = ap_config_from(ConfigFile::parse("[sweep]\nepsilons = 0.4, 0.2\n"));
  REQUIRE(a.epsilons.size() == 2);
  CHECK(a.epsilons[1] == 0.2);
}

TEST_CASE("usage errors exit with 2") {
  CHECK(invoke({}).code == 2);
  CHECK(invoke({"bogus"}).code == 2);
  CHECK(invoke({"check"}).code == 2);
  CHECK(invoke({"check", "--config", (scratch() / "missing.cfg").string()}).code == 2);
  const std::string bad = write_file("bad.cfg", "[grid]\nnx = x\n");
  const Result r = invoke({"check", "--config", bad});
  CHECK(r.code == 2);
  CHECK(r.err.find("bad.cfg:2") != std::string::npos);
}

TEST_CASE("check passes a compliant configuration and writes both reports") {
  const std::string cfg = write_file("ok.cfg", kSmall);
  const std::string out = (scratch() / "ok.report").string();
  const Result r = invoke({"check", "--config", cfg, "--out", out, "--quiet"});
  CHECK(r.code == 0);
  CHECK(slurp(out).find("result: PASS") != std::string::npos);
  const auto j = nlohmann::json::parse(slurp(out + ".json"));
  CHECK(j["pass"] == true);
  CHECK(j["theorem_selected"] == "periodic-large-field");
  CHECK(j["xi"].get<double>() > 0.0);
}

TEST_CASE("check fails out-of-profile matrices and strong fields") {
  std::string body = kSmall;
  body.replace(body.find("profile = periodic"), 18, "profile = custom\nk00 = 1.5\nk01 = -0.5\nk10 = -0.5\nk11 = 1.5");
  const std::string bad = write_file("k00.cfg", body);
  const Result r = invoke({"check", "--config", bad});
  CHECK(r.code == 1);
  CHECK(r.out.find("k00 = 1.5") != std::string::npos);

  std::string strong = kSmall;
  strong.replace(strong.find("amplitude = 1e-5"), 16, "amplitude = 1e-3");
  CHECK(invoke({"check", "--config", write_file("strong.cfg", strong), "--quiet"}).code == 1);
}

TEST_CASE("strict mode turns warnings into failures") {
  std::string body = kSmall;
  body.replace(body.find("profile = periodic"), 18, "profile = symmetric\nk = 0.5");
  body.replace(body.find("amplitude = 1e-5"), 16, "amplitude = 0");
  const std::string cfg = write_file("sym.cfg", body);
  CHECK(invoke({"check", "--config", cfg, "--quiet"}).code == 0);
  CHECK(invoke({"check", "--config", cfg, "--quiet", "--strict"}).code == 1);
}

TEST_CASE("run-kinetic writes the record table deterministically") {
  const std::string cfg = write_file("run.cfg", kSmall);
  const std::string a = (scratch() / "a.csv").string(), b = (scratch() / "b.csv").string();
  CHECK(invoke({"run-kinetic", "--config", cfg, "--out", a, "--quiet"}).code == 0);
  CHECK(invoke({"run-kinetic", "--config", cfg, "--out", b, "--quiet"}).code == 0);
  const std::string csv = slurp(a);
  CHECK(csv == slurp(b));
  CHECK(csv.rfind("t,l2,v_norm,E_h,cross_term,mass,A,B,A_x,B_x,C_B,I,flux_residual,envelope\n", 0) == 0);
}

TEST_CASE("run-kinetic with t_end = 0 writes one row") {
  std::string body = kSmall;
  body.replace(body.find("t_end = 0.02"), 12, "t_end = 0");
  const std::string out = (scratch() / "zero.csv").string();
  CHECK(invoke({"run-kinetic", "--config", write_file("zero.cfg", body), "--out", out}).code == 0);
  const std::string csv = slurp(out);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 2);
}

TEST_CASE("unwritable output path exits with 2") {
  const std::string cfg = write_file("p.cfg", kSmall);
  CHECK(invoke({"run-kinetic", "--config", cfg, "--out", "/nonexistent/dir/x.csv"}).code == 2);
  CHECK(invoke({"run-macro", "--config", cfg, "--out", "/nonexistent/dir/x.csv"}).code == 2);
}

TEST_CASE("run-macro rejects a reflective limit matrix") {
  const std::string cfg = write_file("mr.cfg", "[macro]\nnx = 16\nt_end = 0.001\nprofile = reflective\n");
  const Result r = invoke({"run-macro", "--config", cfg, "--out", (scratch() / "m.csv").string()});
  CHECK(r.code == 1);
}

TEST_CASE("run-macro and ap-sweep tables") {
  const std::string m = write_file("m.cfg", "[macro]\nnx = 16\nt_end = 0.001\n");
  const std::string mo = (scratch() / "m.csv").string();
  CHECK(invoke({"run-macro", "--config", m, "--out", mo, "--quiet"}).code == 0);
  const std::string mcsv = slurp(mo);
  CHECK(mcsv.rfind("t,x,sigma\n", 0) == 0);
  CHECK(std::count(mcsv.begin(), mcsv.end(), '\n') == 1 + 2 * 16);

  const std::string ap = write_file(
      "ap.cfg", "[grid]\nnx = 16\nnv = 16\n[kinetic]\nt_end = 0.02\n[sweep]\nepsilons = 0.5, 0.2\n");
  const std::string ao = (scratch() / "ap.csv").string();
  CHECK(invoke({"ap-sweep", "--config", ap, "--out", ao, "--quiet", "--strict"}).code == 0);
  const std::string acsv = slurp(ao);
  CHECK(acsv.rfind("epsilon,l2_diff,layer_indicator,layer_saturated\n0.5,", 0) == 0);
}

TEST_CASE("shipped sample configurations pass check") {
  for (const char* name : {"periodic.cfg", "ap_sweep.cfg"}) {
    CAPTURE(name);
    CHECK(invoke({"check", "--config", std::string(VFP_TOOL_CONFIGS) + "/" + name, "--quiet"}).code == 0);
  }
}

TEST_CASE("number formatting") {
  CHECK(cli::format_number(0.1) == "0.10000000000000001");
  CHECK(cli::format_number(std::nan("")) == "nan");
  CHECK(cli::format_number(1e300 * 1e300) == "inf");
}

TEST_CASE("worked command examples") {
  const std::string zero = write_file("zf.cfg", "[feedback]\nprofile = periodic\n[field]\nfamily = zero\n");
  const Result r = invoke({"check", "--config", zero});
  CHECK(r.code == 0);
  CHECK(r.out.find("xi: 0.01875") != std::string::npos);

  const std::string mc = write_file("mc.cfg", "[macro]\nnx = 16\nt_end = 0.001\ninitial = constant\n");
  const std::string mo = (scratch() / "mc.csv").string();
  CHECK(invoke({"run-macro", "--config", mc, "--out", mo}).code == 0);
  std::istringstream in(slurp(mo));
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) CHECK(std::stod(line.substr(line.rfind(',') + 1)) == doctest::Approx(1.0).epsilon(1e-13));

  const std::string badeps = write_file("be.cfg", "[sweep]\nepsilons = 0.5, -0.1\n");
  CHECK(invoke({"ap-sweep", "--config", badeps, "--out", (scratch() / "be.csv").string()}).code == 2);
  const std::string one = write_file("one.cfg", "[grid]\nnx = 16\nnv = 16\n[kinetic]\nt_end = 0.01\n[sweep]\nepsilons = 0.3\n");
  const std::string oo = (scratch() / "one.csv").string();
  CHECK(invoke({"ap-sweep", "--config", one, "--out", oo}).code == 0);
  const std::string csv = slurp(oo);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 2);
}
