#include "vfp/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "vfp/errors.hpp"

namespace vfp {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

bool parse_double(const std::string& s, double& out) {
  const char* b = s.data();
  const char* e = s.data() + s.size();
  if (b != e && *b == '+') ++b;
  auto [p, ec] = std::from_chars(b, e, out);
  return ec == std::errc() && p == e;
}

}  // namespace

ConfigFile ConfigFile::parse(const std::string& text, const std::string& origin) {
  ConfigFile cf;
  cf.origin_ = origin;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto cut = line.find_first_of("#;");
    if (cut != std::string::npos) line.erase(cut);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError(origin + ":" + std::to_string(lineno) + ": unterminated section header");
      section = lower(trim(line.substr(1, line.size() - 2)));
      if (section.empty())
        throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty section name");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(origin + ":" + std::to_string(lineno) + ": missing key");
    if (section.empty())
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": key '" + key + "' outside any section");
    auto& sec = cf.sections_[section];
    if (sec.count(key))
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": duplicate key '" + key +
                        "' (first on line " + std::to_string(sec[key].line) + ")");
    sec[key] = Entry{value, lineno};
  }
  return cf;
}

ConfigFile ConfigFile::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path);
}

const ConfigFile::Entry* ConfigFile::find(const std::string& section, const std::string& key) const {
  auto s = sections_.find(section);
  if (s == sections_.end()) return nullptr;
  auto k = s->second.find(key);
  return k == s->second.end() ? nullptr : &k->second;
}

void ConfigFile::fail(const Entry& e, const std::string& section, const std::string& key,
                      const std::string& what) const {
  throw ConfigError(origin_ + ":" + std::to_string(e.line) + ": [" + section + "] " + key + " = '" +
                    e.value + "': " + what);
}

bool ConfigFile::has(const std::string& section, const std::string& key) const {
  return find(section, key) != nullptr;
}

std::optional<std::string> ConfigFile::raw(const std::string& section, const std::string& key) const {
  const Entry* e = find(section, key);
  if (!e) return std::nullopt;
  return e->value;
}

double ConfigFile::number(const std::string& section, const std::string& key, double fallback) const {
  const Entry* e = find(section, key);
  if (!e) return fallback;
  double v = 0.0;
  if (!parse_double(e->value, v) || !std::isfinite(v)) fail(*e, section, key, "expected a finite decimal number");
  return v;
}

std::size_t ConfigFile::count(const std::string& section, const std::string& key,
                              std::size_t fallback) const {
  const Entry* e = find(section, key);
  if (!e) return fallback;
  std::size_t v = 0;
  const char* b = e->value.data();
  const char* end = b + e->value.size();
  auto [p, ec] = std::from_chars(b, end, v);
  if (ec != std::errc() || p != end) fail(*e, section, key, "expected a nonnegative integer");
  return v;
}

bool ConfigFile::flag(const std::string& section, const std::string& key, bool fallback) const {
  const Entry* e = find(section, key);
  if (!e) return fallback;
  const std::string v = lower(e->value);
  if (v == "true" || v == "yes" || v == "1" || v == "on") return true;
  if (v == "false" || v == "no" || v == "0" || v == "off") return false;
  fail(*e, section, key, "expected true or false");
}

std::string ConfigFile::word(const std::string& section, const std::string& key,
                             const std::string& fallback) const {
  const Entry* e = find(section, key);
  return e ? lower(e->value) : fallback;
}

std::vector<double> ConfigFile::numbers(const std::string& section, const std::string& key) const {
  const Entry* e = find(section, key);
  std::vector<double> out;
  if (!e) return out;
  std::string item;
  std::istringstream in(e->value);
  while (std::getline(in, item, ',')) {
    item = trim(item);
    double v = 0.0;
    if (item.empty() || !parse_double(item, v) || !std::isfinite(v))
      fail(*e, section, key, "expected a comma-separated list of numbers");
    out.push_back(v);
  }
  return out;
}

void ConfigFile::require_known(const std::map<std::string, std::vector<std::string>>& allowed) const {
  for (const auto& [sec, entries] : sections_) {
    auto a = allowed.find(sec);
    for (const auto& [key, e] : entries) {
      if (a == allowed.end())
        throw ConfigError(origin_ + ":" + std::to_string(e.line) + ": unknown section [" + sec + "]");
      if (std::find(a->second.begin(), a->second.end(), key) == a->second.end())
        throw ConfigError(origin_ + ":" + std::to_string(e.line) + ": unknown key '" + key +
                          "' in [" + sec + "]");
    }
  }
}

namespace {

const std::map<std::string, std::vector<std::string>>& known_keys() {
  static const std::map<std::string, std::vector<std::string>> k{
      {"grid", {"nx", "nv", "vmax", "tail_tol"}},
      {"kinetic", {"epsilon", "t_end", "dt", "output_every", "transport", "exploratory"}},
      {"feedback", {"profile", "k", "k00", "k01", "k10", "k11", "k00_0", "k01_0", "k10_0", "k11_0"}},
      {"field", {"family", "amplitude"}},
      {"constants", {"lambda", "C_s", "a"}},
      {"initial", {"family", "amplitude", "phase", "mode", "table"}},
      {"macro", {"nx", "t_end", "dt", "implicit", "output_every", "initial", "amplitude", "phase",
                 "mode", "profile", "k", "k00_0", "k01_0", "k10_0", "k11_0"}},
      {"sweep", {"epsilons", "margin_cells", "parallel"}},
  };
  return k;
}

FeedbackMatrix profile_matrix(const ConfigFile& cf, const std::string& section) {
  const std::string p = cf.word(section, "profile", "periodic");
  if (p == "periodic") return FeedbackMatrix::periodic();
  if (p == "reflective") return FeedbackMatrix::reflective();
  if (p == "symmetric") {
    if (!cf.has(section, "k")) throw ConfigError(cf.origin() + ": [" + section + "] profile = symmetric needs k");
    return FeedbackMatrix::symmetric(cf.number(section, "k", 0.0));
  }
  if (p == "custom") return FeedbackMatrix::periodic();
  throw ConfigError(cf.origin() + ": [" + section + "] unknown profile '" + p +
                    "' (periodic, reflective, symmetric, custom)");
}

FeedbackMatrix feedback_from(const ConfigFile& cf) {
  FeedbackMatrix K = profile_matrix(cf, "feedback");
  K.k00 = cf.number("feedback", "k00", K.k00);
  K.k01 = cf.number("feedback", "k01", K.k01);
  K.k10 = cf.number("feedback", "k10", K.k10);
  K.k11 = cf.number("feedback", "k11", K.k11);
  // Limit entries follow K unless given.
  K.k00_0 = cf.number("feedback", "k00_0", K.k00);
  K.k01_0 = cf.number("feedback", "k01_0", K.k01);
  K.k10_0 = cf.number("feedback", "k10_0", K.k10);
  K.k11_0 = cf.number("feedback", "k11_0", K.k11);
  return K;
}

FieldSpec field_from(const ConfigFile& cf) {
  FieldSpec f;
  const std::string fam = cf.word("field", "family", "zero");
  if (fam == "zero") f.family = FieldFamily::zero;
  else if (fam == "sine") f.family = FieldFamily::sine;
  else throw ConfigError(cf.origin() + ": [field] unsupported family '" + fam + "' (zero, sine)");
  f.amplitude = cf.number("field", "amplitude", 0.0);
  return f;
}

int mode_from(const ConfigFile& cf, const std::string& section) {
  const std::size_t m = cf.count(section, "mode", 1);
  if (m == 0 || m > 1000) throw ConfigError(cf.origin() + ": [" + section + "] mode must be in 1..1000");
  return static_cast<int>(m);
}

}  // namespace

SimConfig sim_config_from(const ConfigFile& cf) {
  cf.require_known(known_keys());
  SimConfig c;
  c.nx = cf.count("grid", "nx", c.nx);
  c.nv = cf.count("grid", "nv", c.nv);
  c.vmax = cf.number("grid", "vmax", c.vmax);
  c.tail_tol = cf.number("grid", "tail_tol", c.tail_tol);
  c.epsilon = cf.number("kinetic", "epsilon", c.epsilon);
  c.t_end = cf.number("kinetic", "t_end", c.t_end);
  c.dt = cf.number("kinetic", "dt", c.dt);
  c.output_every = cf.count("kinetic", "output_every", c.output_every);
  const std::string tr = cf.word("kinetic", "transport", "muscl");
  if (tr == "muscl") c.transport = TransportScheme::muscl;
  else if (tr == "upwind1") c.transport = TransportScheme::upwind1;
  else throw ConfigError(cf.origin() + ": [kinetic] transport must be muscl or upwind1");
  c.exploratory = cf.flag("kinetic", "exploratory", false);
  c.K = feedback_from(cf);
  c.field = field_from(cf);
  c.lambda = cf.number("constants", "lambda", c.lambda);
  c.C_s = cf.number("constants", "C_s", c.C_s);
  c.a = cf.number("constants", "a", c.a);

  const std::string fam = cf.word("initial", "family", "cosine-density");
  if (fam == "cosine-density") c.initial.family = InitialFamily::cosine_density;
  else if (fam == "odd-flux") c.initial.family = InitialFamily::odd_flux;
  else if (fam == "constant-density") c.initial.family = InitialFamily::constant_density;
  else if (fam == "custom-table") c.initial.family = InitialFamily::custom_table;
  else
    throw ConfigError(cf.origin() + ": [initial] unknown family '" + fam +
                      "' (cosine-density, odd-flux, constant-density, custom-table)");
  c.initial.amplitude = cf.number("initial", "amplitude", 1.0);
  c.initial.phase = cf.number("initial", "phase", 0.0);
  c.initial.mode = mode_from(cf, "initial");
  if (c.initial.family == InitialFamily::custom_table) {
    const auto path = cf.raw("initial", "table");
    if (!path) throw ConfigError(cf.origin() + ": [initial] custom-table needs table = PATH");
    c.initial.table = load_table(*path, c.nx, c.nv);
  }

  if (c.t_end < 0.0) throw ConfigError(cf.origin() + ": [kinetic] t_end must be >= 0");
  if (c.dt < 0.0) throw ConfigError(cf.origin() + ": [kinetic] dt must be >= 0");
  if (c.epsilon < 0.0) throw ConfigError(cf.origin() + ": [kinetic] epsilon must be >= 0");
  return c;
}

MacroConfig macro_config_from(const ConfigFile& cf) {
  cf.require_known(known_keys());
  MacroConfig m;
  m.nx = cf.count("macro", "nx", cf.count("grid", "nx", m.nx));
  m.field = field_from(cf);
  m.t_end = cf.number("macro", "t_end", cf.number("kinetic", "t_end", m.t_end));
  m.dt = cf.number("macro", "dt", 0.0);
  m.implicit = cf.flag("macro", "implicit", false);
  m.output_every = cf.count("macro", "output_every", 0);
  const std::string init = cf.word("macro", "initial", "cosine");
  if (init == "cosine") m.initial = MacroInitial::cosine;
  else if (init == "constant") m.initial = MacroInitial::constant;
  else if (init == "zero") m.initial = MacroInitial::zero;
  else throw ConfigError(cf.origin() + ": [macro] initial must be cosine, constant or zero");
  m.amplitude = cf.number("macro", "amplitude", cf.number("initial", "amplitude", 1.0));
  m.phase = cf.number("macro", "phase", cf.number("initial", "phase", 0.0));
  m.mode = cf.has("macro", "mode") ? mode_from(cf, "macro") : mode_from(cf, "initial");

  FeedbackMatrix K0 = cf.has("macro", "profile") ? profile_matrix(cf, "macro") : feedback_from(cf);
  if (cf.has("macro", "profile")) {
    K0.k00_0 = K0.k00;
    K0.k01_0 = K0.k01;
    K0.k10_0 = K0.k10;
    K0.k11_0 = K0.k11;
  }
  K0.k00_0 = cf.number("macro", "k00_0", K0.k00_0);
  K0.k01_0 = cf.number("macro", "k01_0", K0.k01_0);
  K0.k10_0 = cf.number("macro", "k10_0", K0.k10_0);
  K0.k11_0 = cf.number("macro", "k11_0", K0.k11_0);
  m.K0 = K0;
  if (m.t_end < 0.0) throw ConfigError(cf.origin() + ": [macro] t_end must be >= 0");
  if (m.dt < 0.0) throw ConfigError(cf.origin() + ": [macro] dt must be >= 0");
  if (m.nx < 4) throw ConfigError(cf.origin() + ": [macro] nx must be at least 4");
  return m;
}

ApStudyConfig ap_config_from(const ConfigFile& cf) {
  ApStudyConfig a;
  a.kinetic = sim_config_from(cf);
  a.macro_K0 = macro_config_from(cf).K0;
  if (cf.has("sweep", "epsilons")) a.epsilons = cf.numbers("sweep", "epsilons");
  if (a.epsilons.empty()) throw ConfigError(cf.origin() + ": [sweep] epsilons is empty");
  for (double e : a.epsilons)
    if (!(e > 0.0)) throw ConfigError(cf.origin() + ": [sweep] epsilons must all be > 0");
  a.margin_cells = cf.count("sweep", "margin_cells", a.margin_cells);
  a.parallel = cf.flag("sweep", "parallel", true);
  return a;
}

GridFunction load_table(const std::string& path, std::size_t nx, std::size_t nv) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read initial table '" + path + "'");
  GridFunction g(nx, nv);
  std::string line;
  std::size_t j = 0;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto cut = line.find('#');
    if (cut != std::string::npos) line.erase(cut);
    std::replace(line.begin(), line.end(), ',', ' ');
    if (trim(line).empty()) continue;
    if (j >= nv) throw ConfigError(path + ":" + std::to_string(lineno) + ": more than nv rows");
    std::istringstream row(line);
    std::string tok;
    std::size_t i = 0;
    while (row >> tok) {
      double v = 0.0;
      if (!parse_double(tok, v))
        throw ConfigError(path + ":" + std::to_string(lineno) + ": bad number '" + tok + "'");
      if (i >= nx) throw ConfigError(path + ":" + std::to_string(lineno) + ": more than nx values");
      g(i++, j) = v;
    }
    if (i != nx) throw ConfigError(path + ":" + std::to_string(lineno) + ": expected nx values");
    ++j;
  }
  if (j != nv) throw ConfigError(path + ": expected nv rows, found " + std::to_string(j));
  return g;
}

}  // namespace vfp
