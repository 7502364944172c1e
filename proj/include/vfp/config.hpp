#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "vfp/analysis.hpp"
#include "vfp/kinetic_solver.hpp"
#include "vfp/macro_solver.hpp"

namespace vfp {

// key = value lines grouped under [section] headers; '#' and ';' start comments.
class ConfigFile {
 public:
  static ConfigFile parse(const std::string& text, const std::string& origin = "<config>");
  static ConfigFile load(const std::string& path);

  bool has(const std::string& section, const std::string& key) const;
  std::optional<std::string> raw(const std::string& section, const std::string& key) const;

  double number(const std::string& section, const std::string& key, double fallback) const;
  std::size_t count(const std::string& section, const std::string& key, std::size_t fallback) const;
  bool flag(const std::string& section, const std::string& key, bool fallback) const;
  std::string word(const std::string& section, const std::string& key, const std::string& fallback) const;
  std::vector<double> numbers(const std::string& section, const std::string& key) const;

  // Rejects keys outside the allowed set, naming the line.
  void require_known(const std::map<std::string, std::vector<std::string>>& allowed) const;

  const std::string& origin() const { return origin_; }

 private:
  struct Entry {
    std::string value;
    int line = 0;
  };
  const Entry* find(const std::string& section, const std::string& key) const;
  [[noreturn]] void fail(const Entry& e, const std::string& section, const std::string& key,
                         const std::string& what) const;

  std::string origin_;
  std::map<std::string, std::map<std::string, Entry>> sections_;
};

SimConfig sim_config_from(const ConfigFile& cf);
MacroConfig macro_config_from(const ConfigFile& cf);
ApStudyConfig ap_config_from(const ConfigFile& cf);

// f0 table: one line per velocity node, nx values per line (whitespace or commas).
GridFunction load_table(const std::string& path, std::size_t nx, std::size_t nv);

}  // namespace vfp
