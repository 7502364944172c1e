#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace vfp {

// Malformed or unusable configuration (CLI exit code 2).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A stabilization hypothesis or run precondition failed (CLI exit code 1).
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(std::vector<std::string> reasons)
      : std::runtime_error(join(reasons)), reasons_(std::move(reasons)) {}

  const std::vector<std::string>& reasons() const { return reasons_; }

 private:
  static std::string join(const std::vector<std::string>& r) {
    std::string s;
    for (const auto& x : r) {
      if (!s.empty()) s += "; ";
      s += x;
    }
    return s;
  }
  std::vector<std::string> reasons_;
};

// Non-finite values appeared during time stepping.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace vfp
