#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace pendantss {

/// Inconsistent vector lengths or out-of-range sizes.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Invalid parameter values (penalty, solver, generator, experiment).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Power iteration did not reach its tolerance. Carries the last iterate so
/// callers can inspect or reuse it.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double last_value, std::vector<double> last_vector)
      : std::runtime_error(what), last_value_(last_value), last_vector_(std::move(last_vector)) {}

  double last_value() const noexcept { return last_value_; }
  const std::vector<double>& last_vector() const noexcept { return last_vector_; }

 private:
  double last_value_;
  std::vector<double> last_vector_;
};

namespace detail {

inline void require_dims(bool ok, const char* what) {
  if (!ok) throw DimensionError(what);
}

}  // namespace detail
}  // namespace pendantss
