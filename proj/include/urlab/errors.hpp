#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace urlab {

/// Invalid model or experiment configuration. Carries every violation found,
/// not only the first.
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(std::vector<std::string> problems);
  explicit ConfigError(const std::string& problem) : ConfigError(std::vector<std::string>{problem}) {}

  const std::vector<std::string>& problems() const noexcept { return problems_; }

 private:
  std::vector<std::string> problems_;
};

/// A simulated path on which a required statistic is undefined (e.g. zero
/// design energy). Recoverable by resampling.
class DegeneratePath : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Violated internal consistency check (e.g. a decomposition that does not
/// reconstruct its input).
class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace urlab
