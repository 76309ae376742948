#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace lrlab {

/// Precondition on an argument's domain was violated (empty set, non-positive rate, ...).
class DomainError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// The requested operation is not defined for this input (e.g. non-smooth potential).
class UnsupportedError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Time stepping produced a non-finite state.
class IntegrationError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Carries every violation found, not only the first one.
class ConfigError : public std::runtime_error {
public:
  explicit ConfigError(std::vector<std::string> violations)
      : std::runtime_error(join(violations)), violations_(std::move(violations)) {}

  const std::vector<std::string>& violations() const noexcept { return violations_; }

private:
  static std::string join(const std::vector<std::string>& v) {
    std::string out;
    for (const auto& s : v) {
      if (!out.empty()) out += "\n";
      out += s;
    }
    return out;
  }
  std::vector<std::string> violations_;
};

/// Model assumptions failed; bound constants are undefined.
class AssumptionError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace lrlab
