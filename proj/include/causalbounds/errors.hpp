#pragma once

#include <stdexcept>
#include <string>

namespace causalbounds {

// Bad user input: malformed JSON, inconsistent sizes, out-of-range settings.
// The CLI maps this to exit code 2.
class config_error : public std::runtime_error {
 public:
  explicit config_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Numerical failure: rank-deficient constraint systems, infeasible starts,
// LP solver breakdown, singular strata. The CLI maps this to exit code 3.
class numeric_error : public std::runtime_error {
 public:
  explicit numeric_error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace causalbounds
