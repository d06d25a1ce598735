#pragma once

#include <stdexcept>
#include <string>

namespace ucr {

/// Invalid experiment configuration (bad key, violated constraint).
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// A closed-form evaluation lost too much precision to be trusted, e.g. an
/// alternating order-statistic sum that left [0, 1].
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace ucr
