#pragma once

#include <stdexcept>
#include <string>

namespace ghost {

// Invalid or inconsistent parameters. Maps to CLI exit code 1.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Non-finite values or failed numerical checks. Maps to CLI exit code 2.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

// A comparison against a reference exceeded its tolerance. Exit code 3.
class ComparisonError : public std::runtime_error {
 public:
  explicit ComparisonError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace ghost
