#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace loopscope {

// Base class for every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A point variant was paired with a metric that cannot measure it.
class MetricMismatchError : public Error {
 public:
  explicit MetricMismatchError(const std::string& detail)
      : Error("metric/point mismatch: " + detail) {}
};

// A time, window or index fell outside its valid domain.
class RangeError : public Error {
 public:
  using Error::Error;
};

// Invalid parameters (resolution, gamma, weights, generator settings, ...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Query on a time pair that is not in the gamma-sublevel set.
class NotInMaskError : public Error {
 public:
  NotInMaskError() : Error("not an inexact loop at this gamma") {}
};

// A floored sampler cannot keep one sample per cluster within the budget.
class BudgetError : public Error {
 public:
  BudgetError(std::size_t budget, std::size_t clusters)
      : Error("budget below component count: budget " + std::to_string(budget) +
              " < " + std::to_string(clusters) + " clusters") {}
};

// Malformed or unreadable input file. line is 1-based, 0 when not applicable.
class IoError : public Error {
 public:
  IoError(const std::string& path, std::size_t line, const std::string& detail)
      : Error(path + (line > 0 ? ":" + std::to_string(line) : std::string()) +
              ": " + detail),
        line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

}  // namespace loopscope
