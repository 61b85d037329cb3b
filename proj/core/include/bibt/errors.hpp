#pragma once

#include <stdexcept>
#include <string>

namespace bibt {

/// Malformed or inconsistent input data (files, labels, counts).
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

/// Numerical failure inside a sampler or decomposition (NaN propagation,
/// failed Cholesky, rank mismatch). Carries enough context to locate the
/// offending iteration.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace bibt
