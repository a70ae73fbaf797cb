#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace cusp {

// Base for failures of a numerical computation (as opposed to bad input,
// which is reported with std::invalid_argument).
class ComputationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ShiftHitsSpectrum : public ComputationError {
 public:
  ShiftHitsSpectrum(const std::string& what, double shift)
      : ComputationError(what), shift(shift) {}
  double shift;
};

// Refinement ladder ran out of budget; carries the best values seen and
// their spread between the last two levels.
class LadderExhausted : public ComputationError {
 public:
  LadderExhausted(const std::string& what, std::vector<double> best,
                  std::vector<double> spread, std::string grid)
      : ComputationError(what),
        best(std::move(best)),
        spread(std::move(spread)),
        grid(std::move(grid)) {}
  std::vector<double> best;
  std::vector<double> spread;
  std::string grid;
};

// A stability certificate (grid doubling, cutoff halving, ...) failed.
// `levels` holds the value lists of the compared levels.
class CertificateFailure : public ComputationError {
 public:
  CertificateFailure(const std::string& what,
                     std::vector<std::vector<double>> levels)
      : ComputationError(what), levels(std::move(levels)) {}
  std::vector<std::vector<double>> levels;
};

class BudgetExceeded : public ComputationError {
 public:
  using ComputationError::ComputationError;
};

}  // namespace cusp
