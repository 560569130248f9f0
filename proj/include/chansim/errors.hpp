#pragma once

#include <stdexcept>
#include <string>

namespace chansim {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Operands live on different alphabets.
class AlphabetMismatchError : public Error {
 public:
  using Error::Error;
};

// Problem size exceeds an enumeration or memory cap.
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

// An iterative solver exhausted its budget before reaching tolerance.
// Carries the best duality gap (or bracketing width) achieved.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double best_gap)
      : Error(what), best_gap_(best_gap) {}
  double best_gap() const noexcept { return best_gap_; }

 private:
  double best_gap_;
};

// A hard lower-bound audit failed.
class GateViolationError : public Error {
 public:
  using Error::Error;
};

}  // namespace chansim
