#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace nhim {

/// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Config or expression text rejected; carries the source position.
struct ParseError : Error {
  int line;
  int column;
  ParseError(const std::string& msg, int line_ = 0, int column_ = 0)
      : Error(prefix(msg, line_, column_)), line(line_), column(column_) {}

 private:
  static std::string prefix(const std::string& msg, int line_, int column_) {
    if (line_ <= 0) return msg;
    std::string p = "line " + std::to_string(line_);
    if (column_ > 0) p += ", col " + std::to_string(column_);
    return p + ": " + msg;
  }
};

/// An expression produced a non-finite value.
struct EvalError : Error {
  using Error::Error;
};

/// Integration state became non-finite.
struct IntegrationError : Error {
  double time;
  IntegrationError(const std::string& msg, double t)
      : Error(msg + " at t = " + std::to_string(t)), time(t) {}
};

/// An iterate left the admissible neighborhood of the zero section.
struct AdmissibilityError : Error {
  using Error::Error;
};

/// Fixed-point iteration did not converge within the iteration budget.
struct ConvergenceError : Error {
  std::vector<double> distance_history;
  ConvergenceError(const std::string& msg, std::vector<double> history)
      : Error(msg), distance_history(std::move(history)) {}
};

struct NodeFailure {
  std::vector<double> node;
  std::string message;
};

/// One or more grid nodes failed during a manifold solve.
struct SolveError : Error {
  std::vector<NodeFailure> failures;
  SolveError(const std::string& msg, std::vector<NodeFailure> f)
      : Error(msg), failures(std::move(f)) {}
};

}  // namespace nhim
