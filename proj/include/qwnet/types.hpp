#pragma once

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>

namespace qwnet {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

// Node and edge ids are 1-based and contiguous.
using NodeId = int;
using EdgeId = int;

inline constexpr double kUnitarityTol = 1e-12;

// Base of every error thrown by the library. The CLI maps the subclasses to
// exit codes: validation-type errors exit with 2, numerical ones with 3.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

class ParseError : public ValidationError {
 public:
  ParseError(const std::string& message, int line, int column);
  int line() const { return line_; }
  int column() const { return column_; }
  const std::string& detail() const { return detail_; }

 private:
  int line_;
  int column_;
  std::string detail_;
};

// Raised when assembly is requested on a graph whose activation dynamics
// would make the in-step factor order ambiguous.
class HazardError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

class SingularSystemError : public NumericalError {
 public:
  SingularSystemError(const std::string& message, double condition)
      : NumericalError(message), condition_(condition) {}
  double condition() const { return condition_; }

 private:
  double condition_;
};

class ConvergenceError : public NumericalError {
 public:
  ConvergenceError(const std::string& message, int steps, double last_delta)
      : NumericalError(message), steps_(steps), last_delta_(last_delta) {}
  int steps() const { return steps_; }
  double last_delta() const { return last_delta_; }

 private:
  int steps_;
  double last_delta_;
};

// Resonant denominator in a star product; index() is the position in a chain
// of the right-hand factor that triggered it (0 for a plain pairwise product).
class ResonanceError : public NumericalError {
 public:
  ResonanceError(const std::string& message, std::size_t index)
      : NumericalError(message), index_(index) {}
  std::size_t index() const { return index_; }

 private:
  std::size_t index_;
};

/// Largest entry of |U^H U - I|.
double unitarity_defect(const CMatrix& u);

bool all_finite(const CMatrix& m);

}  // namespace qwnet
