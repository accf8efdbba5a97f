#ifndef NZSG_ERRORS_H_
#define NZSG_ERRORS_H_

#include <stdexcept>
#include <string>

namespace nzsg {

// Shape mismatch between a profile, vector or matrix and the game it is used
// with.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Player index outside [0, n).
class PlayerIndexError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

// Invalid game construction (self-loops, duplicate edges, bad dims, failed
// zero-sum gate).
class ConstructionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Bad experiment / dynamics configuration, or a theorem was asked for a
// constant the game does not provide.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A documented precondition failed at run time (e.g. singular Schur block).
class PreconditionError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Dense eigen/SVD solver did not converge. Carries a plain-text dump of the
// offending matrix.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, std::string matrix_dump)
      : std::runtime_error(what), matrix_dump_(std::move(matrix_dump)) {}

  const std::string& matrix_dump() const { return matrix_dump_; }

 private:
  std::string matrix_dump_;
};

}  // namespace nzsg

#endif  // NZSG_ERRORS_H_
