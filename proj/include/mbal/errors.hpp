#pragma once

#include <stdexcept>
#include <string>

namespace mbal {

// Base classes map one-to-one to CLI exit codes: validation -> 2,
// numerical -> 3, io -> 4.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class MissingColumn : public ValidationError {
 public:
  explicit MissingColumn(const std::string& name)
      : ValidationError("missing column: " + name) {}
};

class NonBinaryTreatment : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class NonNumericValue : public ValidationError {
 public:
  NonNumericValue(long row, const std::string& col)
      : ValidationError("non-numeric value at row " + std::to_string(row) +
                        ", column '" + col + "'"),
        row(row),
        column(col) {}
  long row;
  std::string column;
};

class EmptyGroup : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class GroupTooSmall : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class BandwidthUnresolvable : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class NotSymmetric : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class DimensionMismatch : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class ZeroDispersion : public ValidationError {
 public:
  explicit ZeroDispersion(long k)
      : ValidationError("zero dispersion with differing means for feature " +
                        std::to_string(k)),
        feature(k) {}
  long feature;
};

class WeightSumViolation : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class MissingOutcome : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class EmptyVector : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class UnknownScenario : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class FactorizationFailed : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class NumericalFailure : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class SolverFailure : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class Infeasible : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class AllSolvesFailed : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class TooManyFailedReplicates : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace mbal
