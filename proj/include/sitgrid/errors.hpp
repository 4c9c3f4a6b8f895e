#pragma once

#include <stdexcept>
#include <string>

namespace sitgrid {

/// Root of the library's exception hierarchy.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed user input: bad configs, invalid specs. CLI exit code 1.
class UsageError : public Error {
 public:
  using Error::Error;
};

/// Malformed or inconsistent data: files, schemas, label sets. CLI exit code 2.
class DataError : public Error {
 public:
  using Error::Error;
};

/// A pipeline stage failed mid-run. CLI exit code 3.
class StageError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public UsageError {
 public:
  using UsageError::UsageError;
};

class SpecError : public UsageError {
 public:
  using UsageError::UsageError;
};

class ParseError : public DataError {
 public:
  using DataError::DataError;
};

class SchemaMismatch : public DataError {
 public:
  using DataError::DataError;
};

class InvariantViolation : public DataError {
 public:
  using DataError::DataError;
};

class IoError : public DataError {
 public:
  using DataError::DataError;
};

class NonZeroUnoccupiedCell : public DataError {
 public:
  using DataError::DataError;
};

class VariantError : public DataError {
 public:
  using DataError::DataError;
};

class MissingTimestamp : public DataError {
 public:
  using DataError::DataError;
};

class NoRowsForBaseline : public DataError {
 public:
  using DataError::DataError;
};

class DegenerateLabels : public DataError {
 public:
  using DataError::DataError;
};

class NonFiniteInput : public DataError {
 public:
  using DataError::DataError;
};

class FeatureMismatch : public DataError {
 public:
  using DataError::DataError;
};

class LengthMismatch : public DataError {
 public:
  using DataError::DataError;
};

class MissingFeature : public DataError {
 public:
  using DataError::DataError;
};

class TooFewRows : public DataError {
 public:
  using DataError::DataError;
};

class GroupLargerThanFold : public DataError {
 public:
  using DataError::DataError;
};

class CorruptModel : public DataError {
 public:
  using DataError::DataError;
};

class FormatVersionMismatch : public DataError {
 public:
  using DataError::DataError;
};

}  // namespace sitgrid
