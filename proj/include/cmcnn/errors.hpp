#pragma once

#include <stdexcept>
#include <string>

namespace cmcnn {

/// Base class for every error raised by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Tensor/batch dimensions do not match what a model expects.
struct ShapeError : Error {
  using Error::Error;
};

/// Genome length disagrees with the architecture's layer count.
struct GenomeArityError : Error {
  using Error::Error;
};

/// A class label lies outside [0, num_classes).
struct LabelError : Error {
  using Error::Error;
};

/// Dataset-level problem (empty set, count mismatch, corrupt record).
struct DataError : Error {
  using Error::Error;
};

/// A record's content violates the wire format (e.g. label byte > 9).
struct CorruptionError : DataError {
  using DataError::DataError;
};

/// A file does not match its declared binary/text format or version.
struct FormatError : Error {
  using Error::Error;
};

/// Invalid inputs to a metric (length mismatch, empty confusion matrix).
struct MetricInputError : Error {
  using Error::Error;
};

/// A scalar argument is outside its mathematical domain.
struct DomainError : Error {
  using Error::Error;
};

/// An index such as a mutation point is out of range.
struct IndexError : Error {
  using Error::Error;
};

/// Invalid crossover request (unequal parents, bad crossover point).
struct CrossoverError : Error {
  using Error::Error;
};

/// Invalid configuration value or combination.
struct ConfigError : Error {
  using Error::Error;
};

/// Requested dataset slice is out of range.
struct PartitionError : Error {
  using Error::Error;
};

/// A report was asked for data that is not present.
struct ReportingError : Error {
  using Error::Error;
};

/// Exhaustive enumeration refused: the space exceeds the configured cap.
struct SearchSpaceError : Error {
  using Error::Error;
};

/// A forward/backward/training pass produced a non-finite value.
struct NumericError : Error {
  using Error::Error;
};

/// Short machine-readable tag for an exception, used in CLI diagnostics.
std::string errorKind(const std::exception& e);

}  // namespace cmcnn
