#pragma once

#include <stdexcept>
#include <string>

namespace fairal {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Tensor dimension mismatch.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// Invalid configuration value (bad rate, bad JSON key, ...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Out-of-range class label or index.
class IndexError : public Error {
 public:
  using Error::Error;
};

/// Non-finite loss/gradient or other failure during optimization.
class TrainingError : public Error {
 public:
  using Error::Error;
};

/// Metric requested on a batch where it is undefined (e.g. an empty group).
class MetricError : public Error {
 public:
  using Error::Error;
};

/// Pool/test partition cannot be satisfied by the dataset.
class PartitionError : public Error {
 public:
  using Error::Error;
};

/// Dataset generation failed (degenerate realization after retries).
class DataError : public Error {
 public:
  using Error::Error;
};

/// File read/write failure.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace fairal
