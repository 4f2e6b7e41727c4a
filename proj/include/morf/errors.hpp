#pragma once

#include <stdexcept>
#include <string>

namespace morf {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Frame or grid too small for the requested operation.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Inconsistent shapes between related containers.
class StructureError : public Error {
 public:
  using Error::Error;
};

class SequenceError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Onset/apex indices that do not fit the sequence.
class AnnotationError : public Error {
 public:
  using Error::Error;
};

/// Manifest content violating a dataset invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

class RangeError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class TrainingError : public Error {
 public:
  using Error::Error;
};

/// Feature vector length does not match the model.
class FeatureError : public Error {
 public:
  using Error::Error;
};

class SplitError : public Error {
 public:
  using Error::Error;
};

/// Invalid synthetic stimulus description.
class SpecError : public Error {
 public:
  using Error::Error;
};

}  // namespace morf
