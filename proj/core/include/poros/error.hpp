#pragma once

#include <stdexcept>
#include <string>

namespace poros {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An operation was called outside its documented domain.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// A query reached above the largest represented scale of a set.
class OutsideWindowError : public Error {
 public:
  using Error::Error;
};

/// A JSON descriptor or config did not match its schema. The message starts
/// with the offending field path (e.g. "$.partition.classes[2]").
class SchemaError : public Error {
 public:
  using Error::Error;
};

/// A distance oracle violated d(x,x)=0, symmetry or the triangle inequality.
class MetricAxiomError : public Error {
 public:
  using Error::Error;
};

/// Refinement or quotient construction could not be completed.
class ConstructionError : public Error {
 public:
  using Error::Error;
};

/// A file could not be read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace poros
