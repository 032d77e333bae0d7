#pragma once

#include <stdexcept>
#include <string>

namespace refmon {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UnknownElement : public Error {
 public:
  using Error::Error;
};

class NotMaximal : public Error {
 public:
  using Error::Error;
};

class NotLowerSet : public Error {
 public:
  using Error::Error;
};

class BadProjection : public Error {
 public:
  using Error::Error;
};

class InvalidPair : public Error {
 public:
  using Error::Error;
};

class InvalidSystem : public Error {
 public:
  using Error::Error;
};

class BadCoordinate : public Error {
 public:
  using Error::Error;
};

class PreconditionViolated : public Error {
 public:
  using Error::Error;
};

class NotChainUp : public Error {
 public:
  using Error::Error;
};

class NoValidStep : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

/// Raised when a search exhausts its node budget. Never conflated with "no solution".
class ResourceLimit : public Error {
 public:
  using Error::Error;
};

/// A proven invariant failed at runtime; indicates a bug, not bad input.
class InternalInvariantViolation : public Error {
 public:
  using Error::Error;
};

}  // namespace refmon
