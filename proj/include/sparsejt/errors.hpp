#pragma once

#include <stdexcept>
#include <string>

namespace sjt {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or truncated input text (UAI network, evidence file).
class ParseError : public Error {
 public:
  using Error::Error;
};

/// A value, id or argument outside its valid range.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Evidence (or the model itself) has zero probability.
class InconsistentEvidence : public Error {
 public:
  using Error::Error;
};

/// A dense table would exceed the configured memory cap.
class ResourceLimit : public Error {
 public:
  using Error::Error;
};

/// The inference deadline passed.
class Timeout : public Error {
 public:
  using Error::Error;
};

/// A fractional edge-cover LP with a variable that no edge covers.
class InfeasibleCover : public Error {
 public:
  using Error::Error;
};

/// A mixed-radix index does not fit into 64 bits.
class IndexOverflow : public Error {
 public:
  using Error::Error;
};

}  // namespace sjt
