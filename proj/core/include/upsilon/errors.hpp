#pragma once

#include <stdexcept>
#include <string>

namespace upsilon {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A point does not lie on the model surface of its space.
class InvalidPointError : public Error {
 public:
  using Error::Error;
};

/// An argument lies outside the domain of the operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Antipodal points on a sphere: the connecting geodesic is not unique.
class NonUniqueGeodesicError : public Error {
 public:
  using Error::Error;
};

/// Two configurations of different cardinality were asked to be matched.
class InfiniteDistanceError : public Error {
 public:
  using Error::Error;
};

/// Malformed input file or configuration document.
class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace upsilon
