#pragma once

#include <stdexcept>
#include <string>

namespace dixmier {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Requested index lies beyond explicit data and no exact law covers it.
class InsufficientSpectralData : public Error {
 public:
  using Error::Error;
};

/// A bounded sequence ran out of stored entries.
class InsufficientSequenceData : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

/// Invalid operator data: non-monotone, non-positive inside a law, ...
class InvalidSpectralData : public Error {
 public:
  using Error::Error;
};

class UnachievableTolerance : public Error {
 public:
  UnachievableTolerance(const std::string& what, double best_bound)
      : Error(what), best_bound_(best_bound) {}
  [[nodiscard]] double best_bound() const noexcept { return best_bound_; }

 private:
  double best_bound_;
};

class RouteUnavailable : public Error {
 public:
  using Error::Error;
};

class IllPosed : public Error {
 public:
  using Error::Error;
};

class NonMonotoneChain : public Error {
 public:
  using Error::Error;
};

class ThetaMismatch : public Error {
 public:
  using Error::Error;
};

class IncomparableProfiles : public Error {
 public:
  using Error::Error;
};

/// Malformed user input; `field` names the offending JSON field or flag.
class ParseError : public Error {
 public:
  ParseError(const std::string& field, const std::string& what)
      : Error(field + ": " + what), field_(field) {}
  [[nodiscard]] const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

}  // namespace dixmier
