#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace graphost {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A metric that is mathematically undefined for the given input
/// (homophily degree of an edgeless graph, ROC-AUC with one class, ...).
class UndefinedMetricError : public Error {
 public:
  using Error::Error;
};

/// Malformed input text. `location()` is a 1-based line number for
/// line-oriented formats and a byte offset for JSON.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t location)
      : Error(what), location_(location) {}
  std::size_t location() const noexcept { return location_; }

 private:
  std::size_t location_;
};

/// Edge training set with only one of {homophilic, heterophilic} present.
class DegenerateEdgeClassesError : public Error {
 public:
  using Error::Error;
};

/// Loss became NaN/Inf during optimisation.
class TrainingDivergedError : public Error {
 public:
  using Error::Error;
};

}  // namespace graphost
