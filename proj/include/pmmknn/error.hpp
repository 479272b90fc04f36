#pragma once

#include <stdexcept>
#include <string>

namespace pmmknn {

// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Vector lengths disagree with each other or with a dataset.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// Invalid parameter (exponent sum of zero, r > n, folds < 2, ...).
class ParameterError : public Error {
 public:
  using Error::Error;
};

// Argument outside the mathematical domain of an operator.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Input too large for an exponential-time evaluator.
class SizeError : public Error {
 public:
  using Error::Error;
};

class LabelError : public Error {
 public:
  using Error::Error;
};

// Model cannot be built from the given training data.
class ModelError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Cross-validation failure, annotated with the fold that raised it.
class FoldError : public Error {
 public:
  FoldError(std::size_t fold, const std::string& what)
      : Error("fold " + std::to_string(fold) + ": " + what), fold_(fold) {}

  std::size_t fold() const noexcept { return fold_; }

 private:
  std::size_t fold_;
};

}  // namespace pmmknn
