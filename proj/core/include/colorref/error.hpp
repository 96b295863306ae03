#pragma once

#include <stdexcept>
#include <string>

namespace colorref {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A caller broke a documented precondition (bad argument, wrong state).
class ContractError : public Error {
 public:
  using Error::Error;
};

/// Tensor shapes did not line up. `node()` names the offending graph node.
class ShapeError : public ContractError {
 public:
  ShapeError(std::string node, const std::string& detail)
      : ContractError("shape mismatch at node '" + node + "': " + detail), node_(std::move(node)) {}
  const std::string& node() const noexcept { return node_; }

 private:
  std::string node_;
};

/// NaN/Inf appeared in a value, gradient, or loss.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Malformed or inconsistent input data (corpus rows, checkpoints, configs).
class DataError : public Error {
 public:
  using Error::Error;
};

}  // namespace colorref
