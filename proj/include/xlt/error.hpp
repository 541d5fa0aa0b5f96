// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace xlt {

/// Tensor or batch dimensions disagree.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Input lies outside the mathematical domain of an operation (e.g. zero-norm cosine).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A documented precondition of an API was violated by the caller.
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// A file or document could not be parsed into the expected structure.
class LoadError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace xlt
