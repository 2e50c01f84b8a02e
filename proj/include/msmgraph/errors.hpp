#pragma once

#include <stdexcept>
#include <string>

namespace msmgraph {

/// Input data that cannot be used: unreadable or malformed files,
/// zero-norm vectors, non-finite values.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// No parameter setting satisfies the requested constraints.
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace msmgraph
