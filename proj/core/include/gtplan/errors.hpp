#pragma once

#include <stdexcept>
#include <string>

namespace gtplan {

/// Malformed or schema-violating input document.
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Problem instance exceeds a configured enumeration cap.
struct InfeasibleError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// The planner cannot produce any safe plan from the given state.
struct RefusePlanError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace gtplan
