#pragma once

#include <stdexcept>
#include <string>

namespace rbs {

// Malformed input file; message carries the line number.
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// An oracle call would exceed the session's query budget.
struct BudgetExceededError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Operation invoked on an object in an unusable state (e.g. empty graph).
struct InvalidStateError : std::logic_error {
  using std::logic_error::logic_error;
};

// Input exceeds a configured size cap.
struct TooLargeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Canonical-labeling search exceeded its node budget. Never a wrong answer:
// the caller gets this instead of an unverified certificate.
struct CanonSearchBudgetError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Training loss became non-finite.
struct DivergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace rbs
