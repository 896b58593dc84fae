#pragma once

#include <stdexcept>
#include <string>

namespace gcurv {

enum class ErrorKind {
  Parameter,          // argument outside the admissible range
  Domain,             // query outside a sampled domain
  NumericTolerance,   // quadrature refinement did not settle
  NonConvergence,     // fixed-point iteration diverged or stalled
  Contract,           // caller broke a documented precondition
  Config,             // malformed experiment configuration
  Normalization,      // curvature integral zero or not finite
  IllConditionedTail, // fitted tail exponents are not monotone in alpha
  Integration,        // ODE integration failed (blow-up, step underflow)
  Range,              // bracket search exhausted
  Io,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Exit / status class of an error kind: 2 contract, 3 nonconvergence, 4 config.
int status_class(ErrorKind kind);

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

}  // namespace gcurv
