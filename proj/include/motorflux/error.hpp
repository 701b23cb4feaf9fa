#pragma once

#include <stdexcept>
#include <string>

namespace motorflux {

enum class ErrorKind {
  config,           // malformed or inadmissible input
  domain,           // argument outside the domain of a function
  dimension,        // shape mismatch between states or operators
  scaling,          // exponential gauge factor would overflow
  unsupported,      // valid input that the requested operation cannot handle
  step_size,        // time step violates the positivity bound
  solver,           // linear solver breakdown
  non_convergence,  // iteration cap exceeded
  irreducible,      // operator is not irreducible
  degenerate_data,  // e.g. zero initial mass
  oracle_scope,     // dense oracle size cap exceeded
  invariant,        // internal invariant trapped
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace motorflux
