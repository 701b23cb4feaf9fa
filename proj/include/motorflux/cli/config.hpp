#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "motorflux/evolve.hpp"
#include "motorflux/model.hpp"
#include "motorflux/steady.hpp"

namespace motorflux::cli {

struct RunConfig {
  ProblemSpec spec;
  /// Second initial datum (initial_b.*), used by the two-trajectory checks.
  std::optional<std::vector<InitialSpec>> initial_b;
  StepConfig time;
  std::string out_dir = "motorflux_out";
  NullVectorOptions steady;
  double threshold = 1e-6;  // verify-convergence target distance
  double oracle_t = 1.0;    // oracle-compare horizon
};

/// Parses an INI-style run configuration. Unknown sections or keys, missing
/// required keys and malformed values raise ErrorKind::config; so does a
/// problem that fails validate().
RunConfig parse_config(const std::string& path);
RunConfig parse_config(std::istream& in, const std::string& origin = "<stream>");

/// Every setting, defaults included, in the same format parse_config reads.
void write_effective_config(std::ostream& os, const RunConfig& cfg);

}  // namespace motorflux::cli
