#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "motorflux/cli/config.hpp"

namespace motorflux::cli {

/// Stable process exit codes.
enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 2,
  kExitInvariant = 3,
  kExitSolver = 4,
};

int exit_code_for(ErrorKind kind);

struct CommandOptions {
  std::optional<std::string> out_dir;  // overrides [output] dir
  std::optional<double> tol;           // steady: iteration tol; convergence: threshold
  std::uint64_t seed = 0;              // random initial data
  bool reversible = false;             // steady: constant pair of the reversible reaction
};

enum class Check { contraction, comparison, convergence, oracle };

const char* to_string(Check check);

int cmd_simulate(const RunConfig& cfg, const CommandOptions& opts, std::ostream& out,
                 std::ostream& err);
int cmd_steady(const RunConfig& cfg, const CommandOptions& opts, std::ostream& out,
               std::ostream& err);
int cmd_verify(const RunConfig& cfg, Check check, const CommandOptions& opts, std::ostream& out,
               std::ostream& err);

/// Parses the config at `config_path` and runs `command` (one of simulate,
/// steady, verify-contraction, verify-comparison, verify-convergence,
/// oracle-compare), mapping errors to exit codes.
int dispatch(const std::string& command, const std::string& config_path,
             const CommandOptions& opts, std::ostream& out, std::ostream& err);

}  // namespace motorflux::cli
