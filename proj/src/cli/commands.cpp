#include "motorflux/cli/commands.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>

#include <json.hpp>

#include "motorflux/cli/format.hpp"
#include "motorflux/discretize.hpp"
#include "motorflux/evolve.hpp"
#include "motorflux/steady.hpp"
#include "motorflux/verify.hpp"

namespace motorflux::cli {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

constexpr double kManifestMassTolerance = 1e-11;
constexpr std::uint64_t kSecondDatumSeedOffset = 7919;

fs::path prepare_out_dir(const RunConfig& cfg, const CommandOptions& opts) {
  const fs::path dir = opts.out_dir.value_or(cfg.out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::config, "cannot create output directory " + dir.string());
  std::ofstream echo(dir / "effective_config.ini");
  RunConfig effective = cfg;
  effective.out_dir = dir.string();
  write_effective_config(echo, effective);
  return dir;
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream os(path);
  if (!os) throw Error(ErrorKind::config, "cannot write " + path.string());
  return os;
}

State second_datum(const RunConfig& cfg, const CommandOptions& opts, const char* check) {
  if (!cfg.initial_b) {
    throw Error(ErrorKind::config,
                std::string(check) + " needs a second initial datum (initial_b.* keys)");
  }
  ProblemSpec other = cfg.spec;
  other.initial = *cfg.initial_b;
  return initial_state(other, opts.seed + kSecondDatumSeedOffset);
}

StationaryState linear_stationary(const RunConfig& cfg, const CommandOptions& opts) {
  NullVectorOptions nv = cfg.steady;
  if (opts.tol) nv.tol = *opts.tol;
  return solve_null_vector(assemble_system(cfg.spec), nv);
}

}  // namespace

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invariant:
      return kExitInvariant;
    case ErrorKind::solver:
    case ErrorKind::non_convergence:
    case ErrorKind::irreducible:
      return kExitSolver;
    default:
      return kExitConfig;
  }
}

const char* to_string(Check check) {
  switch (check) {
    case Check::contraction: return "contraction";
    case Check::comparison: return "comparison";
    case Check::convergence: return "convergence";
    case Check::oracle: return "oracle";
  }
  return "unknown";
}

int cmd_simulate(const RunConfig& cfg, const CommandOptions& opts, std::ostream& out,
                 std::ostream& err) {
  const fs::path dir = prepare_out_dir(cfg, opts);
  const Trajectory traj = run(cfg.spec, initial_state(cfg.spec, opts.seed), cfg.time);

  std::ofstream manifest = open_output(dir / "manifest.ndjson");
  const double mass0 = traj.snapshots.front().diagnostics.weighted_mass;
  double drift = 0.0;
  for (std::size_t k = 0; k < traj.snapshots.size(); ++k) {
    const Snapshot& snap = traj.snapshots[k];
    const std::string name =
        "snapshot_" + std::to_string(k) + "_t" + format_double(snap.state.time) + ".csv";
    std::ofstream csv = open_output(dir / name);
    write_state_csv(csv, snap.state);

    ordered_json rec;
    rec["index"] = k;
    rec["time"] = snap.state.time;
    rec["file"] = name;
    rec["weighted_mass"] = snap.diagnostics.weighted_mass;
    rec["l1"] = snap.diagnostics.l1;
    rec["min"] = snap.diagnostics.min_value;
    manifest << rec.dump() << '\n';
    drift = std::max(drift, std::abs(snap.diagnostics.weighted_mass - mass0));
  }
  manifest.close();

  const double allowed = kManifestMassTolerance * std::max(std::abs(mass0), 1e-300);
  out << "wrote " << traj.snapshots.size() << " snapshots to " << dir.string() << '\n';
  if (drift > allowed && drift > 0.0) {
    err << "weighted mass drift " << format_double(drift) << " exceeds "
        << format_double(allowed) << '\n';
    return kExitInvariant;
  }
  return kExitOk;
}

int cmd_steady(const RunConfig& cfg, const CommandOptions& opts, std::ostream& out,
               std::ostream&) {
  const fs::path dir = prepare_out_dir(cfg, opts);
  if (opts.reversible) {
    const State u0 = initial_state(cfg.spec, opts.seed);
    const State target = reversible_target(u0, cfg.spec);
    const double mass = weighted_mass(u0, cfg.spec) / cfg.spec.grid.total_volume();
    const double a = target.field(0)[0];
    const double b = target.field(1)[0];
    const double residual =
        a / cfg.spec.species[0].alpha + b / cfg.spec.species[1].alpha - mass;
    ordered_json rec;
    rec["a"] = a;
    rec["b"] = b;
    rec["mass"] = mass;
    rec["mass_residual"] = residual;
    std::ofstream os = open_output(dir / "reversible_pair.ndjson");
    os << rec.dump() << '\n';
    std::ofstream csv = open_output(dir / "steady.csv");
    write_state_csv(csv, target);
    char line[128];
    std::snprintf(line, sizeof line, "a=%.12g b=%.12g", a, b);
    out << line << '\n';
    return kExitOk;
  }

  const SystemOperator op = assemble_system(cfg.spec);
  NullVectorOptions nv = cfg.steady;
  if (opts.tol) nv.tol = *opts.tol;
  const StationaryState v = solve_null_vector(op, nv);
  std::ofstream csv = open_output(dir / "steady.csv");
  write_state_csv(csv, v.state);
  ordered_json rec;
  rec["residual"] = v.residual;
  rec["normalization"] = to_string(v.normalization);
  rec["normalization_value"] = v.normalization_value;
  rec["iterations"] = v.iterations;
  rec["adjoint_check"] = adjoint_null_check(op);
  std::ofstream os = open_output(dir / "steady.ndjson");
  os << rec.dump() << '\n';
  out << "stationary state: residual " << format_double(v.residual) << ", normalization "
      << to_string(v.normalization) << ", " << v.iterations << " iterations\n";
  return kExitOk;
}

int cmd_verify(const RunConfig& cfg, Check check, const CommandOptions& opts, std::ostream& out,
               std::ostream& err) {
  const fs::path dir = prepare_out_dir(cfg, opts);
  const State u0 = initial_state(cfg.spec, opts.seed);
  CheckReport report;
  switch (check) {
    case Check::contraction:
      report = check_contraction(cfg.spec, u0, second_datum(cfg, opts, "contraction"), cfg.time)
                   .report;
      break;
    case Check::comparison:
      // initial_b is the lower datum
      report = check_comparison(cfg.spec, second_datum(cfg, opts, "comparison"), u0, cfg.time);
      break;
    case Check::convergence: {
      State target = cfg.spec.all_linear()
                         ? project_onto_ray(u0, StationaryRay{linear_stationary(cfg, {})}, cfg.spec)
                               .state.state
                         : reversible_target(u0, cfg.spec);
      report = check_convergence(cfg.spec, u0, cfg.time, target, opts.tol.value_or(cfg.threshold));
      break;
    }
    case Check::oracle:
      report = oracle_compare(cfg.spec, u0, cfg.time, cfg.oracle_t);
      break;
  }
  std::ofstream os = open_output(dir / (std::string(to_string(check)) + ".ndjson"));
  os << to_ndjson(report) << '\n';
  const Criterion& w = report.worst();
  out << report.name << ": " << (report.pass ? "pass" : "FAIL") << " (worst " << w.name << " "
      << format_double(w.worst) << " vs tolerance " << format_double(w.tolerance) << ")\n";
  for (const auto& [key, value] : report.values) {
    out << "  " << key << " = " << format_double(value) << '\n';
  }
  if (!report.pass) {
    err << "check failed at t=" << format_double(w.time) << '\n';
    return kExitInvariant;
  }
  return kExitOk;
}

int dispatch(const std::string& command, const std::string& config_path,
             const CommandOptions& opts, std::ostream& out, std::ostream& err) {
  try {
    const RunConfig cfg = parse_config(config_path);
    for (const auto& w : validate(cfg.spec).warnings) err << "warning: " << w << '\n';
    if (command == "simulate") return cmd_simulate(cfg, opts, out, err);
    if (command == "steady") return cmd_steady(cfg, opts, out, err);
    if (command == "verify-contraction") return cmd_verify(cfg, Check::contraction, opts, out, err);
    if (command == "verify-comparison") return cmd_verify(cfg, Check::comparison, opts, out, err);
    if (command == "verify-convergence") {
      return cmd_verify(cfg, Check::convergence, opts, out, err);
    }
    if (command == "oracle-compare") return cmd_verify(cfg, Check::oracle, opts, out, err);
    err << "unknown command '" << command << "'\n";
    return kExitConfig;
  } catch (const Error& e) {
    err << "error (" << to_string(e.kind()) << "): " << e.what() << '\n';
    return exit_code_for(e.kind());
  }
}

}  // namespace motorflux::cli
