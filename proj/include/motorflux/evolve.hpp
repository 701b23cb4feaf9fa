#pragma once

#include <map>
#include <memory>
#include <vector>

#include "motorflux/discretize.hpp"
#include "motorflux/model.hpp"

namespace motorflux {

struct StepConfig {
  double dt = 0.01;
  double t_end = 1.0;
  int stride = 1;             // snapshot every `stride` steps (and at t_end)
  double solver_tol = 1e-12;  // relative residual for the 2-D Krylov solve
  int max_iterations = 2000;
};

void check_step_config(const StepConfig& cfg);

struct Diagnostics {
  double weighted_mass = 0.0;
  std::vector<double> min_value;  // per species
  std::vector<double> l1;         // per species, unweighted
};

Diagnostics diagnose(const State& state, const Eigen::VectorXd& alpha);

struct Snapshot {
  State state;
  Diagnostics diagnostics;
};

struct Trajectory {
  std::vector<Snapshot> snapshots;

  const State& final_state() const { return snapshots.back().state; }
  std::vector<double> times() const;
};

/// Solves (I - dt A) x = b. Sparse direct LU on 1-D grids, ILU-preconditioned
/// BiCGSTAB on 2-D grids. The direct path refines once against the
/// conservative evaluation of A (see apply_conservative); row_alpha holds the
/// per-row weights, empty for a single species.
class ImplicitSolver {
 public:
  ImplicitSolver(const SparseMatrix& generator, double dt, int grid_dim, double tol = 1e-12,
                 int max_iterations = 2000, Eigen::VectorXd row_alpha = {});
  ~ImplicitSolver();
  ImplicitSolver(ImplicitSolver&&) noexcept;
  ImplicitSolver& operator=(ImplicitSolver&&) noexcept;

  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const;
  double dt() const { return dt_; }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  double dt_;
};

/// Implicit Euler for the linear system; factorizations are cached per dt.
class LinearStepper {
 public:
  explicit LinearStepper(SystemOperator op, double tol = 1e-12, int max_iterations = 2000);

  State step(const State& state, double dt);
  const SystemOperator& op() const { return op_; }

 private:
  SystemOperator op_;
  double tol_;
  int max_iterations_;
  std::map<double, ImplicitSolver> solvers_;
};

State step_linear_implicit(const State& state, const SystemOperator& op, double dt);

/// Largest IMEX step keeping the explicit reaction stage nonnegative:
/// min_i 1 / (alpha_i |lambda_ii| Lip(r_i on [0, max u])).
double imex_dt_max(const State& state, const ProblemSpec& spec);

/// Explicit reaction stage: u_i + dt alpha_i sum_j lambda_ij r_j(u_j).
State reaction_stage(const State& state, const ProblemSpec& spec, double dt);

/// Explicit reactions followed by implicit transport, species by species.
class ImexStepper {
 public:
  ImexStepper(const ProblemSpec& spec, std::vector<TransportOperator> transport,
              double tol = 1e-12, int max_iterations = 2000);

  State step(const State& state, double dt);

 private:
  const ProblemSpec* spec_;
  std::vector<TransportOperator> transport_;
  double tol_;
  int max_iterations_;
  std::map<double, std::vector<ImplicitSolver>> solvers_;
};

State step_imex(const State& state, const ProblemSpec& spec,
                const std::vector<TransportOperator>& transport, double dt);

Trajectory run(const ProblemSpec& spec, const State& initial, const StepConfig& cfg);
Trajectory run(const ProblemSpec& spec, const StepConfig& cfg, std::uint64_t seed = 0);

}  // namespace motorflux
