#include "motorflux/evolve.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseLU>

#include "motorflux/concurrency.hpp"

namespace motorflux {

namespace {

constexpr double kNegativeTrap = -1e-13;

SparseMatrix identity_minus(const SparseMatrix& a, double dt) {
  SparseMatrix id(a.rows(), a.cols());
  id.setIdentity();
  SparseMatrix m = id - dt * a;
  m.makeCompressed();
  return m;
}

std::string at_time(double t) {
  std::ostringstream os;
  os.precision(17);
  os << " (at t=" << t << ")";
  return os.str();
}

}  // namespace

void check_step_config(const StepConfig& cfg) {
  if (!(cfg.dt > 0.0) || !std::isfinite(cfg.dt)) throw Error(ErrorKind::config, "dt must be > 0");
  if (!(cfg.t_end >= 0.0) || !std::isfinite(cfg.t_end)) {
    throw Error(ErrorKind::config, "t_end must be >= 0");
  }
  if (cfg.stride < 1) throw Error(ErrorKind::config, "stride must be >= 1");
  if (!(cfg.solver_tol > 0.0)) throw Error(ErrorKind::config, "solver tolerance must be > 0");
  if (cfg.max_iterations < 1) throw Error(ErrorKind::config, "iteration cap must be >= 1");
}

Diagnostics diagnose(const State& state, const Eigen::VectorXd& alpha) {
  Diagnostics d;
  const double vol = state.grid.cell_volume();
  for (int i = 0; i < state.species; ++i) {
    const auto f = state.field(i);
    const double mass = vol * f.sum();
    d.weighted_mass += mass / alpha[i];
    d.min_value.push_back(f.minCoeff());
    d.l1.push_back(vol * f.cwiseAbs().sum());
  }
  return d;
}

std::vector<double> Trajectory::times() const {
  std::vector<double> t;
  t.reserve(snapshots.size());
  for (const auto& s : snapshots) t.push_back(s.state.time);
  return t;
}

struct ImplicitSolver::Impl {
  SparseMatrix matrix;
  SparseMatrix generator;
  Eigen::VectorXd row_alpha;
  Eigen::SparseLU<SparseMatrix> lu;
  Eigen::BiCGSTAB<SparseMatrix, Eigen::IncompleteLUT<double>> krylov;
  bool direct = true;
};

ImplicitSolver::ImplicitSolver(const SparseMatrix& generator, double dt, int grid_dim,
                               double tol, int max_iterations, Eigen::VectorXd row_alpha)
    : impl_(std::make_unique<Impl>()), dt_(dt) {
  impl_->matrix = identity_minus(generator, dt);
  impl_->generator = generator;
  impl_->row_alpha = std::move(row_alpha);
  impl_->direct = grid_dim == 1;
  if (impl_->direct) {
    impl_->lu.analyzePattern(impl_->matrix);
    impl_->lu.factorize(impl_->matrix);
    if (impl_->lu.info() != Eigen::Success) {
      throw Error(ErrorKind::solver, "LU factorization of I - dt A failed: " +
                                         impl_->lu.lastErrorMessage());
    }
  } else {
    impl_->krylov.setTolerance(tol);
    impl_->krylov.setMaxIterations(max_iterations);
    impl_->krylov.preconditioner().setDroptol(1e-6);
    impl_->krylov.compute(impl_->matrix);
    if (impl_->krylov.info() != Eigen::Success) {
      throw Error(ErrorKind::solver, "ILU preconditioner setup failed");
    }
  }
}

ImplicitSolver::~ImplicitSolver() = default;
ImplicitSolver::ImplicitSolver(ImplicitSolver&&) noexcept = default;
ImplicitSolver& ImplicitSolver::operator=(ImplicitSolver&&) noexcept = default;

Eigen::VectorXd ImplicitSolver::solve(const Eigen::VectorXd& rhs) const {
  if (impl_->direct) {
    Eigen::VectorXd x = impl_->lu.solve(rhs);
    // one refinement step; the residual uses transfer form so the stored
    // diagonal's rounding does not bias the mass
    const Eigen::VectorXd ax = apply_conservative(impl_->generator, impl_->row_alpha, x);
    const Eigen::VectorXd r = rhs - (x - dt_ * ax);
    x += impl_->lu.solve(r);
    return x;
  }
  Eigen::VectorXd x = impl_->krylov.solveWithGuess(rhs, rhs);
  if (impl_->krylov.info() != Eigen::Success) {
    std::ostringstream os;
    os << "BiCGSTAB did not converge: relative residual " << impl_->krylov.error() << " after "
       << impl_->krylov.iterations() << " iterations";
    throw Error(ErrorKind::solver, os.str());
  }
  return x;
}

LinearStepper::LinearStepper(SystemOperator op, double tol, int max_iterations)
    : op_(std::move(op)), tol_(tol), max_iterations_(max_iterations) {}

State LinearStepper::step(const State& state, double dt) {
  if (state.values.size() != op_.matrix.rows()) {
    throw Error(ErrorKind::dimension, "state does not match the system operator");
  }
  auto it = solvers_.find(dt);
  if (it == solvers_.end()) {
    it = solvers_.emplace(dt, ImplicitSolver(op_.matrix, dt, op_.grid.dim(), tol_,
                                             max_iterations_, row_alpha(op_))).first;
  }
  State next = state;
  next.values = it->second.solve(state.values);
  next.time = state.time + dt;
  return next;
}

State step_linear_implicit(const State& state, const SystemOperator& op, double dt) {
  LinearStepper stepper(op);
  return stepper.step(state, dt);
}

double imex_dt_max(const State& state, const ProblemSpec& spec) {
  const double u_max = std::max(state.values.size() ? state.values.maxCoeff() : 0.0, 0.0);
  double dt_max = std::numeric_limits<double>::infinity();
  for (int i = 0; i < spec.n(); ++i) {
    const double rate = spec.species[i].alpha * std::abs(spec.coupling.lambda(i, i)) *
                        reaction_lipschitz(spec.species[i].reaction, u_max);
    if (rate > 0.0) dt_max = std::min(dt_max, 1.0 / rate);
  }
  return dt_max;
}

State reaction_stage(const State& state, const ProblemSpec& spec, double dt) {
  const int n = spec.n();
  const int cells = state.cells();
  Eigen::MatrixXd rates(cells, n);
  for (int j = 0; j < n; ++j) {
    const auto f = state.field(j);
    for (int c = 0; c < cells; ++c) {
      const double u = f[c];
      if (u < kNegativeTrap) {
        throw Error(ErrorKind::invariant, "negative density entering the reaction stage");
      }
      rates(c, j) = eval_reaction(spec.species[j].reaction, std::max(u, 0.0));
    }
  }
  State out = state;
  for (int i = 0; i < n; ++i) {
    const double a = spec.species[i].alpha;
    Eigen::VectorXd source = Eigen::VectorXd::Zero(cells);
    for (int j = 0; j < n; ++j) {
      const double lam = spec.coupling.lambda(i, j);
      if (lam != 0.0) source += lam * rates.col(j);
    }
    out.field(i) += dt * a * source;
  }
  return out;
}

ImexStepper::ImexStepper(const ProblemSpec& spec, std::vector<TransportOperator> transport,
                         double tol, int max_iterations)
    : spec_(&spec), transport_(std::move(transport)), tol_(tol), max_iterations_(max_iterations) {
  if (static_cast<int>(transport_.size()) != spec.n()) {
    throw Error(ErrorKind::dimension, "one transport operator per species is required");
  }
}

State ImexStepper::step(const State& state, double dt) {
  const ProblemSpec& spec = *spec_;
  const double dt_max = imex_dt_max(state, spec);
  if (dt > dt_max * (1.0 + 1e-12)) {
    std::ostringstream os;
    os.precision(17);
    os << "IMEX step " << dt << " exceeds the positivity bound dt_max=" << dt_max;
    throw Error(ErrorKind::step_size, os.str());
  }
  State mid = reaction_stage(state, spec, dt);
  if (mid.values.size() && mid.values.minCoeff() < kNegativeTrap) {
    throw Error(ErrorKind::invariant, "reaction stage produced a negative density");
  }

  auto it = solvers_.find(dt);
  if (it == solvers_.end()) {
    std::vector<ImplicitSolver> per_species;
    for (const auto& op : transport_) {
      per_species.emplace_back(op.matrix, dt, op.grid.dim(), tol_, max_iterations_);
    }
    it = solvers_.emplace(dt, std::move(per_species)).first;
  }
  const auto& solvers = it->second;
  State next = mid;
  auto solve_species = [&](int i) { next.field(i) = solvers[i].solve(mid.field(i)); };
  if (static_cast<long>(state.values.size()) >= 20000) {
    parallel_for(spec.n(), solve_species);
  } else {
    for (int i = 0; i < spec.n(); ++i) solve_species(i);
  }
  next.time = state.time + dt;
  return next;
}

State step_imex(const State& state, const ProblemSpec& spec,
                const std::vector<TransportOperator>& transport, double dt) {
  ImexStepper stepper(spec, transport);
  return stepper.step(state, dt);
}

Trajectory run(const ProblemSpec& spec, const State& initial, const StepConfig& cfg) {
  check_step_config(cfg);
  const ValidationReport report = validate(spec);
  if (!report.ok()) throw Error(ErrorKind::config, "invalid problem:\n" + report.summary());
  if (initial.species != spec.n() || initial.cells() != spec.grid.num_cells()) {
    throw Error(ErrorKind::dimension, "initial state does not match the problem spec");
  }
  const Eigen::VectorXd alpha = spec.alphas();

  std::function<State(const State&, double)> advance;
  std::unique_ptr<LinearStepper> linear;
  std::unique_ptr<ImexStepper> imex;
  if (spec.all_linear()) {
    linear = std::make_unique<LinearStepper>(assemble_system(spec), cfg.solver_tol,
                                             cfg.max_iterations);
    advance = [&](const State& s, double dt) { return linear->step(s, dt); };
  } else {
    imex = std::make_unique<ImexStepper>(spec, assemble_transport_all(spec), cfg.solver_tol,
                                         cfg.max_iterations);
    advance = [&](const State& s, double dt) { return imex->step(s, dt); };
  }

  Trajectory traj;
  State current = initial;
  current.time = 0.0;
  traj.snapshots.push_back({current, diagnose(current, alpha)});

  const long steps =
      cfg.t_end > 0.0 ? static_cast<long>(std::ceil(cfg.t_end / cfg.dt - 1e-9)) : 0L;
  for (long k = 1; k <= steps; ++k) {
    const double t_next = k == steps ? cfg.t_end : static_cast<double>(k) * cfg.dt;
    double dt = cfg.dt;
    if (k == steps) {
      const double remainder = cfg.t_end - static_cast<double>(k - 1) * cfg.dt;
      if (std::abs(remainder - cfg.dt) > 1e-9 * cfg.dt) dt = remainder;
    }
    try {
      current = advance(current, dt);
    } catch (const Error& e) {
      throw Error(e.kind(), e.what() + at_time(current.time));
    }
    current.time = t_next;
    if (k % cfg.stride == 0 || k == steps) {
      traj.snapshots.push_back({current, diagnose(current, alpha)});
    }
  }
  return traj;
}

Trajectory run(const ProblemSpec& spec, const StepConfig& cfg, std::uint64_t seed) {
  return run(spec, initial_state(spec, seed), cfg);
}

}  // namespace motorflux
