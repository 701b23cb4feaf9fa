#include "motorflux/steady.hpp"

#include <cmath>
#include <sstream>
#include <vector>

#include <Eigen/SparseLU>

namespace motorflux {

namespace {

double infinity_norm(const SparseMatrix& m) {
  Eigen::VectorXd row_sums = Eigen::VectorXd::Zero(m.rows());
  for (int k = 0; k < m.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(m, k); it; ++it) row_sums[it.row()] += std::abs(it.value());
  }
  return row_sums.size() ? row_sums.maxCoeff() : 0.0;
}

Eigen::VectorXd normalization_weights(const SystemOperator& op, Normalization n) {
  const double vol = op.grid.cell_volume();
  Eigen::VectorXd w(op.matrix.rows());
  for (int i = 0; i < op.species(); ++i) {
    const double wi = n == Normalization::total_mass ? vol : vol / op.alpha[i];
    w.segment(static_cast<Eigen::Index>(i) * op.cells(), op.cells()).setConstant(wi);
  }
  return w;
}

double weighted_mass_of(const State& s, const ProblemSpec& spec) {
  double m = 0.0;
  for (int i = 0; i < s.species; ++i) {
    m += s.grid.cell_volume() * s.field(i).sum() / spec.species[i].alpha;
  }
  return m;
}

// Strong connectivity of the directed graph of off-diagonal nonzeros.
bool structurally_irreducible(const SparseMatrix& m) {
  const Eigen::Index n = m.rows();
  if (n <= 1) return true;
  const SparseMatrix mt = m.transpose();
  auto reaches_all = [n](const SparseMatrix& g) {
    std::vector<bool> seen(n, false);
    std::vector<Eigen::Index> stack{0};
    seen[0] = true;
    Eigen::Index count = 1;
    while (!stack.empty()) {
      const Eigen::Index k = stack.back();
      stack.pop_back();
      for (SparseMatrix::InnerIterator it(g, k); it; ++it) {
        if (it.value() != 0.0 && !seen[it.row()]) {
          seen[it.row()] = true;
          ++count;
          stack.push_back(it.row());
        }
      }
    }
    return count == n;
  };
  return reaches_all(m) && reaches_all(mt);
}

}  // namespace

const char* to_string(Normalization n) {
  return n == Normalization::total_mass ? "total_mass" : "weighted_mass";
}

StationaryState solve_null_vector(const SystemOperator& op, const NullVectorOptions& options) {
  const SparseMatrix& a = op.matrix;
  const Eigen::Index size = a.rows();
  if (!structurally_irreducible(a)) {
    throw Error(ErrorKind::irreducible,
                "operator is reducible (coupling graph not strongly connected)");
  }
  const double shift = options.shift_factor * infinity_norm(a);
  if (!(shift > 0.0)) {
    throw Error(ErrorKind::unsupported, "zero operator: every vector is stationary");
  }

  SparseMatrix shifted(size, size);
  shifted.setIdentity();
  shifted *= shift;
  shifted -= a;
  shifted.makeCompressed();
  Eigen::SparseLU<SparseMatrix> lu;
  lu.compute(shifted);
  if (lu.info() != Eigen::Success) {
    throw Error(ErrorKind::solver, "factorization of the shifted operator failed");
  }

  const Eigen::VectorXd w = normalization_weights(op, options.normalization);
  Eigen::VectorXd x = options.start.value_or(Eigen::VectorXd::Ones(size));
  if (x.size() != size) throw Error(ErrorKind::dimension, "start vector has the wrong size");
  if (!(x.minCoeff() >= 0.0) || !(x.maxCoeff() > 0.0)) {
    throw Error(ErrorKind::config, "start vector must be nonnegative and nonzero");
  }
  x /= w.dot(x);

  int iter = 0;
  double change = std::numeric_limits<double>::infinity();
  while (change > options.tol) {
    if (++iter > options.max_iterations) {
      std::ostringstream os;
      os << "inverse iteration did not converge in " << options.max_iterations
         << " iterations; last residual " << (a * x).cwiseAbs().maxCoeff();
      throw Error(ErrorKind::non_convergence, os.str());
    }
    Eigen::VectorXd y = lu.solve(x);
    y /= w.dot(y);
    if (y.minCoeff() < -1e-13) {
      throw Error(ErrorKind::irreducible,
                  "inverse iterate has negative entries; operator is not irreducible");
    }
    change = (y - x).cwiseAbs().dot(w);
    x = std::move(y);
  }
  if (!(x.minCoeff() > 0.0)) {
    throw Error(ErrorKind::irreducible, "null vector is not strictly positive");
  }

  StationaryState out;
  out.state = State::zeros(op.grid, op.species());
  out.state.values = x;
  out.state.gauge = op.gauge;
  out.residual = (a * x).cwiseAbs().maxCoeff();
  out.normalization = options.normalization;
  out.normalization_value = w.dot(x);
  out.iterations = iter;
  return out;
}

double adjoint_null_check(const SystemOperator& op) {
  const Eigen::VectorXd w = op.conserved_weights();
  const Eigen::VectorXd left = op.matrix.transpose() * w;
  return left.size() ? left.cwiseAbs().maxCoeff() : 0.0;
}

ReversiblePair reversible_pair(double mass, const ReactionSpec& r_a, const ReactionSpec& r_b,
                               double alpha, double beta) {
  if (!(mass > 0.0) || !(alpha > 0.0) || !(beta > 0.0)) {
    throw Error(ErrorKind::config, "reversible pair needs mass, alpha, beta > 0");
  }
  auto partner = [&](double a) { return inverse_reaction(r_b, eval_reaction(r_a, a)); };
  auto g = [&](double a) { return a / alpha + partner(a) / beta - mass; };

  double lo = 0.0;
  double hi = 1.0;
  while (g(hi) <= 0.0) hi *= 2.0;
  for (int k = 0; k < 2000 && hi - lo > 0.0; ++k) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (g(mid) > 0.0 ? hi : lo) = mid;
  }
  // pick the bracket end with the smaller defect
  const double a = std::abs(g(lo)) <= std::abs(g(hi)) ? lo : hi;
  return {a, partner(a), g(a)};
}

State StationaryRay::member(double c) const {
  State s = base.state;
  s.values *= c;
  return s;
}

RayProjection project_onto_ray(const State& u0, const StationaryRay& ray,
                               const ProblemSpec& spec) {
  const State& v = ray.base.state;
  if (u0.species != v.species || u0.cells() != v.cells()) {
    throw Error(ErrorKind::dimension, "initial data and stationary state differ in shape");
  }
  const double m0 = weighted_mass_of(u0, spec);
  if (!(m0 > 0.0)) throw Error(ErrorKind::degenerate_data, "initial data has zero weighted mass");
  const double mv = weighted_mass_of(v, spec);
  RayProjection p;
  p.c = m0 / mv;
  p.state = ray.base;
  p.state.state = ray.member(p.c);
  p.state.residual *= p.c;
  p.state.normalization_value *= p.c;
  return p;
}

State reversible_target(const State& u0, const ProblemSpec& spec) {
  if (spec.n() != 2) throw Error(ErrorKind::unsupported, "reversible pair needs two species");
  const Eigen::MatrixXd& lam = spec.coupling.lambda;
  if (std::abs(lam(0, 1) + lam(0, 0)) > 1e-14 * std::abs(lam(0, 0))) {
    // r_A(a) = r_B(b) is the balance condition only for a symmetric rate pair
    throw Error(ErrorKind::unsupported, "reversible pair needs lambda = k [[-1, 1], [1, -1]]");
  }
  const double mass = weighted_mass_of(u0, spec) / spec.grid.total_volume();
  if (!(mass > 0.0)) throw Error(ErrorKind::degenerate_data, "initial data has zero weighted mass");
  const ReversiblePair pair = reversible_pair(mass, spec.species[0].reaction,
                                              spec.species[1].reaction, spec.species[0].alpha,
                                              spec.species[1].alpha);
  State t = State::zeros(spec.grid, 2);
  t.field(0).setConstant(pair.a);
  t.field(1).setConstant(pair.b);
  return t;
}

}  // namespace motorflux
