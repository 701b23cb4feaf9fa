#include "motorflux/discretize.hpp"

#include <cmath>
#include <limits>
#include <ostream>
#include <thread>

#include "motorflux/concurrency.hpp"

namespace motorflux {

namespace {

using Triplet = Eigen::Triplet<double>;

constexpr double kGaugeExponentLimit = 700.0;

SparseMatrix diagonal(const Eigen::VectorXd& d) {
  SparseMatrix m(d.size(), d.size());
  std::vector<Triplet> t;
  t.reserve(d.size());
  for (Eigen::Index k = 0; k < d.size(); ++k) t.emplace_back(k, k, d[k]);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

// Adds the flux through the face between cells p (lower) and q (upper):
// F = c h [B(s) u_p - B(-s) u_q], s = (psi_q - psi_p) / sigma, c = sigma / h^2.
void add_face(std::vector<Triplet>& t, int p, int q, double c, double s) {
  const double forward = c * bernoulli(s);
  const double backward = c * bernoulli(-s);
  t.emplace_back(p, p, -forward);
  t.emplace_back(p, q, backward);
  t.emplace_back(q, p, forward);
  t.emplace_back(q, q, -backward);
}

}  // namespace

double bernoulli(double x) {
  if (std::abs(x) <= 1e-5) {
    const double x2 = x * x;
    return 1.0 - 0.5 * x + x2 / 12.0 - x2 * x2 / 720.0;
  }
  if (x > 745.0) return 0.0;
  if (x < -40.0) return -x;  // x / (e^x - 1) == -x to double precision
  return x / std::expm1(x);
}

Eigen::VectorXd SystemOperator::conserved_weights() const {
  Eigen::VectorXd w(static_cast<Eigen::Index>(species()) * cells());
  for (int i = 0; i < species(); ++i) {
    w.segment(static_cast<Eigen::Index>(i) * cells(), cells())
        .setConstant(grid.cell_volume() / alpha[i]);
  }
  return w;
}

TransportOperator assemble_transport(const Grid& grid, double sigma, const PotentialSpec& psi,
                                     int species) {
  if (!(sigma > 0.0)) throw Error(ErrorKind::config, "sigma must be positive");
  const Eigen::VectorXd phi = sample_potential(psi, grid);
  const int nx = grid.nx();
  const int ny = grid.ny();
  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(grid.num_cells()) * 4 * grid.dim());

  const double hx = grid.axis(0).width();
  for (int iy = 0; iy < ny; ++iy) {
    for (int ix = 0; ix + 1 < nx; ++ix) {
      const int p = ix + nx * iy;
      add_face(t, p, p + 1, sigma / (hx * hx), (phi[p + 1] - phi[p]) / sigma);
    }
  }
  if (grid.dim() == 2) {
    const double hy = grid.axis(1).width();
    for (int iy = 0; iy + 1 < ny; ++iy) {
      for (int ix = 0; ix < nx; ++ix) {
        const int p = ix + nx * iy;
        add_face(t, p, p + nx, sigma / (hy * hy), (phi[p + nx] - phi[p]) / sigma);
      }
    }
  }

  TransportOperator op;
  op.species = species;
  op.grid = grid;
  op.matrix.resize(grid.num_cells(), grid.num_cells());
  op.matrix.setFromTriplets(t.begin(), t.end());
  op.matrix.makeCompressed();
  return op;
}

std::vector<TransportOperator> assemble_transport_all(const ProblemSpec& spec) {
  std::vector<TransportOperator> ops(spec.n());
  parallel_for(spec.n(), [&](int i) {
    ops[i] = assemble_transport(spec.grid, spec.species[i].sigma, spec.species[i].potential, i);
  });
  return ops;
}

Eigen::VectorXd apply_conservative(const SparseMatrix& a, const Eigen::VectorXd& row_alpha,
                                   const Eigen::VectorXd& u) {
  const bool uniform = row_alpha.size() == 0;
  Eigen::VectorXd y = Eigen::VectorXd::Zero(a.rows());
  for (int p = 0; p < a.outerSize(); ++p) {
    for (SparseMatrix::InnerIterator it(a, p); it; ++it) {
      const Eigen::Index r = it.row();
      if (r == p) continue;
      const double f = it.value() * u[p];
      y[r] += f;
      if (uniform || row_alpha[p] == row_alpha[r]) {
        y[p] -= f;
      } else {
        y[p] -= f * (row_alpha[p] / row_alpha[r]);
      }
    }
  }
  return y;
}

Eigen::VectorXd row_alpha(const SystemOperator& op) {
  Eigen::VectorXd out(op.matrix.rows());
  for (int i = 0; i < op.species(); ++i) out.segment(i * op.cells(), op.cells()).setConstant(op.alpha[i]);
  return out;
}

SystemOperator assemble_system(const ProblemSpec& spec) {
  if (!spec.all_linear()) {
    throw Error(ErrorKind::unsupported,
                "system operator requires linear reactions; nonlinear systems use IMEX stepping");
  }
  const int n = spec.n();
  if (spec.coupling.lambda.rows() != n || spec.coupling.lambda.cols() != n) {
    throw Error(ErrorKind::dimension, "coupling matrix does not match the species count");
  }
  SystemOperator sys;
  sys.grid = spec.grid;
  sys.alpha = spec.alphas();
  sys.transport = assemble_transport_all(spec);
  sys.coupling = sys.alpha.asDiagonal() * spec.coupling.lambda;

  const int cells = spec.grid.num_cells();
  std::vector<Triplet> t;
  for (int i = 0; i < n; ++i) {
    const SparseMatrix& block = sys.transport[i].matrix;
    const int offset = i * cells;
    for (int k = 0; k < block.outerSize(); ++k) {
      for (SparseMatrix::InnerIterator it(block, k); it; ++it) {
        t.emplace_back(offset + it.row(), offset + it.col(), it.value());
      }
    }
    for (int j = 0; j < n; ++j) {
      const double c = sys.coupling(i, j);
      if (c == 0.0) continue;
      for (int cell = 0; cell < cells; ++cell) t.emplace_back(offset + cell, j * cells + cell, c);
    }
  }
  sys.matrix.resize(n * cells, n * cells);
  sys.matrix.setFromTriplets(t.begin(), t.end());
  sys.matrix.makeCompressed();
  return sys;
}

Eigen::VectorXd gauge_factors(const ProblemSpec& spec, int species) {
  const SpeciesSpec& s = spec.species.at(species);
  const Eigen::VectorXd exponent = sample_potential(s.potential, spec.grid) / s.sigma;
  if (exponent.size() > 0 && exponent.cwiseAbs().maxCoeff() > kGaugeExponentLimit) {
    throw Error(ErrorKind::scaling, "|psi/sigma| exceeds 700; gauge factor would overflow");
  }
  return exponent.array().exp().matrix();
}

TransportOperator conjugate_to_neumann(const TransportOperator& op, const ProblemSpec& spec) {
  if (op.gauge != Gauge::physical) {
    throw Error(ErrorKind::unsupported, "operator is already in the Neumann gauge");
  }
  const Eigen::VectorXd d = gauge_factors(spec, op.species);
  TransportOperator out = op;
  out.matrix = diagonal(d) * op.matrix * diagonal(d.cwiseInverse());
  out.gauge = Gauge::neumann;
  return out;
}

SystemOperator conjugate_to_neumann(const SystemOperator& op, const ProblemSpec& spec) {
  if (op.gauge != Gauge::physical) {
    throw Error(ErrorKind::unsupported, "operator is already in the Neumann gauge");
  }
  const int cells = op.cells();
  Eigen::VectorXd d(op.matrix.rows());
  for (int i = 0; i < op.species(); ++i) {
    d.segment(static_cast<Eigen::Index>(i) * cells, cells) = gauge_factors(spec, i);
  }
  SystemOperator out = op;
  for (auto& block : out.transport) block = conjugate_to_neumann(block, spec);
  out.matrix = diagonal(d) * op.matrix * diagonal(d.cwiseInverse());
  out.gauge = Gauge::neumann;
  return out;
}

State gauge_transform(const State& state, const ProblemSpec& spec, GaugeDirection direction) {
  const Gauge source =
      direction == GaugeDirection::to_neumann ? Gauge::physical : Gauge::neumann;
  if (state.gauge != source) {
    throw Error(ErrorKind::config, "state gauge does not match the transform direction");
  }
  if (state.species != spec.n() || state.cells() != spec.grid.num_cells()) {
    throw Error(ErrorKind::dimension, "state does not match the problem spec");
  }
  State out = state;
  for (int i = 0; i < state.species; ++i) {
    const Eigen::VectorXd d = gauge_factors(spec, i);
    if (direction == GaugeDirection::to_neumann) {
      out.field(i) = state.field(i).cwiseProduct(d);
    } else {
      out.field(i) = state.field(i).cwiseQuotient(d);
    }
  }
  out.gauge = direction == GaugeDirection::to_neumann ? Gauge::neumann : Gauge::physical;
  return out;
}

double metzler_defect(const SparseMatrix& m) {
  double worst = 0.0;
  for (int k = 0; k < m.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(m, k); it; ++it) {
      if (it.row() != it.col()) worst = std::max(worst, -it.value());
    }
  }
  return worst;
}

void write_matrix_market(std::ostream& os, const SparseMatrix& m) {
  os << "%%MatrixMarket matrix coordinate real general\n";
  os << m.rows() << ' ' << m.cols() << ' ' << m.nonZeros() << '\n';
  const auto precision = os.precision(std::numeric_limits<double>::max_digits10);
  for (int k = 0; k < m.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(m, k); it; ++it) {
      os << it.row() + 1 << ' ' << it.col() + 1 << ' ' << it.value() << '\n';
    }
  }
  os.precision(precision);
}

}  // namespace motorflux
