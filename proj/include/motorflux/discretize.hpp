#pragma once

#include <iosfwd>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "motorflux/model.hpp"

namespace motorflux {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// B(x) = x / (e^x - 1), with B(0) = 1.
double bernoulli(double x);

/// Finite-volume generator of div(sigma grad u + u grad psi) with zero
/// normal flux on the boundary. Exponentially fitted two-point fluxes make
/// the sampled Boltzmann profile exp(-psi/sigma) an exact null vector.
struct TransportOperator {
  int species = 0;
  Grid grid = Grid::interval(0.0, 1.0, 2);
  SparseMatrix matrix;
  Gauge gauge = Gauge::physical;
};

/// Block operator L + C of a linear system: block-diagonal transport plus the
/// coupling blocks alpha_i * lambda_ij * I. Species-major ordering.
struct SystemOperator {
  Grid grid = Grid::interval(0.0, 1.0, 2);
  std::vector<TransportOperator> transport;
  Eigen::MatrixXd coupling;  // alpha_i * lambda_ij
  Eigen::VectorXd alpha;
  SparseMatrix matrix;
  Gauge gauge = Gauge::physical;

  int species() const { return static_cast<int>(alpha.size()); }
  int cells() const { return grid.num_cells(); }
  /// Row vector with cell_volume / alpha_i in block i.
  Eigen::VectorXd conserved_weights() const;
};

TransportOperator assemble_transport(const Grid& grid, double sigma, const PotentialSpec& psi,
                                     int species = 0);

SystemOperator assemble_system(const ProblemSpec& spec);

/// Per-species transport operators only; valid for nonlinear reactions.
std::vector<TransportOperator> assemble_transport_all(const ProblemSpec& spec);

/// A u evaluated as pairwise transfers: each off-diagonal entry a_rp moves
/// a_rp u_p into row r and removes it from column p, scaled by
/// row_alpha[p] / row_alpha[r]. The stored diagonal is not read, so the
/// weighted mass of the result vanishes up to rounding of the transfers.
/// An empty row_alpha means uniform weights.
Eigen::VectorXd apply_conservative(const SparseMatrix& a, const Eigen::VectorXd& row_alpha,
                                   const Eigen::VectorXd& u);

/// alpha_i repeated over the cells of block i.
Eigen::VectorXd row_alpha(const SystemOperator& op);

enum class GaugeDirection { to_neumann, to_physical };

/// exp(psi_i / sigma_i) at the cell centres of species i.
Eigen::VectorXd gauge_factors(const ProblemSpec& spec, int species);

/// D A D^{-1} with D = diag(exp(psi_i / sigma_i)).
TransportOperator conjugate_to_neumann(const TransportOperator& op, const ProblemSpec& spec);
SystemOperator conjugate_to_neumann(const SystemOperator& op, const ProblemSpec& spec);

State gauge_transform(const State& state, const ProblemSpec& spec, GaugeDirection direction);

/// Largest off-diagonal negative part (0 for a Metzler matrix).
double metzler_defect(const SparseMatrix& m);

void write_matrix_market(std::ostream& os, const SparseMatrix& m);

}  // namespace motorflux
