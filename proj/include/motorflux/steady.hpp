#pragma once

#include <optional>

#include "motorflux/discretize.hpp"
#include "motorflux/model.hpp"

namespace motorflux {

enum class Normalization {
  total_mass,     // sum_i int v_i = 1
  weighted_mass,  // sum_i (1/alpha_i) int v_i = 1
};

const char* to_string(Normalization n);

struct NullVectorOptions {
  double tol = 1e-13;  // L1 change between successive normalized iterates
  int max_iterations = 10000;
  double shift_factor = 1e-3;  // shift = shift_factor * ||A||_inf
  Normalization normalization = Normalization::total_mass;
  std::optional<Eigen::VectorXd> start;  // defaults to all ones
};

struct StationaryState {
  State state;
  double residual = 0.0;  // ||A v||_inf
  Normalization normalization = Normalization::total_mass;
  double normalization_value = 1.0;
  int iterations = 0;
};

/// Perron null vector of a Metzler, irreducible operator whose spectral
/// abscissa is zero. Shifted inverse iteration on (eps I - A): the inverse of
/// this M-matrix is positive and its dominant eigenvector is A's null vector.
StationaryState solve_null_vector(const SystemOperator& op, const NullVectorOptions& options = {});

/// ||w^T A||_inf where w_i = cell volume / alpha_i; zero for an exactly
/// conservative assembly (the constant adjoint solution).
double adjoint_null_check(const SystemOperator& op);

struct ReversiblePair {
  double a = 0.0;
  double b = 0.0;
  double residual = 0.0;  // a/alpha + b/beta - mass
};

/// Constant stationary pair of the reversible reaction r_A(a) = r_B(b) with
/// a/alpha + b/beta = mass.
ReversiblePair reversible_pair(double mass, const ReactionSpec& r_a, const ReactionSpec& r_b,
                               double alpha, double beta);

struct StationaryRay {
  StationaryState base;

  State member(double c) const;
};

struct RayProjection {
  double c = 0.0;
  StationaryState state;
};

/// Member of {c v : c > 0} with the same weighted mass as u0.
RayProjection project_onto_ray(const State& u0, const StationaryRay& ray, const ProblemSpec& spec);

/// Stationary target of the reversible two-species system for initial data u0.
State reversible_target(const State& u0, const ProblemSpec& spec);

}  // namespace motorflux
