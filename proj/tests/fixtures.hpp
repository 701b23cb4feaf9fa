#pragma once

#include <random>

#include "motorflux/model.hpp"

namespace motorflux::test {

inline Eigen::MatrixXd two_state_coupling(double k = 1.0) {
  Eigen::MatrixXd lam(2, 2);
  lam << -k, k, k, -k;
  return lam;
}

/// Linear n-species motor on [0, 1] with the given potentials, sigma = alpha = 1.
inline ProblemSpec motor_spec(int cells, std::vector<PotentialSpec> potentials,
                              Eigen::MatrixXd lambda) {
  ProblemSpec spec;
  spec.grid = Grid::interval(0.0, 1.0, cells);
  for (auto& p : potentials) {
    spec.species.push_back(SpeciesSpec{1.0, 1.0, std::move(p), ReactionSpec::linear()});
    spec.initial.push_back(InitialSpec::constant(1.0));
  }
  spec.coupling.lambda = std::move(lambda);
  return spec;
}

/// Two-species zero-potential motor, lambda = [[-1, 1], [1, -1]].
inline ProblemSpec flat_motor(int cells) {
  return motor_spec(cells, {PotentialSpec::zero(), PotentialSpec::zero()}, two_state_coupling());
}

/// Two-species motor with distinct (shifted) sawtooth potentials.
inline ProblemSpec sawtooth_motor(int cells) {
  return motor_spec(cells,
                    {PotentialSpec::sawtooth(1.0, 0.5, 0.0), PotentialSpec::sawtooth(1.0, 0.5, 0.2)},
                    two_state_coupling());
}

/// Reversible reaction u <-> v with r_A(u) = u^p, r_B(v) = v^q.
inline ProblemSpec reversible_spec(int cells, double p, double q, double k = 1.0) {
  ProblemSpec spec;
  spec.grid = Grid::interval(0.0, 1.0, cells);
  spec.species.push_back(SpeciesSpec{1.0, 1.0, PotentialSpec::zero(), ReactionSpec::power(p)});
  spec.species.push_back(SpeciesSpec{0.5, 1.0, PotentialSpec::zero(), ReactionSpec::power(q)});
  spec.initial = {InitialSpec::constant(1.0), InitialSpec::constant(1.0)};
  spec.coupling.lambda = two_state_coupling(k);
  return spec;
}

inline PotentialSpec random_potential(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  switch (std::uniform_int_distribution<int>(0, 4)(rng)) {
    case 0: return PotentialSpec::zero();
    case 1: return PotentialSpec::linear(2.0 * u(rng));
    case 2: return PotentialSpec::cosine(u(rng), 0.5 + 0.5 * std::abs(u(rng)), u(rng));
    case 3: return PotentialSpec::sawtooth(u(rng), 0.5, 0.25 * u(rng));
    default: {
      std::vector<double> xs{0.0, 0.3, 0.7, 1.0};
      std::vector<double> ys{u(rng), u(rng), u(rng), u(rng)};
      return PotentialSpec::tabulated(xs, ys);
    }
  }
}

/// Metzler coupling with zero column sums and strictly positive off-diagonals.
inline Eigen::MatrixXd random_coupling(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> u(0.2, 2.0);
  Eigen::MatrixXd lam = Eigen::MatrixXd::Zero(n, n);
  for (int j = 0; j < n; ++j) {
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
      if (i == j) continue;
      lam(i, j) = u(rng);
      sum += lam(i, j);
    }
    lam(j, j) = -sum;
  }
  return lam;
}

/// Random admissible linear spec on [0, 1].
inline ProblemSpec random_linear_spec(std::mt19937_64& rng, int n, int cells) {
  std::uniform_real_distribution<double> u(0.5, 2.0);
  ProblemSpec spec;
  spec.grid = Grid::interval(0.0, 1.0, cells);
  for (int i = 0; i < n; ++i) {
    spec.species.push_back(SpeciesSpec{u(rng), u(rng), random_potential(rng), ReactionSpec::linear()});
    InitialSpec init;
    init.kind = InitialKind::random;
    init.value = 0.1;
    init.amplitude = 2.0;
    spec.initial.push_back(init);
  }
  spec.coupling.lambda = random_coupling(rng, n);
  return spec;
}

inline State random_state(const ProblemSpec& spec, std::mt19937_64& rng, double lo, double hi) {
  State s = State::zeros(spec.grid, spec.n());
  std::uniform_real_distribution<double> u(lo, hi);
  for (Eigen::Index k = 0; k < s.values.size(); ++k) s.values[k] = u(rng);
  return s;
}

}  // namespace motorflux::test
