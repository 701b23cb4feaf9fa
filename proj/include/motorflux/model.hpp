#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "motorflux/error.hpp"

namespace motorflux {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

struct Axis {
  double lo = 0.0;
  double hi = 1.0;
  int n_cells = 2;

  double width() const { return (hi - lo) / n_cells; }
  double length() const { return hi - lo; }

  friend bool operator==(const Axis&, const Axis&) = default;
};

/// Uniform cell partition of an interval (dim 1) or a rectangle (dim 2).
/// Cells are numbered x-fastest: cell = ix + nx * iy.
class Grid {
 public:
  static Grid interval(double lo, double hi, int n_cells);
  static Grid rectangle(Axis x, Axis y);

  int dim() const { return dim_; }
  const Axis& axis(int a) const { return axes_[a]; }
  int nx() const { return axes_[0].n_cells; }
  int ny() const { return dim_ == 2 ? axes_[1].n_cells : 1; }
  int num_cells() const { return nx() * ny(); }

  double cell_volume() const;
  double total_volume() const;
  Point center(int cell) const;
  /// Coordinate of face `i` (0..n_cells) along axis `a`.
  double face(int a, int i) const { return axes_[a].lo + i * axes_[a].width(); }
  bool contains(Point p, double slack = 1e-12) const;

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  Grid(int dim, Axis x, Axis y) : dim_(dim), axes_{x, y} {}

  int dim_ = 1;
  Axis axes_[2];
};

enum class PotentialKind { zero, linear, cosine, sawtooth_smoothed, tabulated };

/// Smooth potential psi(x). All periodic kinds vary along x only.
///   linear:            slope * x + slope_y * y
///   cosine:            amplitude * cos(2 pi (x - shift) / period)
///   sawtooth_smoothed: amplitude * sum_{k=1..harmonics} sin(k theta) / k,
///                      theta = 2 pi (x - shift) / period
///   tabulated:         piecewise-linear interpolation of (xs, ys) in x
struct PotentialSpec {
  PotentialKind kind = PotentialKind::zero;
  double slope = 0.0;
  double slope_y = 0.0;
  double amplitude = 0.0;
  double period = 1.0;
  double shift = 0.0;
  int harmonics = 3;
  std::vector<double> xs;
  std::vector<double> ys;

  static PotentialSpec zero() { return {}; }
  static PotentialSpec linear(double slope, double slope_y = 0.0);
  static PotentialSpec cosine(double amplitude, double period, double shift = 0.0);
  static PotentialSpec sawtooth(double amplitude, double period, double shift = 0.0,
                                int harmonics = 3);
  static PotentialSpec tabulated(std::vector<double> xs, std::vector<double> ys);
};

enum class ReactionKind { linear, power };

/// r(s) = s (linear) or s^exponent (power), for s >= 0.
struct ReactionSpec {
  ReactionKind kind = ReactionKind::linear;
  double exponent = 1.0;

  static ReactionSpec linear() { return {}; }
  static ReactionSpec power(double p) { return {ReactionKind::power, p}; }
  bool is_linear() const {
    return kind == ReactionKind::linear || exponent == 1.0;
  }
};

enum class InitialKind { constant, cosine, gaussian, tabulated, random };

/// Initial datum of one species.
///   constant: value
///   cosine:   value + amplitude * cos(2 pi (x - shift) / period)
///   gaussian: value + amplitude * exp(-((x - center)/width)^2 / 2)
///   random:   i.i.d. uniform on [value, value + amplitude] per cell
struct InitialSpec {
  InitialKind kind = InitialKind::constant;
  double value = 1.0;
  double amplitude = 0.0;
  double period = 1.0;
  double shift = 0.0;
  double center = 0.5;
  double width = 0.1;
  std::vector<double> xs;
  std::vector<double> ys;

  static InitialSpec constant(double value);
};

struct SpeciesSpec {
  double sigma = 1.0;
  double alpha = 1.0;
  PotentialSpec potential;
  ReactionSpec reaction;
};

struct CouplingMatrix {
  Eigen::MatrixXd lambda;

  int n() const { return static_cast<int>(lambda.rows()); }
  Eigen::VectorXd column_sums() const { return lambda.colwise().sum().transpose(); }
};

enum class Gauge { physical, neumann };

/// Cell values of all species, species-major: block i holds species i.
struct State {
  Grid grid = Grid::interval(0.0, 1.0, 2);
  int species = 1;
  Eigen::VectorXd values;
  double time = 0.0;
  Gauge gauge = Gauge::physical;

  static State zeros(const Grid& grid, int species, double time = 0.0);

  int cells() const { return grid.num_cells(); }
  auto field(int i) { return values.segment(static_cast<Eigen::Index>(i) * cells(), cells()); }
  auto field(int i) const {
    return values.segment(static_cast<Eigen::Index>(i) * cells(), cells());
  }
};

struct ProblemSpec {
  Grid grid = Grid::interval(0.0, 1.0, 2);
  std::vector<SpeciesSpec> species;
  CouplingMatrix coupling;
  std::vector<InitialSpec> initial;

  int n() const { return static_cast<int>(species.size()); }
  bool all_linear() const;
  Eigen::VectorXd alphas() const;
};

enum class Rule {
  grid_geometry,
  positive_constants,      // sigma_i > 0, alpha_i > 0
  metzler_pattern,         // lambda_ii <= 0, lambda_ij >= 0
  coupling_column_sum,     // sum_k lambda_kj = 0
  reaction_admissible,     // r(0) = 0, nondecreasing
  potential_admissible,    // finite, evaluable on the domain
  nonnegative_initial,     // u_0 >= 0
  shape,                   // sizes of the spec components agree
};

const char* to_string(Rule rule);

struct Violation {
  Rule rule;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;
  /// Non-fatal findings, e.g. a coupling graph that is not strongly connected.
  std::vector<std::string> warnings;

  bool ok() const { return violations.empty(); }
  std::string summary() const;
};

inline constexpr double kColumnSumTolerance = 1e-14;

ValidationReport validate(const ProblemSpec& spec);

/// True when the directed graph with edges j -> i for lambda_ij > 0 is
/// strongly connected (trivially true for n = 1).
bool coupling_strongly_connected(const CouplingMatrix& coupling);

double eval_potential(const PotentialSpec& p, const Grid& grid, Point x);
double eval_reaction(const ReactionSpec& r, double s);
/// Lipschitz constant of r on [0, s_max].
double reaction_lipschitz(const ReactionSpec& r, double s_max);
/// r^{-1}(y) for y >= 0.
double inverse_reaction(const ReactionSpec& r, double y);

Eigen::VectorXd sample_potential(const PotentialSpec& p, const Grid& grid);
Eigen::VectorXd sample_initial(const InitialSpec& init, const Grid& grid,
                               std::uint64_t seed = 0);
State initial_state(const ProblemSpec& spec, std::uint64_t seed = 0);

}  // namespace motorflux
