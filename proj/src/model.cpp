#include "motorflux/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

namespace motorflux {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::config: return "config";
    case ErrorKind::domain: return "domain";
    case ErrorKind::dimension: return "dimension";
    case ErrorKind::scaling: return "scaling";
    case ErrorKind::unsupported: return "unsupported";
    case ErrorKind::step_size: return "step_size";
    case ErrorKind::solver: return "solver";
    case ErrorKind::non_convergence: return "non_convergence";
    case ErrorKind::irreducible: return "irreducible";
    case ErrorKind::degenerate_data: return "degenerate_data";
    case ErrorKind::oracle_scope: return "oracle_scope";
    case ErrorKind::invariant: return "invariant";
  }
  return "unknown";
}

namespace {

void check_axis(const Axis& a, const char* name) {
  if (!(a.hi > a.lo) || !std::isfinite(a.lo) || !std::isfinite(a.hi)) {
    throw Error(ErrorKind::config, std::string("axis ") + name + ": need hi > lo");
  }
  if (a.n_cells < 2) {
    throw Error(ErrorKind::config, std::string("axis ") + name + ": need at least 2 cells");
  }
}

double interpolate(const std::vector<double>& xs, const std::vector<double>& ys, double x) {
  if (xs.size() < 2 || xs.size() != ys.size()) {
    throw Error(ErrorKind::config, "tabulated profile needs >= 2 matching samples");
  }
  constexpr double kSlack = 1e-12;
  if (x < xs.front() - kSlack || x > xs.back() + kSlack) {
    throw Error(ErrorKind::domain, "coordinate outside the tabulated range");
  }
  auto it = std::upper_bound(xs.begin(), xs.end(), x);
  std::size_t k = it == xs.begin() ? 1 : static_cast<std::size_t>(it - xs.begin());
  k = std::clamp<std::size_t>(k, 1, xs.size() - 1);
  const double w = (x - xs[k - 1]) / (xs[k] - xs[k - 1]);
  return (1.0 - w) * ys[k - 1] + w * ys[k];
}

}  // namespace

Grid Grid::interval(double lo, double hi, int n_cells) {
  Axis x{lo, hi, n_cells};
  check_axis(x, "x");
  return Grid(1, x, Axis{0.0, 1.0, 1});
}

Grid Grid::rectangle(Axis x, Axis y) {
  check_axis(x, "x");
  check_axis(y, "y");
  return Grid(2, x, y);
}

double Grid::cell_volume() const {
  return dim_ == 1 ? axes_[0].width() : axes_[0].width() * axes_[1].width();
}

double Grid::total_volume() const {
  return dim_ == 1 ? axes_[0].length() : axes_[0].length() * axes_[1].length();
}

Point Grid::center(int cell) const {
  const int ix = cell % nx();
  const int iy = cell / nx();
  Point p{axes_[0].lo + (ix + 0.5) * axes_[0].width(), 0.0};
  if (dim_ == 2) p.y = axes_[1].lo + (iy + 0.5) * axes_[1].width();
  return p;
}

bool Grid::contains(Point p, double slack) const {
  auto inside = [slack](const Axis& a, double v) {
    const double tol = slack * std::max(1.0, a.length());
    return v >= a.lo - tol && v <= a.hi + tol;
  };
  return inside(axes_[0], p.x) && (dim_ == 1 || inside(axes_[1], p.y));
}

PotentialSpec PotentialSpec::linear(double slope, double slope_y) {
  PotentialSpec p;
  p.kind = PotentialKind::linear;
  p.slope = slope;
  p.slope_y = slope_y;
  return p;
}

PotentialSpec PotentialSpec::cosine(double amplitude, double period, double shift) {
  PotentialSpec p;
  p.kind = PotentialKind::cosine;
  p.amplitude = amplitude;
  p.period = period;
  p.shift = shift;
  return p;
}

PotentialSpec PotentialSpec::sawtooth(double amplitude, double period, double shift,
                                      int harmonics) {
  PotentialSpec p;
  p.kind = PotentialKind::sawtooth_smoothed;
  p.amplitude = amplitude;
  p.period = period;
  p.shift = shift;
  p.harmonics = harmonics;
  return p;
}

PotentialSpec PotentialSpec::tabulated(std::vector<double> xs, std::vector<double> ys) {
  PotentialSpec p;
  p.kind = PotentialKind::tabulated;
  p.xs = std::move(xs);
  p.ys = std::move(ys);
  return p;
}

InitialSpec InitialSpec::constant(double value) {
  InitialSpec s;
  s.value = value;
  return s;
}

State State::zeros(const Grid& grid, int species, double time) {
  State s;
  s.grid = grid;
  s.species = species;
  s.values = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(species) * grid.num_cells());
  s.time = time;
  return s;
}

bool ProblemSpec::all_linear() const {
  return std::all_of(species.begin(), species.end(),
                     [](const SpeciesSpec& s) { return s.reaction.is_linear(); });
}

Eigen::VectorXd ProblemSpec::alphas() const {
  Eigen::VectorXd a(n());
  for (int i = 0; i < n(); ++i) a[i] = species[i].alpha;
  return a;
}

double eval_potential(const PotentialSpec& p, const Grid& grid, Point x) {
  if (!grid.contains(x)) {
    throw Error(ErrorKind::domain, "potential evaluated outside the domain");
  }
  const double two_pi = 2.0 * std::numbers::pi;
  switch (p.kind) {
    case PotentialKind::zero:
      return 0.0;
    case PotentialKind::linear:
      return p.slope * x.x + p.slope_y * x.y;
    case PotentialKind::cosine:
      return p.amplitude * std::cos(two_pi * (x.x - p.shift) / p.period);
    case PotentialKind::sawtooth_smoothed: {
      const double theta = two_pi * (x.x - p.shift) / p.period;
      double sum = 0.0;
      for (int k = 1; k <= p.harmonics; ++k) sum += std::sin(k * theta) / k;
      return p.amplitude * sum;
    }
    case PotentialKind::tabulated:
      return interpolate(p.xs, p.ys, x.x);
  }
  return 0.0;
}

double eval_reaction(const ReactionSpec& r, double s) {
  if (s < 0.0 || std::isnan(s)) {
    throw Error(ErrorKind::domain, "reaction evaluated at a negative density");
  }
  if (r.kind == ReactionKind::linear) return s;
  return std::pow(s, r.exponent);
}

double reaction_lipschitz(const ReactionSpec& r, double s_max) {
  if (r.kind == ReactionKind::linear || r.exponent == 1.0) return 1.0;
  return r.exponent * std::pow(std::max(s_max, 0.0), r.exponent - 1.0);
}

double inverse_reaction(const ReactionSpec& r, double y) {
  if (y < 0.0) throw Error(ErrorKind::domain, "inverse reaction of a negative rate");
  if (r.kind == ReactionKind::linear) return y;
  return std::pow(y, 1.0 / r.exponent);
}

Eigen::VectorXd sample_potential(const PotentialSpec& p, const Grid& grid) {
  Eigen::VectorXd out(grid.num_cells());
  for (int c = 0; c < grid.num_cells(); ++c) out[c] = eval_potential(p, grid, grid.center(c));
  return out;
}

Eigen::VectorXd sample_initial(const InitialSpec& init, const Grid& grid, std::uint64_t seed) {
  const int cells = grid.num_cells();
  Eigen::VectorXd out(cells);
  const double two_pi = 2.0 * std::numbers::pi;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int c = 0; c < cells; ++c) {
    const Point p = grid.center(c);
    switch (init.kind) {
      case InitialKind::constant:
        out[c] = init.value;
        break;
      case InitialKind::cosine:
        out[c] = init.value + init.amplitude * std::cos(two_pi * (p.x - init.shift) / init.period);
        break;
      case InitialKind::gaussian: {
        const double z = (p.x - init.center) / init.width;
        out[c] = init.value + init.amplitude * std::exp(-0.5 * z * z);
        break;
      }
      case InitialKind::tabulated:
        out[c] = interpolate(init.xs, init.ys, p.x);
        break;
      case InitialKind::random:
        out[c] = init.value + init.amplitude * unit(rng);
        break;
    }
  }
  return out;
}

State initial_state(const ProblemSpec& spec, std::uint64_t seed) {
  if (spec.initial.size() != spec.species.size()) {
    throw Error(ErrorKind::config, "one initial datum per species is required");
  }
  State s = State::zeros(spec.grid, spec.n());
  for (int i = 0; i < spec.n(); ++i) {
    // distinct streams per species
    s.field(i) = sample_initial(spec.initial[i], spec.grid, seed * 1000003ULL + i);
  }
  return s;
}

const char* to_string(Rule rule) {
  switch (rule) {
    case Rule::grid_geometry: return "grid-geometry";
    case Rule::positive_constants: return "positive-constants";
    case Rule::metzler_pattern: return "coupling-sign-pattern";
    case Rule::coupling_column_sum: return "coupling-column-sum";
    case Rule::reaction_admissible: return "monotone-reaction";
    case Rule::potential_admissible: return "smooth-potential";
    case Rule::nonnegative_initial: return "nonnegative-initial-data";
    case Rule::shape: return "shape";
  }
  return "unknown";
}

std::string ValidationReport::summary() const {
  std::ostringstream os;
  for (const auto& v : violations) os << '[' << to_string(v.rule) << "] " << v.message << '\n';
  for (const auto& w : warnings) os << "[warning] " << w << '\n';
  return os.str();
}

bool coupling_strongly_connected(const CouplingMatrix& coupling) {
  const int n = coupling.n();
  if (n <= 1) return true;
  auto reaches_all = [&](bool forward) {
    std::vector<bool> seen(n, false);
    std::vector<int> stack{0};
    seen[0] = true;
    while (!stack.empty()) {
      const int j = stack.back();
      stack.pop_back();
      for (int i = 0; i < n; ++i) {
        const double w = forward ? coupling.lambda(i, j) : coupling.lambda(j, i);
        if (i != j && w > 0.0 && !seen[i]) {
          seen[i] = true;
          stack.push_back(i);
        }
      }
    }
    return std::all_of(seen.begin(), seen.end(), [](bool b) { return b; });
  };
  return reaches_all(true) && reaches_all(false);
}

ValidationReport validate(const ProblemSpec& spec) {
  ValidationReport report;
  auto fail = [&](Rule rule, std::string msg) { report.violations.push_back({rule, std::move(msg)}); };
  const int n = spec.n();

  if (n < 1) fail(Rule::shape, "at least one species is required");
  if (spec.coupling.lambda.rows() != n || spec.coupling.lambda.cols() != n) {
    fail(Rule::shape, "coupling matrix must be " + std::to_string(n) + "x" + std::to_string(n));
  }
  if (spec.initial.size() != spec.species.size()) {
    fail(Rule::shape, "one initial datum per species is required");
  }

  const Grid& g = spec.grid;
  for (int a = 0; a < g.dim(); ++a) {
    const Axis& ax = g.axis(a);
    if (!(ax.hi > ax.lo) || ax.n_cells < 2) {
      fail(Rule::grid_geometry, "axis " + std::to_string(a) + " needs hi > lo and >= 2 cells");
    }
  }
  const double vol_sum = g.cell_volume() * g.num_cells();
  if (std::abs(vol_sum - g.total_volume()) > 1e-12 * g.total_volume()) {
    fail(Rule::grid_geometry, "cell volumes do not sum to the domain volume");
  }

  for (int i = 0; i < n; ++i) {
    const SpeciesSpec& s = spec.species[i];
    const std::string tag = "species " + std::to_string(i + 1);
    if (!(s.sigma > 0.0) || !std::isfinite(s.sigma)) {
      fail(Rule::positive_constants, tag + ": sigma must be > 0");
    }
    if (!(s.alpha > 0.0) || !std::isfinite(s.alpha)) {
      fail(Rule::positive_constants, tag + ": alpha must be > 0");
    }
    if (s.reaction.kind == ReactionKind::power && !(s.reaction.exponent >= 1.0)) {
      fail(Rule::reaction_admissible, tag + ": reaction not admissible (p<1)");
    }
    try {
      const Eigen::VectorXd psi = sample_potential(s.potential, g);
      if (!psi.allFinite()) fail(Rule::potential_admissible, tag + ": potential not finite");
      if (s.potential.kind == PotentialKind::tabulated) {
        // faces at the domain ends must be covered as well
        eval_potential(s.potential, g, Point{g.axis(0).lo, g.dim() == 2 ? g.axis(1).lo : 0.0});
        eval_potential(s.potential, g, Point{g.axis(0).hi, g.dim() == 2 ? g.axis(1).hi : 0.0});
      }
      if ((s.potential.kind == PotentialKind::cosine ||
           s.potential.kind == PotentialKind::sawtooth_smoothed) &&
          !(s.potential.period > 0.0)) {
        fail(Rule::potential_admissible, tag + ": period must be > 0");
      }
    } catch (const Error& e) {
      fail(Rule::potential_admissible, tag + ": " + e.what());
    }
    if (i < static_cast<int>(spec.initial.size())) {
      try {
        const Eigen::VectorXd u0 = sample_initial(spec.initial[i], g);
        const InitialSpec& init = spec.initial[i];
        double lowest = u0.minCoeff();
        if (init.kind == InitialKind::random) {
          lowest = std::min(init.value, init.value + init.amplitude);
        }
        if (!u0.allFinite()) {
          fail(Rule::nonnegative_initial, tag + ": initial data not finite");
        } else if (lowest < 0.0) {
          fail(Rule::nonnegative_initial, tag + ": initial data takes negative values");
        }
      } catch (const Error& e) {
        fail(Rule::nonnegative_initial, tag + ": " + e.what());
      }
    }
  }

  if (spec.coupling.lambda.rows() == n && spec.coupling.lambda.cols() == n) {
    const Eigen::MatrixXd& lam = spec.coupling.lambda;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        const double v = lam(i, j);
        const std::string at =
            "lambda(" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ")";
        if (!std::isfinite(v)) {
          fail(Rule::metzler_pattern, at + " is not finite");
        } else if (i == j && v > 0.0) {
          fail(Rule::metzler_pattern, at + " must be <= 0");
        } else if (i != j && v < 0.0) {
          fail(Rule::metzler_pattern, at + " must be >= 0");
        }
      }
    }
    const Eigen::VectorXd sums = spec.coupling.column_sums();
    for (int j = 0; j < n; ++j) {
      if (!(std::abs(sums[j]) <= kColumnSumTolerance)) {
        std::ostringstream os;
        os << "column " << j + 1 << " sums to " << sums[j] << " != 0";
        fail(Rule::coupling_column_sum, os.str());
      }
    }
    if (!coupling_strongly_connected(spec.coupling)) {
      report.warnings.push_back(
          "coupling graph is not strongly connected; the stationary state may not be unique");
    }
  }
  return report;
}

}  // namespace motorflux
