#include "motorflux/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <json.hpp>

#include "motorflux/concurrency.hpp"
#include "motorflux/expm.hpp"

namespace motorflux {

namespace {

void check_same_shape(const State& a, const State& b) {
  if (a.species != b.species || a.cells() != b.cells() || !(a.grid == b.grid)) {
    throw Error(ErrorKind::dimension, "states differ in grid or species count");
  }
}

std::pair<Trajectory, Trajectory> run_pair(const ProblemSpec& spec, const State& a, const State& b,
                                           const StepConfig& cfg) {
  Trajectory ta;
  Trajectory tb;
  parallel_for(2, [&](int k) { (k == 0 ? ta : tb) = run(spec, k == 0 ? a : b, cfg); });
  return {std::move(ta), std::move(tb)};
}

// Largest increase between consecutive entries of a series.
Criterion monotone(const std::string& name, const std::vector<double>& times,
                   const std::vector<double>& series, double tolerance) {
  Criterion c{name, 0.0, tolerance, times.empty() ? 0.0 : times.front(), -1};
  for (std::size_t k = 1; k < series.size(); ++k) {
    const double rise = series[k] - series[k - 1];
    if (rise > c.worst) {
      c.worst = rise;
      c.time = times[k];
    }
  }
  return c;
}

}  // namespace

const Criterion& CheckReport::worst() const {
  static const Criterion empty{"none", 0.0, 0.0, 0.0, -1};
  if (criteria.empty()) return empty;
  auto ratio = [](const Criterion& c) {
    return c.tolerance > 0.0 ? c.worst / c.tolerance
                             : (c.worst > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
  };
  return *std::max_element(criteria.begin(), criteria.end(),
                           [&](const Criterion& x, const Criterion& y) { return ratio(x) < ratio(y); });
}

void CheckReport::add(Criterion c) {
  pass = pass && c.pass();
  criteria.push_back(std::move(c));
}

std::string to_ndjson(const CheckReport& report) {
  using nlohmann::ordered_json;
  ordered_json j;
  j["name"] = report.name;
  j["pass"] = report.pass;
  const Criterion& w = report.worst();
  j["worst"] = w.worst;
  j["tolerance"] = w.tolerance;
  j["argmax_time"] = w.time;
  j["argmax_location"] = w.location;
  ordered_json criteria = ordered_json::array();
  for (const auto& c : report.criteria) {
    criteria.push_back({{"name", c.name},
                        {"pass", c.pass()},
                        {"worst", c.worst},
                        {"tolerance", c.tolerance},
                        {"argmax_time", c.time},
                        {"argmax_location", c.location}});
  }
  j["criteria"] = criteria;
  for (const auto& [key, value] : report.values) j[key] = value;
  j["times"] = report.times;
  j["series"] = report.series;
  return j.dump();
}

double weighted_mass(const State& state, const ProblemSpec& spec) {
  if (state.species != spec.n()) throw Error(ErrorKind::dimension, "species count mismatch");
  double m = 0.0;
  for (int i = 0; i < state.species; ++i) {
    m += state.field(i).sum() / spec.species[i].alpha;
  }
  return m * state.grid.cell_volume();
}

double weighted_l1_distance(const State& a, const State& b, const ProblemSpec& spec) {
  check_same_shape(a, b);
  if (a.species != spec.n()) throw Error(ErrorKind::dimension, "species count mismatch");
  double d = 0.0;
  for (int i = 0; i < a.species; ++i) {
    d += (a.field(i) - b.field(i)).cwiseAbs().sum() / spec.species[i].alpha;
  }
  return d * a.grid.cell_volume();
}

std::vector<bool> sign_changes(const State& a, const State& b, double threshold) {
  check_same_shape(a, b);
  std::vector<bool> out;
  for (int i = 0; i < a.species; ++i) {
    const Eigen::VectorXd u = a.field(i) - b.field(i);
    out.push_back(u.maxCoeff() > threshold && -u.minCoeff() > threshold);
  }
  return out;
}

ContractionResult check_contraction(const ProblemSpec& spec, const State& u0_a, const State& u0_b,
                                    const StepConfig& cfg) {
  check_same_shape(u0_a, u0_b);
  auto [ta, tb] = run_pair(spec, u0_a, u0_b, cfg);

  ContractionResult out;
  DifferenceSeries& ds = out.series;
  for (std::size_t k = 0; k < ta.snapshots.size(); ++k) {
    const State& a = ta.snapshots[k].state;
    const State& b = tb.snapshots[k].state;
    ds.times.push_back(a.time);
    ds.norms.push_back(weighted_l1_distance(a, b, spec));
    ds.sign_change.push_back(sign_changes(a, b));
  }
  CheckReport& r = out.report;
  r.name = "contraction";
  r.times = ds.times;
  r.series = ds.norms;
  const double slack = kContractionSlack * (1.0 + ds.norms.front());
  r.add(monotone("l1_distance_nonincreasing", ds.times, ds.norms, slack));
  r.values.emplace_back("initial_distance", ds.norms.front());
  r.values.emplace_back("final_distance", ds.norms.back());
  return out;
}

CheckReport check_comparison(const ProblemSpec& spec, const State& u0_low, const State& u0_high,
                             const StepConfig& cfg) {
  check_same_shape(u0_low, u0_high);
  if ((u0_low.values - u0_high.values).maxCoeff() > 0.0) {
    throw Error(ErrorKind::config, "comparison needs u0_low <= u0_high cellwise");
  }
  auto [low, high] = run_pair(spec, u0_low, u0_high, cfg);

  CheckReport r;
  r.name = "comparison";
  Criterion order{"ordering", 0.0, kComparisonTolerance, 0.0, -1};
  Criterion positive{"positivity", 0.0, kComparisonTolerance, 0.0, -1};
  for (std::size_t k = 0; k < low.snapshots.size(); ++k) {
    const State& a = low.snapshots[k].state;
    const State& b = high.snapshots[k].state;
    Eigen::Index at = 0;
    const double gap = (a.values - b.values).maxCoeff(&at);
    if (gap > order.worst) order = {"ordering", gap, kComparisonTolerance, a.time, static_cast<long>(at)};
    for (const State* s : {&a, &b}) {
      const double neg = -s->values.minCoeff(&at);
      if (neg > positive.worst) {
        positive = {"positivity", neg, kComparisonTolerance, a.time, static_cast<long>(at)};
      }
    }
    r.times.push_back(a.time);
    r.series.push_back(std::max(gap, 0.0));
  }
  r.add(order);
  r.add(positive);
  return r;
}

CheckReport check_convergence(const ProblemSpec& spec, const State& u0, const StepConfig& cfg,
                              const State& target, double threshold) {
  check_same_shape(u0, target);
  const Trajectory traj = run(spec, u0, cfg);
  CheckReport r;
  r.name = "convergence";
  for (const auto& snap : traj.snapshots) {
    r.times.push_back(snap.state.time);
    r.series.push_back(weighted_l1_distance(snap.state, target, spec));
  }
  const double slack = kContractionSlack * (1.0 + r.series.front());
  r.add(monotone("lyapunov_nonincreasing", r.times, r.series, slack));
  r.add(Criterion{"final_distance", r.series.back(), threshold, r.times.back(), -1});
  return r;
}

double contraction_ratio(const DifferenceSeries& series, double window) {
  if (series.norms.empty() || !(series.norms.front() > 0.0)) return 0.0;
  for (std::size_t k = 0; k < series.times.size(); ++k) {
    if (series.times[k] >= window - 1e-12) return series.norms[k] / series.norms.front();
  }
  return series.norms.back() / series.norms.front();
}

State oracle_expm(const SystemOperator& op, double t, const State& u0) {
  const Eigen::Index size = op.matrix.rows();
  if (size > kOracleMaxUnknowns) {
    throw Error(ErrorKind::oracle_scope, "dense oracle is limited to 512 unknowns");
  }
  if (u0.values.size() != size) throw Error(ErrorKind::dimension, "state/operator mismatch");
  State out = u0;
  out.time = u0.time + t;
  if (t == 0.0) return out;
  const Eigen::MatrixXd dense = Eigen::MatrixXd(op.matrix) * t;
  out.values = expm(dense) * u0.values;
  return out;
}

double fitted_order(const std::vector<double>& dts, const std::vector<double>& errors) {
  const std::size_t n = dts.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const double x = std::log(dts[k]);
    const double y = std::log(errors[k]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

CheckReport oracle_compare(const ProblemSpec& spec, const State& u0, const StepConfig& cfg,
                           double t) {
  const SystemOperator op = assemble_system(spec);
  const State exact = oracle_expm(op, t, u0);
  const double scale = weighted_l1_distance(exact, State::zeros(exact.grid, exact.species), spec);

  CheckReport r;
  r.name = "oracle";
  for (double dt : {cfg.dt, cfg.dt / 2.0, cfg.dt / 4.0}) {
    StepConfig c = cfg;
    c.dt = dt;
    c.t_end = t;
    c.stride = std::numeric_limits<int>::max();
    const Trajectory traj = run(spec, u0, c);
    const double err = weighted_l1_distance(traj.final_state(), exact, spec);
    r.times.push_back(dt);
    r.series.push_back(scale > 0.0 ? err / scale : err);
  }
  // agreement to round-off (stationary or zero data) needs no order fit
  constexpr double kExactAgreement = 1e-10;
  const bool exact_agreement =
      std::all_of(r.series.begin(), r.series.end(), [](double e) { return e <= kExactAgreement; });
  const double order = exact_agreement ? std::numeric_limits<double>::quiet_NaN()
                                       : fitted_order(r.times, r.series);
  r.values.emplace_back("order", order);
  r.values.emplace_back("error_finest", r.series.back());
  if (exact_agreement) {
    r.add(Criterion{"exact_agreement", r.series.back(), kExactAgreement, t, -1});
  } else {
    // order >= 0.9  <=>  0.9 - order <= 0
    r.add(Criterion{"temporal_order_deficit", 0.9 - order, 0.0, t, -1});
  }
  return r;
}

}  // namespace motorflux
