#pragma once

#include <string>
#include <vector>

#include "motorflux/discretize.hpp"
#include "motorflux/evolve.hpp"
#include "motorflux/model.hpp"
#include "motorflux/steady.hpp"

namespace motorflux {

/// One monitored inequality: passes iff worst <= tolerance.
struct Criterion {
  std::string name;
  double worst = 0.0;
  double tolerance = 0.0;
  double time = 0.0;   // time of the worst value
  long location = -1;  // flattened cell index of the worst value, -1 if global

  bool pass() const { return worst <= tolerance; }
};

struct CheckReport {
  std::string name;
  bool pass = true;
  std::vector<Criterion> criteria;
  std::vector<double> times;
  std::vector<double> series;
  std::vector<std::pair<std::string, double>> values;  // extra scalars, e.g. a fitted order

  /// Criterion with the largest worst/tolerance ratio.
  const Criterion& worst() const;
  void add(Criterion c);
};

/// Serializes to a single-line JSON object (no trailing newline).
std::string to_ndjson(const CheckReport& report);

struct DifferenceSeries {
  std::vector<double> times;
  std::vector<double> norms;
  /// sign_change[k][i]: species i difference takes both signs (above 1e-8)
  std::vector<std::vector<bool>> sign_change;
};

double weighted_mass(const State& state, const ProblemSpec& spec);
double weighted_l1_distance(const State& a, const State& b, const ProblemSpec& spec);

/// Species i changes sign: both max(U_i) and max(-U_i) exceed `threshold`.
std::vector<bool> sign_changes(const State& a, const State& b, double threshold = 1e-8);

inline constexpr double kContractionSlack = 1e-10;
inline constexpr double kComparisonTolerance = 1e-12;

struct ContractionResult {
  CheckReport report;
  DifferenceSeries series;
};

ContractionResult check_contraction(const ProblemSpec& spec, const State& u0_a, const State& u0_b,
                                    const StepConfig& cfg);

CheckReport check_comparison(const ProblemSpec& spec, const State& u0_low, const State& u0_high,
                             const StepConfig& cfg);

CheckReport check_convergence(const ProblemSpec& spec, const State& u0, const StepConfig& cfg,
                              const State& target, double threshold);

/// Ratio norms(t) / norms(0) at the first snapshot with time >= window.
double contraction_ratio(const DifferenceSeries& series, double window);

inline constexpr int kOracleMaxUnknowns = 512;

/// exp(tA) u0 on the dense matrix.
State oracle_expm(const SystemOperator& op, double t, const State& u0);

/// Implicit Euler at dt, dt/2, dt/4 against the dense exponential at time t.
/// series holds the relative weighted-L1 errors, times the step sizes.
CheckReport oracle_compare(const ProblemSpec& spec, const State& u0, const StepConfig& cfg,
                           double t);

/// Least-squares slope of log(error) against log(dt).
double fitted_order(const std::vector<double>& dts, const std::vector<double>& errors);

}  // namespace motorflux
