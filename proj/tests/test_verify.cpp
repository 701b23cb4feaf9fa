#include <doctest.h>

#include <cmath>
#include <random>

#include <json.hpp>
#include <unsupported/Eigen/MatrixFunctions>

#include "fixtures.hpp"
#include "motorflux/expm.hpp"
#include "motorflux/verify.hpp"

using namespace motorflux;

namespace {

StepConfig config(double dt, double t_end, int stride = 1) {
  StepConfig cfg;
  cfg.dt = dt;
  cfg.t_end = t_end;
  cfg.stride = stride;
  return cfg;
}

}  // namespace

TEST_CASE("weighted mass") {
  ProblemSpec spec = test::flat_motor(10);
  CHECK(weighted_mass(State::zeros(spec.grid, 2), spec) == 0.0);
  spec.species[1].alpha = 2.0;
  State s = State::zeros(spec.grid, 2);
  s.values.setOnes();
  // 1/1 + 1/2 on the unit interval
  CHECK(weighted_mass(s, spec) == doctest::Approx(1.5));
}

TEST_CASE("weighted l1 distance is a metric") {
  std::mt19937_64 rng(101);
  const ProblemSpec spec = test::random_linear_spec(rng, 3, 16);
  for (int trial = 0; trial < 200; ++trial) {
    const State a = test::random_state(spec, rng, -1.0, 1.0);
    const State b = test::random_state(spec, rng, -1.0, 1.0);
    const State c = test::random_state(spec, rng, -1.0, 1.0);
    const double ab = weighted_l1_distance(a, b, spec);
    CHECK(ab == doctest::Approx(weighted_l1_distance(b, a, spec)).epsilon(1e-15));
    CHECK(weighted_l1_distance(a, a, spec) == 0.0);
    CHECK(weighted_l1_distance(a, c, spec) <= ab + weighted_l1_distance(b, c, spec) + 1e-14);
  }
  // one-signed difference: distance equals the mass difference
  const State a = test::random_state(spec, rng, 1.0, 2.0);
  const State b = test::random_state(spec, rng, 0.0, 1.0);
  CHECK(weighted_l1_distance(a, b, spec) ==
        doctest::Approx(weighted_mass(a, spec) - weighted_mass(b, spec)).epsilon(1e-13));
}

TEST_CASE("sign changes") {
  const ProblemSpec spec = test::flat_motor(4);
  State a = State::zeros(spec.grid, 2);
  State b = State::zeros(spec.grid, 2);
  a.values << 1, 0, 0, 0, 1, 1, 1, 1;
  b.values << 0, 1, 0, 0, 0, 0, 0, 0;
  const std::vector<bool> sc = sign_changes(a, b);
  CHECK(sc[0]);
  CHECK_FALSE(sc[1]);
  b.values[1] = 1.0 + 1e-9;
  CHECK(sign_changes(a, b)[0]);
  b.values[1] = 1e-9;
  CHECK_FALSE(sign_changes(a, b)[0]);
}

TEST_CASE("contraction: identical data gives a zero series") {
  std::mt19937_64 rng(103);
  const ProblemSpec spec = test::sawtooth_motor(32);
  const State u = test::random_state(spec, rng, 0.0, 1.0);
  const ContractionResult r = check_contraction(spec, u, u, config(0.01, 0.5, 5));
  CHECK(r.report.pass);
  for (double d : r.series.norms) CHECK(d == 0.0);
}

TEST_CASE("contraction: ordered data keeps the distance") {
  std::mt19937_64 rng(107);
  for (int trial = 0; trial < 3; ++trial) {
    const ProblemSpec spec = test::random_linear_spec(rng, 2, 32);
    const State lo = test::random_state(spec, rng, 0.0, 1.0);
    State hi = lo;
    hi.values.array() += 0.5;
    const ContractionResult r = check_contraction(spec, lo, hi, config(0.01, 1.0, 10));
    CHECK(r.report.pass);
    for (double d : r.series.norms) CHECK(d == doctest::Approx(r.series.norms.front()).epsilon(1e-11));
  }
}

TEST_CASE("contraction: sign-changing data contracts strictly") {
  std::mt19937_64 rng(109);
  const ProblemSpec spec = test::sawtooth_motor(32);
  const State a = test::random_state(spec, rng, 0.0, 2.0);
  const State b = test::random_state(spec, rng, 0.0, 2.0);
  const ContractionResult r = check_contraction(spec, a, b, config(0.01, 1.0, 10));
  CHECK(r.report.pass);
  CHECK(r.series.sign_change.front()[0]);
  CHECK(contraction_ratio(r.series, 1.0) < 0.99);
  for (std::size_t k = 1; k < r.series.norms.size(); ++k)
    CHECK(r.series.norms[k] <= r.series.norms[k - 1] * (1 + 1e-10) + 1e-14);
}

TEST_CASE("comparison principle") {
  std::mt19937_64 rng(113);
  const ProblemSpec spec = test::sawtooth_motor(32);
  const State high = test::random_state(spec, rng, 0.0, 2.0);
  CHECK(check_comparison(spec, State::zeros(spec.grid, 2), high, config(0.01, 1.0, 10)).pass);

  const StationaryState v = solve_null_vector(assemble_system(spec));
  State low = v.state;
  for (Eigen::Index k = 0; k < low.values.size(); ++k)
    low.values[k] *= std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  const CheckReport r = check_comparison(spec, low, v.state, config(0.01, 1.0, 10));
  CHECK(r.pass);
  CHECK(r.criteria.size() == 2);

  const ProblemSpec rev = test::reversible_spec(32, 2.0, 1.0);
  const State rlow = test::random_state(rev, rng, 0.0, 1.0);
  State rhigh = rlow;
  rhigh.values.array() += test::random_state(rev, rng, 0.0, 1.0).values.array();
  CHECK(check_comparison(rev, rlow, rhigh, config(0.005, 1.0, 20)).pass);

  State bad = rlow;
  bad.values[0] = rhigh.values[0] + 1.0;
  CHECK_THROWS_AS(check_comparison(rev, bad, rhigh, config(0.005, 0.1)), Error);
}

TEST_CASE("convergence check") {
  std::mt19937_64 rng(127);
  const ProblemSpec spec = test::sawtooth_motor(32);
  const StationaryRay ray{solve_null_vector(assemble_system(spec))};
  const State u0 = test::random_state(spec, rng, 0.0, 2.0);
  const RayProjection target = project_onto_ray(u0, ray, spec);
  CheckReport r = check_convergence(spec, u0, config(0.01, 50.0, 100), target.state.state, 1e-6);
  CHECK(r.pass);
  CHECK(r.criteria.size() == 2);
  r = check_convergence(spec, u0, config(0.01, 0.1, 1), target.state.state, 1e-6);
  CHECK_FALSE(r.pass);

  const ProblemSpec rev = test::reversible_spec(32, 2.0, 1.0);
  const State w0 = test::random_state(rev, rng, 0.5, 1.5);
  CHECK(check_convergence(rev, w0, config(0.01, 50.0, 100), reversible_target(w0, rev), 1e-6).pass);
}

TEST_CASE("dense exponential") {
  std::mt19937_64 rng(131);
  Eigen::MatrixXd m = Eigen::MatrixXd::Random(6, 6);
  for (double scale : {1e-3, 0.3, 2.0, 20.0}) {
    const Eigen::MatrixXd a = scale * m;
    const Eigen::MatrixXd ref = a.exp();
    CHECK((expm(a) - ref).norm() <= 1e-12 * ref.norm());
  }
  CHECK((expm(Eigen::MatrixXd::Zero(3, 3)) - Eigen::MatrixXd::Identity(3, 3)).norm() == 0.0);

  const ProblemSpec spec = test::random_linear_spec(rng, 2, 16);
  const SystemOperator op = assemble_system(spec);
  const State u0 = test::random_state(spec, rng, 0.0, 1.0);
  CHECK((oracle_expm(op, 0.0, u0).values - u0.values).cwiseAbs().maxCoeff() <= 1e-15);
  const State u1 = oracle_expm(op, 1.0, u0);
  CHECK(weighted_mass(u1, spec) == doctest::Approx(weighted_mass(u0, spec)).epsilon(1e-12));
  const State half = oracle_expm(op, 0.5, oracle_expm(op, 0.5, u0));
  CHECK((half.values - u1.values).cwiseAbs().maxCoeff() <= 1e-9);
}

TEST_CASE("oracle comparison") {
  const ProblemSpec spec = test::sawtooth_motor(8);
  std::mt19937_64 rng(137);
  const State u0 = test::random_state(spec, rng, 0.0, 1.0);
  CheckReport r = oracle_compare(spec, u0, config(0.1, 1.0), 1.0);
  CHECK(r.pass);
  double order = 0.0;
  for (auto& [k, v] : r.values)
    if (k == "order") order = v;
  CHECK(order >= 0.9);
  CHECK(order <= 1.2);
  CHECK(r.series.size() == 3);
  CHECK(r.series[2] <= 5e-3);

  r = oracle_compare(spec, State::zeros(spec.grid, 2), config(0.1, 1.0), 1.0);
  CHECK(r.pass);
  CHECK(r.criteria.front().name == "exact_agreement");

  CHECK_THROWS_AS(oracle_compare(test::sawtooth_motor(300), State::zeros(Grid::interval(0, 1, 300), 2),
                                 config(0.1, 1.0), 1.0),
                  Error);
  CHECK(fitted_order({1.0, 0.5, 0.25}, {4.0, 1.0, 0.25}) == doctest::Approx(2.0));
}

TEST_CASE("ndjson report") {
  CheckReport r;
  r.name = "comparison";
  r.add(Criterion{"ordering", 1e-13, 1e-12, 0.5, 7});
  r.add(Criterion{"positivity", 0.0, 1e-12, 0.0, -1});
  r.times = {0.0, 0.5};
  r.series = {0.0, 1e-13};
  const std::string line = to_ndjson(r);
  CHECK(line.find('\n') == std::string::npos);
  const auto j = nlohmann::json::parse(line);
  CHECK(j["name"] == "comparison");
  CHECK(j["pass"] == true);
  CHECK(j["worst"] == 1e-13);
  CHECK(j["argmax_time"] == 0.5);
  CHECK(j["argmax_location"] == 7);
  CHECK(j["criteria"].size() == 2);
  r.add(Criterion{"extra", 2.0, 1.0, 0.0, -1});
  CHECK_FALSE(r.pass);
  CHECK(r.worst().name == "extra");
}
