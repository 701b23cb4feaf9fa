#include <doctest.h>

#include <random>

#include "fixtures.hpp"
#include "motorflux/model.hpp"

using namespace motorflux;
using test::flat_motor;

namespace {

bool has_rule(const ValidationReport& r, Rule rule) {
  for (const auto& v : r.violations) {
    if (v.rule == rule) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("grid geometry") {
  const Grid g = Grid::interval(0.0, 1.0, 4);
  CHECK(g.cell_volume() == doctest::Approx(0.25));
  CHECK(g.center(0).x == doctest::Approx(0.125));
  CHECK(g.face(0, 4) == doctest::Approx(1.0));

  const Grid r = Grid::rectangle({0.0, 2.0, 8}, {-1.0, 1.0, 5});
  CHECK(r.num_cells() == 40);
  CHECK(std::abs(r.cell_volume() * r.num_cells() - r.total_volume()) <= 1e-12 * r.total_volume());
  CHECK(r.center(8 + 3).y == doctest::Approx(-1.0 + 1.5 * 0.4));

  CHECK_THROWS_AS(Grid::interval(1.0, 0.0, 4), Error);
  CHECK_THROWS_AS(Grid::interval(0.0, 1.0, 1), Error);
}

TEST_CASE("validate accepts the symmetric two-state motor") {
  const ValidationReport r = validate(flat_motor(16));
  CHECK(r.ok());
  CHECK(r.warnings.empty());
}

TEST_CASE("validate names the broken column sum") {
  ProblemSpec spec = flat_motor(16);
  spec.coupling.lambda << -1, 0, 1, -1;
  const ValidationReport r = validate(spec);
  REQUIRE_FALSE(r.ok());
  REQUIRE(has_rule(r, Rule::coupling_column_sum));
  CHECK(r.summary().find("column 2 sums to -1 != 0") != std::string::npos);
  // lambda_12 = 0 also disconnects the coupling graph
  CHECK_FALSE(r.warnings.empty());
}

TEST_CASE("validate rejects sub-linear power reactions") {
  ProblemSpec spec = flat_motor(16);
  spec.species[0].reaction = ReactionSpec::power(0.5);
  const ValidationReport r = validate(spec);
  REQUIRE(has_rule(r, Rule::reaction_admissible));
  CHECK(r.summary().find("reaction not admissible (p<1)") != std::string::npos);
}

TEST_CASE("validate flags each hypothesis") {
  ProblemSpec spec = flat_motor(16);
  spec.species[1].sigma = -1.0;
  CHECK(has_rule(validate(spec), Rule::positive_constants));

  spec = flat_motor(16);
  spec.species[0].alpha = 0.0;
  CHECK(has_rule(validate(spec), Rule::positive_constants));

  spec = flat_motor(16);
  spec.coupling.lambda << 1, 1, -1, -1;
  CHECK(has_rule(validate(spec), Rule::metzler_pattern));

  spec = flat_motor(16);
  spec.initial[0] = InitialSpec::constant(-0.5);
  CHECK(has_rule(validate(spec), Rule::nonnegative_initial));

  spec = flat_motor(16);
  spec.initial[1].kind = InitialKind::cosine;
  spec.initial[1].value = 0.5;
  spec.initial[1].amplitude = 1.0;
  CHECK(has_rule(validate(spec), Rule::nonnegative_initial));

  spec = flat_motor(16);
  spec.species[0].potential = PotentialSpec::tabulated({0.2, 1.0}, {0.0, 1.0});
  CHECK(has_rule(validate(spec), Rule::potential_admissible));

  spec = flat_motor(16);
  spec.coupling.lambda = Eigen::MatrixXd::Zero(3, 3);
  CHECK(has_rule(validate(spec), Rule::shape));
}

TEST_CASE("validate is idempotent and tolerates round-off only") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const ProblemSpec spec = test::random_linear_spec(rng, 1 + trial % 3, 8);
    const ValidationReport a = validate(spec);
    const ValidationReport b = validate(spec);
    CHECK(a.ok());
    CHECK(a.summary() == b.summary());
    CHECK(spec.coupling.column_sums().cwiseAbs().maxCoeff() <= kColumnSumTolerance);
  }
  ProblemSpec spec = flat_motor(8);
  spec.coupling.lambda(0, 0) -= 1e-13;
  CHECK_FALSE(validate(spec).ok());
}

TEST_CASE("eval_potential") {
  const Grid g = Grid::interval(0.0, 1.0, 4);
  CHECK(eval_potential(PotentialSpec::zero(), g, {0.3}) == 0.0);
  CHECK(eval_potential(PotentialSpec::linear(2.0), g, {0.5}) == doctest::Approx(1.0));
  CHECK(eval_potential(PotentialSpec::cosine(1.0, 1.0), g, {0.0}) == doctest::Approx(1.0));
  CHECK(eval_potential(PotentialSpec::cosine(1.0, 1.0), g, {0.5}) == doctest::Approx(-1.0));

  const PotentialSpec saw = PotentialSpec::sawtooth(1.0, 1.0, 0.0, 2);
  // sin(pi/2) + sin(pi)/2
  CHECK(eval_potential(saw, g, {0.25}) == doctest::Approx(1.0));
  CHECK(eval_potential(saw, g, {0.0}) == doctest::Approx(0.0));

  const PotentialSpec tab = PotentialSpec::tabulated({0.0, 0.5, 1.0}, {0.0, 2.0, 0.0});
  CHECK(eval_potential(tab, g, {0.25}) == doctest::Approx(1.0));
  CHECK(eval_potential(tab, g, {1.0}) == doctest::Approx(0.0));

  CHECK_THROWS_AS(eval_potential(PotentialSpec::zero(), g, {1.5}), Error);
  CHECK_THROWS_AS(eval_potential(PotentialSpec::zero(), g, {-0.1}), Error);
}

TEST_CASE("eval_reaction") {
  CHECK(eval_reaction(ReactionSpec::linear(), 3.5) == 3.5);
  CHECK(eval_reaction(ReactionSpec::power(2.0), 0.0) == 0.0);
  CHECK(eval_reaction(ReactionSpec::power(2.0), 3.0) == doctest::Approx(9.0));
  CHECK_THROWS_AS(eval_reaction(ReactionSpec::linear(), -1.0), Error);

  CHECK(inverse_reaction(ReactionSpec::power(2.0), 9.0) == doctest::Approx(3.0));
  CHECK(reaction_lipschitz(ReactionSpec::power(3.0), 2.0) == doctest::Approx(12.0));
  CHECK(reaction_lipschitz(ReactionSpec::linear(), 100.0) == 1.0);
}

TEST_CASE("reactions are nondecreasing (property)") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> s(0.0, 10.0);
  std::uniform_real_distribution<double> p(1.0, 5.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const ReactionSpec r = trial % 4 == 0 ? ReactionSpec::linear() : ReactionSpec::power(p(rng));
    double a = s(rng);
    double b = s(rng);
    if (a > b) std::swap(a, b);
    CHECK(eval_reaction(r, a) <= eval_reaction(r, b));
  }
}

TEST_CASE("random initial data is reproducible per seed") {
  const Grid g = Grid::interval(0.0, 1.0, 32);
  InitialSpec init;
  init.kind = InitialKind::random;
  init.value = 0.5;
  init.amplitude = 1.0;
  const Eigen::VectorXd a = sample_initial(init, g, 42);
  const Eigen::VectorXd b = sample_initial(init, g, 42);
  const Eigen::VectorXd c = sample_initial(init, g, 43);
  CHECK(a == b);
  CHECK(a != c);
  CHECK(a.minCoeff() >= 0.5);
  CHECK(a.maxCoeff() <= 1.5);
}
