#include <cmath>
#include <limits>
#include <random>

#include "doctest.h"
#include "dptool/normative.hpp"
#include "helpers.hpp"

using namespace dptool;

namespace {

bool close(double a, double b, double tol = 1e-12) { return std::abs(a - b) <= tol; }

// Independent expected-score evaluation, used as an oracle against the
// library's argmax.
std::size_t oracle_argmax(const Matrix& table, const std::vector<double>& belief) {
  std::size_t best = 0;
  double best_score = -std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < table.size(); ++a) {
    double e = 0.0;
    for (std::size_t t = 0; t < belief.size(); ++t) e += belief[t] * table[a][t];
    if (e > best_score) {
      best_score = e;
      best = a;
    }
  }
  return best;
}

} // namespace

TEST_CASE("realize_rule") {
  auto p = fixtures::judge_problem();
  auto realized = realize_rule(p.incentive_rule, p.actions, 2);
  CHECK(realized.scores == p.incentive_rule.table);

  auto q = fixtures::quadratic_report_problem(3); // grid {0, 0.5, 1} on state 2
  auto quad = realize_rule(q.incentive_rule, q.actions, 2);
  REQUIRE(quad.n_actions() == 3);
  // report (0.5, 0.5): 2*0.5 - (0.25 + 0.25) = 0.5 in both states
  CHECK(close(quad.scores[1][0], 0.5));
  CHECK(close(quad.scores[1][1], 0.5));
  // report (1, 0): 2 - 1 = 1 if first state, -1 otherwise
  CHECK(close(quad.scores[0][0], 1.0));
  CHECK(close(quad.scores[0][1], -1.0));

  SUBCASE("belief rules reject discrete action spaces") {
    ScoringRule bad;
    bad.form = RuleForm::Quadratic;
    CHECK_THROWS_AS(realize_rule(bad, p.actions, 2), DomainError);
  }
}

TEST_CASE("optimal action switches at 12/19 under the asymmetric-cost rule") {
  auto p = fixtures::judge_problem();

  CHECK(optimal_action(p.incentive_rule, p.actions, Belief{{1.0, 0.0}}).first == 0);
  CHECK(optimal_action(p.incentive_rule, p.actions, Belief{{0.0, 1.0}}).first == 1);
  CHECK(optimal_action(p.incentive_rule, p.actions, Belief{{0.37, 0.63}}).first == 0);
  CHECK(optimal_action(p.incentive_rule, p.actions, Belief{{0.36, 0.64}}).first == 1);

  // exact ties break toward the lower index (dyadic tie, no rounding)
  auto sym = fixtures::table_rule({{1.0, 0.0}, {0.0, 1.0}});
  CHECK(optimal_action(sym, p.actions, Belief{{0.5, 0.5}}).first == 0);

  // first grid belief preferring the second action
  auto grid = belief_grid(2);
  std::size_t first_flip = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (argmax_action(realize_rule(p.incentive_rule, p.actions, 2), grid[i]) == 1) {
      first_flip = i;
      break;
    }
  }
  CHECK(first_flip == 64);

  CHECK(optimal_action_certain(p.incentive_rule, p.actions, 0) == 0);
  CHECK(optimal_action_certain(p.incentive_rule, p.actions, 1) == 1);
}

TEST_CASE("optimal action is invariant under positive affine rescaling") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto grid = belief_grid(2, 21);

  for (int trial = 0; trial < 20; ++trial) {
    Matrix table(3, std::vector<double>(2));
    for (auto& row : table)
      for (double& x : row) x = unit(rng) * 4.0 - 2.0;
    double a = 0.1 + 3.0 * unit(rng), b = unit(rng) * 10.0 - 5.0;
    Matrix scaled = table;
    for (auto& row : scaled)
      for (double& x : row) x = a * x + b;

    ActionSpace actions;
    actions.actions = {"one", "two", "three"};
    auto base = realize_rule(fixtures::table_rule(table), actions, 2);
    auto moved = realize_rule(fixtures::table_rule(scaled), actions, 2);
    for (const auto& belief : grid) {
      CHECK(argmax_action(base, belief) == argmax_action(moved, belief));
    }
  }
}

TEST_CASE("properized table rule") {
  auto p = fixtures::judge_problem();
  auto proper = properize(p.incentive_rule, p.actions, 2);

  // acting on the uniform belief picks the first action, scores (0.2, -0.2)
  CHECK(proper.optimal_action_index({0.5, 0.5}) == 0);
  CHECK(close(proper.score({0.5, 0.5}, 0), 0.2));
  CHECK(close(proper.score({0.5, 0.5}, 1), -0.2));
  CHECK(close(proper.expected_truthful({0.5, 0.5}), 0.0));
  CHECK(close(proper.expected_truthful({0.0, 1.0}), 0.5));

  // memoized grid agrees with the direct oracle everywhere
  const auto& grid = proper.memo_grid();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CHECK(proper.memo_actions()[i] == oracle_argmax(p.incentive_rule.table, grid[i]));
  }
}

TEST_CASE("properness verdicts") {
  auto actions = belief_report_actions(2);

  SUBCASE("quadratic rule is strictly proper") {
    ScoringRule rule;
    rule.form = RuleForm::Quadratic;
    auto report = is_proper(rule, actions, 2);
    CHECK(report.proper);
    CHECK(report.strict);
  }

  SUBCASE("clipped logarithmic rule is strictly proper") {
    ScoringRule rule;
    rule.form = RuleForm::Logarithmic;
    rule.log_epsilon = 1e-4;
    auto report = is_proper(rule, actions, 2);
    CHECK(report.proper);
    CHECK(report.strict);
  }

  SUBCASE("linear rule S(report, state) = report[state] is improper") {
    ScoringRule rule;
    rule.form = RuleForm::Table;
    rule.table = actions.grid; // paying out the reported probability
    auto report = is_proper(rule, actions, 2);
    CHECK_FALSE(report.proper);
    REQUIRE(report.counterexample.has_value());
    const auto& cx = *report.counterexample;
    CHECK(cx.better_score > cx.truthful_score + 1e-9);
    // exaggerating toward a vertex beats honesty
    const auto& better = actions.grid[cx.better_index];
    CHECK((close(better[0], 1.0) || close(better[1], 1.0)));
  }

  SUBCASE("constant rule is weakly proper with a tie witness") {
    ScoringRule rule;
    rule.form = RuleForm::Table;
    rule.table = Matrix(actions.size(), std::vector<double>(2, 1.0));
    auto report = is_proper(rule, actions, 2);
    CHECK(report.proper);
    CHECK_FALSE(report.strict);
    CHECK(report.tie_witness.has_value());
  }
}

TEST_CASE("rational baseline, benchmark, and value of information") {
  SUBCASE("perfectly revealing problem") {
    auto p = fixtures::judge_problem();
    CHECK(close(rational_baseline(p), 0.0));
    CHECK(close(rational_benchmark(p), 0.35));
    CHECK(close(value_of_information(p), 0.35));
  }

  SUBCASE("skewed endowed priors do not move the baseline (it uses the joint)") {
    auto p = fixtures::judge_problem();
    p.endowed_prior = Belief{{0.55, 0.45}};
    CHECK(close(rational_baseline(p), 0.0));
  }

  SUBCASE("skewed joint marginal moves the baseline") {
    auto p = fixtures::judge_problem();
    p.info.joint = {{0.55, 0.0}, {0.0, 0.45}};
    CHECK(close(rational_baseline(p), 0.02));
    CHECK(close(rational_benchmark(p), 0.55 * 0.2 + 0.45 * 0.5));
  }

  SUBCASE("noisy problem") {
    auto p = fixtures::noisy_judge_problem();
    CHECK(close(rational_baseline(p), 0.0));
    CHECK(close(rational_benchmark(p), 0.16));
    CHECK(close(value_of_information(p), 0.16));
  }

  SUBCASE("dominated-action problem has exactly zero value") {
    auto p = fixtures::turnout_problem();
    CHECK(rational_benchmark(p) == 0.375);
    CHECK(rational_baseline(p) == 0.375);
    CHECK(value_of_information(p) == 0.0);
  }

  SUBCASE("zero-mass signals are skipped, not fatal") {
    auto p = fixtures::judge_problem();
    p.info.joint = {{0.5, 0.5}, {0.0, 0.0}};
    CHECK_NOTHROW(rational_benchmark(p));
    CHECK(close(rational_benchmark(p), rational_baseline(p)));
  }

  SUBCASE("incentive and evaluation rules can be scored separately") {
    auto p = fixtures::judge_problem();
    p.evaluation_rule = fixtures::table_rule({{1.0, 0.0}, {0.0, 1.0}});
    CHECK(close(rational_benchmark(p, RuleChoice::Incentive), 0.35));
    CHECK(close(rational_benchmark(p, RuleChoice::Evaluation), 1.0));
  }
}

TEST_CASE("value of information is nonnegative on randomized problems") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> dim(2, 4);

  for (int trial = 0; trial < 100; ++trial) {
    std::size_t n_states = dim(rng), n_signals = dim(rng), n_actions = dim(rng);
    DecisionProblem p;
    for (std::size_t i = 0; i < n_states; ++i) p.states.states.push_back("t" + std::to_string(i));
    for (std::size_t i = 0; i < n_actions; ++i) p.actions.actions.push_back("a" + std::to_string(i));
    for (std::size_t i = 0; i < n_signals; ++i) p.signals.signals.push_back("v" + std::to_string(i));
    p.info.joint = Matrix(n_signals, std::vector<double>(n_states));
    double total = 0.0;
    for (auto& row : p.info.joint)
      for (double& x : row) total += (x = unit(rng));
    for (auto& row : p.info.joint)
      for (double& x : row) x /= total;
    p.incentive_rule.table = Matrix(n_actions, std::vector<double>(n_states));
    for (auto& row : p.incentive_rule.table)
      for (double& x : row) x = unit(rng) * 2.0 - 1.0;
    p.evaluation_rule = p.incentive_rule;

    CHECK(value_of_information(p) >= -1e-12);
  }
}

TEST_CASE("ordering axiom checks") {
  PreferenceRelation rel;
  rel.options = {"a", "b", "c"};

  SUBCASE("a complete transitive relation passes") {
    rel.weak_pref = {{true, true, true}, {false, true, true}, {false, false, true}};
    auto verdict = check_ordering_axiom(rel);
    CHECK(verdict.pass);
    CHECK(verdict.failure == OrderingVerdict::Failure::None);
  }

  SUBCASE("a three-cycle fails transitivity with the witness triple") {
    rel.weak_pref = {{true, true, false}, {false, true, true}, {true, false, true}};
    auto verdict = check_ordering_axiom(rel);
    CHECK_FALSE(verdict.pass);
    CHECK(verdict.failure == OrderingVerdict::Failure::Transitivity);
    CHECK(verdict.witness.size() == 3);
  }

  SUBCASE("an incomparable pair fails completeness") {
    rel.weak_pref = {{true, false, true}, {false, true, true}, {false, false, true}};
    auto verdict = check_ordering_axiom(rel);
    CHECK_FALSE(verdict.pass);
    CHECK(verdict.failure == OrderingVerdict::Failure::Completeness);
    CHECK(verdict.witness.size() == 2);
  }
}

TEST_CASE("non-indifference check separates real rules from flat ones") {
  auto p = fixtures::judge_problem();
  auto verdict = check_non_indifference(p.incentive_rule, p.actions, 2);
  CHECK(verdict.pass);
  CHECK(verdict.action_a != verdict.action_b);

  auto flat = fixtures::flat_turnout_problem();
  auto flat_verdict = check_non_indifference(flat.incentive_rule, flat.actions, 2);
  CHECK_FALSE(flat_verdict.pass);
}
