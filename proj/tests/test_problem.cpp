#include <cmath>
#include <random>
#include <set>

#include "doctest.h"
#include "dptool/problem.hpp"
#include "dptool/problem_io.hpp"
#include "helpers.hpp"

using namespace dptool;

namespace {

bool close(double a, double b, double tol = 1e-12) { return std::abs(a - b) <= tol; }

} // namespace

TEST_CASE("marginals, likelihoods, posteriors on the noisy prediction problem") {
  auto p = fixtures::noisy_judge_problem();

  Belief prior = marginal_prior(p.info);
  REQUIRE(prior.size() == 2);
  CHECK(close(prior[0], 0.5));
  CHECK(close(prior[1], 0.5));

  auto margins = signal_marginal(p.info);
  CHECK(close(margins[0], 0.5));
  CHECK(close(margins[1], 0.5));

  auto lik0 = likelihood(p.info, 0);
  CHECK(close(lik0[0], 0.8));
  CHECK(close(lik0[1], 0.2));
  auto lik0_by_label = likelihood(p.info, p.states, "no_recid");
  CHECK(lik0_by_label == lik0);

  Belief post1 = posterior(p.info, 1);
  CHECK(close(post1[0], 0.2));
  CHECK(close(post1[1], 0.8));
  Belief post1_by_label = posterior(p.info, p.signals, "pred_recid");
  CHECK(post1_by_label.probs == post1.probs);

  CHECK_THROWS_AS(likelihood(p.info, p.states, "nonesuch"), LabelNotFound);
  CHECK_THROWS_AS(posterior(p.info, p.signals, "nonesuch"), LabelNotFound);
}

TEST_CASE("zero-mass states and signals are rejected with typed errors") {
  InformationStructure info;
  info.joint = {{1.0, 0.0}, {0.0, 0.0}};
  CHECK_NOTHROW(likelihood(info, 0));
  CHECK_THROWS_AS(likelihood(info, 1), ZeroMassState);
  CHECK_THROWS_AS(posterior(info, 1), ZeroMassSignal);
}

TEST_CASE("validate_problem accepts the bundled problems") {
  CHECK(validate_problem(fixtures::judge_problem()).valid());
  CHECK(validate_problem(fixtures::noisy_judge_problem()).valid());
  CHECK(validate_problem(fixtures::turnout_problem()).valid());
  CHECK(validate_problem(fixtures::flat_turnout_problem()).valid());
  CHECK(validate_problem(fixtures::quadratic_report_problem()).valid());
}

TEST_CASE("validate_problem reports structural violations by code") {
  auto p = fixtures::judge_problem();

  SUBCASE("empty and duplicate label lists") {
    auto broken = p;
    broken.states.states.clear();
    CHECK(validate_problem(broken).has("STATES_EMPTY"));

    broken = p;
    broken.actions.actions = {"release", "release"};
    CHECK(validate_problem(broken).has("ACTIONS_DUPLICATE"));

    broken = p;
    broken.signals.signals = {"a", "a"};
    CHECK(validate_problem(broken).has("SIGNALS_DUPLICATE"));
  }

  SUBCASE("joint shape and normalization") {
    auto broken = p;
    broken.info.joint = {{0.5, 0.0}};
    CHECK(validate_problem(broken).has("JOINT_SHAPE_MISMATCH"));

    broken = p;
    broken.info.joint = {{0.5, -0.1}, {0.1, 0.5}};
    CHECK(validate_problem(broken).has("JOINT_NEGATIVE_ENTRY"));

    broken = p;
    broken.info.joint = {{0.5, 0.0}, {0.0, 0.6}};
    CHECK(validate_problem(broken).has("JOINT_NOT_NORMALIZED"));
  }

  SUBCASE("rule shape, finiteness, kind") {
    auto broken = p;
    broken.incentive_rule.table = {{0.2, -0.2}};
    CHECK(validate_problem(broken).has("RULE_SHAPE_MISMATCH"));

    broken = p;
    broken.evaluation_rule.table[0][0] = std::nan("");
    CHECK(validate_problem(broken).has("RULE_NONFINITE_SCORE"));

    broken = p;
    broken.incentive_rule.form = RuleForm::Quadratic;
    broken.incentive_rule.table.clear();
    CHECK(validate_problem(broken).has("RULE_KIND_MISMATCH"));
  }

  SUBCASE("clipped-log epsilon range") {
    auto belief = fixtures::quadratic_report_problem();
    belief.incentive_rule.form = RuleForm::Logarithmic;
    belief.evaluation_rule = belief.incentive_rule;
    belief.incentive_rule.log_epsilon = 0.0;
    belief.evaluation_rule.log_epsilon = 0.0;
    CHECK(validate_problem(belief).has("LOG_EPSILON_OUT_OF_RANGE"));
    belief.incentive_rule.log_epsilon = 0.5;
    belief.evaluation_rule.log_epsilon = 0.5;
    CHECK(validate_problem(belief).has("LOG_EPSILON_OUT_OF_RANGE"));
    belief.incentive_rule.log_epsilon = 1e-4;
    belief.evaluation_rule.log_epsilon = 1e-4;
    CHECK(validate_problem(belief).valid());
  }

  SUBCASE("endowed prior") {
    auto broken = p;
    broken.endowed_prior = Belief{{0.5}};
    CHECK(validate_problem(broken).has("PRIOR_SHAPE_MISMATCH"));

    broken = p;
    broken.endowed_prior = Belief{{0.7, 0.7}};
    CHECK(validate_problem(broken).has("PRIOR_NOT_NORMALIZED"));

    broken = p;
    broken.endowed_prior = Belief{{1.2, -0.2}};
    CHECK(validate_problem(broken).has("PRIOR_NEGATIVE_ENTRY"));
  }

  SUBCASE("aggregate statistics") {
    auto broken = p;
    broken.disclosure.aggregate_stats = {{"made_up_stat", 0.5, ""}};
    CHECK(validate_problem(broken).has("STAT_UNKNOWN_NAME"));

    broken = p;
    broken.disclosure.aggregate_stats = {{"unconditional_accuracy", 1.5, ""}};
    CHECK(validate_problem(broken).has("STAT_VALUE_OUT_OF_RANGE"));

    broken = p;
    broken.disclosure.aggregate_stats = {{"class_conditional_accuracy", 0.8, "nonesuch"}};
    CHECK(validate_problem(broken).has("STAT_UNKNOWN_CONDITIONING"));

    broken = p;
    broken.disclosure.aggregate_stats = {{"class_conditional_accuracy", 0.8, "recid"},
                                         {"confidence_conditional_on_prediction", 0.8,
                                          "pred_recid"}};
    CHECK(validate_problem(broken).valid());
  }
}

TEST_CASE("belief grids") {
  SUBCASE("two states default to 101 evenly spaced points") {
    auto grid = belief_grid(2);
    REQUIRE(grid.size() == 101);
    CHECK(grid.front() == std::vector<double>{1.0, 0.0});
    CHECK(grid.back() == std::vector<double>{0.0, 1.0});
    CHECK(close(grid[64][1], 0.64));
    for (const auto& b : grid) {
      CHECK(close(b[0] + b[1], 1.0));
      CHECK(b[0] >= 0.0);
      CHECK(b[1] >= 0.0);
    }
  }

  SUBCASE("explicit resolution overrides the point count") {
    auto grid = belief_grid(2, 5);
    REQUIRE(grid.size() == 5);
    CHECK(close(grid[1][1], 0.25));
  }

  SUBCASE("single state collapses to certainty") {
    auto grid = belief_grid(1);
    REQUIRE(grid.size() == 1);
    CHECK(grid[0] == std::vector<double>{1.0});
  }

  SUBCASE("three states enumerate the denominator-20 lattice") {
    auto grid = belief_grid(3);
    CHECK(grid.size() == 231); // C(22, 2) compositions of 20 into 3 parts
    for (const auto& b : grid) {
      double sum = 0.0;
      for (double x : b) {
        CHECK(x >= 0.0);
        sum += x;
      }
      CHECK(close(sum, 1.0));
    }
  }
}

TEST_CASE("belief labels and report actions") {
  CHECK(belief_label({0.25, 0.75}) == "0.25:0.75");
  CHECK(belief_label({1.0, 0.0}) == "1:0");

  auto actions = belief_report_actions(2);
  CHECK(actions.kind == ActionKind::BeliefReport);
  REQUIRE(actions.actions.size() == 101);
  REQUIRE(actions.grid.size() == 101);
  std::set<std::string> labels(actions.actions.begin(), actions.actions.end());
  CHECK(labels.size() == actions.actions.size());
}

TEST_CASE("Bayes identities hold on randomized problems") {
  std::mt19937_64 rng(20260817);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> dim(2, 4);

  for (int trial = 0; trial < 50; ++trial) {
    std::size_t n_signals = dim(rng), n_states = dim(rng);
    Matrix joint(n_signals, std::vector<double>(n_states));
    double total = 0.0;
    for (auto& row : joint)
      for (double& x : row) {
        x = unit(rng);
        total += x;
      }
    for (auto& row : joint)
      for (double& x : row) x /= total;

    InformationStructure info{joint};
    Belief prior = marginal_prior(info);
    auto margins = signal_marginal(info);

    for (std::size_t t = 0; t < n_states; ++t) {
      // total probability: sum_v Pr(v) q_v(t) recovers the prior
      double recovered = 0.0;
      for (std::size_t v = 0; v < n_signals; ++v) {
        if (margins[v] <= 0.0) continue;
        recovered += margins[v] * posterior(info, v)[t];
      }
      CHECK(close(recovered, prior[t], 1e-12));
    }

    for (std::size_t v = 0; v < n_signals; ++v) {
      if (margins[v] <= 0.0) continue;
      Belief post = posterior(info, v);
      for (std::size_t t = 0; t < n_states; ++t) {
        if (prior[t] <= 0.0) {
          CHECK(post[t] == 0.0);
          continue;
        }
        // Bayes composition: likelihood * prior / evidence
        double composed = likelihood(info, t)[v] * prior[t] / margins[v];
        CHECK(close(composed, post[t], 1e-12));
      }
    }
  }
}

TEST_CASE("problem JSON loader") {
  SUBCASE("canonical document") {
    auto p = problem_from_json_text(R"({
      "states": ["a", "b"],
      "actions": ["x", "y"],
      "signals": ["s", "t"],
      "joint": [[0.4, 0.1], [0.1, 0.4]],
      "incentive_rule": {"form": "table", "table": [[1.0, 0.0], [0.0, 1.0]]},
      "disclosure": {"prior_endowed": true}
    })");
    CHECK(p.states.states == std::vector<std::string>{"a", "b"});
    CHECK(p.actions.kind == ActionKind::Discrete);
    CHECK(p.disclosure.prior_endowed);
    // evaluation rule defaults to the incentive rule
    CHECK(p.evaluation_rule.form == RuleForm::Table);
    CHECK(p.evaluation_rule.table == p.incentive_rule.table);
    CHECK(validate_problem(p).valid());
  }

  SUBCASE("belief-report action object") {
    auto p = problem_from_json_text(R"({
      "states": ["a", "b"],
      "actions": {"kind": "belief_report", "resolution": 5},
      "signals": ["s", "t"],
      "joint": [[0.4, 0.1], [0.1, 0.4]],
      "incentive_rule": {"form": "quadratic"},
      "disclosure": {}
    })");
    CHECK(p.actions.kind == ActionKind::BeliefReport);
    CHECK(p.actions.grid.size() == 5);
  }

  SUBCASE("logarithmic epsilon") {
    auto p = problem_from_json_text(R"({
      "states": ["a", "b"],
      "actions": {"kind": "belief_report"},
      "signals": ["s", "t"],
      "joint": [[0.4, 0.1], [0.1, 0.4]],
      "incentive_rule": {"form": "logarithmic", "epsilon": 0.01},
      "disclosure": {}
    })");
    CHECK(p.incentive_rule.form == RuleForm::Logarithmic);
    CHECK(p.incentive_rule.log_epsilon == 0.01);
  }

  SUBCASE("malformed documents raise FormatError") {
    CHECK_THROWS_AS(problem_from_json_text("not json"), FormatError);
    CHECK_THROWS_AS(problem_from_json_text("[]"), FormatError);
    CHECK_THROWS_AS(problem_from_json_text(R"({"states": ["a"]})"), FormatError);
    CHECK_THROWS_AS(problem_from_json_text(R"({
      "states": ["a", "b"], "actions": ["x"], "signals": ["s"],
      "joint": [[0.5, 0.5]],
      "incentive_rule": {"form": "table", "table": [[0.0, 0.0]]},
      "disclosure": {},
      "surprise": 1
    })"),
                    FormatError);
    CHECK_THROWS_AS(problem_from_json_text(R"({
      "states": ["a", "b"], "actions": ["x"], "signals": ["s"],
      "joint": [[0.5, 0.5]],
      "incentive_rule": {"form": "table", "table": [[0.0, 0.0]]},
      "disclosure": {"prior_endowed": "yes"}
    })"),
                    FormatError);
  }

  SUBCASE("missing file raises FileError") {
    CHECK_THROWS_AS(load_problem("/nonexistent/path.json"), FileError);
  }
}
