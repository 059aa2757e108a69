#include "dptool/normative.hpp"

#include <algorithm>
#include <cmath>

namespace dptool {

ScoreMatrix realize_rule(const ScoringRule& rule, const ActionSpace& actions,
                         std::size_t n_states) {
  ScoreMatrix sm;
  switch (rule.form) {
    case RuleForm::Table:
      sm.scores = rule.table;
      break;
    case RuleForm::Quadratic: {
      if (actions.kind != ActionKind::BeliefReport)
        throw DomainError("quadratic rule requires a belief-report action space");
      sm.scores.reserve(actions.grid.size());
      for (const auto& report : actions.grid) {
        double sq = 0.0;
        for (double r : report) sq += r * r;
        std::vector<double> row(n_states);
        for (std::size_t t = 0; t < n_states; ++t) row[t] = 2.0 * report[t] - sq;
        sm.scores.push_back(std::move(row));
      }
      break;
    }
    case RuleForm::Logarithmic: {
      if (actions.kind != ActionKind::BeliefReport)
        throw DomainError("logarithmic rule requires a belief-report action space");
      const double eps = rule.log_epsilon;
      sm.scores.reserve(actions.grid.size());
      for (const auto& report : actions.grid) {
        std::vector<double> row(n_states);
        for (std::size_t t = 0; t < n_states; ++t)
          row[t] = std::log(std::clamp(report[t], eps, 1.0 - eps));
        sm.scores.push_back(std::move(row));
      }
      break;
    }
  }
  return sm;
}

double expected_score(const ScoreMatrix& scores, std::size_t action,
                      const std::vector<double>& belief) {
  const auto& row = scores.scores.at(action);
  double e = 0.0;
  for (std::size_t t = 0; t < row.size(); ++t) e += belief[t] * row[t];
  return e;
}

double expected_score(const ScoringRule& rule, const ActionSpace& actions, std::size_t action,
                      const Belief& belief) {
  return expected_score(realize_rule(rule, actions, belief.size()), action, belief.probs);
}

std::size_t argmax_action(const ScoreMatrix& scores, const std::vector<double>& belief) {
  std::size_t best = 0;
  double best_score = expected_score(scores, 0, belief);
  for (std::size_t a = 1; a < scores.n_actions(); ++a) {
    double e = expected_score(scores, a, belief);
    if (e > best_score) {
      best = a;
      best_score = e;
    }
  }
  return best;
}

std::pair<std::size_t, double> optimal_action(const ScoringRule& rule, const ActionSpace& actions,
                                              const Belief& belief) {
  ScoreMatrix sm = realize_rule(rule, actions, belief.size());
  std::size_t a = argmax_action(sm, belief.probs);
  return {a, expected_score(sm, a, belief.probs)};
}

std::size_t optimal_action_certain(const ScoringRule& rule, const ActionSpace& actions,
                                   std::size_t state) {
  std::size_t n_states = rule.form == RuleForm::Table
                             ? (rule.table.empty() ? state + 1 : rule.table.front().size())
                             : (actions.grid.empty() ? state + 1 : actions.grid.front().size());
  ScoreMatrix sm = realize_rule(rule, actions, n_states);
  std::size_t best = 0;
  double best_score = sm.scores.at(0).at(state);
  for (std::size_t a = 1; a < sm.n_actions(); ++a) {
    if (sm.scores[a][state] > best_score) {
      best = a;
      best_score = sm.scores[a][state];
    }
  }
  return best;
}

ProperizedRule::ProperizedRule(ScoreMatrix realized, std::vector<std::string> action_labels,
                               std::vector<std::vector<double>> memo_grid)
    : realized_(std::move(realized)),
      action_labels_(std::move(action_labels)),
      memo_grid_(std::move(memo_grid)) {
  memo_actions_.reserve(memo_grid_.size());
  for (const auto& b : memo_grid_) memo_actions_.push_back(argmax_action(realized_, b));
}

std::size_t ProperizedRule::optimal_action_index(const std::vector<double>& belief) const {
  return argmax_action(realized_, belief);
}

double ProperizedRule::score(const std::vector<double>& belief, std::size_t state) const {
  return realized_.scores[argmax_action(realized_, belief)][state];
}

double ProperizedRule::expected_truthful(const std::vector<double>& belief) const {
  return expected_score(realized_, argmax_action(realized_, belief), belief);
}

ProperizedRule properize(const ScoringRule& rule, const ActionSpace& actions,
                         std::size_t n_states) {
  return ProperizedRule(realize_rule(rule, actions, n_states), actions.actions,
                        belief_grid(n_states));
}

PropernessReport is_proper(const ScoringRule& rule, const ActionSpace& actions,
                           std::size_t n_states) {
  if (actions.kind != ActionKind::BeliefReport)
    throw DomainError("properness is defined for belief-report action spaces");
  ScoreMatrix sm = realize_rule(rule, actions, n_states);
  PropernessReport report;
  report.proper = true;
  report.strict = true;
  for (std::size_t i = 0; i < actions.grid.size(); ++i) {
    const auto& p = actions.grid[i];
    double truthful = expected_score(sm, i, p);
    std::size_t best = i;
    double best_score = truthful;
    // Best competing report and whether any distinct report ties truthful.
    std::size_t tie = i;
    for (std::size_t j = 0; j < actions.grid.size(); ++j) {
      if (j == i) continue;
      double e = expected_score(sm, j, p);
      if (e > best_score) {
        best = j;
        best_score = e;
      }
      if (std::abs(e - truthful) <= kIdentityTol && tie == i) tie = j;
    }
    if (best != i && best_score > truthful + kIdentityTol) {
      report.proper = false;
      report.strict = false;
      report.counterexample = {i, best, truthful, best_score};
      report.notes.push_back("report " + actions.actions[best] + " beats truthful report under belief " +
                             actions.actions[i]);
      return report;
    }
    if (tie != i && report.strict) {
      report.strict = false;
      report.tie_witness = {i, tie, truthful, truthful};
      report.notes.push_back("weakly proper, non-strict: reports " + actions.actions[i] + " and " +
                             actions.actions[tie] + " score equally under belief " +
                             actions.actions[i]);
    }
  }
  return report;
}

double rational_baseline(const DecisionProblem& problem, RuleChoice choice) {
  ScoreMatrix sm = realize_rule(problem.rule(choice), problem.actions, problem.states.size());
  Belief p = marginal_prior(problem.info);
  return expected_score(sm, argmax_action(sm, p.probs), p.probs);
}

double rational_benchmark(const DecisionProblem& problem, RuleChoice choice) {
  ScoreMatrix sm = realize_rule(problem.rule(choice), problem.actions, problem.states.size());
  double total = 0.0;
  for (std::size_t v = 0; v < problem.info.n_signals(); ++v) {
    const auto& row = problem.info.joint[v];
    double mass = 0.0;
    for (double x : row) mass += x;
    if (mass <= 0.0) continue;
    std::vector<double> q(row.size());
    for (std::size_t t = 0; t < row.size(); ++t) q[t] = row[t] / mass;
    const auto& scores = sm.scores[argmax_action(sm, q)];
    for (std::size_t t = 0; t < row.size(); ++t) total += row[t] * scores[t];
  }
  return total;
}

double value_of_information(const DecisionProblem& problem, RuleChoice choice) {
  return rational_benchmark(problem, choice) - rational_baseline(problem, choice);
}

OrderingVerdict check_ordering_axiom(const PreferenceRelation& rel) {
  OrderingVerdict verdict;
  const std::size_t n = rel.options.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (!rel.weak_pref[i][j] && !rel.weak_pref[j][i]) {
        verdict.failure = OrderingVerdict::Failure::Completeness;
        verdict.witness = {i, j};
        verdict.message = "options " + rel.options[i] + " and " + rel.options[j] +
                          " are incomparable";
        return verdict;
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (!rel.weak_pref[i][j]) continue;
      for (std::size_t k = 0; k < n; ++k) {
        if (rel.weak_pref[j][k] && !rel.weak_pref[i][k]) {
          verdict.failure = OrderingVerdict::Failure::Transitivity;
          verdict.witness = {i, j, k};
          verdict.message = rel.options[i] + " >= " + rel.options[j] + " and " + rel.options[j] +
                            " >= " + rel.options[k] + " but not " + rel.options[i] +
                            " >= " + rel.options[k];
          return verdict;
        }
      }
    }
  }
  verdict.pass = true;
  verdict.message = "relation is complete and transitive";
  return verdict;
}

NonIndifferenceVerdict check_non_indifference(const ScoringRule& rule, const ActionSpace& actions,
                                              std::size_t n_states,
                                              std::size_t grid_resolution) {
  NonIndifferenceVerdict verdict;
  ScoreMatrix sm = realize_rule(rule, actions, n_states);
  if (sm.n_actions() < 2) {
    verdict.pass = false;
    verdict.message = "fewer than two actions; every option scores identically";
    return verdict;
  }
  for (const auto& b : belief_grid(n_states, grid_resolution)) {
    std::size_t lo = 0, hi = 0;
    double lo_score = expected_score(sm, 0, b), hi_score = lo_score;
    for (std::size_t a = 1; a < sm.n_actions(); ++a) {
      double e = expected_score(sm, a, b);
      if (e < lo_score) { lo = a; lo_score = e; }
      if (e > hi_score) { hi = a; hi_score = e; }
    }
    if (hi_score - lo_score > kIdentityTol) {
      verdict.pass = true;
      verdict.belief = b;
      verdict.action_a = hi;
      verdict.action_b = lo;
      verdict.message = "actions " + actions.actions[hi] + " and " + actions.actions[lo] +
                        " differ in expected score at belief " + belief_label(b);
      return verdict;
    }
  }
  verdict.message = "rule is flat: no belief separates any pair of actions";
  return verdict;
}

} // namespace dptool
