#pragma once

#include "dptool/problem.hpp"
#include "dptool/types.hpp"

namespace dptool {

// A scoring rule realized against a concrete action space: one row of state
// scores per action.
struct ScoreMatrix {
  Matrix scores; // rows = actions, cols = states
  std::size_t n_actions() const { return scores.size(); }
  std::size_t n_states() const { return scores.empty() ? 0 : scores.front().size(); }
};

ScoreMatrix realize_rule(const ScoringRule& rule, const ActionSpace& actions,
                         std::size_t n_states);

// sum_theta belief[theta] * S(action, theta)
double expected_score(const ScoreMatrix& scores, std::size_t action,
                      const std::vector<double>& belief);
double expected_score(const ScoringRule& rule, const ActionSpace& actions, std::size_t action,
                      const Belief& belief);

// argmax_a of expected score, ties broken by lowest action index.
std::size_t argmax_action(const ScoreMatrix& scores, const std::vector<double>& belief);
std::pair<std::size_t, double> optimal_action(const ScoringRule& rule, const ActionSpace& actions,
                                              const Belief& belief);
std::size_t optimal_action_certain(const ScoringRule& rule, const ActionSpace& actions,
                                   std::size_t state);

// Proper rule obtained by playing the optimal action under a reported belief:
// score(p, theta) = S(argmax_a E_{theta'~p}[S(a, theta')], theta).
class ProperizedRule {
public:
  ProperizedRule(ScoreMatrix realized, std::vector<std::string> action_labels,
                 std::vector<std::vector<double>> memo_grid);

  std::size_t optimal_action_index(const std::vector<double>& belief) const;
  double score(const std::vector<double>& belief, std::size_t state) const;
  // E_{theta~belief}[score(belief, theta)], the truthful expected score.
  double expected_truthful(const std::vector<double>& belief) const;

  const ScoreMatrix& realized() const { return realized_; }
  const std::vector<std::string>& action_labels() const { return action_labels_; }
  const std::vector<std::vector<double>>& memo_grid() const { return memo_grid_; }
  const std::vector<std::size_t>& memo_actions() const { return memo_actions_; }

private:
  ScoreMatrix realized_;
  std::vector<std::string> action_labels_;
  std::vector<std::vector<double>> memo_grid_;
  std::vector<std::size_t> memo_actions_;
};

ProperizedRule properize(const ScoringRule& rule, const ActionSpace& actions,
                         std::size_t n_states);

struct PropernessCounterexample {
  std::size_t belief_index; // grid belief whose truthful report is suboptimal
  std::size_t better_index; // grid report with strictly higher expected score
  double truthful_score = 0.0;
  double better_score = 0.0;
};

struct PropernessReport {
  bool proper = false; // truthful report is always among the optima
  bool strict = false; // truthful report is always the unique optimum
  std::optional<PropernessCounterexample> counterexample; // set when !proper
  // When proper but not strict: a belief and a distinct report that tie.
  std::optional<PropernessCounterexample> tie_witness;
  std::vector<std::string> notes;
};

// Requires a belief-report action space; evaluates truthfulness over its grid.
PropernessReport is_proper(const ScoringRule& rule, const ActionSpace& actions,
                           std::size_t n_states);

// Expected score of the rational agent acting on the prior alone.
double rational_baseline(const DecisionProblem& problem,
                         RuleChoice choice = RuleChoice::Evaluation);
// Expected score of the rational agent acting on posteriors, zero-mass
// signals skipped.
double rational_benchmark(const DecisionProblem& problem,
                          RuleChoice choice = RuleChoice::Evaluation);
// benchmark - baseline; nonnegative up to rounding for every valid problem.
double value_of_information(const DecisionProblem& problem,
                            RuleChoice choice = RuleChoice::Evaluation);

struct PreferenceRelation {
  std::vector<std::string> options;
  std::vector<std::vector<bool>> weak_pref; // entry (i,j): option i is at least as good as j
};

struct OrderingVerdict {
  bool pass = false;
  enum class Failure { None, Completeness, Transitivity } failure = Failure::None;
  std::vector<std::size_t> witness; // pair (completeness) or triple (transitivity)
  std::string message;
};

OrderingVerdict check_ordering_axiom(const PreferenceRelation& rel);

struct NonIndifferenceVerdict {
  bool pass = false;
  // Witness when pass: a belief and two actions whose expected scores differ.
  std::vector<double> belief;
  std::size_t action_a = 0;
  std::size_t action_b = 0;
  std::string message;
};

// Fails exactly when the rule is flat: no grid belief separates any two
// actions by more than 1e-12 in expected score.
NonIndifferenceVerdict check_non_indifference(const ScoringRule& rule, const ActionSpace& actions,
                                              std::size_t n_states,
                                              std::size_t grid_resolution = 0);

} // namespace dptool
