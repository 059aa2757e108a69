#pragma once

#include "dptool/problem.hpp"
#include "dptool/types.hpp"

// In-memory problems shared across suites. Kept tiny and exact: every joint
// below is dyadic, so marginals and posteriors incur no rounding surprises
// beyond ordinary division.
namespace fixtures {

inline dptool::ScoringRule table_rule(dptool::Matrix table) {
  dptool::ScoringRule rule;
  rule.form = dptool::RuleForm::Table;
  rule.table = std::move(table);
  return rule;
}

// Perfectly revealing prediction, asymmetric error costs. The optimal action
// switches at q(second state) = 12/19.
inline dptool::DecisionProblem judge_problem() {
  dptool::DecisionProblem p;
  p.states.states = {"no_recid", "recid"};
  p.actions.actions = {"release", "detain"};
  p.signals.signals = {"pred_no_recid", "pred_recid"};
  p.info.joint = {{0.5, 0.0}, {0.0, 0.5}};
  p.incentive_rule = table_rule({{0.2, -0.2}, {-1.0, 0.5}});
  p.evaluation_rule = p.incentive_rule;
  p.disclosure.prior_endowed = true;
  p.disclosure.likelihoods_disclosed = true;
  p.disclosure.feedback_after_trial = true;
  p.disclosure.scoring_rule_communicated = true;
  p.endowed_prior = dptool::Belief{{0.5, 0.5}};
  return p;
}

// Same costs, 80%-accurate prediction.
inline dptool::DecisionProblem noisy_judge_problem() {
  dptool::DecisionProblem p = judge_problem();
  p.info.joint = {{0.4, 0.1}, {0.1, 0.4}};
  return p;
}

// One action dominates the other by a flat 0.25 at every belief, so the
// signal is worthless and the optimum never moves.
inline dptool::DecisionProblem turnout_problem() {
  dptool::DecisionProblem p;
  p.states.states = {"lose", "win"};
  p.actions.actions = {"no_vote", "vote"};
  p.signals.signals = {"poll_lose", "poll_win"};
  p.info.joint = {{0.125, 0.25}, {0.125, 0.5}};
  p.incentive_rule = table_rule({{0.0, 0.5}, {-0.25, 0.25}});
  p.evaluation_rule = p.incentive_rule;
  p.disclosure.posterior_in_signal = true;
  return p;
}

// Action choice never moves the score at all.
inline dptool::DecisionProblem flat_turnout_problem() {
  dptool::DecisionProblem p = turnout_problem();
  p.incentive_rule = table_rule({{0.0, 0.5}, {0.0, 0.5}});
  p.evaluation_rule = p.incentive_rule;
  p.disclosure.scoring_rule_communicated = true;
  return p;
}

// Belief-report variant of the noisy problem, scored by the quadratic rule.
inline dptool::DecisionProblem quadratic_report_problem(std::size_t resolution = 11) {
  dptool::DecisionProblem p;
  p.states.states = {"no_recid", "recid"};
  p.actions = dptool::belief_report_actions(2, resolution);
  p.signals.signals = {"pred_no_recid", "pred_recid"};
  p.info.joint = {{0.4, 0.1}, {0.1, 0.4}};
  p.incentive_rule.form = dptool::RuleForm::Quadratic;
  p.evaluation_rule = p.incentive_rule;
  p.disclosure.prior_endowed = true;
  p.disclosure.likelihoods_disclosed = true;
  p.disclosure.scoring_rule_communicated = true;
  p.endowed_prior = dptool::Belief{{0.5, 0.5}};
  return p;
}

} // namespace fixtures
