#pragma once

#include <array>
#include <map>

#include "dptool/normative.hpp"
#include "dptool/types.hpp"

namespace dptool {

enum class AuditVerdict { WellDefined, IllDefined, Degenerate };

const char* to_string(AuditVerdict v);

struct RuleFinding {
  std::string code;
  std::string message;
};

struct LedgerEntry {
  bool definable = false;
  std::string reason;
};

// Loss-source keys in the ledger, fixed order.
inline constexpr const char* kLossSources[] = {"prior", "receiver", "updating", "optimization"};

struct AuditReport {
  AuditVerdict verdict = AuditVerdict::IllDefined;
  // Set only on the feedback-only path to well-definedness: the optimal
  // response becomes identifiable only after enough feedback trials.
  bool learnable_in_limit = false;
  std::vector<RuleFinding> reasons;
  std::map<std::string, LedgerEntry> loss_ledger;
  std::vector<RuleFinding> warnings;
  double value_of_information = 0.0;
};

// Decides, from the disclosure record alone, whether a rational participant
// could identify the optimal response; problem must pass validate_problem.
AuditReport audit_problem(const DecisionProblem& problem);

struct MultiplicityResult {
  // Per signal: [min, max] of P(state index 1 | signal) over every joint
  // consistent with the disclosed constraints. Unreachable signals hold
  // {-1, -1}.
  std::vector<std::array<double, 2>> posterior_bounds;
  std::vector<bool> action_flips; // optimal action differs between the extremes
  Matrix witness_low;             // joint attaining the anchor signal's minimum
  Matrix witness_high;            // joint attaining its maximum
  std::size_t anchor_signal = 1;
  bool multiplicitous = false; // some bound has width above 1e-9
  std::vector<std::string> notes;
};

// Binary-state, prediction-as-signal problems only (|states| == |signals| ==
// 2, signal i read as a prediction of state i). Builds the linear constraints
// implied by the disclosed prior and aggregate statistics and enumerates the
// constraint polytope's vertices. Throws InfeasibleDisclosure and, for
// non-binary problems, DomainError.
MultiplicityResult multiplicity_check(const DecisionProblem& problem,
                                      const std::vector<AggregateStat>& disclosed_stats);

struct ConsistencyReport {
  std::vector<RuleFinding> warnings; // MISMATCHED_RULES when argmaxes diverge
  std::vector<std::string> notes;
  std::vector<std::vector<double>> disagreement_beliefs;
};

ConsistencyReport incentive_evaluation_consistency(const DecisionProblem& problem);

// DISCLOSURE_AMBIGUOUS: an action shifts the score by a state-independent
// constant while the rule is not communicated. FEEDBACK_CONTRADICTION:
// feedback will expose a disclosed statistic that disagrees with the joint.
// PRIOR_MISMATCH: the endowed prior disagrees with the joint's marginal.
std::vector<RuleFinding> deception_screen(const DecisionProblem& problem);

} // namespace dptool
