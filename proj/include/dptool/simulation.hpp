#pragma once

#include <cstdint>

#include "dptool/behavioral.hpp"
#include "dptool/types.hpp"

namespace dptool {

// Parametrized lossy agent. Losses compose in the fixed order: prior
// substitution, signal garbling, exponent-damped update, noisy optimization.
struct AgentSpec {
  std::optional<Belief> prior_override;  // replaces the marginal prior
  std::optional<Matrix> garbling;        // rows: true signal -> perceived signal
  double updating_exponent = 1.0;        // lambda >= 0; 1 = Bayes, 0 = ignore signal
  double softmax_temperature = 0.0;      // tau >= 0; 0 = exact argmax
  double lapse_rate = 0.0;               // epsilon in [0,1]: uniform-response mixture
  RuleChoice optimizes = RuleChoice::Incentive;
};

ValidationReport validate_agent(const AgentSpec& agent, const DecisionProblem& problem);

struct PolicyKernel {
  Matrix rho; // rows = signals, cols = actions; row-stochastic
};

// Closes an AgentSpec against a problem. The agent is unaware of its own
// garbling: it updates as if the perceived signal were the true one. Throws
// ZeroMassPerceivedSignal when a reachable perceived signal gets a zero
// belief-update normalizer.
PolicyKernel build_policy(const DecisionProblem& problem, const AgentSpec& agent);

struct ExactMetrics {
  double B = 0;
  double C = 0;
  Matrix joint_action_state; // exact limit of the empirical action-state joint
};

// Closed-form B and C: no sampling noise.
ExactMetrics exact_metrics(const DecisionProblem& problem, const PolicyKernel& policy,
                           RuleChoice scored = RuleChoice::Evaluation);

// i.i.d. draws (signal, state) from the joint, then action from the policy.
// Byte-identical output for a fixed seed.
BehavioralDataset sample_dataset(const DecisionProblem& problem, const PolicyKernel& policy,
                                 std::size_t n_trials, std::uint64_t seed);

struct LearningAgentState {
  Matrix pseudo_counts; // signals x states, all entries > 0
};

LearningAgentState uniform_counts(const DecisionProblem& problem, double alpha = 1.0);

struct LearningRun {
  std::vector<double> curve; // per-trial expected incentive score of that trial's policy
  LearningAgentState final_state;
};

// Feedback-driven agent: each trial it treats normalized pseudo-counts as the
// joint, acts through the decision spec (updating fields ignored: the learned
// estimate supplies prior and likelihoods), then adds the observed
// (perceived signal, realized state) cell. Requires feedback_after_trial.
LearningRun run_learning_agent(const DecisionProblem& problem, LearningAgentState initial,
                               std::size_t n_trials, std::uint64_t seed,
                               const AgentSpec& decision_spec);

enum class SweepMode { Exact, Sampled };

struct SweepSettings {
  SweepMode mode = SweepMode::Exact;
  std::size_t n_trials = 1000; // Sampled only
  std::uint64_t seed = 0;
  bool parallel = false; // per-row seeds derive from `seed`; output is identical either way
};

struct SweepRow {
  AgentSpec agent;
  double B = 0;
  double C = 0;
  // Unset when the problem's value of information is zero.
  std::optional<double> total_loss, stimulus_prior_gap, updating_optimization_gap;
};

std::vector<SweepRow> design_sweep(const DecisionProblem& problem,
                                   const std::vector<AgentSpec>& agents,
                                   const SweepSettings& settings = {});

} // namespace dptool
