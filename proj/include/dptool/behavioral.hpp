#pragma once

#include <cstdint>
#include <map>

#include "dptool/normative.hpp"
#include "dptool/types.hpp"

namespace dptool {

struct TrialRecord {
  std::string participant_id;
  long trial_index = 0;
  std::string condition;
  std::size_t signal = 0; // indices into the bound problem's spaces
  std::size_t action = 0;
  std::size_t state = 0;
};

struct BehavioralDataset {
  DecisionProblem problem;
  std::vector<TrialRecord> records;
};

inline constexpr const char* kCsvHeader = "participant_id,trial_index,condition,signal,action,state";

// Strict CSV reader; labels resolve against the problem. Throws FileError,
// ParseError (with row numbers), UnknownLabel. Header-only files ingest fine;
// scoring operations reject them later.
BehavioralDataset ingest_csv(const std::string& path, const DecisionProblem& problem);
BehavioralDataset dataset_from_csv_text(const std::string& text, const DecisionProblem& problem);

void write_csv(std::ostream& out, const BehavioralDataset& ds);

// B: mean realized score over records. Exactly order-invariant (computed from
// integer cell counts). Throws EmptyDataset.
double behavioral_score(const BehavioralDataset& ds, const ScoringRule& rule);
double behavioral_score(const BehavioralDataset& ds, RuleChoice choice = RuleChoice::Evaluation);

// Empirical joint over actions x states; optional Laplace add-alpha smoothing
// (alpha = 0 reproduces raw frequencies). Throws EmptyDataset.
Matrix empirical_joint(const BehavioralDataset& ds, double alpha = 0.0);

// C: expected score of the properized rule applied to the empirical
// conditional of state given action; zero-mass actions are skipped.
double calibrated_score(const BehavioralDataset& ds, RuleChoice choice = RuleChoice::Evaluation,
                        double alpha = 0.0);
// Same computation when the joint over actions x states is already known
// (exact simulation uses this with the policy's limit joint).
double calibrated_score_from_joint(const DecisionProblem& problem, const Matrix& joint_action_state,
                                   RuleChoice choice = RuleChoice::Evaluation);

struct LossDecomposition {
  double R = 0;          // rational benchmark
  double R_baseline = 0; // rational agent on the prior alone
  double Delta = 0;      // R - R_baseline
  double B = 0;
  double C = 0;
  double total_loss = 0;               // (R - B) / Delta
  double stimulus_prior_gap = 0;       // (R - C) / Delta
  double updating_optimization_gap = 0; // (C - B) / Delta
};

// Throws ZeroValueOfInformation when Delta <= 1e-12.
LossDecomposition decompose_from_scores(double R, double R_baseline, double B, double C);
LossDecomposition decompose_losses(const BehavioralDataset& ds,
                                   RuleChoice choice = RuleChoice::Evaluation,
                                   double alpha = 0.0);

struct ConditionOutcome {
  std::optional<LossDecomposition> result;
  std::string error; // set when the condition's decomposition failed
  std::size_t n_records = 0;
};

// Decomposition per condition. A condition listed in condition_problems is
// rescored against that problem (benchmarks recomputed); per-condition errors
// are reported without aborting the others.
std::map<std::string, ConditionOutcome> per_condition_report(
    const BehavioralDataset& ds,
    const std::map<std::string, DecisionProblem>& condition_problems = {},
    RuleChoice choice = RuleChoice::Evaluation, double alpha = 0.0);

struct Interval {
  double lo = 0;
  double hi = 0;
};

struct BootstrapSummary {
  std::size_t resamples = 0;
  std::uint64_t seed = 0;
  Interval B, C, total_loss, stimulus_prior_gap, updating_optimization_gap;
};

// Nonparametric bootstrap over records; 95% percentile intervals. Resample
// streams derive from the seed, so results are reproducible.
BootstrapSummary bootstrap_decomposition(const BehavioralDataset& ds, std::size_t resamples = 1000,
                                         std::uint64_t seed = 0,
                                         RuleChoice choice = RuleChoice::Evaluation,
                                         double alpha = 0.0);

} // namespace dptool
