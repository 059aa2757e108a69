#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace dptool {

// Row-major matrix. Rows index signals (joint distributions) or actions
// (scoring tables) depending on context.
using Matrix = std::vector<std::vector<double>>;

// Normalization tolerance for user-supplied probability vectors.
inline constexpr double kInputTol = 1e-9;
// Tolerance for internal identities (Bayes composition, additivity).
inline constexpr double kIdentityTol = 1e-12;

enum class RuleChoice { Evaluation, Incentive };

class DomainError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class LabelNotFound : public DomainError {
public:
  LabelNotFound(std::string_view kind, std::string_view label)
      : DomainError("unknown " + std::string(kind) + " label: " + std::string(label)),
        kind(kind), label(label) {}
  std::string kind;
  std::string label;
};

class ZeroMassState : public DomainError {
public:
  explicit ZeroMassState(std::string_view state)
      : DomainError("state has zero prior mass, likelihood undefined: " + std::string(state)),
        state(state) {}
  std::string state;
};

class ZeroMassSignal : public DomainError {
public:
  explicit ZeroMassSignal(std::string_view signal)
      : DomainError("signal has zero marginal mass, posterior undefined: " + std::string(signal)),
        signal(signal) {}
  std::string signal;
};

class ZeroMassPerceivedSignal : public DomainError {
public:
  explicit ZeroMassPerceivedSignal(std::string_view signal)
      : DomainError("agent belief update has zero normalizer on perceived signal: " +
                    std::string(signal)),
        signal(signal) {}
  std::string signal;
};

class EmptyDataset : public DomainError {
public:
  EmptyDataset() : DomainError("dataset has no records") {}
};

class ZeroValueOfInformation : public DomainError {
public:
  explicit ZeroValueOfInformation(double delta)
      : DomainError("value of information is zero; loss decomposition undefined"),
        delta(delta) {}
  double delta;
};

class InfeasibleDisclosure : public DomainError {
public:
  explicit InfeasibleDisclosure(const std::string& why)
      : DomainError("disclosed statistics admit no joint distribution: " + why) {}
};

class ParseError : public DomainError {
public:
  ParseError(std::size_t row, std::string_view column, std::string_view reason)
      : DomainError("row " + std::to_string(row) + ", column " + std::string(column) +
                    ": " + std::string(reason)),
        row(row), column(column), reason(reason) {}
  std::size_t row;
  std::string column;
  std::string reason;
};

class UnknownLabel : public DomainError {
public:
  UnknownLabel(std::size_t row, std::string_view label)
      : DomainError("row " + std::to_string(row) + ": unknown label \"" +
                    std::string(label) + "\""),
        row(row), label(label) {}
  std::size_t row;
  std::string label;
};

class FileError : public DomainError {
public:
  FileError(std::string_view path, std::string_view why)
      : DomainError(std::string(path) + ": " + std::string(why)), path(path) {}
  std::string path;
};

class FormatError : public DomainError {
public:
  using DomainError::DomainError;
};

struct StateSpace {
  std::vector<std::string> states;
  std::size_t size() const { return states.size(); }
};

enum class ActionKind { Discrete, BeliefReport };

struct Belief {
  std::vector<double> probs;
  std::size_t size() const { return probs.size(); }
  double operator[](std::size_t i) const { return probs[i]; }
};

struct ActionSpace {
  std::vector<std::string> actions;
  ActionKind kind = ActionKind::Discrete;
  // BeliefReport only: grid[i] is the belief reported by choosing action i.
  std::vector<std::vector<double>> grid;
  std::size_t size() const { return actions.size(); }
};

struct SignalSpace {
  std::vector<std::string> signals;
  std::size_t size() const { return signals.size(); }
};

struct InformationStructure {
  Matrix joint; // rows = signals, cols = states
  std::size_t n_signals() const { return joint.size(); }
  std::size_t n_states() const { return joint.empty() ? 0 : joint.front().size(); }
};

enum class RuleForm { Table, Quadratic, Logarithmic };

struct ScoringRule {
  RuleForm form = RuleForm::Table;
  Matrix table;              // Table only, rows = actions, cols = states
  double log_epsilon = 1e-4; // Logarithmic only, clip in (0, 0.5)
};

struct AggregateStat {
  std::string name; // one of the names in kKnownStatNames
  double value = 0.0;
  // Label the statistic conditions on (state or signal); empty = applies to
  // every label of the relevant kind.
  std::string conditioning;
};

inline constexpr const char* kKnownStatNames[] = {
    "unconditional_accuracy",
    "class_conditional_accuracy",
    "confidence_conditional_on_features",
    "confidence_conditional_on_prediction",
};

struct DisclosureSpec {
  bool prior_endowed = false;
  bool likelihoods_disclosed = false;
  bool posterior_in_signal = false;
  bool feedback_after_trial = false;
  bool scoring_rule_communicated = false;
  std::vector<AggregateStat> aggregate_stats;
};

struct DecisionProblem {
  StateSpace states;
  ActionSpace actions;
  SignalSpace signals;
  InformationStructure info;
  ScoringRule incentive_rule;
  ScoringRule evaluation_rule;
  DisclosureSpec disclosure;
  std::optional<Belief> endowed_prior;

  const ScoringRule& rule(RuleChoice choice) const {
    return choice == RuleChoice::Evaluation ? evaluation_rule : incentive_rule;
  }
};

// Index lookup over a label list. Throws LabelNotFound.
std::size_t index_of(const std::vector<std::string>& labels, std::string_view label,
                     std::string_view kind);

} // namespace dptool
