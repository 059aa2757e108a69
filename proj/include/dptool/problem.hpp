#pragma once

#include "dptool/types.hpp"

namespace dptool {

struct Violation {
  std::string code;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool valid() const { return violations.empty(); }
  bool has(std::string_view code) const;
};

// Collects every invariant violation; an empty report means the problem is
// well formed. Never throws: violations are data.
ValidationReport validate_problem(const DecisionProblem& problem);

// p(theta) = sum_v joint(v, theta)
Belief marginal_prior(const InformationStructure& info);

// Pr(v) = sum_theta joint(v, theta)
std::vector<double> signal_marginal(const InformationStructure& info);

// Pr(v | theta) = joint(v, theta) / p(theta). Throws ZeroMassState.
std::vector<double> likelihood(const InformationStructure& info, std::size_t state);
std::vector<double> likelihood(const InformationStructure& info, const StateSpace& states,
                               std::string_view state);

// q(theta) = joint(v, theta) / Pr(v). Throws ZeroMassSignal.
Belief posterior(const InformationStructure& info, std::size_t signal);
Belief posterior(const InformationStructure& info, const SignalSpace& signals,
                 std::string_view signal);

// Finite belief grid over n_states. resolution 0 picks the default: 101
// evenly spaced points when n_states == 2, simplex lattice of denominator 20
// when n_states > 2. Otherwise resolution is the point count (n_states == 2)
// or the lattice denominator (n_states > 2).
std::vector<std::vector<double>> belief_grid(std::size_t n_states, std::size_t resolution = 0);

// Stable display label for a belief vector, components joined by ':'.
std::string belief_label(const std::vector<double>& probs);

// Belief-report action space over the canonical grid, one action per point.
ActionSpace belief_report_actions(std::size_t n_states, std::size_t resolution = 0);

} // namespace dptool
