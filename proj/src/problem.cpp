#include "dptool/problem.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

namespace dptool {

std::size_t index_of(const std::vector<std::string>& labels, std::string_view label,
                     std::string_view kind) {
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == label) return i;
  }
  throw LabelNotFound(kind, label);
}

bool ValidationReport::has(std::string_view code) const {
  return std::any_of(violations.begin(), violations.end(),
                     [&](const Violation& v) { return v.code == code; });
}

namespace {

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.10g", x);
  return buf;
}

void check_labels(const std::vector<std::string>& labels, const char* what,
                  const char* empty_code, const char* dup_code,
                  std::vector<Violation>& out) {
  if (labels.empty()) {
    out.push_back({empty_code, std::string(what) + " list is empty"});
    return;
  }
  std::set<std::string> seen;
  for (const auto& l : labels) {
    if (!seen.insert(l).second) {
      out.push_back({dup_code, std::string(what) + " label duplicated: \"" + l + "\""});
    }
  }
}

void check_prob_vector(const std::vector<double>& p, const std::string& what,
                       const char* neg_code, const char* norm_code,
                       std::vector<Violation>& out) {
  double total = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (!std::isfinite(p[i]) || p[i] < 0.0) {
      out.push_back({neg_code, what + " entry " + std::to_string(i) +
                                   " is negative or non-finite: " + fmt(p[i])});
      return;
    }
    total += p[i];
  }
  if (std::abs(total - 1.0) > kInputTol) {
    out.push_back({norm_code, what + " sums to " + fmt(total) + ", expected 1 within 1e-9"});
  }
}

void check_rule(const ScoringRule& rule, const char* which, const ActionSpace& actions,
                std::size_t n_states, std::vector<Violation>& out) {
  const std::string name = which;
  switch (rule.form) {
    case RuleForm::Table: {
      if (rule.table.size() != actions.size()) {
        out.push_back({"RULE_SHAPE_MISMATCH",
                       name + " table has " + std::to_string(rule.table.size()) +
                           " action rows, expected " + std::to_string(actions.size())});
        return;
      }
      for (std::size_t a = 0; a < rule.table.size(); ++a) {
        if (rule.table[a].size() != n_states) {
          out.push_back({"RULE_SHAPE_MISMATCH",
                         name + " row " + std::to_string(a) + " has " +
                             std::to_string(rule.table[a].size()) + " state columns, expected " +
                             std::to_string(n_states)});
          return;
        }
        for (double s : rule.table[a]) {
          if (!std::isfinite(s)) {
            out.push_back({"RULE_NONFINITE_SCORE",
                           name + " contains a non-finite score in row " + std::to_string(a)});
            return;
          }
        }
      }
      break;
    }
    case RuleForm::Quadratic:
    case RuleForm::Logarithmic: {
      if (actions.kind != ActionKind::BeliefReport) {
        out.push_back({"RULE_KIND_MISMATCH",
                       name + " scores reported beliefs but the action space is discrete"});
      }
      if (rule.form == RuleForm::Logarithmic &&
          !(rule.log_epsilon > 0.0 && rule.log_epsilon < 0.5)) {
        out.push_back({"LOG_EPSILON_OUT_OF_RANGE",
                       name + " log clip epsilon " + fmt(rule.log_epsilon) +
                           " is outside (0, 0.5)"});
      }
      break;
    }
  }
}

} // namespace

ValidationReport validate_problem(const DecisionProblem& problem) {
  ValidationReport report;
  auto& out = report.violations;

  check_labels(problem.states.states, "state", "STATES_EMPTY", "STATES_DUPLICATE", out);
  check_labels(problem.actions.actions, "action", "ACTIONS_EMPTY", "ACTIONS_DUPLICATE", out);
  check_labels(problem.signals.signals, "signal", "SIGNALS_EMPTY", "SIGNALS_DUPLICATE", out);

  const std::size_t n_states = problem.states.size();
  const std::size_t n_signals = problem.signals.size();

  if (problem.actions.kind == ActionKind::BeliefReport) {
    if (problem.actions.grid.size() != problem.actions.size()) {
      out.push_back({"GRID_SHAPE_MISMATCH",
                     "belief grid has " + std::to_string(problem.actions.grid.size()) +
                         " points for " + std::to_string(problem.actions.size()) + " actions"});
    } else {
      for (std::size_t i = 0; i < problem.actions.grid.size(); ++i) {
        const auto& g = problem.actions.grid[i];
        if (g.size() != n_states) {
          out.push_back({"GRID_SHAPE_MISMATCH",
                         "belief grid point " + std::to_string(i) + " has dimension " +
                             std::to_string(g.size()) + ", expected " +
                             std::to_string(n_states)});
          break;
        }
        check_prob_vector(g, "belief grid point " + std::to_string(i), "GRID_NEGATIVE_ENTRY",
                          "GRID_NOT_NORMALIZED", out);
      }
    }
  }

  // joint
  bool joint_shape_ok = problem.info.joint.size() == n_signals;
  for (const auto& row : problem.info.joint) {
    if (row.size() != n_states) joint_shape_ok = false;
  }
  if (!joint_shape_ok) {
    out.push_back({"JOINT_SHAPE_MISMATCH",
                   "joint matrix is not " + std::to_string(n_signals) + " signals x " +
                       std::to_string(n_states) + " states"});
  } else {
    double total = 0.0;
    bool entries_ok = true;
    for (std::size_t v = 0; v < n_signals && entries_ok; ++v) {
      for (std::size_t t = 0; t < n_states; ++t) {
        double x = problem.info.joint[v][t];
        if (!std::isfinite(x) || x < 0.0) {
          out.push_back({"JOINT_NEGATIVE_ENTRY",
                         "joint cell (" + std::to_string(v) + "," + std::to_string(t) +
                             ") is negative or non-finite: " + fmt(x)});
          entries_ok = false;
          break;
        }
        total += x;
      }
    }
    if (entries_ok && std::abs(total - 1.0) > kInputTol) {
      out.push_back({"JOINT_NOT_NORMALIZED",
                     "joint probability mass sums to " + fmt(total) + ", expected 1 within 1e-9"});
    }
  }

  check_rule(problem.incentive_rule, "incentive_rule", problem.actions, n_states, out);
  check_rule(problem.evaluation_rule, "evaluation_rule", problem.actions, n_states, out);

  if (problem.endowed_prior) {
    const auto& p = problem.endowed_prior->probs;
    if (p.size() != n_states) {
      out.push_back({"PRIOR_SHAPE_MISMATCH",
                     "endowed prior has " + std::to_string(p.size()) + " entries, expected " +
                         std::to_string(n_states)});
    } else {
      check_prob_vector(p, "endowed prior", "PRIOR_NEGATIVE_ENTRY", "PRIOR_NOT_NORMALIZED", out);
    }
  }

  for (const auto& stat : problem.disclosure.aggregate_stats) {
    bool known = false;
    for (const char* name : kKnownStatNames) {
      if (stat.name == name) known = true;
    }
    if (!known) {
      out.push_back({"STAT_UNKNOWN_NAME", "unknown aggregate statistic \"" + stat.name + "\""});
      continue;
    }
    if (!(stat.value >= 0.0 && stat.value <= 1.0)) {
      out.push_back({"STAT_VALUE_OUT_OF_RANGE",
                     "statistic " + stat.name + " = " + fmt(stat.value) + " is outside [0, 1]"});
    }
    if (!stat.conditioning.empty()) {
      const auto& labels = stat.name == "class_conditional_accuracy"
                               ? problem.states.states
                               : problem.signals.signals;
      if (stat.name == "class_conditional_accuracy" ||
          stat.name == "confidence_conditional_on_prediction") {
        if (std::find(labels.begin(), labels.end(), stat.conditioning) == labels.end()) {
          out.push_back({"STAT_UNKNOWN_CONDITIONING",
                         "statistic " + stat.name + " conditions on unknown label \"" +
                             stat.conditioning + "\""});
        }
      }
    }
  }

  return report;
}

Belief marginal_prior(const InformationStructure& info) {
  Belief p;
  p.probs.assign(info.n_states(), 0.0);
  for (const auto& row : info.joint) {
    for (std::size_t t = 0; t < row.size(); ++t) p.probs[t] += row[t];
  }
  return p;
}

std::vector<double> signal_marginal(const InformationStructure& info) {
  std::vector<double> m(info.n_signals(), 0.0);
  for (std::size_t v = 0; v < info.n_signals(); ++v) {
    for (double x : info.joint[v]) m[v] += x;
  }
  return m;
}

std::vector<double> likelihood(const InformationStructure& info, std::size_t state) {
  Belief p = marginal_prior(info);
  if (p.probs.at(state) <= 0.0) throw ZeroMassState("state index " + std::to_string(state));
  std::vector<double> l(info.n_signals());
  for (std::size_t v = 0; v < info.n_signals(); ++v) l[v] = info.joint[v][state] / p.probs[state];
  return l;
}

std::vector<double> likelihood(const InformationStructure& info, const StateSpace& states,
                               std::string_view state) {
  std::size_t t = index_of(states.states, state, "state");
  Belief p = marginal_prior(info);
  if (p.probs.at(t) <= 0.0) throw ZeroMassState(state);
  std::vector<double> l(info.n_signals());
  for (std::size_t v = 0; v < info.n_signals(); ++v) l[v] = info.joint[v][t] / p.probs[t];
  return l;
}

Belief posterior(const InformationStructure& info, std::size_t signal) {
  const auto& row = info.joint.at(signal);
  double mass = 0.0;
  for (double x : row) mass += x;
  if (mass <= 0.0) throw ZeroMassSignal("signal index " + std::to_string(signal));
  Belief q;
  q.probs.resize(row.size());
  for (std::size_t t = 0; t < row.size(); ++t) q.probs[t] = row[t] / mass;
  return q;
}

Belief posterior(const InformationStructure& info, const SignalSpace& signals,
                 std::string_view signal) {
  std::size_t v = index_of(signals.signals, signal, "signal");
  const auto& row = info.joint.at(v);
  double mass = 0.0;
  for (double x : row) mass += x;
  if (mass <= 0.0) throw ZeroMassSignal(signal);
  return posterior(info, v);
}

namespace {

void lattice_rec(std::size_t dims_left, std::size_t budget, std::size_t denom,
                 std::vector<double>& prefix, std::vector<std::vector<double>>& out) {
  if (dims_left == 1) {
    prefix.push_back(double(budget) / double(denom));
    out.push_back(prefix);
    prefix.pop_back();
    return;
  }
  for (std::size_t k = 0; k <= budget; ++k) {
    prefix.push_back(double(k) / double(denom));
    lattice_rec(dims_left - 1, budget - k, denom, prefix, out);
    prefix.pop_back();
  }
}

} // namespace

std::vector<std::vector<double>> belief_grid(std::size_t n_states, std::size_t resolution) {
  std::vector<std::vector<double>> grid;
  if (n_states == 0) return grid;
  if (n_states == 1) {
    grid.push_back({1.0});
    return grid;
  }
  if (n_states == 2) {
    std::size_t points = resolution == 0 ? 101 : std::max<std::size_t>(resolution, 2);
    grid.reserve(points);
    for (std::size_t i = 0; i < points; ++i) {
      double q = double(i) / double(points - 1);
      grid.push_back({1.0 - q, q});
    }
    return grid;
  }
  std::size_t denom = resolution == 0 ? 20 : std::max<std::size_t>(resolution, 1);
  std::vector<double> prefix;
  lattice_rec(n_states, denom, denom, prefix, grid);
  return grid;
}

std::string belief_label(const std::vector<double>& probs) {
  std::string label;
  char buf[32];
  for (std::size_t i = 0; i < probs.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.6g", probs[i]);
    if (i) label += ':';
    label += buf;
  }
  return label;
}

ActionSpace belief_report_actions(std::size_t n_states, std::size_t resolution) {
  ActionSpace as;
  as.kind = ActionKind::BeliefReport;
  as.grid = belief_grid(n_states, resolution);
  as.actions.reserve(as.grid.size());
  for (const auto& g : as.grid) as.actions.push_back(belief_label(g));
  return as;
}

} // namespace dptool
