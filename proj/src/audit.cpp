#include "dptool/audit.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace dptool {

const char* to_string(AuditVerdict v) {
  switch (v) {
    case AuditVerdict::WellDefined: return "well_defined";
    case AuditVerdict::IllDefined: return "ill_defined";
    case AuditVerdict::Degenerate: return "degenerate";
  }
  return "?";
}

namespace {

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.10g", x);
  return buf;
}

// Optimal-action indices across all reachable posteriors, evaluation rule.
std::vector<std::size_t> reachable_optima(const DecisionProblem& problem) {
  ScoreMatrix sm = realize_rule(problem.evaluation_rule, problem.actions, problem.states.size());
  std::vector<std::size_t> optima;
  for (std::size_t v = 0; v < problem.info.n_signals(); ++v) {
    const auto& row = problem.info.joint[v];
    double mass = 0.0;
    for (double x : row) mass += x;
    if (mass <= 0.0) continue;
    std::vector<double> q(row.size());
    for (std::size_t t = 0; t < row.size(); ++t) q[t] = row[t] / mass;
    optima.push_back(argmax_action(sm, q));
  }
  return optima;
}

} // namespace

AuditReport audit_problem(const DecisionProblem& problem) {
  AuditReport report;
  const auto& d = problem.disclosure;

  const double delta = value_of_information(problem);
  report.value_of_information = delta;
  const bool zero_delta = delta <= kIdentityTol;

  auto optima = reachable_optima(problem);
  const bool constant_optimum =
      std::all_of(optima.begin(), optima.end(), [&](std::size_t a) { return a == optima.front(); });

  NonIndifferenceVerdict incentive_flat =
      check_non_indifference(problem.incentive_rule, problem.actions, problem.states.size());

  // Verdict rules, evaluated in order; first hit decides.
  if (zero_delta && !optima.empty() && constant_optimum) {
    report.verdict = AuditVerdict::Degenerate;
    report.reasons.push_back(
        {"DEGENERATE_PROBLEM",
         "every reachable posterior leads to the same optimal action (" +
             problem.actions.actions[optima.front()] +
             ") and the signal adds no score value; responses cannot reveal any of the loss "
             "sources"});
  } else if (d.posterior_in_signal) {
    report.verdict = AuditVerdict::WellDefined;
    report.reasons.push_back({"POSTERIOR_IN_SIGNAL",
                              "each signal carries the posterior over states directly, so the "
                              "optimal response is computable without further model knowledge"});
  } else if (d.prior_endowed && d.likelihoods_disclosed) {
    report.verdict = AuditVerdict::WellDefined;
    report.reasons.push_back({"PRIOR_AND_LIKELIHOODS",
                              "the endowed prior and disclosed likelihoods determine the "
                              "posterior for every signal"});
  } else if (d.feedback_after_trial) {
    report.verdict = AuditVerdict::WellDefined;
    report.learnable_in_limit = true;
    report.reasons.push_back({"FEEDBACK_LEARNABLE",
                              "per-trial feedback reveals the signal-state joint in the limit of "
                              "many trials"});
    report.warnings.push_back({"FEEDBACK_ONLY_PATH",
                               "the optimal response is identifiable only after enough feedback "
                               "trials; early responses are underdetermined"});
  } else {
    report.verdict = AuditVerdict::IllDefined;
    report.reasons.push_back({"INSUFFICIENT_MODEL_INFO",
                              "disclosure provides neither posteriors nor a prior-plus-likelihood "
                              "description, and no feedback; participants cannot identify the "
                              "optimal response in principle"});
  }

  // Loss-source ledger.
  LedgerEntry prior;
  if (d.prior_endowed) {
    prior = {true, "an endowed prior exists for responses to deviate from"};
  } else if (d.posterior_in_signal) {
    prior = {false, "posteriors are supplied directly; deviations from a prior are not identified"};
  } else {
    prior = {false, "no normative prior was disclosed"};
  }
  report.loss_ledger["prior"] = prior;

  report.loss_ledger["receiver"] =
      zero_delta ? LedgerEntry{false, "signals carry no score-relevant information (zero value of "
                                      "information)"}
                 : LedgerEntry{true, "signals carry score-relevant information"};

  LedgerEntry updating;
  if (d.posterior_in_signal && !(d.prior_endowed && d.likelihoods_disclosed)) {
    updating = {false, "the update step is bypassed when posteriors are given"};
  } else if (d.prior_endowed && d.likelihoods_disclosed) {
    updating = {true, "prior and likelihoods pin down the normative update"};
  } else if (d.prior_endowed) {
    updating = {false, "likelihoods were not disclosed"};
  } else if (d.likelihoods_disclosed) {
    updating = {false, "no prior was endowed"};
  } else {
    updating = {false, "neither prior nor likelihoods were disclosed"};
  }
  report.loss_ledger["updating"] = updating;

  report.loss_ledger["optimization"] =
      incentive_flat.pass
          ? LedgerEntry{true, "the incentive rule separates actions"}
          : LedgerEntry{false, "the incentive rule is flat; no action choice affects the score"};

  // Warnings.
  if (!incentive_flat.pass) {
    report.warnings.push_back({"FLAT_RULE", incentive_flat.message});
  }
  if (zero_delta) {
    report.warnings.push_back(
        {"ZERO_DELTA", "value of information is zero; loss decomposition is undefined"});
  }
  auto consistency = incentive_evaluation_consistency(problem);
  for (auto& w : consistency.warnings) report.warnings.push_back(std::move(w));
  for (auto& f : deception_screen(problem)) report.warnings.push_back(std::move(f));

  return report;
}

namespace {

// Gauss-eliminates A x = b restricted to the support columns; true when the
// system pins the support uniquely. Feasibility against the full constraint
// set is re-checked by the caller.
bool solve_support(const Matrix& A, const std::vector<double>& b,
                   const std::vector<std::size_t>& support, std::vector<double>& out) {
  const std::size_t m = A.size();
  const std::size_t k = support.size();
  if (m < k) return false;
  Matrix M(m, std::vector<double>(k + 1, 0.0));
  for (std::size_t r = 0; r < m; ++r) {
    for (std::size_t c = 0; c < k; ++c) M[r][c] = A[r][support[c]];
    M[r][k] = b[r];
  }
  std::size_t row = 0;
  std::vector<std::size_t> pivot_row(k);
  for (std::size_t col = 0; col < k; ++col) {
    std::size_t best = row;
    for (std::size_t r = row; r < m; ++r) {
      if (std::abs(M[r][col]) > std::abs(M[best][col])) best = r;
    }
    if (row >= m || std::abs(M[best][col]) < 1e-12) return false; // rank-deficient support
    std::swap(M[row], M[best]);
    for (std::size_t r = 0; r < m; ++r) {
      if (r == row) continue;
      double f = M[r][col] / M[row][col];
      if (f == 0.0) continue;
      for (std::size_t c = col; c <= k; ++c) M[r][c] -= f * M[row][c];
    }
    pivot_row[col] = row;
    ++row;
  }
  out.assign(k, 0.0);
  for (std::size_t col = 0; col < k; ++col) out[col] = M[pivot_row[col]][k] / M[pivot_row[col]][col];
  return true;
}

double posterior_at(const std::vector<double>& x, std::size_t signal) {
  double denom = x[2 * signal] + x[2 * signal + 1];
  return denom > 0.0 ? x[2 * signal + 1] / denom : -1.0;
}

} // namespace

MultiplicityResult multiplicity_check(const DecisionProblem& problem,
                                      const std::vector<AggregateStat>& disclosed_stats) {
  if (problem.states.size() != 2 || problem.signals.size() != 2)
    throw DomainError(
        "multiplicity bounds are implemented for binary-state, binary-prediction problems");

  MultiplicityResult result;

  // Variables x = (pi(v0,t0), pi(v0,t1), pi(v1,t0), pi(v1,t1)).
  Matrix A;
  std::vector<double> b;
  A.push_back({1, 1, 1, 1});
  b.push_back(1.0);

  if (problem.disclosure.prior_endowed && problem.endowed_prior &&
      problem.endowed_prior->probs.size() == 2) {
    A.push_back({0, 1, 0, 1});
    b.push_back(problem.endowed_prior->probs[1]);
  }

  for (const auto& stat : disclosed_stats) {
    if (stat.name == "unconditional_accuracy") {
      A.push_back({1, 0, 0, 1});
      b.push_back(stat.value);
    } else if (stat.name == "class_conditional_accuracy") {
      std::vector<std::size_t> classes;
      if (stat.conditioning.empty()) {
        classes = {0, 1};
      } else {
        classes = {index_of(problem.states.states, stat.conditioning, "state")};
      }
      // P(v=j | t=j) = val: x[j,j] - val * (x[0,j] + x[1,j]) = 0
      for (std::size_t j : classes) {
        std::vector<double> row(4, 0.0);
        row[2 * j + j] += 1.0;
        row[0 * 2 + j] -= stat.value;
        row[1 * 2 + j] -= stat.value;
        A.push_back(std::move(row));
        b.push_back(0.0);
      }
    } else if (stat.name == "confidence_conditional_on_prediction") {
      std::vector<std::size_t> preds;
      if (stat.conditioning.empty()) {
        preds = {0, 1};
      } else {
        preds = {index_of(problem.signals.signals, stat.conditioning, "signal")};
      }
      // P(t=j | v=j) = val: x[j,j] - val * (x[j,0] + x[j,1]) = 0
      for (std::size_t j : preds) {
        std::vector<double> row(4, 0.0);
        row[2 * j + j] += 1.0;
        row[2 * j + 0] -= stat.value;
        row[2 * j + 1] -= stat.value;
        A.push_back(std::move(row));
        b.push_back(0.0);
      }
    } else if (stat.name == "confidence_conditional_on_features") {
      result.notes.push_back("confidence conditional on features does not constrain the joint; "
                             "feature space is not modeled");
    }
  }

  // Vertex enumeration over support subsets of the four cells.
  std::vector<std::vector<double>> vertices;
  for (unsigned mask = 1; mask < 16; ++mask) {
    std::vector<std::size_t> support;
    for (std::size_t i = 0; i < 4; ++i) {
      if (mask & (1u << i)) support.push_back(i);
    }
    std::vector<double> xs;
    if (!solve_support(A, b, support, xs)) continue;

    std::vector<double> x(4, 0.0);
    bool nonneg = true;
    for (std::size_t c = 0; c < support.size(); ++c) {
      if (xs[c] < -1e-9) nonneg = false;
      x[support[c]] = std::max(xs[c], 0.0);
    }
    if (!nonneg) continue;
    bool feasible = true;
    for (std::size_t r = 0; r < A.size() && feasible; ++r) {
      double lhs = 0.0;
      for (std::size_t i = 0; i < 4; ++i) lhs += A[r][i] * x[i];
      if (std::abs(lhs - b[r]) > 1e-9) feasible = false;
    }
    if (!feasible) continue;
    bool duplicate = false;
    for (const auto& v : vertices) {
      double diff = 0.0;
      for (std::size_t i = 0; i < 4; ++i) diff = std::max(diff, std::abs(v[i] - x[i]));
      if (diff <= 1e-9) duplicate = true;
    }
    if (!duplicate) vertices.push_back(std::move(x));
  }

  if (vertices.empty())
    throw InfeasibleDisclosure("no joint distribution satisfies the disclosed constraints");

  ScoreMatrix sm = realize_rule(problem.evaluation_rule, problem.actions, 2);
  result.posterior_bounds.assign(2, {-1.0, -1.0});
  result.action_flips.assign(2, false);
  for (std::size_t v = 0; v < 2; ++v) {
    double lo = 2.0, hi = -2.0;
    for (const auto& x : vertices) {
      double q = posterior_at(x, v);
      if (q < 0.0) continue; // signal unreachable at this vertex
      lo = std::min(lo, q);
      hi = std::max(hi, q);
    }
    if (hi < lo) {
      result.notes.push_back("signal " + problem.signals.signals[v] +
                             " is unreachable under every consistent joint");
      continue;
    }
    result.posterior_bounds[v] = {lo, hi};
    std::size_t a_lo = argmax_action(sm, {1.0 - lo, lo});
    std::size_t a_hi = argmax_action(sm, {1.0 - hi, hi});
    result.action_flips[v] = a_lo != a_hi;
    if (hi - lo > 1e-9) result.multiplicitous = true;
  }

  // Witnesses attain the anchor signal's extremes; fall back to signal 0 if
  // the anchor is unreachable everywhere.
  result.anchor_signal = result.posterior_bounds[1][0] >= 0.0 ? 1 : 0;
  const auto& bounds = result.posterior_bounds[result.anchor_signal];
  const std::vector<double>* best_lo = &vertices.front();
  const std::vector<double>* best_hi = &vertices.front();
  for (const auto& x : vertices) {
    double q = posterior_at(x, result.anchor_signal);
    if (q < 0.0) continue;
    if (std::abs(q - bounds[0]) <= 1e-9 || q < posterior_at(*best_lo, result.anchor_signal))
      best_lo = &x;
  }
  for (const auto& x : vertices) {
    double q = posterior_at(x, result.anchor_signal);
    if (q > posterior_at(*best_hi, result.anchor_signal)) best_hi = &x;
  }
  auto to_joint = [](const std::vector<double>& x) {
    return Matrix{{x[0], x[1]}, {x[2], x[3]}};
  };
  result.witness_low = to_joint(*best_lo);
  result.witness_high = to_joint(*best_hi);
  return result;
}

ConsistencyReport incentive_evaluation_consistency(const DecisionProblem& problem) {
  ConsistencyReport report;
  const ScoringRule& inc = problem.incentive_rule;
  const ScoringRule& ev = problem.evaluation_rule;

  bool identical = inc.form == ev.form;
  if (identical && inc.form == RuleForm::Table) identical = inc.table == ev.table;
  if (identical && inc.form == RuleForm::Logarithmic) identical = inc.log_epsilon == ev.log_epsilon;
  if (identical) {
    report.notes.push_back("incentive and evaluation rules are identical");
    return report;
  }

  if (problem.actions.kind == ActionKind::BeliefReport) {
    auto properness = is_proper(inc, problem.actions, problem.states.size());
    if (properness.proper && properness.strict) {
      report.notes.push_back("incentive rule is strictly proper; reported beliefs transfer to "
                             "any evaluation rule without misinterpretation");
      return report;
    }
  }

  ScoreMatrix s_inc = realize_rule(inc, problem.actions, problem.states.size());
  ScoreMatrix s_ev = realize_rule(ev, problem.actions, problem.states.size());
  auto grid = belief_grid(problem.states.size());
  for (const auto& belief : grid) {
    if (argmax_action(s_inc, belief) != argmax_action(s_ev, belief))
      report.disagreement_beliefs.push_back(belief);
  }
  if (report.disagreement_beliefs.empty()) {
    report.notes.push_back(
        "rules differ but induce the same optimal action at every grid belief");
    return report;
  }
  report.warnings.push_back(
      {"MISMATCHED_RULES",
       "optimal actions under the incentive and evaluation rules differ at " +
           std::to_string(report.disagreement_beliefs.size()) + " of " +
           std::to_string(grid.size()) + " grid beliefs (first at " +
           belief_label(report.disagreement_beliefs.front()) +
           "); one rule will misread behavior that is optimal under the other"});
  return report;
}

std::vector<RuleFinding> deception_screen(const DecisionProblem& problem) {
  std::vector<RuleFinding> findings;
  const std::size_t n_states = problem.states.size();
  ScoreMatrix sm = realize_rule(problem.incentive_rule, problem.actions, n_states);

  if (!problem.disclosure.scoring_rule_communicated) {
    for (std::size_t a = 0; a + 1 < sm.n_actions(); ++a) {
      for (std::size_t a2 = a + 1; a2 < sm.n_actions(); ++a2) {
        double lo = sm.scores[a][0] - sm.scores[a2][0];
        double hi = lo;
        for (std::size_t t = 1; t < n_states; ++t) {
          double diff = sm.scores[a][t] - sm.scores[a2][t];
          lo = std::min(lo, diff);
          hi = std::max(hi, diff);
        }
        if (hi - lo <= kIdentityTol) {
          findings.push_back(
              {"DISCLOSURE_AMBIGUOUS",
               "choosing " + problem.actions.actions[a2] + " over " + problem.actions.actions[a] +
                   " shifts the score by a state-independent constant (" + fmt(-lo) +
                   ") and the scoring rule is not communicated, so the action's role is left "
                   "ambiguous"});
        }
      }
    }
  }

  Belief marginal = marginal_prior(problem.info);
  if (problem.disclosure.prior_endowed && problem.endowed_prior &&
      problem.endowed_prior->probs.size() == marginal.probs.size()) {
    double diff = 0.0;
    for (std::size_t t = 0; t < marginal.probs.size(); ++t)
      diff = std::max(diff, std::abs(problem.endowed_prior->probs[t] - marginal.probs[t]));
    if (diff > 1e-6) {
      findings.push_back({"PRIOR_MISMATCH",
                          "the endowed prior differs from the joint's state marginal by up to " +
                              fmt(diff)});
    }
  }

  if (problem.disclosure.feedback_after_trial) {
    auto marg = signal_marginal(problem.info);
    const bool square = problem.signals.size() == problem.states.size();
    for (const auto& stat : problem.disclosure.aggregate_stats) {
      std::vector<std::pair<double, std::string>> implied;
      if (stat.name == "unconditional_accuracy" && square) {
        double acc = 0.0;
        for (std::size_t i = 0; i < problem.signals.size(); ++i) acc += problem.info.joint[i][i];
        implied.emplace_back(acc, stat.name);
      } else if (stat.name == "class_conditional_accuracy" && square) {
        std::vector<std::size_t> classes;
        if (stat.conditioning.empty()) {
          for (std::size_t j = 0; j < n_states; ++j) classes.push_back(j);
        } else {
          classes.push_back(index_of(problem.states.states, stat.conditioning, "state"));
        }
        for (std::size_t j : classes) {
          if (marginal.probs[j] > 0.0)
            implied.emplace_back(problem.info.joint[j][j] / marginal.probs[j],
                                 stat.name + " for " + problem.states.states[j]);
        }
      } else if (stat.name == "confidence_conditional_on_prediction" && square) {
        std::vector<std::size_t> preds;
        if (stat.conditioning.empty()) {
          for (std::size_t j = 0; j < problem.signals.size(); ++j) preds.push_back(j);
        } else {
          preds.push_back(index_of(problem.signals.signals, stat.conditioning, "signal"));
        }
        for (std::size_t j : preds) {
          if (marg[j] > 0.0)
            implied.emplace_back(problem.info.joint[j][j] / marg[j],
                                 stat.name + " for " + problem.signals.signals[j]);
        }
      }
      for (const auto& [value, what] : implied) {
        if (std::abs(value - stat.value) > 1e-6) {
          findings.push_back(
              {"FEEDBACK_CONTRADICTION",
               "disclosed " + what + " = " + fmt(stat.value) + " but the joint implies " +
                   fmt(value) + "; trial feedback will expose the contradiction"});
        }
      }
    }
  }

  return findings;
}

} // namespace dptool
