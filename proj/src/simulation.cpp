#include "dptool/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <thread>

#include "dptool/rng.hpp"

namespace dptool {

ValidationReport validate_agent(const AgentSpec& agent, const DecisionProblem& problem) {
  ValidationReport report;
  auto& out = report.violations;
  const std::size_t n_states = problem.states.size();
  const std::size_t n_signals = problem.signals.size();

  if (agent.prior_override) {
    const auto& p = agent.prior_override->probs;
    if (p.size() != n_states) {
      out.push_back({"AGENT_PRIOR_SHAPE_MISMATCH",
                     "prior override has " + std::to_string(p.size()) + " entries, expected " +
                         std::to_string(n_states)});
    } else {
      double total = 0.0;
      bool ok = true;
      for (double x : p) {
        if (!std::isfinite(x) || x < 0.0) ok = false;
        total += x;
      }
      if (!ok) {
        out.push_back({"AGENT_PRIOR_NEGATIVE_ENTRY", "prior override has a negative or non-finite entry"});
      } else if (std::abs(total - 1.0) > kInputTol) {
        out.push_back({"AGENT_PRIOR_NOT_NORMALIZED", "prior override does not sum to 1"});
      }
    }
  }

  if (agent.garbling) {
    const Matrix& g = *agent.garbling;
    bool shape_ok = g.size() == n_signals;
    for (const auto& row : g) {
      if (row.size() != n_signals) shape_ok = false;
    }
    if (!shape_ok) {
      out.push_back({"AGENT_GARBLING_SHAPE_MISMATCH",
                     "garbling matrix is not " + std::to_string(n_signals) + "x" +
                         std::to_string(n_signals)});
    } else {
      for (std::size_t v = 0; v < g.size(); ++v) {
        double total = 0.0;
        bool ok = true;
        for (double x : g[v]) {
          if (!std::isfinite(x) || x < 0.0) ok = false;
          total += x;
        }
        if (!ok) {
          out.push_back({"AGENT_GARBLING_NEGATIVE_ENTRY",
                         "garbling row " + std::to_string(v) + " has a negative or non-finite entry"});
        } else if (std::abs(total - 1.0) > kInputTol) {
          out.push_back({"AGENT_GARBLING_ROW_NOT_NORMALIZED",
                         "garbling row " + std::to_string(v) + " sums to " + std::to_string(total)});
        }
      }
    }
  }

  if (!(agent.updating_exponent >= 0.0) || !std::isfinite(agent.updating_exponent))
    out.push_back({"AGENT_LAMBDA_OUT_OF_RANGE", "updating exponent must be finite and >= 0"});
  if (!(agent.softmax_temperature >= 0.0) || !std::isfinite(agent.softmax_temperature))
    out.push_back({"AGENT_TAU_OUT_OF_RANGE", "softmax temperature must be finite and >= 0"});
  if (!(agent.lapse_rate >= 0.0 && agent.lapse_rate <= 1.0))
    out.push_back({"AGENT_LAPSE_OUT_OF_RANGE", "lapse rate must lie in [0, 1]"});

  return report;
}

namespace {

// Action distribution for one belief: softmax (or argmax) over expected
// scores, then the lapse mixture toward uniform.
std::vector<double> action_distribution(const ScoreMatrix& sm, const std::vector<double>& belief,
                                        double tau, double lapse) {
  const std::size_t n_a = sm.n_actions();
  std::vector<double> dist(n_a, 0.0);
  if (tau == 0.0) {
    dist[argmax_action(sm, belief)] = 1.0;
  } else {
    std::vector<double> e(n_a);
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < n_a; ++a) {
      e[a] = expected_score(sm, a, belief);
      best = std::max(best, e[a]);
    }
    double z = 0.0;
    for (std::size_t a = 0; a < n_a; ++a) {
      dist[a] = std::exp((e[a] - best) / tau);
      z += dist[a];
    }
    for (double& w : dist) w /= z;
  }
  if (lapse > 0.0) {
    const double u = 1.0 / double(n_a);
    for (double& w : dist) w = (1.0 - lapse) * w + lapse * u;
  }
  return dist;
}

// Per perceived signal: the agent's belief after the exponent-damped update.
std::vector<std::vector<double>> perceived_beliefs(const DecisionProblem& problem,
                                                   const AgentSpec& agent) {
  const std::size_t n_states = problem.states.size();
  const std::size_t n_signals = problem.signals.size();
  Belief true_prior = marginal_prior(problem.info);
  const std::vector<double>& base =
      agent.prior_override ? agent.prior_override->probs : true_prior.probs;
  auto marg = signal_marginal(problem.info);
  const double lambda = agent.updating_exponent;

  // reachability of a perceived signal depends on the garbling channel, not
  // on the true marginal alone
  std::vector<double> perceived_marg = marg;
  if (agent.garbling) {
    perceived_marg.assign(n_signals, 0.0);
    for (std::size_t v = 0; v < n_signals; ++v)
      for (std::size_t vp = 0; vp < n_signals; ++vp)
        perceived_marg[vp] += marg[v] * (*agent.garbling)[v][vp];
  }

  std::vector<std::vector<double>> beliefs(n_signals);
  for (std::size_t v = 0; v < n_signals; ++v) {
    std::vector<double> q(n_states);
    double z = 0.0;
    for (std::size_t t = 0; t < n_states; ++t) {
      double lik = true_prior.probs[t] > 0.0 ? problem.info.joint[v][t] / true_prior.probs[t] : 0.0;
      q[t] = base[t] * std::pow(lik, lambda); // pow(0,0) == 1: lambda 0 keeps the prior
      z += q[t];
    }
    if (z <= 0.0) {
      if (perceived_marg[v] > 0.0) throw ZeroMassPerceivedSignal(problem.signals.signals[v]);
      q = base; // unreachable perceived signal: row is irrelevant, keep the prior
    } else {
      for (double& x : q) x /= z;
    }
    beliefs[v] = std::move(q);
  }
  return beliefs;
}

} // namespace

PolicyKernel build_policy(const DecisionProblem& problem, const AgentSpec& agent) {
  ValidationReport agent_report = validate_agent(agent, problem);
  if (!agent_report.valid())
    throw DomainError("invalid agent spec: " + agent_report.violations.front().message);

  const std::size_t n_signals = problem.signals.size();
  ScoreMatrix sm = realize_rule(problem.rule(agent.optimizes), problem.actions,
                                problem.states.size());

  auto beliefs = perceived_beliefs(problem, agent);
  std::vector<std::vector<double>> dist(n_signals);
  for (std::size_t v = 0; v < n_signals; ++v)
    dist[v] = action_distribution(sm, beliefs[v], agent.softmax_temperature, agent.lapse_rate);

  PolicyKernel policy;
  policy.rho.assign(n_signals, std::vector<double>(problem.actions.size(), 0.0));
  for (std::size_t v = 0; v < n_signals; ++v) {
    if (!agent.garbling) {
      policy.rho[v] = dist[v];
      continue;
    }
    for (std::size_t vp = 0; vp < n_signals; ++vp) {
      double w = (*agent.garbling)[v][vp];
      if (w <= 0.0) continue; // skipping zeros keeps identity garbling bitwise exact
      for (std::size_t a = 0; a < problem.actions.size(); ++a)
        policy.rho[v][a] += w * dist[vp][a];
    }
  }
  return policy;
}

ExactMetrics exact_metrics(const DecisionProblem& problem, const PolicyKernel& policy,
                           RuleChoice scored) {
  const std::size_t n_signals = problem.signals.size();
  const std::size_t n_states = problem.states.size();
  const std::size_t n_actions = problem.actions.size();

  ExactMetrics em;
  em.joint_action_state.assign(n_actions, std::vector<double>(n_states, 0.0));
  for (std::size_t v = 0; v < n_signals; ++v) {
    for (std::size_t t = 0; t < n_states; ++t) {
      double mass = problem.info.joint[v][t];
      if (mass <= 0.0) continue;
      for (std::size_t a = 0; a < n_actions; ++a)
        em.joint_action_state[a][t] += mass * policy.rho[v][a];
    }
  }

  ScoreMatrix sm = realize_rule(problem.rule(scored), problem.actions, n_states);
  for (std::size_t a = 0; a < n_actions; ++a)
    for (std::size_t t = 0; t < n_states; ++t)
      em.B += em.joint_action_state[a][t] * sm.scores[a][t];
  em.C = calibrated_score_from_joint(problem, em.joint_action_state, scored);
  return em;
}

BehavioralDataset sample_dataset(const DecisionProblem& problem, const PolicyKernel& policy,
                                 std::size_t n_trials, std::uint64_t seed) {
  const std::size_t n_states = problem.states.size();
  const std::size_t n_signals = problem.signals.size();

  std::vector<double> flat(n_signals * n_states);
  for (std::size_t v = 0; v < n_signals; ++v)
    for (std::size_t t = 0; t < n_states; ++t) flat[v * n_states + t] = problem.info.joint[v][t];

  BehavioralDataset ds;
  ds.problem = problem;
  ds.records.reserve(n_trials);
  Rng rng(seed);
  for (std::size_t i = 0; i < n_trials; ++i) {
    std::size_t cell = rng.categorical(flat);
    TrialRecord rec;
    rec.participant_id = "sim";
    rec.trial_index = long(i);
    rec.condition = "simulated";
    rec.signal = cell / n_states;
    rec.state = cell % n_states;
    rec.action = rng.categorical(policy.rho[rec.signal]);
    ds.records.push_back(std::move(rec));
  }
  return ds;
}

LearningAgentState uniform_counts(const DecisionProblem& problem, double alpha) {
  if (!(alpha > 0.0)) throw DomainError("pseudo-counts must be positive");
  LearningAgentState state;
  state.pseudo_counts.assign(problem.signals.size(),
                             std::vector<double>(problem.states.size(), alpha));
  return state;
}

LearningRun run_learning_agent(const DecisionProblem& problem, LearningAgentState initial,
                               std::size_t n_trials, std::uint64_t seed,
                               const AgentSpec& decision_spec) {
  if (!problem.disclosure.feedback_after_trial)
    throw DomainError("learning agents require feedback_after_trial in the disclosure");
  const std::size_t n_signals = problem.signals.size();
  const std::size_t n_states = problem.states.size();
  if (initial.pseudo_counts.size() != n_signals)
    throw DomainError("pseudo-count matrix must be signals x states");
  for (const auto& row : initial.pseudo_counts) {
    if (row.size() != n_states) throw DomainError("pseudo-count matrix must be signals x states");
    for (double c : row) {
      if (!(c > 0.0)) throw DomainError("pseudo-counts must be positive");
    }
  }
  ValidationReport agent_report = validate_agent(decision_spec, problem);
  if (!agent_report.valid())
    throw DomainError("invalid agent spec: " + agent_report.violations.front().message);

  ScoreMatrix s_opt = realize_rule(problem.rule(decision_spec.optimizes), problem.actions,
                                   n_states);
  ScoreMatrix s_curve = realize_rule(problem.incentive_rule, problem.actions, n_states);
  const Matrix* garbling = decision_spec.garbling ? &*decision_spec.garbling : nullptr;

  std::vector<double> flat(n_signals * n_states);
  for (std::size_t v = 0; v < n_signals; ++v)
    for (std::size_t t = 0; t < n_states; ++t) flat[v * n_states + t] = problem.info.joint[v][t];

  LearningRun run;
  run.curve.reserve(n_trials);
  Matrix& counts = initial.pseudo_counts;
  Rng rng(seed);

  std::vector<std::vector<double>> dist(n_signals);
  for (std::size_t trial = 0; trial < n_trials; ++trial) {
    // Policy from the current estimate: belief given perceived v is the
    // estimate's posterior (counts are all positive, rows never vanish).
    for (std::size_t vp = 0; vp < n_signals; ++vp) {
      double row_total = 0.0;
      for (double c : counts[vp]) row_total += c;
      std::vector<double> belief(n_states);
      for (std::size_t t = 0; t < n_states; ++t) belief[t] = counts[vp][t] / row_total;
      dist[vp] = action_distribution(s_opt, belief, decision_spec.softmax_temperature,
                                     decision_spec.lapse_rate);
    }

    double expected = 0.0;
    for (std::size_t v = 0; v < n_signals; ++v) {
      for (std::size_t t = 0; t < n_states; ++t) {
        double mass = problem.info.joint[v][t];
        if (mass <= 0.0) continue;
        if (!garbling) {
          for (std::size_t a = 0; a < dist[v].size(); ++a)
            expected += mass * dist[v][a] * s_curve.scores[a][t];
        } else {
          for (std::size_t vp = 0; vp < n_signals; ++vp) {
            double w = (*garbling)[v][vp];
            if (w <= 0.0) continue;
            for (std::size_t a = 0; a < dist[vp].size(); ++a)
              expected += mass * w * dist[vp][a] * s_curve.scores[a][t];
          }
        }
      }
    }
    run.curve.push_back(expected);

    std::size_t cell = rng.categorical(flat);
    std::size_t v = cell / n_states;
    std::size_t t = cell % n_states;
    std::size_t vp = garbling ? rng.categorical((*garbling)[v]) : v;
    counts[vp][t] += 1.0;
  }

  run.final_state = std::move(initial);
  return run;
}

std::vector<SweepRow> design_sweep(const DecisionProblem& problem,
                                   const std::vector<AgentSpec>& agents,
                                   const SweepSettings& settings) {
  const double R = rational_benchmark(problem);
  const double R0 = rational_baseline(problem);
  const double delta = R - R0;
  const bool losses_defined = delta > kIdentityTol;

  std::vector<SweepRow> rows(agents.size());
  auto run_row = [&](std::size_t i) {
    SweepRow row;
    row.agent = agents[i];
    PolicyKernel policy = build_policy(problem, agents[i]);
    if (settings.mode == SweepMode::Exact) {
      ExactMetrics em = exact_metrics(problem, policy);
      row.B = em.B;
      row.C = em.C;
    } else {
      BehavioralDataset ds =
          sample_dataset(problem, policy, settings.n_trials, derive_seed(settings.seed, i));
      row.B = behavioral_score(ds, RuleChoice::Evaluation);
      row.C = calibrated_score(ds, RuleChoice::Evaluation);
    }
    if (losses_defined) {
      row.total_loss = (R - row.B) / delta;
      row.stimulus_prior_gap = (R - row.C) / delta;
      row.updating_optimization_gap = (row.C - row.B) / delta;
    }
    rows[i] = std::move(row);
  };

  if (!settings.parallel || agents.size() < 2) {
    for (std::size_t i = 0; i < agents.size(); ++i) run_row(i);
    return rows;
  }

  const std::size_t n_threads =
      std::min<std::size_t>(std::max(1u, std::thread::hardware_concurrency()), agents.size());
  std::vector<std::thread> pool;
  std::exception_ptr first_error;
  std::mutex error_mutex;
  for (std::size_t w = 0; w < n_threads; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < agents.size(); i += n_threads) {
        try {
          run_row(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
  return rows;
}

} // namespace dptool
