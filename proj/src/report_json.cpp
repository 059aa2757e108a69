#include "dptool/report_json.hpp"

#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>

#include "dptool/problem_io.hpp"

namespace dptool {

using nlohmann::json;

std::string fnv1a64_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FileError(path, "cannot open file");
  std::uint64_t h = 0xcbf29ce484222325ULL;
  char c;
  while (in.get(c)) {
    h ^= std::uint64_t(static_cast<unsigned char>(c));
    h *= 0x100000001b3ULL;
  }
  char buf[32];
  std::snprintf(buf, sizeof(buf), "fnv1a64:%016llx", static_cast<unsigned long long>(h));
  return buf;
}

RunManifest make_manifest(const std::string& problem_path, const std::string& command,
                          std::uint64_t seed) {
  RunManifest m;
  m.version = "0.1.0";
  m.problem_path = problem_path;
  m.problem_hash = problem_path.empty() ? "" : fnv1a64_file(problem_path);
  m.command = command;
  m.seed = seed;
  std::time_t now = std::time(nullptr);
  char buf[32];
  std::tm tm_utc{};
  gmtime_r(&now, &tm_utc);
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  m.timestamp = buf;
  return m;
}

json to_json(const RunManifest& m) {
  return json{{"tool", m.tool},       {"version", m.version},
              {"problem_path", m.problem_path}, {"problem_hash", m.problem_hash},
              {"command", m.command}, {"seed", m.seed},
              {"timestamp", m.timestamp}};
}

json with_manifest(const RunManifest& manifest, json body) {
  return json{{"manifest", to_json(manifest)}, {"report", std::move(body)}};
}

json to_json(const ValidationReport& report) {
  json out = json::array();
  for (const auto& v : report.violations) out.push_back({{"code", v.code}, {"message", v.message}});
  return json{{"valid", report.valid()}, {"violations", out}};
}

json to_json(const LossDecomposition& d) {
  return json{{"benchmark", d.R},
              {"baseline", d.R_baseline},
              {"value_of_information", d.Delta},
              {"behavioral_score", d.B},
              {"calibrated_score", d.C},
              {"total_loss", d.total_loss},
              {"stimulus_prior_gap", d.stimulus_prior_gap},
              {"updating_optimization_gap", d.updating_optimization_gap}};
}

namespace {

json findings_json(const std::vector<RuleFinding>& findings) {
  json out = json::array();
  for (const auto& f : findings) out.push_back({{"code", f.code}, {"message", f.message}});
  return out;
}

} // namespace

json to_json(const AuditReport& report) {
  json ledger = json::object();
  for (const char* source : kLossSources) {
    auto it = report.loss_ledger.find(source);
    if (it == report.loss_ledger.end()) continue;
    ledger[source] = {{"definable", it->second.definable}, {"reason", it->second.reason}};
  }
  return json{{"verdict", to_string(report.verdict)},
              {"learnable_in_limit", report.learnable_in_limit},
              {"reasons", findings_json(report.reasons)},
              {"loss_ledger", ledger},
              {"warnings", findings_json(report.warnings)},
              {"value_of_information", report.value_of_information}};
}

json to_json(const MultiplicityResult& result, const DecisionProblem& problem) {
  json bounds = json::array();
  for (std::size_t v = 0; v < result.posterior_bounds.size(); ++v) {
    const auto& b = result.posterior_bounds[v];
    json entry{{"signal", problem.signals.signals[v]}, {"action_flip", result.action_flips[v]}};
    if (b[0] >= 0.0) {
      entry["posterior_min"] = b[0];
      entry["posterior_max"] = b[1];
    } else {
      entry["unreachable"] = true;
    }
    bounds.push_back(std::move(entry));
  }
  return json{{"multiplicitous", result.multiplicitous},
              {"bounds", bounds},
              {"anchor_signal", problem.signals.signals[result.anchor_signal]},
              {"witness_low", result.witness_low},
              {"witness_high", result.witness_high},
              {"notes", result.notes}};
}

json to_json(const ConsistencyReport& report) {
  json beliefs = json::array();
  for (const auto& b : report.disagreement_beliefs) beliefs.push_back(b);
  return json{{"warnings", findings_json(report.warnings)},
              {"notes", report.notes},
              {"disagreement_beliefs", beliefs}};
}

json to_json(const BootstrapSummary& summary) {
  auto interval = [](const Interval& i) { return json{{"lo", i.lo}, {"hi", i.hi}}; };
  return json{{"resamples", summary.resamples},
              {"seed", summary.seed},
              {"behavioral_score", interval(summary.B)},
              {"calibrated_score", interval(summary.C)},
              {"total_loss", interval(summary.total_loss)},
              {"stimulus_prior_gap", interval(summary.stimulus_prior_gap)},
              {"updating_optimization_gap", interval(summary.updating_optimization_gap)}};
}

json to_json(const ExactMetrics& em) {
  return json{{"behavioral_score", em.B},
              {"calibrated_score", em.C},
              {"joint_action_state", em.joint_action_state}};
}

json analyze_report(const DecisionProblem& problem, RuleChoice choice,
                    std::size_t grid_resolution) {
  const double R0 = rational_baseline(problem, choice);
  const double R = rational_benchmark(problem, choice);
  const double delta = R - R0;
  const std::size_t n_states = problem.states.size();

  json report{{"rule", choice == RuleChoice::Evaluation ? "evaluation" : "incentive"},
              {"baseline", R0},
              {"benchmark", R},
              {"value_of_information", delta},
              {"degenerate_value", delta <= kIdentityTol}};

  ScoreMatrix sm = realize_rule(problem.rule(choice), problem.actions, n_states);

  json certainty = json::array();
  for (std::size_t t = 0; t < n_states; ++t) {
    std::size_t a = optimal_action_certain(problem.rule(choice), problem.actions, t);
    certainty.push_back(
        {{"state", problem.states.states[t]}, {"action", problem.actions.actions[a]}});
  }
  report["certainty_optimal"] = certainty;

  // Belief cutpoints along the grid; exact crossings refined for two states.
  if (n_states == 2) {
    auto grid = belief_grid(2, grid_resolution);
    json cutpoints = json::array();
    std::size_t prev = argmax_action(sm, grid.front());
    for (std::size_t i = 1; i < grid.size(); ++i) {
      std::size_t cur = argmax_action(sm, grid[i]);
      if (cur == prev) continue;
      json cp{{"below_action", problem.actions.actions[prev]},
              {"above_action", problem.actions.actions[cur]},
              {"grid_lower", grid[i - 1][1]},
              {"grid_upper", grid[i][1]}};
      double d0 = sm.scores[prev][0] - sm.scores[cur][0];
      double d1 = sm.scores[prev][1] - sm.scores[cur][1];
      if (d0 != d1) cp["exact"] = d0 / (d0 - d1);
      cutpoints.push_back(std::move(cp));
      prev = cur;
    }
    report["cutpoints"] = cutpoints;
  }

  if (problem.actions.kind == ActionKind::BeliefReport) {
    auto properness = is_proper(problem.rule(choice), problem.actions, n_states);
    json pj{{"proper", properness.proper}, {"strict", properness.strict},
            {"notes", properness.notes}};
    if (properness.counterexample) {
      pj["counterexample"] = {
          {"belief", problem.actions.actions[properness.counterexample->belief_index]},
          {"better_report", problem.actions.actions[properness.counterexample->better_index]},
          {"truthful_score", properness.counterexample->truthful_score},
          {"better_score", properness.counterexample->better_score}};
    }
    report["properness"] = pj;
  }

  return report;
}

AgentSpec agent_from_json(const json& doc) {
  if (!doc.is_object()) throw FormatError("agent spec must be a JSON object");
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    const std::string& k = it.key();
    if (k != "prior_override" && k != "garbling" && k != "lambda" && k != "tau" && k != "lapse" &&
        k != "optimizes")
      throw FormatError("agent spec: unknown key \"" + k + "\"");
  }
  AgentSpec agent;
  if (doc.contains("prior_override")) {
    if (!doc["prior_override"].is_array())
      throw FormatError("agent prior_override must be an array of numbers");
    Belief b;
    for (const auto& e : doc["prior_override"]) {
      if (!e.is_number()) throw FormatError("agent prior_override must be an array of numbers");
      b.probs.push_back(e.get<double>());
    }
    agent.prior_override = std::move(b);
  }
  if (doc.contains("garbling")) {
    if (!doc["garbling"].is_array()) throw FormatError("agent garbling must be a matrix");
    Matrix g;
    for (const auto& row : doc["garbling"]) {
      if (!row.is_array()) throw FormatError("agent garbling must be a matrix");
      std::vector<double> r;
      for (const auto& e : row) {
        if (!e.is_number()) throw FormatError("agent garbling entries must be numbers");
        r.push_back(e.get<double>());
      }
      g.push_back(std::move(r));
    }
    agent.garbling = std::move(g);
  }
  auto number = [&](const char* key, double& out) {
    if (!doc.contains(key)) return;
    if (!doc[key].is_number()) throw FormatError(std::string("agent ") + key + " must be a number");
    out = doc[key].get<double>();
  };
  number("lambda", agent.updating_exponent);
  number("tau", agent.softmax_temperature);
  number("lapse", agent.lapse_rate);
  if (doc.contains("optimizes")) {
    if (!doc["optimizes"].is_string())
      throw FormatError("agent optimizes must be \"incentive\" or \"evaluation\"");
    std::string o = doc["optimizes"].get<std::string>();
    if (o == "incentive") {
      agent.optimizes = RuleChoice::Incentive;
    } else if (o == "evaluation") {
      agent.optimizes = RuleChoice::Evaluation;
    } else {
      throw FormatError("agent optimizes must be \"incentive\" or \"evaluation\"");
    }
  }
  return agent;
}

AgentSpec load_agent(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FileError(path, "cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  json doc = json::parse(buf.str(), nullptr, false);
  if (doc.is_discarded()) throw FormatError(path + ": document is not valid JSON");
  return agent_from_json(doc);
}

json to_json(const AgentSpec& agent) {
  json out{{"lambda", agent.updating_exponent},
           {"tau", agent.softmax_temperature},
           {"lapse", agent.lapse_rate},
           {"optimizes", agent.optimizes == RuleChoice::Incentive ? "incentive" : "evaluation"}};
  if (agent.prior_override) out["prior_override"] = agent.prior_override->probs;
  if (agent.garbling) out["garbling"] = *agent.garbling;
  return out;
}

std::vector<AgentSpec> sweep_grid_from_json(const json& doc) {
  if (!doc.is_object()) throw FormatError("sweep grid must be a JSON object");
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    const std::string& k = it.key();
    if (k != "lambda" && k != "tau" && k != "lapse" && k != "prior_override" && k != "garbling" &&
        k != "optimizes")
      throw FormatError("sweep grid: unknown key \"" + k + "\"");
  }
  auto axis = [&](const char* key, double fallback) {
    std::vector<double> values;
    if (!doc.contains(key)) {
      values.push_back(fallback);
      return values;
    }
    if (!doc[key].is_array()) throw FormatError(std::string("sweep ") + key + " must be an array");
    for (const auto& e : doc[key]) {
      if (!e.is_number()) throw FormatError(std::string("sweep ") + key + " must hold numbers");
      values.push_back(e.get<double>());
    }
    if (values.empty()) throw FormatError(std::string("sweep ") + key + " must not be empty");
    return values;
  };
  auto lambdas = axis("lambda", 1.0);
  auto taus = axis("tau", 0.0);
  auto lapses = axis("lapse", 0.0);

  json shared = json::object();
  if (doc.contains("prior_override")) shared["prior_override"] = doc["prior_override"];
  if (doc.contains("garbling")) shared["garbling"] = doc["garbling"];
  if (doc.contains("optimizes")) shared["optimizes"] = doc["optimizes"];
  AgentSpec base = agent_from_json(shared);

  std::vector<AgentSpec> agents;
  agents.reserve(lambdas.size() * taus.size() * lapses.size());
  for (double l : lambdas) {
    for (double t : taus) {
      for (double e : lapses) {
        AgentSpec a = base;
        a.updating_exponent = l;
        a.softmax_temperature = t;
        a.lapse_rate = e;
        agents.push_back(std::move(a));
      }
    }
  }
  return agents;
}

std::vector<AgentSpec> load_sweep_grid(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FileError(path, "cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  json doc = json::parse(buf.str(), nullptr, false);
  if (doc.is_discarded()) throw FormatError(path + ": document is not valid JSON");
  return sweep_grid_from_json(doc);
}

json sweep_rows_json(const std::vector<SweepRow>& rows) {
  json out = json::array();
  for (const auto& row : rows) {
    json r{{"agent", to_json(row.agent)}, {"B", row.B}, {"C", row.C}};
    r["total_loss"] = row.total_loss ? json(*row.total_loss) : json();
    r["stimulus_prior_gap"] = row.stimulus_prior_gap ? json(*row.stimulus_prior_gap) : json();
    r["updating_optimization_gap"] =
        row.updating_optimization_gap ? json(*row.updating_optimization_gap) : json();
    out.push_back(std::move(r));
  }
  return out;
}

std::string sweep_rows_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream out;
  out << "lambda,tau,epsilon,B,C,total_loss,gap_rc,gap_cb\n";
  char buf[64];
  auto num = [&](double x) {
    std::snprintf(buf, sizeof(buf), "%.12g", x);
    return std::string(buf);
  };
  for (const auto& row : rows) {
    out << num(row.agent.updating_exponent) << ',' << num(row.agent.softmax_temperature) << ','
        << num(row.agent.lapse_rate) << ',' << num(row.B) << ',' << num(row.C) << ',';
    if (row.total_loss) out << num(*row.total_loss);
    out << ',';
    if (row.stimulus_prior_gap) out << num(*row.stimulus_prior_gap);
    out << ',';
    if (row.updating_optimization_gap) out << num(*row.updating_optimization_gap);
    out << '\n';
  }
  return out.str();
}

} // namespace dptool
