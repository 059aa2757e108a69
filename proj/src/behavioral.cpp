#include "dptool/behavioral.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>

#include "dptool/rng.hpp"

namespace dptool {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  fields.push_back(cur);
  return fields;
}

// Integer count of each (action, state) cell; scoring sums run over cells so
// results are independent of record order.
std::vector<std::vector<long>> cell_counts(const BehavioralDataset& ds) {
  std::vector<std::vector<long>> counts(ds.problem.actions.size(),
                                        std::vector<long>(ds.problem.states.size(), 0));
  for (const auto& r : ds.records) counts[r.action][r.state] += 1;
  return counts;
}

} // namespace

BehavioralDataset dataset_from_csv_text(const std::string& text, const DecisionProblem& problem) {
  BehavioralDataset ds;
  ds.problem = problem;

  std::istringstream in(text);
  std::string line;
  std::size_t row = 0;
  if (!std::getline(in, line)) throw ParseError(1, "header", "file is empty");
  row = 1;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kCsvHeader)
    throw ParseError(1, "header",
                     "expected exactly \"" + std::string(kCsvHeader) + "\", got \"" + line + "\"");

  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue; // tolerate blank lines (trailing newline)

    auto fields = split_fields(line);
    if (fields.size() != 6)
      throw ParseError(row, "row",
                       "expected 6 fields, got " + std::to_string(fields.size()));

    TrialRecord rec;
    rec.participant_id = fields[0];
    const std::string& idx = fields[1];
    auto [ptr, ec] = std::from_chars(idx.data(), idx.data() + idx.size(), rec.trial_index);
    if (ec != std::errc() || ptr != idx.data() + idx.size() || rec.trial_index < 0)
      throw ParseError(row, "trial_index", "\"" + idx + "\" is not a nonnegative integer");
    rec.condition = fields[2];
    try {
      rec.signal = index_of(problem.signals.signals, fields[3], "signal");
      rec.action = index_of(problem.actions.actions, fields[4], "action");
      rec.state = index_of(problem.states.states, fields[5], "state");
    } catch (const LabelNotFound& e) {
      throw UnknownLabel(row, e.label);
    }
    ds.records.push_back(std::move(rec));
  }
  return ds;
}

BehavioralDataset ingest_csv(const std::string& path, const DecisionProblem& problem) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FileError(path, "cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw FileError(path, "read failed");
  return dataset_from_csv_text(buf.str(), problem);
}

void write_csv(std::ostream& out, const BehavioralDataset& ds) {
  out << kCsvHeader << '\n';
  for (const auto& r : ds.records) {
    out << r.participant_id << ',' << r.trial_index << ',' << r.condition << ','
        << ds.problem.signals.signals[r.signal] << ',' << ds.problem.actions.actions[r.action]
        << ',' << ds.problem.states.states[r.state] << '\n';
  }
}

double behavioral_score(const BehavioralDataset& ds, const ScoringRule& rule) {
  if (ds.records.empty()) throw EmptyDataset();
  ScoreMatrix sm = realize_rule(rule, ds.problem.actions, ds.problem.states.size());
  auto counts = cell_counts(ds);
  double total = 0.0;
  for (std::size_t a = 0; a < counts.size(); ++a) {
    for (std::size_t t = 0; t < counts[a].size(); ++t) {
      if (counts[a][t] != 0) total += double(counts[a][t]) * sm.scores[a][t];
    }
  }
  return total / double(ds.records.size());
}

double behavioral_score(const BehavioralDataset& ds, RuleChoice choice) {
  return behavioral_score(ds, ds.problem.rule(choice));
}

Matrix empirical_joint(const BehavioralDataset& ds, double alpha) {
  if (ds.records.empty()) throw EmptyDataset();
  if (alpha < 0.0) throw DomainError("smoothing alpha must be nonnegative");
  auto counts = cell_counts(ds);
  const std::size_t n_a = counts.size();
  const std::size_t n_t = n_a ? counts.front().size() : 0;
  const double denom = double(ds.records.size()) + alpha * double(n_a * n_t);
  Matrix joint(n_a, std::vector<double>(n_t, 0.0));
  for (std::size_t a = 0; a < n_a; ++a)
    for (std::size_t t = 0; t < n_t; ++t) joint[a][t] = (double(counts[a][t]) + alpha) / denom;
  return joint;
}

double calibrated_score_from_joint(const DecisionProblem& problem, const Matrix& joint_action_state,
                                   RuleChoice choice) {
  ScoreMatrix sm = realize_rule(problem.rule(choice), problem.actions, problem.states.size());
  double total = 0.0;
  for (const auto& row : joint_action_state) {
    double mass = 0.0;
    for (double x : row) mass += x;
    if (mass <= 0.0) continue; // action never played; contributes nothing
    std::vector<double> conditional(row.size());
    for (std::size_t t = 0; t < row.size(); ++t) conditional[t] = row[t] / mass;
    const auto& scores = sm.scores[argmax_action(sm, conditional)];
    for (std::size_t t = 0; t < row.size(); ++t) total += row[t] * scores[t];
  }
  return total;
}

double calibrated_score(const BehavioralDataset& ds, RuleChoice choice, double alpha) {
  return calibrated_score_from_joint(ds.problem, empirical_joint(ds, alpha), choice);
}

LossDecomposition decompose_from_scores(double R, double R_baseline, double B, double C) {
  LossDecomposition d;
  d.R = R;
  d.R_baseline = R_baseline;
  d.Delta = R - R_baseline;
  d.B = B;
  d.C = C;
  if (d.Delta <= kIdentityTol) throw ZeroValueOfInformation(d.Delta);
  d.total_loss = (R - B) / d.Delta;
  d.stimulus_prior_gap = (R - C) / d.Delta;
  d.updating_optimization_gap = (C - B) / d.Delta;
  return d;
}

LossDecomposition decompose_losses(const BehavioralDataset& ds, RuleChoice choice, double alpha) {
  double R = rational_benchmark(ds.problem, choice);
  double R0 = rational_baseline(ds.problem, choice);
  double B = behavioral_score(ds, choice);
  double C = calibrated_score(ds, choice, alpha);
  return decompose_from_scores(R, R0, B, C);
}

std::map<std::string, ConditionOutcome> per_condition_report(
    const BehavioralDataset& ds, const std::map<std::string, DecisionProblem>& condition_problems,
    RuleChoice choice, double alpha) {
  std::set<std::string> conditions;
  for (const auto& r : ds.records) conditions.insert(r.condition);
  for (const auto& [c, _] : condition_problems) conditions.insert(c);

  std::map<std::string, ConditionOutcome> out;
  for (const auto& condition : conditions) {
    ConditionOutcome outcome;
    BehavioralDataset sub;
    auto bound = condition_problems.find(condition);
    if (bound != condition_problems.end()) {
      const DecisionProblem& cp = bound->second;
      if (cp.states.states != ds.problem.states.states ||
          cp.actions.actions != ds.problem.actions.actions ||
          cp.signals.signals != ds.problem.signals.signals) {
        outcome.error = "condition problem declares different state/action/signal labels";
        out.emplace(condition, std::move(outcome));
        continue;
      }
      sub.problem = cp;
    } else {
      sub.problem = ds.problem;
    }
    for (const auto& r : ds.records) {
      if (r.condition == condition) sub.records.push_back(r);
    }
    outcome.n_records = sub.records.size();
    try {
      outcome.result = decompose_losses(sub, choice, alpha);
    } catch (const DomainError& e) {
      outcome.error = e.what();
    }
    out.emplace(condition, std::move(outcome));
  }
  return out;
}

namespace {

Interval percentile_95(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  auto at = [&](double q) {
    double pos = q * double(xs.size() - 1);
    std::size_t lo = std::size_t(pos);
    std::size_t hi = std::min(lo + 1, xs.size() - 1);
    double frac = pos - double(lo);
    return xs[lo] * (1.0 - frac) + xs[hi] * frac;
  };
  return {at(0.025), at(0.975)};
}

} // namespace

BootstrapSummary bootstrap_decomposition(const BehavioralDataset& ds, std::size_t resamples,
                                         std::uint64_t seed, RuleChoice choice, double alpha) {
  if (ds.records.empty()) throw EmptyDataset();
  double R = rational_benchmark(ds.problem, choice);
  double R0 = rational_baseline(ds.problem, choice);
  if (R - R0 <= kIdentityTol) throw ZeroValueOfInformation(R - R0);
  if (resamples == 0) throw DomainError("bootstrap needs at least one resample");

  const std::size_t n = ds.records.size();
  std::vector<double> bs, cs, totals, rcs, cbs;
  bs.reserve(resamples);
  for (std::size_t k = 0; k < resamples; ++k) {
    Rng rng(derive_seed(seed, k));
    BehavioralDataset re;
    re.problem = ds.problem;
    re.records.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t pick = std::min(std::size_t(rng.uniform() * double(n)), n - 1);
      re.records.push_back(ds.records[pick]);
    }
    double B = behavioral_score(re, choice);
    double C = calibrated_score(re, choice, alpha);
    LossDecomposition d = decompose_from_scores(R, R0, B, C);
    bs.push_back(B);
    cs.push_back(C);
    totals.push_back(d.total_loss);
    rcs.push_back(d.stimulus_prior_gap);
    cbs.push_back(d.updating_optimization_gap);
  }

  BootstrapSummary summary;
  summary.resamples = resamples;
  summary.seed = seed;
  summary.B = percentile_95(bs);
  summary.C = percentile_95(cs);
  summary.total_loss = percentile_95(totals);
  summary.stimulus_prior_gap = percentile_95(rcs);
  summary.updating_optimization_gap = percentile_95(cbs);
  return summary;
}

} // namespace dptool
