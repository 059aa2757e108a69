#include "dptool/problem_io.hpp"

#include <fstream>
#include <sstream>

#include "dptool/problem.hpp"
#include "json.hpp"

namespace dptool {

namespace {

using nlohmann::json;

void reject_unknown_keys(const json& obj, const char* where,
                         std::initializer_list<const char*> allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (const char* k : allowed) {
      if (it.key() == k) ok = true;
    }
    if (!ok) throw FormatError(std::string(where) + ": unknown key \"" + it.key() + "\"");
  }
}

std::vector<std::string> string_list(const json& j, const char* where) {
  if (!j.is_array()) throw FormatError(std::string(where) + " must be an array of strings");
  std::vector<std::string> out;
  for (const auto& e : j) {
    if (!e.is_string()) throw FormatError(std::string(where) + " must contain only strings");
    out.push_back(e.get<std::string>());
  }
  return out;
}

Matrix number_matrix(const json& j, const char* where) {
  if (!j.is_array()) throw FormatError(std::string(where) + " must be an array of rows");
  Matrix out;
  for (const auto& row : j) {
    if (!row.is_array()) throw FormatError(std::string(where) + " rows must be arrays");
    std::vector<double> r;
    for (const auto& e : row) {
      if (!e.is_number()) throw FormatError(std::string(where) + " entries must be numbers");
      r.push_back(e.get<double>());
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<double> number_list(const json& j, const char* where) {
  if (!j.is_array()) throw FormatError(std::string(where) + " must be an array of numbers");
  std::vector<double> out;
  for (const auto& e : j) {
    if (!e.is_number()) throw FormatError(std::string(where) + " entries must be numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

ActionSpace parse_actions(const json& j, std::size_t n_states) {
  ActionSpace as;
  if (j.is_array()) {
    as.actions = string_list(j, "actions");
    return as;
  }
  if (!j.is_object()) throw FormatError("actions must be an array of labels or an object");
  reject_unknown_keys(j, "actions", {"kind", "labels", "resolution"});
  if (!j.contains("kind") || !j["kind"].is_string())
    throw FormatError("actions object requires a string \"kind\"");
  std::string kind = j["kind"].get<std::string>();
  if (kind == "discrete") {
    if (!j.contains("labels")) throw FormatError("discrete actions require \"labels\"");
    if (j.contains("resolution")) throw FormatError("discrete actions take no \"resolution\"");
    as.actions = string_list(j["labels"], "actions.labels");
    return as;
  }
  if (kind == "belief_report") {
    if (j.contains("labels")) throw FormatError("belief_report actions take no \"labels\"");
    std::size_t resolution = 0;
    if (j.contains("resolution")) {
      if (!j["resolution"].is_number_unsigned())
        throw FormatError("actions.resolution must be a nonnegative integer");
      resolution = j["resolution"].get<std::size_t>();
    }
    return belief_report_actions(n_states, resolution);
  }
  throw FormatError("actions.kind must be \"discrete\" or \"belief_report\"");
}

ScoringRule parse_rule(const json& j, const char* where) {
  if (!j.is_object()) throw FormatError(std::string(where) + " must be an object");
  reject_unknown_keys(j, where, {"form", "table", "epsilon"});
  if (!j.contains("form") || !j["form"].is_string())
    throw FormatError(std::string(where) + " requires a string \"form\"");
  std::string form = j["form"].get<std::string>();
  ScoringRule rule;
  if (form == "table") {
    rule.form = RuleForm::Table;
    if (!j.contains("table")) throw FormatError(std::string(where) + ": table form requires \"table\"");
    if (j.contains("epsilon")) throw FormatError(std::string(where) + ": table form takes no \"epsilon\"");
    rule.table = number_matrix(j["table"], where);
    return rule;
  }
  if (form == "quadratic" || form == "logarithmic") {
    rule.form = form == "quadratic" ? RuleForm::Quadratic : RuleForm::Logarithmic;
    if (j.contains("table")) throw FormatError(std::string(where) + ": belief rules take no \"table\"");
    if (j.contains("epsilon")) {
      if (form != "logarithmic")
        throw FormatError(std::string(where) + ": only logarithmic takes \"epsilon\"");
      if (!j["epsilon"].is_number())
        throw FormatError(std::string(where) + ": epsilon must be a number");
      rule.log_epsilon = j["epsilon"].get<double>();
    }
    return rule;
  }
  throw FormatError(std::string(where) + ": form must be table, quadratic, or logarithmic");
}

DisclosureSpec parse_disclosure(const json& j) {
  if (!j.is_object()) throw FormatError("disclosure must be an object");
  reject_unknown_keys(j, "disclosure",
                      {"prior_endowed", "likelihoods_disclosed", "posterior_in_signal",
                       "feedback_after_trial", "scoring_rule_communicated", "aggregate_stats"});
  DisclosureSpec d;
  auto flag = [&](const char* key, bool& out) {
    if (!j.contains(key)) return;
    if (!j[key].is_boolean()) throw FormatError(std::string("disclosure.") + key + " must be a boolean");
    out = j[key].get<bool>();
  };
  flag("prior_endowed", d.prior_endowed);
  flag("likelihoods_disclosed", d.likelihoods_disclosed);
  flag("posterior_in_signal", d.posterior_in_signal);
  flag("feedback_after_trial", d.feedback_after_trial);
  flag("scoring_rule_communicated", d.scoring_rule_communicated);
  if (j.contains("aggregate_stats")) {
    if (!j["aggregate_stats"].is_array())
      throw FormatError("disclosure.aggregate_stats must be an array");
    for (const auto& e : j["aggregate_stats"]) {
      if (!e.is_object()) throw FormatError("aggregate_stats entries must be objects");
      reject_unknown_keys(e, "aggregate_stats entry", {"name", "value", "conditioning"});
      if (!e.contains("name") || !e["name"].is_string() || !e.contains("value") ||
          !e["value"].is_number())
        throw FormatError("aggregate_stats entries require string \"name\" and number \"value\"");
      AggregateStat s;
      s.name = e["name"].get<std::string>();
      s.value = e["value"].get<double>();
      if (e.contains("conditioning")) {
        if (!e["conditioning"].is_string())
          throw FormatError("aggregate_stats conditioning must be a string");
        s.conditioning = e["conditioning"].get<std::string>();
      }
      d.aggregate_stats.push_back(std::move(s));
    }
  }
  return d;
}

DecisionProblem parse_problem(const json& doc) {
  if (!doc.is_object()) throw FormatError("problem document must be a JSON object");
  reject_unknown_keys(doc, "problem",
                      {"states", "actions", "signals", "joint", "incentive_rule",
                       "evaluation_rule", "disclosure", "endowed_prior"});
  for (const char* key : {"states", "actions", "signals", "joint", "incentive_rule", "disclosure"}) {
    if (!doc.contains(key)) throw FormatError(std::string("problem is missing \"") + key + "\"");
  }

  DecisionProblem p;
  p.states.states = string_list(doc["states"], "states");
  p.actions = parse_actions(doc["actions"], p.states.size());
  p.signals.signals = string_list(doc["signals"], "signals");
  p.info.joint = number_matrix(doc["joint"], "joint");
  p.incentive_rule = parse_rule(doc["incentive_rule"], "incentive_rule");
  p.evaluation_rule = doc.contains("evaluation_rule")
                          ? parse_rule(doc["evaluation_rule"], "evaluation_rule")
                          : p.incentive_rule;
  p.disclosure = parse_disclosure(doc["disclosure"]);
  if (doc.contains("endowed_prior")) {
    p.endowed_prior = Belief{number_list(doc["endowed_prior"], "endowed_prior")};
  }
  return p;
}

} // namespace

DecisionProblem load_problem(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FileError(path, "cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw FileError(path, "read failed");
  return problem_from_json_text(buf.str());
}

DecisionProblem problem_from_json_text(const std::string& text) {
  json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded()) throw FormatError("document is not valid JSON");
  return parse_problem(doc);
}

} // namespace dptool
