#pragma once

#include <cstdint>

#include "dptool/audit.hpp"
#include "dptool/behavioral.hpp"
#include "dptool/simulation.hpp"
#include "json.hpp"

namespace dptool {

// FNV-1a over a file's bytes; stable input fingerprint for manifests.
std::string fnv1a64_file(const std::string& path);

struct RunManifest {
  std::string tool = "dptool";
  std::string version;
  std::string problem_path;
  std::string problem_hash;
  std::string command;
  std::uint64_t seed = 0;
  std::string timestamp; // UTC, ISO 8601
};

RunManifest make_manifest(const std::string& problem_path, const std::string& command,
                          std::uint64_t seed);

nlohmann::json to_json(const RunManifest& m);
nlohmann::json to_json(const ValidationReport& report);
nlohmann::json to_json(const LossDecomposition& d);
nlohmann::json to_json(const AuditReport& report);
nlohmann::json to_json(const MultiplicityResult& result, const DecisionProblem& problem);
nlohmann::json to_json(const ConsistencyReport& report);
nlohmann::json to_json(const BootstrapSummary& summary);
nlohmann::json to_json(const ExactMetrics& em);

// Benchmark summary: baseline, benchmark, value of information, belief
// cutpoints (two-state problems), certainty-optimal actions, properness.
nlohmann::json analyze_report(const DecisionProblem& problem,
                              RuleChoice choice = RuleChoice::Evaluation,
                              std::size_t grid_resolution = 0);

// Wraps a report body with its manifest.
nlohmann::json with_manifest(const RunManifest& manifest, nlohmann::json body);

// Agent spec JSON fragment; unknown keys rejected. Throws FormatError.
AgentSpec agent_from_json(const nlohmann::json& doc);
AgentSpec load_agent(const std::string& path);
nlohmann::json to_json(const AgentSpec& agent);

// Sweep grid: {"lambda": [...], "tau": [...], "lapse": [...]} plus optional
// shared "prior_override", "garbling", "optimizes"; cartesian product, lambda
// outermost. Throws FormatError.
std::vector<AgentSpec> sweep_grid_from_json(const nlohmann::json& doc);
std::vector<AgentSpec> load_sweep_grid(const std::string& path);

nlohmann::json sweep_rows_json(const std::vector<SweepRow>& rows);
// CSV table: lambda,tau,epsilon,B,C,total_loss,gap_rc,gap_cb (losses blank
// when the value of information is zero).
std::string sweep_rows_csv(const std::vector<SweepRow>& rows);

} // namespace dptool
