#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <unistd.h>

#include "CLI11.hpp"
#include "dptool/problem_io.hpp"
#include "dptool/report_json.hpp"

namespace {

using dptool::RuleChoice;
using nlohmann::json;

constexpr int kExitInvalid = 1;
constexpr int kExitGated = 2;      // ill-defined or degenerate problem
constexpr int kExitZeroValue = 3;  // loss decomposition undefined
constexpr int kExitFile = 64;      // unreadable or ill-formed input file
constexpr int kExitCsv = 65;       // behavioral CSV violates the schema

bool color_enabled() {
  return std::getenv("DPTOOL_NO_COLOR") == nullptr && isatty(1) == 1;
}

std::string paint(const std::string& text, const char* code) {
  if (!color_enabled()) return text;
  return std::string("\033[") + code + "m" + text + "\033[0m";
}

std::string green(const std::string& s) { return paint(s, "32"); }
std::string red(const std::string& s) { return paint(s, "31"); }
std::string yellow(const std::string& s) { return paint(s, "33"); }

std::string num(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  return buf;
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw dptool::FileError(path, "cannot open for writing");
  out << text;
  if (!out) throw dptool::FileError(path, "write failed");
}

void emit_json(const json& doc, const std::string& out_path) {
  std::string text = doc.dump(2);
  text += '\n';
  if (out_path.empty()) {
    std::cout << text;
  } else {
    write_text_file(out_path, text);
  }
}

std::string join_command(int argc, char** argv) {
  std::string cmd;
  for (int i = 0; i < argc; ++i) {
    if (i) cmd += ' ';
    cmd += argv[i];
  }
  return cmd;
}

// Loads and validates; prints violations and returns false when invalid.
bool load_validated(const std::string& path, dptool::DecisionProblem& problem) {
  problem = dptool::load_problem(path);
  auto report = dptool::validate_problem(problem);
  if (report.valid()) return true;
  std::cout << red("INVALID") << " " << path << "\n";
  for (const auto& v : report.violations) {
    std::cout << "  [" << v.code << "] " << v.message << "\n";
  }
  return false;
}

struct CommonArgs {
  std::string problem_path;
  std::string out_path;
  std::uint64_t seed = 0;
  std::string command_line;
};

int run_validate(const CommonArgs& args) {
  dptool::DecisionProblem problem;
  if (!load_validated(args.problem_path, problem)) return kExitInvalid;
  std::cout << green("VALID") << " " << args.problem_path << "\n";
  return 0;
}

int run_analyze(const CommonArgs& args, std::size_t grid, const std::string& rule_name) {
  dptool::DecisionProblem problem;
  if (!load_validated(args.problem_path, problem)) return kExitInvalid;
  RuleChoice choice = rule_name == "incentive" ? RuleChoice::Incentive : RuleChoice::Evaluation;

  json body = dptool::analyze_report(problem, choice, grid);
  std::cout << "baseline               " << num(body["baseline"].get<double>()) << "\n";
  std::cout << "benchmark              " << num(body["benchmark"].get<double>()) << "\n";
  std::cout << "value of information   " << num(body["value_of_information"].get<double>())
            << "\n";
  if (body["degenerate_value"].get<bool>()) {
    std::cout << yellow("warning") << ": the signal has zero value of information\n";
  }
  if (body.contains("cutpoints")) {
    for (const auto& cp : body["cutpoints"]) {
      std::cout << "cutpoint: " << cp["below_action"].get<std::string>() << " -> "
                << cp["above_action"].get<std::string>();
      if (cp.contains("exact")) std::cout << " at P(" << problem.states.states[1] << ") = "
                                          << num(cp["exact"].get<double>());
      std::cout << "\n";
    }
  }
  for (const auto& co : body["certainty_optimal"]) {
    std::cout << "under certainty of " << co["state"].get<std::string>() << ": "
              << co["action"].get<std::string>() << "\n";
  }
  if (body.contains("properness")) {
    const auto& pj = body["properness"];
    std::cout << "properness: " << (pj["proper"].get<bool>() ? "proper" : "not proper")
              << (pj["strict"].get<bool>() ? " (strict)" : "") << "\n";
    for (const auto& note : pj["notes"]) std::cout << "  " << note.get<std::string>() << "\n";
  }
  if (!args.out_path.empty()) {
    emit_json(dptool::with_manifest(
                  dptool::make_manifest(args.problem_path, args.command_line, args.seed),
                  std::move(body)),
              args.out_path);
  }
  return 0;
}

int run_audit(const CommonArgs& args) {
  dptool::DecisionProblem problem;
  if (!load_validated(args.problem_path, problem)) return kExitInvalid;

  dptool::AuditReport report = dptool::audit_problem(problem);
  json body{{"audit", dptool::to_json(report)}};

  const char* color_code = report.verdict == dptool::AuditVerdict::WellDefined ? "32" : "31";
  std::cout << "verdict: " << paint(dptool::to_string(report.verdict), color_code);
  if (report.learnable_in_limit) std::cout << " (learnable in the limit)";
  std::cout << "\n";
  for (const auto& r : report.reasons) std::cout << "  [" << r.code << "] " << r.message << "\n";
  std::cout << "loss sources:\n";
  for (const char* source : dptool::kLossSources) {
    const auto& entry = report.loss_ledger.at(source);
    std::cout << "  " << source << ": "
              << (entry.definable ? green("definable") : yellow("undefinable")) << " ("
              << entry.reason << ")\n";
  }
  for (const auto& w : report.warnings) {
    std::cout << yellow("warning") << " [" << w.code << "] " << w.message << "\n";
  }

  body["consistency"] = dptool::to_json(dptool::incentive_evaluation_consistency(problem));

  if (problem.states.size() == 2 && problem.signals.size() == 2) {
    try {
      auto mult = dptool::multiplicity_check(problem, problem.disclosure.aggregate_stats);
      body["multiplicity"] = dptool::to_json(mult, problem);
      if (mult.multiplicitous) {
        std::cout << yellow("warning")
                  << " [MODEL_MULTIPLICITY] disclosed information admits multiple joints";
        for (std::size_t v = 0; v < mult.posterior_bounds.size(); ++v) {
          if (mult.posterior_bounds[v][0] < 0.0) continue;
          std::cout << "; P(" << problem.states.states[1] << "|" << problem.signals.signals[v]
                    << ") in [" << num(mult.posterior_bounds[v][0]) << ", "
                    << num(mult.posterior_bounds[v][1]) << "]"
                    << (mult.action_flips[v] ? " (optimal action flips)" : "");
        }
        std::cout << "\n";
      }
    } catch (const dptool::InfeasibleDisclosure& e) {
      body["multiplicity"] = json{{"infeasible", true}, {"message", e.what()}};
      std::cout << yellow("warning") << " [INFEASIBLE_DISCLOSURE] " << e.what() << "\n";
    }
  }

  if (!args.out_path.empty()) {
    emit_json(dptool::with_manifest(
                  dptool::make_manifest(args.problem_path, args.command_line, args.seed),
                  std::move(body)),
              args.out_path);
  }
  return report.verdict == dptool::AuditVerdict::WellDefined ? 0 : kExitGated;
}

int run_simulate(const CommonArgs& args, const std::string& agent_path,
                 const std::string& sweep_path, bool exact, std::size_t trials, bool parallel,
                 const std::string& format) {
  dptool::DecisionProblem problem;
  if (!load_validated(args.problem_path, problem)) return kExitInvalid;

  if (!sweep_path.empty()) {
    auto agents = dptool::load_sweep_grid(sweep_path);
    for (const auto& agent : agents) {
      auto report = dptool::validate_agent(agent, problem);
      if (!report.valid()) {
        std::cout << red("INVALID AGENT") << "\n";
        for (const auto& v : report.violations)
          std::cout << "  [" << v.code << "] " << v.message << "\n";
        return kExitInvalid;
      }
    }
    dptool::SweepSettings settings;
    settings.mode = exact ? dptool::SweepMode::Exact : dptool::SweepMode::Sampled;
    settings.n_trials = trials;
    settings.seed = args.seed;
    settings.parallel = parallel;
    auto rows = dptool::design_sweep(problem, agents, settings);
    if (format == "json") {
      emit_json(dptool::with_manifest(
                    dptool::make_manifest(args.problem_path, args.command_line, args.seed),
                    dptool::sweep_rows_json(rows)),
                args.out_path);
    } else {
      std::string csv = dptool::sweep_rows_csv(rows);
      if (args.out_path.empty()) {
        std::cout << csv;
      } else {
        write_text_file(args.out_path, csv);
      }
    }
    return 0;
  }

  dptool::AgentSpec agent = dptool::load_agent(agent_path);
  auto agent_report = dptool::validate_agent(agent, problem);
  if (!agent_report.valid()) {
    std::cout << red("INVALID AGENT") << " " << agent_path << "\n";
    for (const auto& v : agent_report.violations)
      std::cout << "  [" << v.code << "] " << v.message << "\n";
    return kExitInvalid;
  }

  dptool::PolicyKernel policy = dptool::build_policy(problem, agent);
  if (exact) {
    dptool::ExactMetrics em = dptool::exact_metrics(problem, policy);
    json body = dptool::to_json(em);
    double R = dptool::rational_benchmark(problem);
    double R0 = dptool::rational_baseline(problem);
    body["benchmark"] = R;
    body["baseline"] = R0;
    try {
      body["decomposition"] = dptool::to_json(dptool::decompose_from_scores(R, R0, em.B, em.C));
    } catch (const dptool::ZeroValueOfInformation&) {
      body["zero_value_of_information"] = true;
    }
    std::cout << "B = " << num(em.B) << "\nC = " << num(em.C) << "\n";
    emit_json(dptool::with_manifest(
                  dptool::make_manifest(args.problem_path, args.command_line, args.seed),
                  std::move(body)),
              args.out_path.empty() ? std::string() : args.out_path);
    return 0;
  }

  auto ds = dptool::sample_dataset(problem, policy, trials, args.seed);
  std::ostringstream csv;
  dptool::write_csv(csv, ds);
  if (args.out_path.empty()) {
    std::cout << csv.str();
  } else {
    write_text_file(args.out_path, csv.str());
  }
  return 0;
}

int run_score(const CommonArgs& args, const std::string& data_path, bool decompose,
              bool by_condition, std::size_t bootstrap, double alpha,
              const std::string& rule_name) {
  dptool::DecisionProblem problem;
  if (!load_validated(args.problem_path, problem)) return kExitInvalid;
  RuleChoice choice = rule_name == "incentive" ? RuleChoice::Incentive : RuleChoice::Evaluation;

  dptool::BehavioralDataset ds = dptool::ingest_csv(data_path, problem);

  double R = dptool::rational_benchmark(problem, choice);
  double R0 = dptool::rational_baseline(problem, choice);
  double B, C;
  try {
    B = dptool::behavioral_score(ds, choice);
    C = dptool::calibrated_score(ds, choice, alpha);
  } catch (const dptool::EmptyDataset&) {
    std::cerr << "error: " << data_path << " has no data rows\n";
    return kExitCsv;
  }

  std::cout << "records                " << ds.records.size() << "\n";
  std::cout << "behavioral score B     " << num(B) << "\n";
  std::cout << "calibrated score C     " << num(C) << "\n";
  std::cout << "benchmark R            " << num(R) << "\n";
  std::cout << "baseline R0            " << num(R0) << "\n";
  std::cout << "value of information   " << num(R - R0) << "\n";

  json body{{"records", ds.records.size()}, {"behavioral_score", B}, {"calibrated_score", C},
            {"benchmark", R},               {"baseline", R0},
            {"value_of_information", R - R0}};

  bool zero_value = false;
  try {
    dptool::LossDecomposition d = dptool::decompose_from_scores(R, R0, B, C);
    if (decompose) {
      body["decomposition"] = dptool::to_json(d);
      std::cout << "total loss             " << num(d.total_loss) << "\n";
      std::cout << "stimulus+prior gap     " << num(d.stimulus_prior_gap) << "\n";
      std::cout << "updating+optimization  " << num(d.updating_optimization_gap) << "\n";
    }
  } catch (const dptool::ZeroValueOfInformation&) {
    zero_value = true;
    body["zero_value_of_information"] = true;
    std::cout << red("zero value of information") << ": loss decomposition is undefined\n";
  }

  if (by_condition && !zero_value) {
    auto conditions = dptool::per_condition_report(ds, {}, choice, alpha);
    json cj = json::object();
    for (const auto& [condition, outcome] : conditions) {
      if (outcome.result) {
        cj[condition] = dptool::to_json(*outcome.result);
        cj[condition]["records"] = outcome.n_records;
        std::cout << "condition " << condition << ": total loss "
                  << num(outcome.result->total_loss) << " over " << outcome.n_records
                  << " records\n";
      } else {
        cj[condition] = json{{"error", outcome.error}, {"records", outcome.n_records}};
        std::cout << "condition " << condition << ": " << yellow(outcome.error) << "\n";
      }
    }
    body["by_condition"] = cj;
  }

  if (bootstrap > 0 && !zero_value) {
    auto summary = dptool::bootstrap_decomposition(ds, bootstrap, args.seed, choice, alpha);
    body["bootstrap"] = dptool::to_json(summary);
    std::cout << "bootstrap total loss   [" << num(summary.total_loss.lo) << ", "
              << num(summary.total_loss.hi) << "] (" << bootstrap << " resamples)\n";
  }

  if (!args.out_path.empty()) {
    emit_json(dptool::with_manifest(
                  dptool::make_manifest(args.problem_path, args.command_line, args.seed),
                  std::move(body)),
              args.out_path);
  }
  return zero_value ? kExitZeroValue : 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"decision problem analysis toolkit"};
  app.require_subcommand(1);

  CommonArgs args;
  args.command_line = join_command(argc, argv);

  auto* validate = app.add_subcommand("validate", "check a problem file against its invariants");
  validate->add_option("problem", args.problem_path, "problem JSON file")->required();

  auto* analyze = app.add_subcommand("analyze", "rational benchmarks and rule structure");
  analyze->add_option("problem", args.problem_path, "problem JSON file")->required();
  std::size_t grid = 0;
  std::string rule_name = "evaluation";
  analyze->add_option("--grid", grid, "belief grid resolution (0 = default)");
  analyze->add_option("--rule", rule_name, "score with this rule: evaluation|incentive")
      ->check(CLI::IsMember({"evaluation", "incentive"}));
  analyze->add_option("--out", args.out_path, "write the JSON report here");

  auto* audit = app.add_subcommand("audit", "well-definedness, loss ledger, multiplicity");
  audit->add_option("problem", args.problem_path, "problem JSON file")->required();
  audit->add_option("--out", args.out_path, "write the JSON report here");

  auto* simulate = app.add_subcommand("simulate", "synthetic data and design sweeps");
  simulate->add_option("problem", args.problem_path, "problem JSON file")->required();
  std::string agent_path, sweep_path, format = "csv";
  bool exact = false, parallel = false;
  std::size_t trials = 1000;
  auto* agent_opt = simulate->add_option("--agent", agent_path, "agent spec JSON");
  auto* sweep_opt = simulate->add_option("--sweep", sweep_path, "sweep grid JSON");
  agent_opt->excludes(sweep_opt);
  simulate->add_flag("--exact", exact, "closed-form metrics instead of sampling");
  simulate->add_option("--trials", trials, "number of sampled trials");
  simulate->add_option("--seed", args.seed, "root seed (default 0)");
  simulate->add_flag("--parallel", parallel, "evaluate sweep rows in parallel");
  simulate->add_option("--format", format, "sweep output format: csv|json")
      ->check(CLI::IsMember({"csv", "json"}));
  simulate->add_option("--out", args.out_path, "write dataset CSV / metrics JSON here");

  auto* score = app.add_subcommand("score", "score behavioral data against the benchmark");
  score->add_option("problem", args.problem_path, "problem JSON file")->required();
  std::string data_path;
  score->add_option("data", data_path, "behavioral CSV file")->required();
  bool decompose = false, by_condition = false;
  std::size_t bootstrap = 0;
  double alpha = 0.0;
  score->add_flag("--decompose", decompose, "print the normalized loss decomposition");
  score->add_flag("--by-condition", by_condition, "decompose each condition separately");
  score->add_option("--bootstrap", bootstrap, "percentile intervals from K resamples");
  score->add_option("--laplace", alpha, "add-alpha smoothing for the empirical joint");
  score->add_option("--seed", args.seed, "root seed (default 0)");
  score->add_option("--rule", rule_name, "score with this rule: evaluation|incentive")
      ->check(CLI::IsMember({"evaluation", "incentive"}));
  score->add_option("--out", args.out_path, "write the JSON report here");

  CLI11_PARSE(app, argc, argv);

  try {
    if (validate->parsed()) return run_validate(args);
    if (analyze->parsed()) return run_analyze(args, grid, rule_name);
    if (audit->parsed()) return run_audit(args);
    if (simulate->parsed()) {
      if (agent_path.empty() && sweep_path.empty()) {
        std::cerr << "error: simulate requires --agent or --sweep\n";
        return kExitInvalid;
      }
      return run_simulate(args, agent_path, sweep_path, exact, trials, parallel, format);
    }
    if (score->parsed())
      return run_score(args, data_path, decompose, by_condition, bootstrap, alpha, rule_name);
  } catch (const dptool::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitCsv;
  } catch (const dptool::UnknownLabel& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitCsv;
  } catch (const dptool::FileError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFile;
  } catch (const dptool::FormatError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFile;
  } catch (const dptool::ZeroValueOfInformation& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitZeroValue;
  } catch (const dptool::DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  }
  return 0;
}
