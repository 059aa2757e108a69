#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "dptool/audit.hpp"
#include "dptool/behavioral.hpp"
#include "dptool/normative.hpp"
#include "dptool/problem_io.hpp"
#include "dptool/report_json.hpp"
#include "dptool/simulation.hpp"

namespace py = pybind11;
using namespace dptool;
using nlohmann::json;

namespace {

// Values cross the boundary as JSON text in both directions; the Python json
// module does the (de)serialization so no structure is hand-translated.
py::object py_from_json(const json& doc) {
  return py::module_::import("json").attr("loads")(doc.dump());
}

json json_from_py(const py::object& obj) {
  if (obj.is_none()) return json::object();
  std::string text = py::cast<std::string>(py::module_::import("json").attr("dumps")(obj));
  return json::parse(text);
}

RuleChoice choice_from_name(const std::string& name) {
  if (name == "evaluation") return RuleChoice::Evaluation;
  if (name == "incentive") return RuleChoice::Incentive;
  throw FormatError("rule must be \"evaluation\" or \"incentive\"");
}

AgentSpec agent_from_py(const py::object& obj) { return agent_from_json(json_from_py(obj)); }

BehavioralDataset dataset_from_py(const DecisionProblem& problem, const std::string& csv_text) {
  return dataset_from_csv_text(csv_text, problem);
}

} // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "decision problem analysis toolkit";

  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const DomainError& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    }
  });

  py::class_<DecisionProblem>(m, "Problem")
      .def_property_readonly("states",
                             [](const DecisionProblem& p) { return p.states.states; })
      .def_property_readonly("actions",
                             [](const DecisionProblem& p) { return p.actions.actions; })
      .def_property_readonly("signals",
                             [](const DecisionProblem& p) { return p.signals.signals; })
      .def_property_readonly("joint", [](const DecisionProblem& p) { return p.info.joint; })
      .def("__repr__", [](const DecisionProblem& p) {
        return "<Problem states=" + std::to_string(p.states.size()) +
               " actions=" + std::to_string(p.actions.size()) +
               " signals=" + std::to_string(p.signals.size()) + ">";
      });

  m.def("load_problem", &load_problem, py::arg("path"));
  m.def("problem_from_json", &problem_from_json_text, py::arg("text"));

  m.def(
      "validate",
      [](const DecisionProblem& p) { return py_from_json(to_json(validate_problem(p))); },
      py::arg("problem"));

  m.def(
      "marginal_prior",
      [](const DecisionProblem& p) { return marginal_prior(p.info).probs; }, py::arg("problem"));
  m.def(
      "signal_marginal", [](const DecisionProblem& p) { return signal_marginal(p.info); },
      py::arg("problem"));
  m.def(
      "likelihood",
      [](const DecisionProblem& p, const std::string& state) {
        return likelihood(p.info, p.states, state);
      },
      py::arg("problem"), py::arg("state"));
  m.def(
      "posterior",
      [](const DecisionProblem& p, const std::string& signal) {
        return posterior(p.info, p.signals, signal).probs;
      },
      py::arg("problem"), py::arg("signal"));

  m.def(
      "analyze",
      [](const DecisionProblem& p, const std::string& rule, std::size_t grid) {
        return py_from_json(analyze_report(p, choice_from_name(rule), grid));
      },
      py::arg("problem"), py::arg("rule") = "evaluation", py::arg("grid") = 0);

  m.def(
      "audit",
      [](const DecisionProblem& p) { return py_from_json(to_json(audit_problem(p))); },
      py::arg("problem"));

  m.def(
      "multiplicity",
      [](const DecisionProblem& p) {
        return py_from_json(to_json(multiplicity_check(p, p.disclosure.aggregate_stats), p));
      },
      py::arg("problem"));

  m.def(
      "simulate_exact",
      [](const DecisionProblem& p, const py::object& agent) {
        auto metrics = exact_metrics(p, build_policy(p, agent_from_py(agent)));
        return py_from_json(to_json(metrics));
      },
      py::arg("problem"), py::arg("agent") = py::none());

  m.def(
      "simulate_sample",
      [](const DecisionProblem& p, const py::object& agent, std::size_t n_trials,
         std::uint64_t seed) {
        auto ds = sample_dataset(p, build_policy(p, agent_from_py(agent)), n_trials, seed);
        std::ostringstream out;
        write_csv(out, ds);
        return out.str();
      },
      py::arg("problem"), py::arg("agent") = py::none(), py::arg("n_trials") = 1000,
      py::arg("seed") = 0);

  m.def(
      "score_csv",
      [](const DecisionProblem& p, const std::string& csv_text, const std::string& rule,
         double alpha) {
        auto ds = dataset_from_py(p, csv_text);
        RuleChoice choice = choice_from_name(rule);
        json body{{"records", ds.records.size()},
                  {"behavioral_score", behavioral_score(ds, choice)},
                  {"calibrated_score", calibrated_score(ds, choice, alpha)},
                  {"benchmark", rational_benchmark(p, choice)},
                  {"baseline", rational_baseline(p, choice)}};
        try {
          body["decomposition"] = to_json(decompose_losses(ds, choice, alpha));
        } catch (const ZeroValueOfInformation&) {
          body["zero_value_of_information"] = true;
        }
        return py_from_json(body);
      },
      py::arg("problem"), py::arg("csv_text"), py::arg("rule") = "evaluation",
      py::arg("alpha") = 0.0);

  m.def(
      "run_learning",
      [](const DecisionProblem& p, std::size_t n_trials, std::uint64_t seed, double alpha) {
        auto run = run_learning_agent(p, uniform_counts(p, alpha), n_trials, seed, AgentSpec{});
        json body{{"curve", run.curve}, {"final_counts", run.final_state.pseudo_counts}};
        return py_from_json(body);
      },
      py::arg("problem"), py::arg("n_trials"), py::arg("seed") = 0, py::arg("alpha") = 1.0);

  m.def(
      "design_sweep",
      [](const DecisionProblem& p, const py::object& grid, bool exact, std::size_t n_trials,
         std::uint64_t seed, bool parallel) {
        auto agents = sweep_grid_from_json(json_from_py(grid));
        SweepSettings settings;
        settings.mode = exact ? SweepMode::Exact : SweepMode::Sampled;
        settings.n_trials = n_trials;
        settings.seed = seed;
        settings.parallel = parallel;
        return py_from_json(sweep_rows_json(design_sweep(p, agents, settings)));
      },
      py::arg("problem"), py::arg("grid"), py::arg("exact") = true, py::arg("n_trials") = 1000,
      py::arg("seed") = 0, py::arg("parallel") = false);

  m.attr("__version__") = "0.1.0";
}
