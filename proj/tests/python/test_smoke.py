import json
import os

import pytest

import dptool


def fixture(name):
    return os.path.join(os.environ["DPTOOL_FIXTURES"], name)


def test_load_and_inspect():
    p = dptool.load_problem(fixture("recidivism.json"))
    assert p.states == ["no_recid", "recid"]
    assert p.actions == ["release", "detain"]
    assert dptool.validate(p)["valid"]


def test_bayes_quantities():
    p = dptool.load_problem(fixture("recidivism_pred_conf.json"))
    prior = dptool.marginal_prior(p)
    assert prior == pytest.approx([0.5, 0.5], abs=1e-12)
    assert dptool.likelihood(p, "no_recid") == pytest.approx([0.8, 0.2], abs=1e-12)
    assert dptool.posterior(p, "pred_recid") == pytest.approx([0.2, 0.8], abs=1e-12)


def test_analyze_benchmarks():
    p = dptool.load_problem(fixture("recidivism.json"))
    report = dptool.analyze(p)
    assert report["baseline"] == pytest.approx(0.0, abs=1e-12)
    assert report["benchmark"] == pytest.approx(0.35, abs=1e-12)
    assert report["value_of_information"] == pytest.approx(0.35, abs=1e-12)


def test_validate_flags_bad_documents():
    doc = {
        "states": ["a", "b"],
        "actions": ["x", "y"],
        "signals": ["s", "t"],
        "joint": [[0.5, 0.0], [0.0, 0.6]],
        "incentive_rule": {"form": "table", "table": [[1.0, 0.0], [0.0, 1.0]]},
        "disclosure": {},
    }
    report = dptool.validate(dptool.problem_from_json(json.dumps(doc)))
    assert not report["valid"]
    assert any(v["code"] == "JOINT_NOT_NORMALIZED" for v in report["violations"])


def test_typed_errors_become_value_errors():
    p = dptool.load_problem(fixture("recidivism.json"))
    with pytest.raises(ValueError):
        dptool.posterior(p, "nonesuch")


def test_audit_verdicts():
    assert dptool.audit(dptool.load_problem(fixture("voting.json")))["verdict"] == "degenerate"
    assert (
        dptool.audit(dptool.load_problem(fixture("recidivism_feature_conf.json")))["verdict"]
        == "ill_defined"
    )
    report = dptool.audit(dptool.load_problem(fixture("recidivism.json")))
    assert report["verdict"] == "well_defined"
    assert report["loss_ledger"]["updating"]["definable"]


def test_simulation_is_deterministic():
    p = dptool.load_problem(fixture("recidivism.json"))
    csv1 = dptool.simulate_sample(p, {"lapse": 0.2}, n_trials=50, seed=9)
    csv2 = dptool.simulate_sample(p, {"lapse": 0.2}, n_trials=50, seed=9)
    assert csv1 == csv2
    scored = dptool.score_csv(p, csv1)
    assert scored["records"] == 50

    exact = dptool.simulate_exact(p)
    assert exact["behavioral_score"] == pytest.approx(0.35, abs=1e-12)


def test_sweep_and_learning():
    p = dptool.load_problem(fixture("recidivism.json"))
    rows = dptool.design_sweep(p, {"lapse": [0.0, 1.0]})
    assert len(rows) == 2
    assert rows[0]["B"] == pytest.approx(0.35, abs=1e-12)
    assert rows[1]["B"] == pytest.approx(-0.125, abs=1e-12)

    run = dptool.run_learning(p, 50, seed=3)
    assert len(run["curve"]) == 50
