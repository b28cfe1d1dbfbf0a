import json

import jsonschema
import pytest
from click.testing import CliRunner

from psu3mobius.cli import main
from psu3mobius.pipeline import (Cache, RunConfig, UsageError, load_classes, load_closure,
                                 save_classes, save_closure)
from psu3mobius.reporting import plain, render, schema, validate


@pytest.fixture
def runner():
    return CliRunner()


def test_task_dependency_closure():
    assert RunConfig(tasks=("mu",)).closed_tasks() == ["geometry", "group", "maximals", "mu"]
    assert RunConfig(tasks=("lambda",)).closed_tasks() == ["geometry", "group", "lambda"]
    assert RunConfig(tasks=("verify",)).closed_tasks() == ["geometry", "group", "maximals", "mu",
                                                          "lambda", "chi"]
    with pytest.raises(UsageError):
        RunConfig(tasks=("bogus",)).closed_tasks()
    with pytest.raises(UsageError):
        RunConfig(n=0).validate()
    with pytest.raises(UsageError):
        RunConfig(n=2, tasks=("chi",)).validate()


def test_generate_json_validates(runner):
    res = runner.invoke(main, ["generate"])
    assert res.exit_code == 0, res.output
    doc = json.loads(res.output)
    validate(doc)
    assert doc["results"]["group"]["order"] == 62400
    assert "timing" not in doc
    assert {v["claim"] for v in doc["verdicts"]} == {"C01", "C02"}


def test_text_and_csv_formats(runner, tmp_path):
    out = tmp_path / "r.txt"
    res = runner.invoke(main, ["generate", "--format", "text", "-o", str(out), "--timing"])
    assert res.exit_code == 0
    text = out.read_text()
    assert "status: ok" in text and "timing:" in text
    res = runner.invoke(main, ["generate", "--format", "csv"])
    assert res.output.splitlines()[0] == "claim,title,status,expected,computed,detail"


def test_env_override_and_precedence(runner):
    res = runner.invoke(main, ["generate"], env={"PSU3MOBIUS_SEED": "7"})
    assert json.loads(res.output)["config"]["seed"] == 7
    res = runner.invoke(main, ["generate", "--seed", "3"], env={"PSU3MOBIUS_SEED": "7"})
    assert json.loads(res.output)["config"]["seed"] == 3


def test_usage_errors(runner):
    res = runner.invoke(main, ["chi"])
    assert res.exit_code == 2
    res = runner.invoke(main, ["mu", "--n", "2"])
    assert res.exit_code == 2 and "node budget" in res.output


def test_chi_single_prime(runner):
    res = runner.invoke(main, ["chi", "--prime", "7"])
    assert res.exit_code == 0
    r = json.loads(res.output)["results"]["chi"]["primes"][0]
    assert (r["p"], r["chi"], r["tabulated"], r["stated"]) == (7, 0, 0, 0)


def test_budget_gives_partial_report(runner):
    res = runner.invoke(main, ["maximals", "--budget-nodes", "50"])
    assert res.exit_code == 3
    doc = json.loads(res.output)
    assert doc["status"] == "partial" and "resource error" in doc["errors"]["maximals"]
    validate(doc)


def test_schema_rejects_bad_status():
    doc = dict(tool="psu3mobius", version="0.1.0", command="verify",
               config=dict(n=1, tasks=[], seed=0, format="json"), results={}, status="ok",
               verdicts=[dict(claim="C01", title="", expected=1, computed=1, status="maybe", detail="")])
    with pytest.raises(jsonschema.ValidationError):
        jsonschema.validate(doc, schema())


def test_plain_conversion():
    import numpy as np
    from fractions import Fraction
    assert plain({1: np.int64(3), "a": (np.bool_(True), Fraction(1, 3)), "s": {2, 1}}) == \
        {"1": 3, "a": [True, "1/3"], "s": [1, 2]}
    with pytest.raises(ValueError):
        render({}, "xml")


def _manifest(n=1, tag="x"):
    return dict(format=1, version="0.1.0", n=n, fields={"tag": tag})


def test_closure_cache_round_trip(tmp_path, catalog, closure):
    cache = Cache(tmp_path, _manifest())
    save_closure(cache, closure)
    again = load_closure(cache, catalog)
    assert [r.fingerprint for r in again.records] == [r.fingerprint for r in closure.records]
    assert [c["type"] for c in again.classes] == [c["type"] for c in closure.classes]


def test_class_cache_round_trip(tmp_path, group, classes):
    cache = Cache(tmp_path, _manifest())
    save_classes(cache, classes)
    again = load_classes(cache, group)
    key = lambda cat: [(c.order, c.class_size, c.normalizer_order, c.type) for c in cat.classes]
    assert key(again) == key(classes)


def test_manifest_change_invalidates(tmp_path, caplog):
    cache = Cache(tmp_path, _manifest(tag="a"))
    cache.save("thing", x=__import__("numpy").arange(3))
    assert cache.load("thing") is not None
    with caplog.at_level("WARNING"):
        cache2 = Cache(tmp_path, _manifest(tag="b"))
    assert cache2.load("thing") is None
    assert "manifest changed" in caplog.text
