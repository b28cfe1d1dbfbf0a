"""Rendering of run documents as JSON, CSV or plain text, plus schema validation."""

from __future__ import annotations

import csv
import io
import json
from fractions import Fraction
from importlib import resources

import numpy as np

from .claims import CHI_FORMULAS, FORMULAS


def plain(obj):
    """Convert numpy scalars, tuples, Fractions and sets into JSON-native values."""
    if isinstance(obj, dict):
        return {str(k): plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [plain(v) for v in obj]
    if isinstance(obj, (set, frozenset)):
        return sorted(plain(v) for v in obj)
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return plain(obj.tolist())
    if isinstance(obj, Fraction):
        return f"{obj.numerator}/{obj.denominator}"
    return obj


def to_json(doc: dict) -> str:
    return json.dumps(plain(doc), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def schema() -> dict:
    text = resources.files("psu3mobius").joinpath("schema/report.schema.json").read_text()
    return json.loads(text)


def validate(doc: dict):
    import jsonschema
    jsonschema.validate(plain(doc), schema())


# CSV

def _write(rows, header, comments=()) -> str:
    buf = io.StringIO()
    for c in comments:
        buf.write(f"# {c}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def mu_csv(results: dict) -> str:
    lam = {}
    if "lambda" in results:
        lam = {r["type"]: r["lam"] for r in results["lambda"]["classes"] if r["type"]}
    comments = [f"{k}: |H| = {o}; N_G(H) = {n}; mu = {m}; lambda = {l}"
                for k, (o, n, m, l) in FORMULAS.items()]
    rows = [[r["type"], r["order"], r["normalizer_order"], r["mu"], lam.get(r["type"], "")]
            for r in results["mu"]["table"]]
    return _write(rows, ["type", "order", "normalizer_order", "mu", "lambda"], comments)


def chi_csv(results: dict) -> str:
    comments = [f"{k}: tabulated chi = {a}; stated chi = {b}" for k, (a, b) in CHI_FORMULAS.items()]
    rows = [[r["p"], r["case"], r["chi"], r["chi_poset"], r["tabulated"], r["stated"],
             r["tabulated_verdict"], r["stated_verdict"], r["brown"]]
            for r in results["chi"]["primes"]]
    return _write(rows, ["p", "case", "chi", "chi_poset", "tabulated", "stated",
                         "tabulated_verdict", "stated_verdict", "brown"], comments)


def lambda_csv(results: dict) -> str:
    rows = [[r["class_id"], r["type"] or "", r["order"], r["normalizer_order"], r["class_size"],
             r["solvable"], r["mu_full"], r["lam"]] for r in results["lambda"]["classes"]]
    return _write(rows, ["class_id", "type", "order", "normalizer_order", "class_size",
                         "solvable", "mu", "lambda"])


def maximals_csv(results: dict) -> str:
    mx = results["maximals"]
    rows = [[f["kind"], f["order"], f["count"]] for f in mx["families"]]
    return _write(rows, ["kind", "order", "count"])


def verdict_csv(doc: dict) -> str:
    rows = [[v["claim"], v["title"], v["status"], json.dumps(plain(v["expected"]), sort_keys=True),
             json.dumps(plain(v["computed"]), sort_keys=True), v["detail"]] for v in doc["verdicts"]]
    return _write(rows, ["claim", "title", "status", "expected", "computed", "detail"])


def to_csv(doc: dict) -> str:
    res = doc["results"]
    cmd = doc["command"]
    if cmd == "mu":
        return mu_csv(res)
    if cmd == "chi":
        return chi_csv(res)
    if cmd == "lambda":
        return lambda_csv(res)
    if cmd == "maximals":
        return maximals_csv(res)
    return verdict_csv(doc)


# text

def _kv(d: dict, indent: str = "  ") -> list[str]:
    out = []
    for k in sorted(d):
        v = d[k]
        if isinstance(v, (dict, list)) and len(json.dumps(plain(v))) > 90:
            continue
        out.append(f"{indent}{k}: {json.dumps(plain(v), sort_keys=True, ensure_ascii=False)}")
    return out


def to_text(doc: dict) -> str:
    lines = [f"psu3mobius {doc['version']}  command={doc['command']}  n={doc['config']['n']}"]
    res = doc["results"]
    for task in ("geometry", "group", "maximals"):
        if task in res:
            lines.append(f"[{task}]")
            lines += _kv(res[task])
    if "mu" in res:
        lines.append("[mu]")
        lines.append(f"  {'type':<6} {'|H|':>6} {'|N(H)|':>7} {'size':>6} {'mu':>6}")
        for r in res["mu"]["table"]:
            lines.append(f"  {r['type']:<6} {r['order']:>6} {r['normalizer_order']:>7} "
                         f"{r['class_size']:>6} {r['mu']:>6}")
        p = res["mu"]["generation_probability"]
        lines.append(f"  P(2 elements generate) = {p['2']['value']} ~ {p['2']['float']:.6f}")
        mc = res["mu"]["monte_carlo"]
        lines.append(f"  Monte Carlo: {mc['hits']}/{mc['trials']} = {mc['rate']:.6f}, z = {mc['z']:.2f}")
    if "lambda" in res:
        lines.append("[lambda]")
        lines.append(f"  {'id':>3} {'type':<6} {'|H|':>6} {'size':>6} {'mu':>6} {'lambda':>6}")
        for r in res["lambda"]["classes"]:
            lines.append(f"  {r['class_id']:>3} {r['type'] or '-':<6} {r['order']:>6} "
                         f"{r['class_size']:>6} {r['mu_full']:>6} {r['lam']:>6}")
    if "chi" in res:
        lines.append("[chi]")
        for r in res["chi"]["primes"]:
            lines.append(f"  p={r['p']:<3} chi={r['chi']:>6}  tabulated={r['tabulated']:>6} "
                         f"({r['tabulated_verdict']})  stated={r['stated']:>6} ({r['stated_verdict']})")
    lines.append("[verdicts]")
    for v in doc["verdicts"]:
        extra = f"  {v['detail']}" if v["detail"] else ""
        lines.append(f"  {v['claim']} {v['status']:<11} {v['title']}{extra}")
    lines.append(f"status: {doc['status']}")
    if "timing" in doc:
        lines.append("timing: " + ", ".join(f"{k}={v}s" for k, v in doc["timing"].items()))
    return "\n".join(lines) + "\n"


def render(doc: dict, fmt: str) -> str:
    if fmt == "json":
        return to_json(doc)
    if fmt == "csv":
        return to_csv(doc)
    if fmt == "text":
        return to_text(doc)
    raise ValueError(f"unknown format {fmt!r}")
