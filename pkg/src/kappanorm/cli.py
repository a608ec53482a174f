"""Command-line front end.

Exit codes: 0 ok, 1 computation error, 2 usage error, 3 input schema
violation, 4 I/O failure. Reports are JSON with sorted keys so identical
invocations produce identical bytes; wall time is only recorded with
``--timing``.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
import time
from dataclasses import dataclass, field

import jsonschema
import numpy as np

from . import __version__, core, dualform, opkappa, ordrep, setflow
from .axioms import GeneratorConfig, axiom_suite
from .errors import KappaError
from .sets import CLOSED_SET_SCHEMA, Ball, Polytope, Subspace, as_vector, from_json, to_json

EXIT_OK, EXIT_COMPUTE, EXIT_USAGE, EXIT_SCHEMA, EXIT_IO = 0, 1, 2, 3, 4
COMMANDS = ("axioms", "distance", "duality", "opnorm", "ode", "order")


class UsageError(Exception):
    pass


class SchemaError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


@dataclass
class Command:
    name: str
    options: dict


@dataclass
class RunReport:
    command: str
    config: dict
    results: dict
    wall_time: float | None = None
    version: str = __version__
    trajectory_csv: str | None = field(default=None, repr=False)

    def to_json(self):
        return {
            "command": self.command,
            "config": self.config,
            "results": self.results,
            "wall_time": self.wall_time,
            "version": self.version,
        }


# ---------------------------------------------------------------- schemas

_DEFS = dict(CLOSED_SET_SCHEMA["$defs"])
_DEFS["matrix"] = {"type": "array", "items": {"$ref": "#/$defs/vec"}, "minItems": 1}
_DEFS["operator"] = {"type": "object", "properties": {"matrix": {"$ref": "#/$defs/matrix"}},
                     "required": ["matrix"]}
_DEFS["opset"] = {"oneOf": [
    {"type": "object", "properties": {"type": {"const": "finite"},
                                      "ops": {"type": "array", "items": {"$ref": "#/$defs/operator"}}},
     "required": ["type", "ops"]},
    {"type": "object", "properties": {"type": {"const": "ball"}, "center": {"$ref": "#/$defs/operator"},
                                      "radius": {"type": "number", "minimum": 0},
                                      "m": {"type": "integer", "minimum": 1}, "seed": {"type": "integer"}},
     "required": ["type", "center", "radius"]},
]}
_DEFS["probes"] = {"type": "object", "properties": {"probes": {"type": "array", "minItems": 1, "items": {
    "type": "object", "properties": {"x": {"$ref": "#/$defs/vec"}, "E": {"$ref": "#/$defs/set"}},
    "required": ["x", "E"]}}}, "required": ["probes"]}
_DEFS["field"] = {"oneOf": [
    {"type": "object", "properties": {"builtin": {"enum": sorted(setflow.BUILTINS)}}, "required": ["builtin"],
     "additionalProperties": False},
    {"type": "object", "properties": {"affine": {"type": "object", "properties": {
        "L": {"$ref": "#/$defs/matrix"}, "b": {"oneOf": [{"$ref": "#/$defs/vec"}, {"type": "null"}]}},
        "required": ["L"]}}, "required": ["affine"], "additionalProperties": False},
]}
_DEFS["values"] = {"type": "object", "additionalProperties": {"type": "number"}}
_DEFS["chains"] = {"type": "array", "items": {"type": "array", "items": {"type": "string"}}}


def _schema(body):
    return {"$schema": "https://json-schema.org/draft/2020-12/schema", "$defs": _DEFS, **body}


SCHEMAS = {
    "vector": _schema({"$ref": "#/$defs/vec"}),
    "set": _schema({"$ref": "#/$defs/set"}),
    "duality": _schema({"type": "object", "properties": {
        "x": {"$ref": "#/$defs/vec"}, "A": {"$ref": "#/$defs/set"},
        "y": {"$ref": "#/$defs/vec"}, "B": {"$ref": "#/$defs/set"}}, "required": ["x", "A", "y", "B"]}),
    "opnorm": _schema({"type": "object", "properties": {
        "A": {"$ref": "#/$defs/operator"}, "S": {"$ref": "#/$defs/opset"}, "probes": {"$ref": "#/$defs/probes"}},
        "required": ["A", "S"]}),
    "ode": _schema({"type": "object", "properties": {
        "field": {"$ref": "#/$defs/field"}, "A0": {"$ref": "#/$defs/set"}, "x0": {"$ref": "#/$defs/vec"},
        "t_end": {"type": "number", "exclusiveMinimum": 0}, "h": {"type": "number", "exclusiveMinimum": 0},
        "picard_tol": {"type": "number", "exclusiveMinimum": 0}},
        "required": ["field"], "oneOf": [{"required": ["A0"]}, {"required": ["x0"]}]}),
    "poset": _schema({"type": "object", "properties": {
        "elements": {"type": "array", "items": {"type": "string"}},
        "less": {"type": "array", "items": {"type": "array", "items": {"type": "string"},
                                            "minItems": 2, "maxItems": 2}},
        "positions": {"$ref": "#/$defs/values"}}, "required": ["elements", "less"]}),
    "project": _schema({"type": "object", "properties": {
        "values": {"$ref": "#/$defs/values"}, "weight": {"$ref": "#/$defs/values"},
        "chains": {"$ref": "#/$defs/chains"}}, "required": ["values", "chains"]}),
    "feasible": _schema({"type": "object", "properties": {
        "values": {"$ref": "#/$defs/values"}, "weight": {"$ref": "#/$defs/values"},
        "chains": {"$ref": "#/$defs/chains"},
        "radii": {"type": "array", "items": {"type": "number", "minimum": 0}}},
        "required": ["values", "chains", "radii"]}),
    "fit": _schema({"type": "object", "properties": {
        "values": {"$ref": "#/$defs/values"}, "weight": {"$ref": "#/$defs/values"},
        "positions": {"$ref": "#/$defs/values"},
        "C1": {"type": "number"}, "C2": {"type": "number"}}, "required": ["values", "C1", "C2"]}),
}


def load_json(path, schema):
    """Read and validate a JSON file; OSError propagates, schema problems raise SchemaError."""
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: invalid JSON ({exc})") from None
    try:
        jsonschema.validate(obj, SCHEMAS[schema])
    except jsonschema.ValidationError as exc:
        raise SchemaError(f"{path}: {exc.message}") from None
    return obj


# ---------------------------------------------------------------- parsing


def build_parser():
    p = _Parser(prog="kappanorm", description="Kappa-norm geometry, set-valued ODEs and interval orders.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp):
        sp.add_argument("--out", help="report path (default: stdout)")
        sp.add_argument("--timing", action="store_true", help="record wall time (breaks byte determinism)")

    sp = sub.add_parser("axioms", help="randomised axiom suites")
    sp.add_argument("--seed", type=int, required=True)
    sp.add_argument("--instances", type=int, default=200)
    sp.add_argument("--dim", type=int, default=2)
    sp.add_argument("--suite", choices=("kappa", "duality", "operator"), default="kappa")
    common(sp)

    sp = sub.add_parser("distance", help="rho, rho_bar or D between JSON inputs")
    sp.add_argument("--a", required=True, help="point (for rho) or set")
    sp.add_argument("--b", required=True, help="set")
    sp.add_argument("--metric", choices=("rho", "rhobar", "D"), default="D")
    common(sp)

    sp = sub.add_parser("duality", help="kappa-form, sampled dual norms and polar")
    sp.add_argument("--input", required=True)
    sp.add_argument("--seed", type=int, default=0)
    common(sp)

    sp = sub.add_parser("opnorm", help="sampled operator kappa-norm")
    sp.add_argument("--input", required=True)
    sp.add_argument("--seed", type=int, default=0)
    common(sp)

    sp = sub.add_parser("ode", help="point or set-valued ODE by Picard iteration")
    sp.add_argument("--input", required=True)
    sp.add_argument("--h", type=float)
    sp.add_argument("--tend", type=float)
    sp.add_argument("--csv", help="trajectory CSV path (set mode)")
    sp.add_argument("--csv-every", type=int, default=1)
    common(sp)

    sp = sub.add_parser("order", help="interval orders, monotone projection, feasibility, fits")
    sp.add_argument("action", choices=("check", "represent", "project", "feasible", "fit"))
    sp.add_argument("--input", required=True)
    common(sp)
    return p


def parse_invocation(argv):
    """argv (without the program name) -> Command; raises UsageError."""
    ns = build_parser().parse_args(list(argv))
    opts = vars(ns)
    name = opts.pop("command")
    if name == "axioms" and (ns.instances < 1 or ns.dim < 1):
        raise UsageError("kappanorm axioms: --instances and --dim must be positive")
    if name == "ode" and ((ns.h is not None and not ns.h > 0) or (ns.tend is not None and not ns.tend > 0)):
        raise UsageError("kappanorm ode: --h and --tend must be positive")
    return Command(name, opts)


# ---------------------------------------------------------------- running


def _num(v):
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if not math.isfinite(v):
            return "inf" if v > 0 else ("-inf" if v < 0 else "nan")
        return v
    if isinstance(v, np.integer):
        return int(v)
    if isinstance(v, np.bool_):
        return bool(v)
    if isinstance(v, dict):
        return {str(k): _num(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_num(x) for x in v]
    if isinstance(v, np.ndarray):
        return _num(v.tolist())
    return v


def _run_axioms(o):
    cfg = GeneratorConfig(o["seed"], o["dim"], o["instances"])
    if o["suite"] == "kappa":
        rep = axiom_suite(core.rho, cfg)
    elif o["suite"] == "duality":
        rep = dualform.duality_axiom_suite(cfg)
    else:
        rep = opkappa.operator_axiom_suite(cfg)
    return rep.to_json()


def _run_distance(o):
    B = from_json(load_json(o["b"], "set"))
    if o["metric"] == "rho":
        x = as_vector(load_json(o["a"], "vector"))
        return {"rho": core.rho(x, B)}
    A = from_json(load_json(o["a"], "set"))
    if o["metric"] == "rhobar":
        value, how = core.rho_bar_resolved(A, B)
        return {"rho_bar": value, "resolution": how}
    return {"D": core.metric_D(A, B)}


def _run_duality(o):
    obj = load_json(o["input"], "duality")
    x, y = as_vector(obj["x"]), as_vector(obj["y"])
    A, B = from_json(obj["A"]), from_json(obj["B"])
    d = x.size
    fam = dualform.default_test_family(d, o["seed"])
    out = {
        "kappa_form": dualform.kappa_form(x, A, y, B),
        "bound_rho_product": core.rho(x, A) * core.rho(y, B),
        "dual_kappa_norm_sampled": dualform.dual_kappa_norm_sampled(y, B, fam),
        "rho_tilde_sampled": dualform.rho_tilde_sampled(x, A, fam),
        "probes": len(fam.probes),
    }
    if isinstance(A, (Ball, Polytope, Subspace)):
        try:
            out["polar_A"] = to_json(dualform.polar(A))
        except (ValueError, TypeError) as exc:
            out["polar_A"] = None
            out["polar_A_error"] = str(exc)
    return out


def _run_opnorm(o):
    obj = load_json(o["input"], "opnorm")
    A = opkappa.Operator.from_json(obj["A"])
    S = opkappa.operator_set_from_json(obj["S"])
    if "probes" in obj:
        P = opkappa.ProbeFamily.from_json(obj["probes"])
    else:
        P = opkappa.default_probe_family(A.dim, seed=o["seed"])
    lo, hi = opkappa.rho_L_bracket(A, S, P)
    return {"rho_L": lo, "rho_L_refined": hi, "probes": len(P.probes), "condition": A.condition}


def _run_ode(o):
    obj = load_json(o["input"], "ode")
    f = setflow.field_from_json(obj["field"])
    t_end = o["tend"] if o["tend"] is not None else float(obj.get("t_end", 1.0))
    h = o["h"] if o["h"] is not None else float(obj.get("h", 1e-3))
    cfg = setflow.SolverConfig(h=h, picard_tol=float(obj.get("picard_tol", 1e-8)))
    if "x0" in obj:
        times, X = setflow.solve_point_ode(f, obj["x0"], t_end, cfg)
        return {"mode": "point", "t_end": t_end, "h": h, "final": X[-1], "nodes": len(times)}, None
    traj = setflow.solve_set_ode(f, from_json(obj["A0"]), t_end, cfg)
    diag = dict(traj.diagnostics)
    diag["segments"] = [{k: v for k, v in s.items() if k != "residuals"} | {"final_residual": s["residuals"][-1]}
                        for s in diag["segments"]]
    res = {"mode": "set", "t_end": t_end, "h": h, "final": to_json(traj.final),
           "nodes": len(traj.times), "diagnostics": diag}
    return res, traj.to_csv(o["csv_every"])


def _function(obj):
    return ordrep.FunctionOnT(obj["values"], obj.get("weight"))


def _run_order(o):
    act = o["action"]
    if act in ("check", "represent"):
        P = ordrep.IntervalOrder.from_json(load_json(o["input"], "poset"))
        witness = ordrep.find_two_plus_two(P)
        if act == "check":
            return {"interval_order": witness is None, "witness": None if witness is None else list(witness)}
        R = ordrep.find_representation(P)
        return {"representation": R.to_json(), "margin": ordrep.representation_margin(P, R)}
    obj = load_json(o["input"], act)
    if act == "project":
        g = _function(obj)
        star, dist = ordrep.monotone_project_sup(g, ordrep.ChainFamily(obj["chains"]))
        return {"projection": star.values, "distance": dist}
    if act == "feasible":
        chains = ordrep.ChainFamily(obj["chains"])
        C = ordrep.build_constraint_set(_function(obj), chains, obj["radii"])
        ok, w = ordrep.cone_feasibility(C, chains)
        return {"feasible": ok, "witness": None if w is None else w.values, "zero_radius": C.zero_radius}
    g = _function(obj)
    positions = obj.get("positions")
    if positions is None:
        try:
            positions = {k: float(k) for k in g.values}
        except ValueError:
            raise SchemaError("fit: ids are not numeric and no positions were given") from None
    fit, eps = ordrep.constrained_fit(g, obj["C1"], obj["C2"], positions)
    return {"fit": fit.values, "eps": eps, "margin": ordrep.slope_margin(fit, obj["C1"], obj["C2"], positions)}


_RUNNERS = {
    "axioms": _run_axioms,
    "distance": _run_distance,
    "duality": _run_duality,
    "opnorm": _run_opnorm,
    "order": _run_order,
}


def run(cmd):
    """Execute a Command; library errors propagate to ``main``."""
    t0 = time.perf_counter()
    csv_text = None
    if cmd.name == "ode":
        results, csv_text = _run_ode(cmd.options)
    else:
        results = _RUNNERS[cmd.name](cmd.options)
    config = {k: v for k, v in cmd.options.items() if k not in ("out", "timing")}
    rep = RunReport(cmd.name, _num(config), _num(results), trajectory_csv=csv_text)
    if cmd.options.get("timing"):
        rep.wall_time = time.perf_counter() - t0
    return rep


def render(report):
    return json.dumps(report.to_json(), sort_keys=True, indent=2, allow_nan=False) + "\n"


def emit(report, path=None, csv_path=None):
    """Write the JSON report (stdout when ``path`` is None) and the optional CSV."""
    text = render(report)
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    if csv_path is not None and report.trajectory_csv is not None:
        with open(csv_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(report.trajectory_csv)


def _fail(code, kind, message):
    sys.stderr.write(json.dumps({"error": kind, "message": message, "exit_code": code}, sort_keys=True) + "\n")
    return code


def main(argv=None):
    argv = sys.argv[1:] if argv is None else argv
    try:
        cmd = parse_invocation(argv)
    except UsageError as exc:
        sys.stderr.write(build_parser().format_usage())
        return _fail(EXIT_USAGE, "usage", str(exc))
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    try:
        report = run(cmd)
    except SchemaError as exc:
        return _fail(EXIT_SCHEMA, "schema", str(exc))
    except OSError as exc:
        return _fail(EXIT_IO, "io", str(exc))
    except (KappaError, ValueError, TypeError, ArithmeticError) as exc:
        return _fail(EXIT_COMPUTE, type(exc).__name__, str(exc))
    try:
        emit(report, cmd.options.get("out"), cmd.options.get("csv"))
    except OSError as exc:
        return _fail(EXIT_IO, "io", str(exc))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
