"""Command-line front end.

Usage::

    corrkit COMMAND [INPUT] [OUTPUT] [--grid N] [--tol T] [--eps0 E] [--eps-steps K] [--csv PATH]

``INPUT`` is a document (a bundled name such as ``ex1.json`` works from any
directory) or a report written earlier, whose embedded job is re-run.
The report goes to ``OUTPUT`` or standard output.  Exit status: 0 when the
verdict is pass/found, 1 for counterexample/not-found, 2 for input errors.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Callable

import numpy as np

from corrkit import __version__
from corrkit import documents as docs
from corrkit.economy import (
    compute_W,
    eps_schedule,
    equilibrium_via_approximation,
    equilibrium_via_selection,
    verify_equilibrium,
)
from corrkit.errors import (
    CertificateFailed,
    CorrkitError,
    DocumentError,
    EmptyCore,
    IterateEscapedQ,
    LimitCheckFailed,
    NoWcgTuple,
    PostVerificationFailed,
    SchemaError,
    ToleranceNotReached,
    WitnessRejected,
    WNotProper,
)
from corrkit.fixedpoint import approx_fixed_point_setvalued, brouwer_fixed_point, composed_fixed_point
from corrkit.properties import (
    GridSpec,
    falsify_lsc,
    falsify_natural_quasi_concave,
    falsify_open_lower_sections,
    falsify_usc,
    falsify_wcg,
    find_wcg_tuple,
    search_wnq_witness,
    verify_star_witness,
    verify_wnq_witness,
    verify_wnqs_property,
)
from corrkit.selection import build_selection, build_selection_star, export_csv, validate_selection
from corrkit.setvalue import closure_values
from corrkit.witness import WnqWitness

__all__ = ["main", "run", "COMMANDS", "EXIT_PASS", "EXIT_FAIL", "EXIT_INPUT"]

EXIT_PASS, EXIT_FAIL, EXIT_INPUT = 0, 1, 2

DEFAULTS = {"grid": 1001, "tol": 1e-6, "eps0": 0.1, "eps_steps": 12}
SOLVER_TOL = 1e-9

# Errors that are verdicts about the mathematics rather than bad input.
VERDICT_ERRORS = (
    WitnessRejected,
    EmptyCore,
    NoWcgTuple,
    ToleranceNotReached,
    PostVerificationFailed,
    WNotProper,
    CertificateFailed,
    IterateEscapedQ,
    LimitCheckFailed,
)


@dataclass
class Job:
    """A command with its resolved inputs and effective options."""

    command: str
    inputs: dict = field(default_factory=dict)
    options: dict = field(default_factory=dict)

    @property
    def grid(self) -> GridSpec:
        return GridSpec(resolution=int(self.options["grid"]))

    def tol(self, default: float | None = None) -> float:
        tol = self.options.get("tol")
        if tol is None:
            return DEFAULTS["tol"] if default is None else default
        return float(tol)

    def need(self, key: str):
        if key not in self.inputs or self.inputs[key] is None:
            raise SchemaError(key, f"required by {self.command}")
        return self.inputs[key]

    def correspondence(self, key: str = "correspondence"):
        return docs.build_correspondence(self.need(key), key)

    def simplex(self, key: str = "simplex"):
        return docs.build_simplex(self.need(key), key)

    def witness(self):
        return docs.build_witness(self.need("witness"))

    def economy(self):
        return docs.build_economy(self.need("economy"))

    def points(self, key: str = "points") -> np.ndarray:
        pts = np.asarray(self.need(key), dtype=float)
        return pts[:, None] if pts.ndim == 1 else pts


@dataclass
class Outcome:
    code: int
    verdict: str
    result: dict
    csv_rows: Callable | None = None


# ---------------------------------------------------------------------------
# handlers


def _falsifier(kind: str):
    fn = {"usc": falsify_usc, "lsc": falsify_lsc, "ols": falsify_open_lower_sections}[kind]

    def handler(job: Job) -> Outcome:
        T = job.correspondence()
        if kind == "ols" and job.inputs.get("values") is not None:
            cex = fn(T, job.grid, ys=[float(v) for v in job.inputs["values"]])
        else:
            cex = fn(T, job.grid)
        if cex is None:
            return Outcome(EXIT_PASS, "pass", {"property": kind, "counterexample": None})
        return Outcome(EXIT_FAIL, "counterexample", {"property": kind, "counterexample": cex.to_json()})

    return handler


def _check_wcg(job: Job) -> Outcome:
    T, xs = job.correspondence(), job.points()
    cex = falsify_wcg(T, xs, job.grid)
    if cex is not None:
        return Outcome(EXIT_FAIL, "counterexample", {"property": "wcg", "counterexample": cex.to_json()})
    ys, _ = find_wcg_tuple(T, xs, job.grid)
    return Outcome(EXIT_PASS, "pass", {"property": "wcg", "values": [float(y) for y in ys]})


def _check_nqc(job: Job) -> Outcome:
    cone = job.inputs.get("cone", "zero")
    cex = falsify_natural_quasi_concave(job.correspondence(), cone=cone, grid=job.grid)
    if cex is None:
        return Outcome(EXIT_PASS, "pass", {"property": "nqc", "cone": cone, "counterexample": None})
    return Outcome(EXIT_FAIL, "counterexample", {"property": "nqc", "cone": cone, "counterexample": cex.to_json()})


def _lambda_grid(job: Job) -> GridSpec:
    return GridSpec(resolution=job.grid.resolution, lambda_resolution=job.grid.resolution)


def _check_wnq(job: Job) -> Outcome:
    T, w = job.correspondence(), job.witness()
    if not isinstance(w, WnqWitness):
        raise SchemaError("witness", "check-wnq needs a witness with form 'wnq'")
    cex = verify_wnq_witness(T, w.points, w, _lambda_grid(job))
    if cex is None:
        return Outcome(EXIT_PASS, "pass", {"property": "wnq", "witness": w.to_json(), "counterexample": None})
    return Outcome(EXIT_FAIL, "counterexample", {"property": "wnq", "witness": w.to_json(), "counterexample": cex.to_json()})


def _search_wnq(job: Job) -> Outcome:
    w = search_wnq_witness(job.correspondence(), job.points(), _lambda_grid(job))
    if w is None:
        return Outcome(EXIT_FAIL, "not-found", {"property": "wnq", "witness": None})
    return Outcome(EXIT_PASS, "found", {"property": "wnq", "witness": w.to_json()})


def _check_star(job: Job) -> Outcome:
    ys = [float(v) for v in job.need("values")]
    cex = verify_star_witness(job.correspondence(), job.points(), ys, job.grid)
    if cex is None:
        return Outcome(EXIT_PASS, "pass", {"property": "star", "values": ys, "counterexample": None})
    return Outcome(EXIT_FAIL, "counterexample", {"property": "star", "values": ys, "counterexample": cex.to_json()})


def _check_wnqs(job: Job) -> Outcome:
    A, cand, K = job.correspondence("A"), job.correspondence("candidate"), job.simplex()
    eps = float(job.inputs.get("eps", 0.0))
    w = job.witness() if job.inputs.get("witness") is not None else None
    cex = verify_wnqs_property(A, K, cand, eps, job.grid, witness=w, agent=int(job.inputs.get("agent", 0)))
    name = "wnqs" if eps == 0 else "e-wnqs"
    if cex is None:
        return Outcome(EXIT_PASS, "pass", {"property": name, "eps": eps, "counterexample": None})
    return Outcome(EXIT_FAIL, "counterexample", {"property": name, "eps": eps, "counterexample": cex.to_json()})


def _selection_csv(f, T, resolution):
    return lambda path: export_csv(f, path, resolution, T)


def _select(job: Job) -> Outcome:
    T, K = job.correspondence(), job.simplex()
    w = job.witness()
    f = build_selection(K, T, w, _lambda_grid(job))
    return Outcome(EXIT_PASS, "found", {"selection": f.to_json()}, _selection_csv(f, T, job.grid.resolution))


def _select_star(job: Job) -> Outcome:
    T, K = job.correspondence(), job.simplex()
    f = build_selection_star(K, T, [float(v) for v in job.need("values")], job.grid)
    return Outcome(EXIT_PASS, "found", {"selection": f.to_json()}, _selection_csv(f, T, job.grid.resolution))


def _validate_selection(job: Job) -> Outcome:
    T, K = job.correspondence(), job.simplex()
    if job.inputs.get("witness") is not None:
        f = build_selection(K, T, job.witness(), _lambda_grid(job))
    else:
        f = build_selection_star(K, T, [float(v) for v in job.need("values")], job.grid)
    fine = GridSpec(resolution=10 * (job.grid.resolution - 1) + 1)
    rep = validate_selection(f, T, fine)
    half = validate_selection(f, T, GridSpec(resolution=job.grid.resolution))
    result = {
        "selection": f.to_json(),
        "report": rep.to_json(),
        "coarse_modulus": half.modulus,
        "modulus_ratio": (half.modulus / rep.modulus) if rep.modulus > 0 else None,
    }
    code = EXIT_PASS if rep.ok else EXIT_FAIL
    return Outcome(code, "pass" if rep.ok else "counterexample", result, _selection_csv(f, T, fine.resolution))


def _trace_csv(trace: list):
    def write(path):
        import csv

        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["iteration", "residual"])
            for k, row in enumerate(trace):
                r = row.get("best_residual", row.get("residual"))
                w.writerow([k, repr(float(r))])
        return len(trace)

    return write


def _fixed_point_outcome(res, extra: dict | None = None) -> Outcome:
    result = {"fixed_point": res.to_json(), "trace": res.trace}
    result.update(extra or {})
    return Outcome(EXIT_PASS, "found", result, _trace_csv(res.trace))


def _brouwer(job: Job) -> Outcome:
    K = job.simplex()
    h = docs.build_self_map(job.need("h"), K)
    res = brouwer_fixed_point(h, K, tol=job.tol(SOLVER_TOL))
    return _fixed_point_outcome(res)


def _compose_fix(job: Job) -> Outcome:
    T, K, w = job.correspondence(), job.simplex(), job.witness()
    s = docs.build_scalar_map(job.need("s"))
    res = composed_fixed_point(K, T, w, s, tol=job.tol(SOLVER_TOL), grid=_lambda_grid(job))
    return _fixed_point_outcome(res)


def _setval_fix(job: Job) -> Outcome:
    if job.inputs.get("maps") is not None:
        maps = [docs.build_correspondence(m, f"maps[{k}]") for k, m in enumerate(job.inputs["maps"])]
    else:
        maps = job.correspondence()
    res = approx_fixed_point_setvalued(maps, tol=job.tol(), grid=job.grid)
    return _fixed_point_outcome(res)


def _compute_w(job: Job) -> Outcome:
    econ = job.economy()
    regions = []
    for i, ag in enumerate(econ.agents):
        regions.append({"agent": ag.name, "W": compute_W(econ, i).to_json()})
    return Outcome(EXIT_PASS, "pass", {"regions": regions})


def _agent_simplices(job: Job, econ):
    raw = job.inputs.get("simplices")
    if raw is None:
        return [ag.K for ag in econ.agents]
    if len(raw) != econ.n_agents:
        raise SchemaError("simplices", "one entry per agent is required")
    return [None if r is None else docs.build_simplex(r, f"simplices[{k}]") for k, r in enumerate(raw)]


def _certificate_outcome(cert) -> Outcome:
    code = EXIT_PASS if cert.passed else EXIT_FAIL
    return Outcome(code, "pass" if cert.passed else "counterexample", {"certificate": cert.to_json()})


def _equilibrium_selection(job: Job) -> Outcome:
    econ = job.economy()
    cert = equilibrium_via_selection(econ, _agent_simplices(job, econ), tol=job.tol(), grid=job.grid)
    return _certificate_outcome(cert)


def _supplier(spec: dict, ag, k: int):
    cand = docs.build_correspondence(spec.get("candidate"), f"suppliers[{k}].candidate")
    against_spec = spec.get("against", "A")
    if against_spec == "A":
        against = ag.A
    elif against_spec == "closure_B":
        against = closure_values(ag.B)
    else:
        against = docs.build_correspondence(against_spec, f"suppliers[{k}].against")
    w = docs.build_witness(spec["witness"]) if spec.get("witness") is not None else None
    return lambda i, eps: (cand, against, w)


def _equilibrium_approx(job: Job) -> Outcome:
    econ = job.economy()
    raw = job.inputs.get("suppliers")
    suppliers = None
    if raw is not None:
        if len(raw) != econ.n_agents:
            raise SchemaError("suppliers", "one entry per agent is required")
        suppliers = [None if s is None else _supplier(s, econ.agents[k], k) for k, s in enumerate(raw)]
    eps_values = eps_schedule(float(job.options["eps0"]), int(job.options["eps_steps"]))
    cert = equilibrium_via_approximation(
        econ, _agent_simplices(job, econ), eps_values, tol=job.tol(), suppliers=suppliers, grid=job.grid
    )
    return _certificate_outcome(cert)


def _verify_equilibrium(job: Job) -> Outcome:
    econ = job.economy()
    cert = verify_equilibrium(econ, job.need("point"), tol=job.tol(),
                              require_closure=bool(job.inputs.get("require_closure", False)))
    return _certificate_outcome(cert)


def _demo_ex1(job: Job) -> Outcome:
    """The three-piece example EX1 end to end, in five stages."""
    ex1 = docs.load("ex1.json").payload
    witness = {"form": "wnq", "points": [[0.0], [4.0]], "values": [0.0, 2.0], "g": {"knot": 0.5, "orientation": 0}}
    K = {"vertices": [[0.0], [4.0]]}
    s_map = {"kind": "affine", "scale": 1.0, "shift": 2.0}
    plan = [
        ("falsify semicontinuity", [("check-usc", {}, EXIT_FAIL), ("check-lsc", {}, EXIT_FAIL)]),
        ("falsify convex graph at {1, 3}", [("check-wcg", {"points": [1.0, 3.0]}, EXIT_FAIL)]),
        ("verify the one-knot witness on {0, 4}", [("check-wnq", {"witness": witness}, EXIT_PASS)]),
        ("build and validate the selection", [("validate-selection", {"simplex": K, "witness": witness}, EXIT_PASS)]),
        ("composed fixed point with s(y) = y + 2",
         [("compose-fix", {"simplex": K, "witness": witness, "s": s_map}, EXIT_PASS)]),
    ]
    stages, ok, last = [], True, None
    for title, steps in plan:
        rows = []
        for command, inputs, want in steps:
            last = run(Job(command, {"correspondence": ex1, **inputs}, dict(job.options)))
            ok = ok and last.code == want
            rows.append({"command": command, "exit_code": last.code, "expected_exit_code": want,
                         "verdict": last.verdict, "result": last.result})
        stages.append({"stage": title, "steps": rows})
    x = None
    if last.code == EXIT_PASS:
        x = last.result["fixed_point"]["point"][0]
        ok = ok and 2.0 - 1e-9 <= x <= 4.0 + 1e-9
    result = {"stages": stages, "fixed_point": x, "fixed_set": "[2, 4]"}
    return Outcome(EXIT_PASS if ok else EXIT_FAIL, "pass" if ok else "counterexample", result, last.csv_rows)


COMMANDS: dict[str, Callable[[Job], Outcome]] = {
    "check-usc": _falsifier("usc"),
    "check-lsc": _falsifier("lsc"),
    "check-ols": _falsifier("ols"),
    "check-wcg": _check_wcg,
    "check-nqc": _check_nqc,
    "check-wnq": _check_wnq,
    "search-wnq": _search_wnq,
    "check-star": _check_star,
    "check-wnqs": _check_wnqs,
    "select": _select,
    "select-star": _select_star,
    "validate-selection": _validate_selection,
    "brouwer": _brouwer,
    "compose-fix": _compose_fix,
    "setval-fix": _setval_fix,
    "compute-w": _compute_w,
    "equilibrium-selection": _equilibrium_selection,
    "equilibrium-approx": _equilibrium_approx,
    "verify-equilibrium": _verify_equilibrium,
    "demo-ex1": _demo_ex1,
}


def _error_json(exc: BaseException) -> dict:
    out = {"type": type(exc).__name__, "message": str(exc)}
    for attr in ("field", "name", "line", "column", "agent", "eps", "point", "best_residual"):
        v = getattr(exc, attr, None)
        if v is not None:
            out[attr] = v
    cex = getattr(exc, "counterexample", None)
    if cex is not None:
        out["counterexample"] = cex.to_json()
    best = getattr(exc, "best_point", None)
    if best is not None:
        out["best_point"] = np.atleast_1d(best).tolist()
    return out


def run(job: Job) -> Outcome:
    """Dispatch a job; every failure mode maps to an exit code."""
    handler = COMMANDS.get(job.command)
    if handler is None:
        return Outcome(EXIT_INPUT, "input-error", {"error": {"type": "UnknownCommand", "message": job.command}})
    try:
        return handler(job)
    except VERDICT_ERRORS as exc:
        return Outcome(EXIT_FAIL, "not-found" if isinstance(exc, ToleranceNotReached) else "counterexample",
                       {"error": _error_json(exc)})
    except (CorrkitError, ValueError, TypeError, KeyError, IndexError, OSError) as exc:
        return Outcome(EXIT_INPUT, "input-error", {"error": _error_json(exc)})


# ---------------------------------------------------------------------------
# documents to jobs


_SLOT = {"correspondence": "correspondence", "simplex": "simplex", "witness": "witness", "economy": "economy"}


def job_from_document(command: str, path: str | None) -> Job:
    """Build a job from an input file: a job, a primary document, or a report."""
    if path is None:
        return Job(command)
    raw_path = Path(path)
    if raw_path.exists():
        text = raw_path.read_text()
        if text.strip():
            try:
                raw = json.loads(text)
            except json.JSONDecodeError:
                raw = None
            if isinstance(raw, dict) and raw.get("kind") == "report":
                inner = raw.get("inputs")
                if not isinstance(inner, dict):
                    raise SchemaError("inputs", "report has no embedded job")
                doc = docs.loads(inner, raw_path.parent)
                return Job(command, _job_inputs(doc.payload), dict(doc.payload.get("options", {})))
    doc = docs.load(path)
    if doc.kind == "job":
        p = doc.payload
        return Job(command, _job_inputs(p), dict(p.get("options", {})))
    payload = {k: v for k, v in doc.payload.items()}
    return Job(command, {_SLOT[doc.kind]: payload})


def _is_input_document(path: str) -> bool:
    """True when ``path`` names an existing job or report (demo-ex1 then reads its options)."""
    p = Path(path)
    if not p.is_file():
        return False
    try:
        return json.loads(p.read_text()).get("kind") in ("job", "report")
    except (ValueError, AttributeError, OSError):
        return False


def _job_inputs(payload: dict) -> dict:
    return {k: v for k, v in payload.items() if k not in ("kind", "version", "command", "options")}


def _parse_points(text: str) -> list:
    rows = [r for r in text.split(";") if r.strip()]
    parsed = [[float(v) for v in r.split(",")] for r in rows]
    if len(parsed) == 1:
        return parsed[0]
    return parsed


def _to_jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _to_jsonable(obj.tolist())
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return v
    if hasattr(obj, "to_json"):
        return _to_jsonable(obj.to_json())
    if isinstance(obj, (str, int, bool)) or obj is None:
        return obj
    return str(obj)


def render_report(job: Job, out: Outcome, timestamp: str | None = None) -> str:
    """Sorted-key JSON; only ``metadata`` varies between identical runs."""
    report = {
        "kind": "report",
        "version": docs.VERSION,
        "command": job.command,
        "exit_code": out.code,
        "verdict": out.verdict,
        "options": job.options,
        "inputs": {"kind": "job", "version": docs.VERSION, "command": job.command,
                   "options": job.options, **job.inputs},
        "result": out.result,
        "metadata": {
            "timestamp": timestamp or datetime.now(timezone.utc).isoformat(timespec="seconds"),
            "tool": "corrkit",
            "tool_version": __version__,
        },
    }
    return json.dumps(_to_jsonable(report), sort_keys=True, indent=2) + "\n"


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="corrkit",
        description="Check, select and solve with piecewise correspondences.",
    )
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("input", nargs="?", help="document, job or report (bundled names allowed)")
    p.add_argument("output", nargs="?", help="report path (default: standard output)")
    p.add_argument("--grid", type=int, help=f"points per axis (default {DEFAULTS['grid']})")
    p.add_argument("--tol", type=float, help="tolerance (default 1e-6; solvers 1e-9)")
    p.add_argument("--eps0", type=float, help=f"first inflation radius (default {DEFAULTS['eps0']})")
    p.add_argument("--eps-steps", type=int, help=f"number of halvings (default {DEFAULTS['eps_steps']})")
    p.add_argument("--csv", help="write a sample table: (x, f) for selections, (iteration, residual) for solvers")
    p.add_argument("--points", help="base points, e.g. '1,3' or '0,0;1,0;0,1'")
    p.add_argument("--values", help="values y_i, e.g. '0,2'")
    p.add_argument("--point", help="point for verify-equilibrium, e.g. '0.5'")
    p.add_argument("--cone", choices=["zero", "nonneg"], help="cone for check-nqc")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_intermixed_args(argv)
    if args.command == "demo-ex1" and args.output is None and args.input is not None:
        if not _is_input_document(args.input):
            args.input, args.output = None, args.input
    try:
        job = job_from_document(args.command, args.input)
    except (DocumentError, OSError, ValueError) as exc:
        job = Job(args.command)
        out = Outcome(EXIT_INPUT, "input-error", {"error": _error_json(exc)})
    else:
        out = None
    opts = {**DEFAULTS, "tol": None, **job.options}
    for key in ("grid", "tol", "eps0", "eps_steps"):
        v = getattr(args, key)
        if v is not None:
            opts[key] = v
    job.options = opts
    if args.points:
        job.inputs["points"] = _parse_points(args.points)
    if args.values:
        job.inputs["values"] = _parse_points(args.values)
    if args.point:
        job.inputs["point"] = _parse_points(args.point)
    if args.cone:
        job.inputs["cone"] = args.cone
    if out is None:
        if args.command != "demo-ex1" and args.input is None:
            out = Outcome(EXIT_INPUT, "input-error",
                          {"error": {"type": "SchemaError", "message": "an INPUT document is required", "field": "input"}})
        else:
            out = run(job)
    if args.csv and out.csv_rows is not None and out.code != EXIT_INPUT:
        try:
            out.csv_rows(args.csv)
        except OSError as exc:
            out = Outcome(EXIT_INPUT, "input-error", {"error": _error_json(exc)})
    text = render_report(job, out)
    if out.code == EXIT_INPUT:
        err = out.result.get("error", {})
        print(f"corrkit: {err.get('type', 'error')}: {err.get('message', '')}", file=sys.stderr)
    if args.output:
        try:
            Path(args.output).write_text(text)
        except OSError as exc:
            print(f"corrkit: cannot write {args.output}: {exc.strerror}", file=sys.stderr)
            return EXIT_INPUT
    else:
        sys.stdout.write(text)
    return out.code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
