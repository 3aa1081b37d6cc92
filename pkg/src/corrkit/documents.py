"""JSON documents for correspondences, simplices, witnesses, economies and jobs.

Every document is an object with ``kind`` and ``version``.  Intervals are
strings such as ``"(0, 2]"``; a value set is a string, a list of strings, or
``[]`` for the empty set.  Inside a document, a string ``"#name"`` refers to
an entry of the top-level ``definitions`` object, and a string ending in
``.json`` is a path relative to the referring file.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any, Callable

import numpy as np

from corrkit.errors import ParseError, SchemaError, UnresolvedReference
from corrkit.setvalue import (
    Box,
    Interval,
    IntervalUnion,
    PiecewiseCorrespondence,
)
from corrkit.simplex import Simplex
from corrkit.witness import Reparameterization, StarWitness, WnqWitness

__all__ = [
    "VERSION",
    "KINDS",
    "ToolkitDocument",
    "load",
    "loads",
    "bundled_path",
    "build_correspondence",
    "build_simplex",
    "build_witness",
    "build_economy",
    "build_scalar_map",
    "build_self_map",
    "correspondence_to_json",
    "economy_to_json",
]

VERSION = "1.0"
KINDS = ("correspondence", "simplex", "witness", "economy", "job")


@dataclass
class ToolkitDocument:
    """A parsed document: raw payload with references resolved, plus the built object."""

    kind: str
    version: str
    payload: dict
    obj: Any = None
    path: Path | None = None
    definitions: dict = field(default_factory=dict)


def bundled_path(name: str) -> Path | None:
    """Path of a data file shipped with the package, if it exists."""
    candidate = resources.files("corrkit") / "data" / name
    try:
        if candidate.is_file():
            return Path(str(candidate))
    except OSError:
        pass
    return None


def _read_json(path: Path) -> Any:
    try:
        text = path.read_text()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from None
    return _parse_text(text, str(path))


def _parse_text(text: str, origin: str) -> Any:
    if not text.strip():
        raise ParseError(f"{origin} is empty", 1, 1)
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{origin}: {exc.msg}", exc.lineno, exc.colno) from None


class _Resolver:
    def __init__(self, definitions: dict, base: Path | None):
        self.definitions = definitions
        self.base = base
        self._stack: list[str] = []

    def __call__(self, value: Any, field_name: str) -> Any:
        if isinstance(value, str) and value.startswith("#"):
            name = value[1:]
            if name not in self.definitions:
                raise UnresolvedReference(name)
            if name in self._stack:
                raise SchemaError(field_name, f"circular reference through {name!r}")
            self._stack.append(name)
            try:
                return self(self.definitions[name], field_name)
            finally:
                self._stack.pop()
        if isinstance(value, str) and value.endswith(".json"):
            path = Path(value)
            if not path.is_absolute() and self.base is not None:
                path = self.base / path
            if not path.exists():
                bundled = bundled_path(Path(value).name)
                if bundled is None:
                    raise UnresolvedReference(value)
                path = bundled
            data = _read_json(path)
            if isinstance(data, dict) and "kind" in data:
                inner = _Resolver(data.get("definitions", {}), path.parent)
                return inner.resolve_tree(data)
            return data
        return value

    def resolve_tree(self, obj: Any, field_name: str = "") -> Any:
        obj = self(obj, field_name)
        if isinstance(obj, dict):
            return {
                k: (v if k == "definitions" else self.resolve_tree(v, k)) for k, v in obj.items()
            }
        if isinstance(obj, list):
            return [self.resolve_tree(v, field_name) for v in obj]
        return obj


def _require(data: dict, key: str, where: str = ""):
    if not isinstance(data, dict):
        raise SchemaError(where or key, "expected an object")
    if key not in data:
        raise SchemaError(key, f"missing in {where}" if where else "missing")
    return data[key]


def _interval(value, field_name: str) -> Interval:
    try:
        if isinstance(value, (list, tuple)) and len(value) == 2 and all(
            isinstance(v, (int, float)) for v in value
        ):
            return Interval.closed(*value)
        if isinstance(value, str):
            return Interval.parse(value)
    except ValueError as exc:
        raise SchemaError(field_name, str(exc)) from None
    raise SchemaError(field_name, f"expected an interval, got {value!r}")


def _box(value, field_name: str) -> Box:
    if isinstance(value, str):
        return Box((_interval(value, field_name),))
    if isinstance(value, list) and value and all(isinstance(v, (int, float)) for v in value):
        return Box((_interval(value, field_name),))
    if isinstance(value, list):
        return Box(tuple(_interval(v, field_name) for v in value))
    raise SchemaError(field_name, f"expected a box, got {value!r}")


def _union(value, field_name: str) -> IntervalUnion:
    try:
        if isinstance(value, str) or (isinstance(value, list) and all(isinstance(v, str) for v in value)):
            return IntervalUnion.parse(value)
    except ValueError as exc:
        raise SchemaError(field_name, str(exc)) from None
    raise SchemaError(field_name, f"expected an interval union, got {value!r}")


def build_correspondence(data: dict, field_name: str = "correspondence") -> PiecewiseCorrespondence:
    if not isinstance(data, dict):
        raise SchemaError(field_name, "expected a correspondence object")
    domain = _box(_require(data, "domain", field_name), "domain")
    codomain = _interval(_require(data, "codomain", field_name), "codomain")
    cells_raw = _require(data, "cells", field_name)
    if not isinstance(cells_raw, list) or not cells_raw:
        raise SchemaError("cells", "expected a nonempty list")
    cells = []
    for k, c in enumerate(cells_raw):
        box = _box(_require(c, "box", f"cells[{k}]"), f"cells[{k}].box")
        value = _union(_require(c, "value", f"cells[{k}]"), f"cells[{k}].value")
        cells.append((box, value))
    try:
        return PiecewiseCorrespondence(domain, codomain, cells, name=data.get("name", ""))
    except ValueError as exc:
        raise SchemaError(field_name, str(exc)) from None


def correspondence_to_json(T: PiecewiseCorrespondence) -> dict:
    return {
        "kind": "correspondence",
        "version": VERSION,
        "name": T.name,
        "domain": T.domain.to_json(),
        "codomain": str(T.codomain),
        "cells": [{"box": b.to_json(), "value": v.to_json()} for b, v in T.cells],
    }


def build_simplex(data, field_name: str = "simplex") -> Simplex:
    if isinstance(data, dict):
        data = _require(data, "vertices", field_name)
    if not isinstance(data, list) or not data:
        raise SchemaError(field_name, "expected a list of vertices")
    try:
        return Simplex(np.asarray(data, dtype=float))
    except (TypeError, ValueError) as exc:
        raise SchemaError(field_name, str(exc)) from None


def _reparam(spec, n: int, field_name: str) -> Reparameterization:
    try:
        if spec is None or spec == "identity":
            return Reparameterization.identity(n)
        if isinstance(spec, dict) and "knot" in spec:
            return Reparameterization.one_knot(float(spec["knot"]), int(spec.get("orientation", 0)))
        if isinstance(spec, list):
            return Reparameterization.from_json(spec)
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaError(field_name, str(exc)) from None
    raise SchemaError(field_name, f"unrecognized reparameterization {spec!r}")


def build_witness(data: dict, field_name: str = "witness"):
    if not isinstance(data, dict):
        raise SchemaError(field_name, "expected a witness object")
    form = data.get("form", "wnq")
    points = _require(data, "points", field_name)
    values = _require(data, "values", field_name)
    try:
        if form == "star":
            return StarWitness(points, values)
        if form == "wnq":
            return WnqWitness(points, values, _reparam(data.get("g"), len(values), "g"))
    except ValueError as exc:
        raise SchemaError(field_name, str(exc)) from None
    raise SchemaError("form", f"unknown witness form {form!r}")


def build_economy(data: dict, field_name: str = "economy"):
    from corrkit.economy import AbstractEconomy, Agent

    agents_raw = _require(data, "agents", field_name)
    if not isinstance(agents_raw, list) or not agents_raw:
        raise SchemaError("agents", "expected a nonempty list")
    agents = []
    for k, a in enumerate(agents_raw):
        where = f"agents[{k}]"
        name = str(a.get("name", f"agent{k + 1}")) if isinstance(a, dict) else ""
        X = _interval(_require(a, "X", where), "X")
        maps = {key: build_correspondence(_require(a, key, where), key) for key in ("A", "P", "B")}
        K = build_simplex(a["K"], "K") if a.get("K") is not None else None
        witness = build_witness(a["witness"], "witness") if a.get("witness") is not None else None
        agents.append(Agent(name, X, maps["A"], maps["P"], maps["B"], K, witness))
    try:
        return AbstractEconomy(agents)
    except ValueError as exc:
        raise SchemaError(field_name, str(exc)) from None


def economy_to_json(econ) -> dict:
    agents = []
    for ag in econ.agents:
        row = {
            "name": ag.name,
            "X": str(ag.X),
            "A": correspondence_to_json(ag.A),
            "P": correspondence_to_json(ag.P),
            "B": correspondence_to_json(ag.B),
        }
        if ag.K is not None:
            row["K"] = ag.K.vertices.tolist()
        if ag.witness is not None:
            row["witness"] = ag.witness.to_json()
        agents.append(row)
    return {"kind": "economy", "version": VERSION, "agents": agents}


def build_scalar_map(spec) -> Callable:
    """Maps ``Y -> K`` for composed fixed points.

    Kinds: ``identity``, ``affine`` (``scale``, ``shift``), ``constant``
    (``value``), ``piecewise_linear`` (``t``, ``v``).
    """
    if spec is None:
        raise SchemaError("s", "missing")
    kind = spec.get("kind") if isinstance(spec, dict) else spec
    if kind == "identity":
        return lambda y: float(y)
    if kind == "affine":
        a, b = float(spec.get("scale", 1.0)), float(spec.get("shift", 0.0))
        return lambda y: a * float(y) + b
    if kind == "constant":
        c = float(_require(spec, "value", "s"))
        return lambda y: c
    if kind == "piecewise_linear":
        t = np.asarray(_require(spec, "t", "s"), dtype=float)
        v = np.asarray(_require(spec, "v", "s"), dtype=float)
        return lambda y: float(np.interp(float(y), t, v))
    raise SchemaError("s", f"unknown map kind {kind!r}")


def build_self_map(spec, K: Simplex) -> Callable:
    """Self-maps of ``K`` for the Brouwer solver.

    Kinds: ``identity``; ``permutation`` (``order``) permuting barycentric
    weights; ``stochastic`` (``matrix``, column sums 1) acting on weights;
    ``power`` (``exponent``) applied to each coordinate of a point.
    """
    if spec is None:
        raise SchemaError("h", "missing")
    kind = spec.get("kind") if isinstance(spec, dict) else spec
    if kind == "identity":
        return lambda x: np.asarray(x, dtype=float)
    if kind == "permutation":
        order = [int(i) for i in _require(spec, "order", "h")]
        return lambda x: K.from_barycentric(K.barycentric(x)[order])
    if kind == "stochastic":
        M = np.asarray(_require(spec, "matrix", "h"), dtype=float)
        if M.shape != (K.n, K.n) or not np.allclose(M.sum(axis=0), 1.0) or (M < 0).any():
            raise SchemaError("h", "matrix must be column-stochastic with one row per vertex")
        return lambda x: K.from_barycentric(M @ K.barycentric(x))
    if kind == "power":
        p = float(_require(spec, "exponent", "h"))
        return lambda x: np.asarray(x, dtype=float) ** p
    raise SchemaError("h", f"unknown map kind {kind!r}")


def _build(kind: str, payload: dict):
    if kind == "correspondence":
        return build_correspondence(payload)
    if kind == "simplex":
        return build_simplex(payload)
    if kind == "witness":
        return build_witness(payload)
    if kind == "economy":
        return build_economy(payload)
    return None


def loads(data: Any, base: Path | None = None, path: Path | None = None) -> ToolkitDocument:
    """Validate an already-decoded JSON value as a document."""
    if isinstance(data, str):
        data = _parse_text(data, "<string>")
    if not isinstance(data, dict):
        raise SchemaError("kind", "a document must be a JSON object")
    kind = _require(data, "kind")
    if kind not in KINDS:
        raise SchemaError("kind", f"unknown kind {kind!r}")
    version = str(data.get("version", VERSION))
    if version.split(".")[0] != VERSION.split(".")[0]:
        raise SchemaError("version", f"unsupported version {version!r}")
    definitions = data.get("definitions", {})
    if not isinstance(definitions, dict):
        raise SchemaError("definitions", "expected an object")
    payload = _Resolver(definitions, base).resolve_tree(data)
    payload.pop("definitions", None)
    return ToolkitDocument(kind, version, payload, _build(kind, payload), path, definitions)


def load(path) -> ToolkitDocument:
    """Read, validate and resolve a document; bundled names are found when absent on disk.

    Raises
    ------
    ParseError, SchemaError, UnresolvedReference
    """
    p = Path(path)
    if not p.exists():
        bundled = bundled_path(p.name) if p.parent == Path(".") else None
        if bundled is None:
            raise ParseError(f"no such file: {path}")
        p = bundled
    return loads(_read_json(p), p.parent, p)
