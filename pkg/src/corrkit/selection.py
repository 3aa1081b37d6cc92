"""Continuous selections on a simplex built from verified witnesses.

The WNQ form is ``f(x) = sum_i g_i(lam_i(x)) y_i`` and the star form is
``f(x) = sum_i lam_i(x) y_i``, where ``lam(x)`` are barycentric coordinates
on the simplex ``K``.  Every constructor verifies its witness first.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from corrkit.errors import EmptyCore, NoWcgTuple, WitnessRejected
from corrkit.properties import (
    GridSpec,
    find_wcg_tuple,
    grid_points,
    verify_star_witness,
    verify_wnq_witness,
)
from corrkit.setvalue import Correspondence, IntervalUnion, PiecewiseCorrespondence, value_core
from corrkit.simplex import Simplex
from corrkit.witness import Reparameterization, StarWitness, WnqWitness, combine

__all__ = [
    "Reparameterization",
    "WnqWitness",
    "StarWitness",
    "Selection",
    "SelectionReport",
    "build_selection",
    "build_selection_star",
    "validate_selection",
    "wnq_witness_from_constant_core",
    "wnq_witness_from_convex_graph",
    "core_of",
    "export_csv",
]


@dataclass(frozen=True, eq=False)
class Selection:
    """Single-valued map on ``K`` assembled from a witness.

    Parameters
    ----------
    K : Simplex
    witness : WnqWitness or StarWitness
    """

    K: Simplex
    witness: WnqWitness | StarWitness

    @property
    def kind(self) -> str:
        return "wnq" if isinstance(self.witness, WnqWitness) else "star"

    def weights(self, xs) -> np.ndarray:
        lam = self.K.barycentric_many(xs)
        if self.kind == "wnq":
            return self.witness.g(np.clip(lam, 0.0, 1.0))
        return lam

    def evaluate_many(self, xs) -> np.ndarray:
        xs = np.asarray(xs, dtype=float)
        if xs.ndim == 1:
            xs = xs[:, None] if self.K.ambient_dim == 1 else xs[None, :]
        return combine(self.weights(xs), self.witness.values)

    def __call__(self, x) -> float:
        x = np.atleast_1d(np.asarray(x, dtype=float)).ravel()
        return float(self.evaluate_many(x[None, :])[0])

    def to_json(self) -> dict:
        return {"K": self.K.to_json(), "witness": self.witness.to_json(), "form": self.kind}


@dataclass
class SelectionReport:
    """Outcome of :func:`validate_selection`."""

    violations: list = field(default_factory=list)
    modulus: float = 0.0
    lipschitz: float = 0.0
    spacing: float = 0.0
    n_points: int = 0
    continuous: bool | None = None

    @property
    def ok(self) -> bool:
        return not self.violations and self.continuous is not False

    def to_json(self) -> dict:
        return {
            "violations": [[float(v) for v in row] for row in self.violations],
            "modulus": self.modulus,
            "lipschitz": self.lipschitz,
            "spacing": self.spacing,
            "n_points": self.n_points,
            "continuous": self.continuous,
        }


def _require_vertices(K: Simplex, points) -> None:
    pts = np.asarray(points, dtype=float).reshape(K.n, -1)
    if pts.shape != K.vertices.shape or not np.array_equal(pts, K.vertices):
        raise ValueError("witness base points must be the vertices of K, in order")


def build_selection(K: Simplex, T: Correspondence, witness: WnqWitness, grid: GridSpec | None = None) -> Selection:
    """Selection ``f(x) = sum g_i(lam_i(x)) y_i`` after verifying the witness.

    Raises
    ------
    WitnessRejected
        Carrying the counterexample from :func:`verify_wnq_witness`.
    """
    _require_vertices(K, witness.points)
    cex = verify_wnq_witness(T, K.vertices, witness, grid)
    if cex is not None:
        raise WitnessRejected(cex)
    return Selection(K, witness)


def build_selection_star(K: Simplex, T: Correspondence, ys, grid: GridSpec | None = None) -> Selection:
    """Affine selection ``f(x) = sum lam_i(x) y_i`` for a weakly *-concave witness."""
    witness = StarWitness(K.vertices, ys)
    cex = verify_star_witness(T, K.vertices, witness.values, grid)
    if cex is not None:
        raise WitnessRejected(cex)
    return Selection(K, witness)


def _simplex_grid(K: Simplex, T: Correspondence, resolution: int) -> np.ndarray:
    if K.ambient_dim == 1:
        lo, hi = float(K.vertices.min()), float(K.vertices.max())
        pts = np.linspace(lo, hi, resolution)
        breaks = T.breakpoints()[0]
        pts = np.union1d(pts, breaks[(breaks >= lo) & (breaks <= hi)])
        return pts[:, None]
    pts = grid_points(T, GridSpec(resolution=resolution))
    inside = np.all(K.barycentric_many(pts) >= -1e-10, axis=1)
    return np.vstack([K.vertices, pts[inside]])


def validate_selection(
    f: Selection,
    T: Correspondence,
    grid: GridSpec | None = None,
    tol_continuity: float | None = None,
    points=None,
) -> SelectionReport:
    """Check ``f(x) in T(x)`` on a grid over ``K`` and estimate continuity.

    The modulus is the largest ``|f(x) - f(x')|`` over neighbouring grid
    points along the last axis; the Lipschitz estimate divides each
    difference by the pair distance.
    """
    grid = grid or GridSpec(resolution=10_001)
    pts = _simplex_grid(f.K, T, grid.resolution) if points is None else np.atleast_2d(points)
    vals = f.evaluate_many(pts)
    from corrkit.properties import ValueTable

    ok = ValueTable(T, pts).contains(vals)
    violations = [list(p) + [v] for p, v in zip(pts[~ok], vals[~ok])]
    same_row = np.all(pts[1:, :-1] == pts[:-1, :-1], axis=1)
    dx = np.linalg.norm(pts[1:] - pts[:-1], axis=1)[same_row]
    df = np.abs(np.diff(vals))[same_row]
    modulus = float(df.max()) if df.size else 0.0
    lip = float((df / np.where(dx > 0, dx, np.inf)).max()) if df.size else 0.0
    spacing = float(dx.max()) if dx.size else 0.0
    cont = None if tol_continuity is None else modulus <= tol_continuity
    return SelectionReport(violations, modulus, lip, spacing, len(pts), cont)


def core_of(T: Correspondence, grid: GridSpec | None = None, K: Simplex | None = None) -> IntervalUnion:
    """Intersection of the values over ``K`` (or the whole domain).

    Exact for piecewise maps: every cell meeting the bounding box of ``K``
    contributes, which can only shrink the core.  Grid-based otherwise.
    """
    if isinstance(T, PiecewiseCorrespondence):
        if K is None:
            return value_core(T)
        from corrkit.setvalue import Box

        bbox = Box.closed(K.vertices.min(axis=0), K.vertices.max(axis=0))
        core = None
        for box, value in T.cells:
            if box.intersect(bbox).is_empty:
                continue
            core = value if core is None else core & value
        return core if core is not None else IntervalUnion.empty()
    pts = grid_points(T, grid or GridSpec())
    if K is not None:
        pts = np.vstack([K.vertices, pts[np.all(K.barycentric_many(pts) >= -1e-10, axis=1)]])
    core = None
    for x in pts:
        core = T(x) if core is None else core & T(x)
        if core.is_empty:
            break
    return core


def wnq_witness_from_constant_core(T: Correspondence, K: Simplex, grid: GridSpec | None = None) -> WnqWitness:
    """Constant witness at the least core element with the identity reparameterization.

    The core is the intersection of ``T``'s values over ``K``.

    If the core's infimum is not attained the midpoint of its first piece is
    used instead.

    Raises
    ------
    EmptyCore
    """
    core = core_of(T, grid, K)
    if core.is_empty:
        raise EmptyCore("the values of T have empty intersection")
    y = core.representative()
    return WnqWitness(K.vertices, np.full(K.n, y), Reparameterization.identity(K.n))


def wnq_witness_from_convex_graph(T: Correspondence, K: Simplex, grid: GridSpec | None = None) -> WnqWitness:
    """Witness from the first tuple satisfying the convex-graph relation on ``K``'s vertices.

    Raises
    ------
    NoWcgTuple
    """
    ys, _ = find_wcg_tuple(T, K.vertices, grid)
    if ys is None:
        raise NoWcgTuple("no candidate tuple satisfies the convex-graph relation on K")
    return WnqWitness(K.vertices, ys, Reparameterization.identity(K.n))


def export_csv(f: Selection, path, resolution: int = 1001, T: Correspondence | None = None) -> int:
    """Write sampled ``(x, f(x))`` rows with a header; returns the row count."""
    if f.K.ambient_dim == 1:
        lo, hi = float(f.K.vertices.min()), float(f.K.vertices.max())
        pts = np.linspace(lo, hi, resolution)[:, None]
    else:
        from corrkit.properties import simplex_lattice

        steps = max(2, resolution) - 1
        while steps > 1 and _lattice_size(f.K.n, steps) > 100_000:
            steps //= 2
        pts = simplex_lattice(f.K.n, steps) @ f.K.vertices
    vals = f.evaluate_many(pts)
    d = pts.shape[1]
    header = ["x"] if d == 1 else [f"x{k + 1}" for k in range(d)]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header + ["f"])
        for p, v in zip(pts, vals):
            w.writerow([repr(float(c)) for c in p] + [repr(float(v))])
    return len(pts)


def _lattice_size(n: int, steps: int) -> int:
    from math import comb

    return comb(steps + n - 1, n - 1)
