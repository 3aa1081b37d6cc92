"""Fixed points: simplicial Brouwer solver, composed maps, and set-valued residual search.

The Brouwer solver labels points with the smallest index ``i`` such that
``lam_i(h(x)) <= lam_i(x)`` and ``lam_i(x) > 0``, subdivides the current
completely-labeled cell barycentrically and descends into a
completely-labeled sub-cell, backtracking when a branch gets too small
without reaching the tolerance.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from corrkit.errors import NotInAffineHull, NotSelfMap, PostVerificationFailed, ToleranceNotReached
from corrkit.properties import GridSpec, simplex_lattice
from corrkit.selection import build_selection, build_selection_star
from corrkit.setvalue import Correspondence, IntervalUnion, as_point
from corrkit.simplex import Simplex
from corrkit.witness import StarWitness, WnqWitness

__all__ = [
    "FixedPointResult",
    "brouwer_fixed_point",
    "composed_fixed_point",
    "approx_fixed_point_setvalued",
    "setvalued_residual",
    "image_hull",
]

SELF_MAP_TOL = 1e-9


@dataclass
class FixedPointResult:
    """Located fixed point and how it was found.

    ``trace`` holds one row per expanded cell (Brouwer) or per refinement
    round (set-valued search).  Uniqueness is never claimed.
    """

    point: np.ndarray
    residual: float
    iterations: int
    depth: int = 0
    trace: list = field(default_factory=list)
    method: str = ""
    notes: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "point": [float(v) for v in np.atleast_1d(self.point)],
            "residual": float(self.residual),
            "iterations": int(self.iterations),
            "depth": int(self.depth),
            "method": self.method,
            "unique": False,
            "notes": self.notes,
        }


class _Prober:
    """Memoized evaluation of ``h`` with self-map validation and labels."""

    def __init__(self, h, K: Simplex):
        self.h, self.K = h, K
        self.cache: dict[bytes, tuple] = {}
        self.best_point: np.ndarray | None = None
        self.best_residual = math.inf
        self.evaluations = 0

    def __call__(self, x: np.ndarray):
        key = x.tobytes()
        hit = self.cache.get(key)
        if hit is not None:
            return hit
        hx = np.atleast_1d(np.asarray(self.h(x.copy()), dtype=float)).ravel()
        self.evaluations += 1
        try:
            lam_h = self.K.barycentric(hx)
        except NotInAffineHull:
            raise NotSelfMap(x.tolist(), hx.tolist()) from None
        if lam_h.min() < -SELF_MAP_TOL:
            raise NotSelfMap(x.tolist(), hx.tolist())
        lam = self.K.barycentric(x)
        admissible = np.flatnonzero((lam_h <= lam) & (lam > 0))
        label = int(admissible[0])
        residual = float(np.linalg.norm(hx - x))
        if residual < self.best_residual:
            self.best_residual, self.best_point = residual, x.copy()
        out = (hx, label, residual)
        self.cache[key] = out
        return out


def _lipschitz_estimate(verts: np.ndarray, probe: _Prober) -> float:
    L = 0.0
    for a, b in itertools.combinations(range(len(verts)), 2):
        d = np.linalg.norm(verts[a] - verts[b])
        if d > 0:
            L = max(L, np.linalg.norm(probe(verts[a])[0] - probe(verts[b])[0]) / d)
    return L


def brouwer_fixed_point(
    h: Callable,
    K: Simplex,
    tol: float = 1e-9,
    max_depth: int = 60,
    max_nodes: int = 20_000,
    check_steps: int = 4,
) -> FixedPointResult:
    """Approximate fixed point of a continuous self-map of ``K``.

    Stage one subdivides barycentrically and descends into a sub-cell that
    is completely labeled under the global labels (bisection when ``K`` is
    an edge).  Each expanded cell records how many sub-cells are completely
    labeled under the labeling made proper on that cell; Sperner's lemma
    makes the count odd.  If no sub-cell is completely labeled under the
    global labels, stage two restarts from the best point with the
    Kuhn-MacKinnon sandwich method on a lattice whose mesh halves each round.

    Parameters
    ----------
    h : callable
        Maps a point of ``K`` (array of ambient dimension) into ``K``.
    K : Simplex
    tol : float
        Target for ``|h(x) - x|``.
    max_depth : int
        Limit on subdivision levels and on lattice halvings.
    max_nodes : int
        Budget of pivots for the lattice stage.
    check_steps : int
        Lattice steps per edge for the upfront self-map check.

    Raises
    ------
    NotSelfMap
    ToleranceNotReached
        With the best point and residual seen.
    """
    probe = _Prober(h, K)
    for lam in simplex_lattice(K.n, check_steps):
        probe(K.from_barycentric(lam))
    verts = K.vertices.copy()
    trace: list = []
    for v in verts:
        if probe(v)[2] <= tol:
            return FixedPointResult(v.copy(), probe(v)[2], 0, 0, trace, "sperner")
    if probe.best_residual <= tol:
        return FixedPointResult(probe.best_point, probe.best_residual, 0, 0, trace, "sperner")

    n = K.n
    subsets = [s for r in range(1, n + 1) for s in itertools.combinations(range(n), r)]
    perms = list(itertools.permutations(range(n)))
    depth = 0
    while depth < max_depth:
        diam = max(
            (np.linalg.norm(verts[a] - verts[b]) for a, b in itertools.combinations(range(n), 2)),
            default=0.0,
        )
        if diam < tol / (1.0 + _lipschitz_estimate(verts, probe)):
            break
        pts, glob, proper = {}, {}, {}
        hit = None
        for s in subsets:
            p = verts[list(s)].mean(axis=0)
            _, lab, res = probe(p)
            pts[s], glob[s] = p, lab
            proper[s] = lab if lab in s else min(s)
            if res <= tol and (hit is None or res < hit[1]):
                hit = (p.copy(), res)
        count, genuine = 0, []
        for perm in perms:
            chain = [tuple(sorted(perm[: k + 1])) for k in range(n)]
            if sorted(proper[s] for s in chain) != list(range(n)):
                continue
            count += 1
            if sorted(glob[s] for s in chain) == list(range(n)):
                ordered = np.empty_like(verts)
                for s in chain:
                    ordered[glob[s]] = pts[s]
                score = min(probe(pts[s])[2] for s in chain)
                genuine.append((score, len(genuine), ordered))
        depth += 1
        trace.append(
            {
                "depth": depth,
                "completely_labeled": count,
                "globally_labeled": len(genuine),
                "best_residual": probe.best_residual,
                "diameter": float(diam),
            }
        )
        if hit is not None:
            return FixedPointResult(hit[0], hit[1], depth, depth, trace, "sperner")
        if not genuine:
            break
        verts = min(genuine, key=lambda c: (c[0], c[1]))[2]

    start = K.barycentric(probe.best_point)
    point, res, rounds = _sandwich_search(probe, K, start, tol, max_depth, max_nodes, trace)
    if res <= tol:
        return FixedPointResult(point, res, depth + rounds, depth, trace, "sperner+sandwich")
    err = ToleranceNotReached(
        f"residual {probe.best_residual:.3g} above tol {tol:.3g} after {depth} subdivision"
        f" levels and {rounds} lattice rounds (max_depth {max_depth})",
        best_point=probe.best_point,
        best_residual=probe.best_residual,
    )
    err.trace = trace
    raise err


def _discretize(lam: np.ndarray, k: int) -> np.ndarray:
    """Integer vector summing to ``k`` closest to ``k * lam``."""
    scaled = lam * k
    disc = np.floor(scaled).astype(np.int64)
    short = k - int(disc.sum())
    order = np.argsort(disc - scaled, kind="stable")
    disc[order[:short]] += 1
    return disc


def _sandwich_search(probe: _Prober, K: Simplex, lam0, tol, max_rounds, max_pivots, trace):
    """Repeated sandwich restarts with the lattice mesh halving each round."""
    n = K.n

    def label(weights: np.ndarray) -> int:
        return probe(K.from_barycentric(weights / weights.sum()))[1]

    k = max(n, 8)
    disc = _discretize(np.asarray(lam0, dtype=float), k)
    pivots = 0
    for rnd in range(1, max_rounds + 1):
        disc, used = _sandwich_once(label, disc, max_pivots - pivots)
        pivots += used
        k = int(disc.sum())
        x = K.from_barycentric(disc / k)
        probe(x)
        trace.append({"round": rnd, "mesh": 1.0 / k, "best_residual": probe.best_residual})
        if probe.best_residual <= tol:
            return probe.best_point, probe.best_residual, rnd
        if pivots >= max_pivots or k > 2**50:
            break
        disc = disc * 2
    return probe.best_point, probe.best_residual, rnd


def _sandwich_once(label, init: np.ndarray, budget: int):
    """One Kuhn-MacKinnon restart around the lattice point ``init``.

    The search runs on a layered lattice with one extra coordinate: layer 0
    carries an artificial proper labeling pointing back at ``init``, layer 1
    carries the real labels, and reaching layer 2 means the face left behind
    in layer 1 is completely labeled.  Returns that face's base point, one
    lattice step coarser than ``init``, and the pivot count.
    """
    dim = init.size
    base = np.append(init, 0)
    base[0] += 1
    perm = np.arange(1, dim + 1)
    labels = np.arange(dim + 1)
    labels[dim] = label(init.astype(float))
    anchor = base[:-1].copy()
    idx = dim
    vertex = base.copy()
    used = 0
    while labels[idx] < dim:
        used += 1
        if used > budget:
            raise ToleranceNotReached("pivot budget exhausted in the lattice stage")
        dups = np.flatnonzero(labels == labels[idx])
        idx = int(dups[dups != idx][0])
        if idx == 0:
            base[perm[0]] += 1
            base[perm[0] - 1] -= 1
            perm = np.roll(perm, -1)
            labels = np.roll(labels, -1)
            idx = dim
        elif idx == dim:
            base[perm[-1] - 1] += 1
            base[perm[-1]] -= 1
            perm = np.roll(perm, 1)
            labels = np.roll(labels, 1)
            idx = 0
        else:
            perm[idx - 1], perm[idx] = perm[idx], perm[idx - 1]
        vertex = base.copy()
        vertex[perm[:idx]] += 1
        vertex[perm[:idx] - 1] -= 1
        if vertex[-1] == 2:
            labels[idx] = dim
        elif vertex[-1] == 0:
            labels[idx] = int(np.argmax(vertex[:-1] - anchor))
        else:
            labels[idx] = label(vertex[:-1].astype(float))
    return vertex[:-1], used


def image_hull(s: Callable, S: IntervalUnion, samples: int = 257) -> list[tuple[float, float]]:
    """Sampled ``[min, max]`` of a scalar ``s`` over each closed piece of ``S``."""
    out = []
    for iv in S.closure().intervals:
        ts = np.linspace(iv.lo, iv.hi, samples) if iv.hi > iv.lo else np.array([iv.lo])
        vals = np.array([float(np.atleast_1d(s(t))[0]) for t in ts])
        out.append((float(vals.min()), float(vals.max())))
    return out


def composed_fixed_point(
    K: Simplex,
    T: Correspondence,
    witness: WnqWitness | StarWitness,
    s: Callable,
    tol: float = 1e-9,
    grid: GridSpec | None = None,
    **solver_kw,
) -> FixedPointResult:
    """Fixed point of ``s o f`` where ``f`` is the selection built from ``witness``.

    After solving, ``x*`` is checked against the set ``s(T(x*))`` (not just
    the selection) within ``2 tol``.

    Raises
    ------
    WitnessRejected, NotSelfMap, ToleranceNotReached, PostVerificationFailed
    """
    if isinstance(witness, StarWitness):
        f = build_selection_star(K, T, witness.values, grid)
    else:
        f = build_selection(K, T, witness, grid)

    def h(x):
        return np.atleast_1d(np.asarray(s(f(x)), dtype=float))

    result = brouwer_fixed_point(h, K, tol=tol, **solver_kw)
    x = result.point
    Tx = T(x)
    if K.ambient_dim == 1:
        pieces = image_hull(s, Tx)
        gap = min((max(lo - x[0], x[0] - hi, 0.0) for lo, hi in pieces), default=math.inf)
    else:
        gap = math.inf
        for iv in Tx.closure().intervals:
            ts = np.linspace(iv.lo, iv.hi, 257) if iv.hi > iv.lo else np.array([iv.lo])
            for t in ts:
                gap = min(gap, float(np.linalg.norm(np.atleast_1d(s(t)) - x)))
    if gap > 2 * tol:
        raise PostVerificationFailed(
            f"x* = {x.tolist()} is {gap:.3g} away from s(T(x*)) with T(x*) = {Tx}"
        )
    result.method = "composed-" + f.kind
    result.notes = {"selection_value": f(x), "T_at_point": Tx.to_json(), "post_gap": gap}
    return result


def _as_maps(T) -> list[Correspondence]:
    return list(T) if isinstance(T, (list, tuple)) else [T]


def setvalued_residual(maps: Sequence[Correspondence], points) -> np.ndarray:
    """``max_i dist(x_i, co T_i(x))`` per point; ``inf`` where a value is empty."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    r = np.zeros(len(points))
    for i, T in enumerate(maps):
        lo, hi = T.hull_many(points)
        xi = points[:, i]
        d = np.maximum(np.maximum(lo - xi, xi - hi), 0.0)
        d = np.where(np.isnan(lo), np.inf, d)
        r = np.maximum(r, d)
    return r


def approx_fixed_point_setvalued(
    T,
    tol: float = 1e-6,
    grid: GridSpec | None = None,
    warm_start=None,
    max_rounds: int = 60,
) -> FixedPointResult:
    """Point of a box ``X`` with ``x_i`` within ``tol`` of ``co T_i(x)`` for every ``i``.

    Parameters
    ----------
    T : Correspondence or sequence of them
        One map per coordinate of ``X``; a single map on a 1-D box is its own
        product.
    warm_start : point, optional
        Accepted immediately when its residual is within ``tol``.

    The grid (uniform points plus every breakpoint) is scanned in
    lexicographic order and the first point within ``tol`` is returned.
    Otherwise a shrinking local grid around the best point is searched.

    Raises
    ------
    ToleranceNotReached
    """
    maps = _as_maps(T)
    grid = grid or GridSpec()
    dom = maps[0].domain
    if dom.dim != len(maps):
        raise ValueError(f"{len(maps)} maps for a {dom.dim}-dimensional box")
    trace = []
    if warm_start is not None:
        w = as_point(warm_start)
        if dom.contains(w):
            r = float(setvalued_residual(maps, w)[0])
            trace.append({"iteration": 0, "residual": r})
            if r <= tol:
                return FixedPointResult(w, r, 0, 0, trace, "warm-start")
    res = grid.axis_resolution(dom.dim)
    axes = []
    for k, side in enumerate(dom.sides):
        breaks = np.unique(np.concatenate([m.breakpoints()[k] for m in maps]))
        pts = np.union1d(np.linspace(side.lo, side.hi, res), breaks)
        pts = pts[(pts >= side.lo) & (pts <= side.hi)]
        axes.append(pts[side.contains_many(pts)])
    mesh = np.stack([m.ravel() for m in np.meshgrid(*axes, indexing="ij")], axis=1)
    r = setvalued_residual(maps, mesh)
    hits = np.flatnonzero(r <= tol)
    if hits.size:
        k = int(hits[0])
        trace.append({"iteration": 1, "residual": float(r[k])})
        return FixedPointResult(mesh[k], float(r[k]), 1, 0, trace, "grid-scan")
    k = int(np.argmin(r))
    best, best_r = mesh[k].copy(), float(r[k])
    trace.append({"iteration": 1, "residual": best_r})
    step = np.array([
        (s.hi - s.lo) / max(res - 1, 1) for s in dom.sides
    ])
    for it in range(2, max_rounds + 2):
        offsets = np.linspace(-1.0, 1.0, 11)
        local = np.stack(
            [m.ravel() for m in np.meshgrid(*[best[j] + offsets * step[j] for j in range(dom.dim)], indexing="ij")],
            axis=1,
        )
        local = np.array([p for p in local if dom.contains(p)])
        lr = setvalued_residual(maps, local)
        j = int(np.argmin(lr))
        if lr[j] < best_r:
            best, best_r = local[j].copy(), float(lr[j])
        trace.append({"iteration": it, "residual": best_r})
        if best_r <= tol:
            return FixedPointResult(best, best_r, it, 0, trace, "grid-refine")
        step = step / 5.0
        if step.max() < 1e-15:
            break
    raise ToleranceNotReached(
        f"best residual {best_r:.3g} exceeds tol {tol:.3g}", best_point=best, best_residual=best_r
    )
