"""Grid falsifiers and witness verifiers for continuity and concavity notions.

Every falsifier scans a deterministic grid (uniform points plus every cell
breakpoint) in lexicographic order and returns the first
:class:`Counterexample` it finds, or ``None``.  A ``None`` result is a claim
about the stated resolution only.

Neighbour probes use a persistence filter: a violation seen at ``x'`` near
``x`` must also hold at ``x + t (x' - x)`` for ``t`` in ``PERSIST_STEPS``.
For piecewise-constant maps this keeps exactly the cells whose closure
contains ``x``; for maps with moving endpoints it discards drift that
vanishes as ``x' -> x``.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from corrkit.errors import (
    DomainMismatch,
    EmptyValueAt,
    ReparamNotSimplexValued,
    WitnessValueNotInT,
)
from corrkit.setvalue import (
    Correspondence,
    IntervalUnion,
    PiecewiseCorrespondence,
    as_point,
)
from corrkit.simplex import Simplex
from corrkit.witness import TOL_SIMPLEX, Reparameterization, WnqWitness, combine

__all__ = [
    "GridSpec",
    "Counterexample",
    "ValueTable",
    "grid_points",
    "lambda_grid",
    "falsify_usc",
    "falsify_lsc",
    "falsify_open_lower_sections",
    "find_wcg_tuple",
    "falsify_wcg",
    "falsify_natural_quasi_concave",
    "verify_wnq_witness",
    "search_wnq_witness",
    "verify_star_witness",
    "verify_wnqs_property",
    "recheck",
]

PERSIST_STEPS = (1e-3, 1e-6)
MAX_GRID_POINTS = 100_000
MAX_LAMBDA_POINTS = 20_000
ROUNDOFF = 1e-12


@dataclass(frozen=True)
class GridSpec:
    """Resolution settings for grid scans.

    Attributes
    ----------
    resolution : int
        Points per domain axis (capped so the product stays near
        ``MAX_GRID_POINTS``).
    delta : float or None
        Probe radius; ``None`` means half the smallest uniform grid step.
    value_resolution : int
        Points per value interval when enumerating candidate ``y``.
    lambda_resolution : int
        Points per simplex edge for weight grids.
    """

    resolution: int = 1001
    delta: float | None = None
    value_resolution: int = 11
    lambda_resolution: int = 1001

    def __post_init__(self):
        if min(self.resolution, self.value_resolution, self.lambda_resolution) < 2:
            raise ValueError("grid resolutions must be at least 2")
        if self.delta is not None and self.delta <= 0:
            raise ValueError("delta must be positive")

    def axis_resolution(self, dim: int) -> int:
        if dim <= 1:
            return self.resolution
        return max(2, min(self.resolution, int(MAX_GRID_POINTS ** (1.0 / dim))))

    def radius(self, T: Correspondence) -> float:
        if self.delta is not None:
            return self.delta
        res = self.axis_resolution(T.dim)
        steps = [(s.hi - s.lo) / (res - 1) for s in T.domain.sides if s.hi > s.lo]
        return 0.5 * min(steps) if steps else 1e-3

    def doubled(self) -> "GridSpec":
        return GridSpec(
            2 * self.resolution - 1,
            None if self.delta is None else self.delta / 2,
            2 * self.value_resolution - 1,
            2 * self.lambda_resolution - 1,
        )

    def to_json(self) -> dict:
        return {
            "resolution": self.resolution,
            "delta": self.delta,
            "value_resolution": self.value_resolution,
            "lambda_resolution": self.lambda_resolution,
        }


def _clean(obj):
    if isinstance(obj, np.ndarray):
        return [_clean(v) for v in obj.tolist()]
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, IntervalUnion):
        return obj.to_json()
    return obj


@dataclass
class Counterexample:
    """A located violation of a named definition.

    ``witness`` holds the replayable data (open sets as interval strings,
    neighbour points, weights, values); :func:`recheck` replays it.
    """

    definition: str
    location: list
    witness: dict = field(default_factory=dict)
    trace: str = ""

    def to_json(self) -> dict:
        return {
            "definition": self.definition,
            "location": _clean(self.location),
            "witness": _clean(self.witness),
            "trace": self.trace,
        }


# ---------------------------------------------------------------------------
# grids


def _axis_grid(side, res: int, breaks: np.ndarray) -> np.ndarray:
    pts = np.union1d(np.linspace(side.lo, side.hi, res), breaks)
    pts = pts[(pts >= side.lo) & (pts <= side.hi)]
    return pts[side.contains_many(pts)]


def grid_points(T: Correspondence, grid: GridSpec) -> np.ndarray:
    """Lexicographically ordered grid over the domain, including breakpoints."""
    res = grid.axis_resolution(T.dim)
    axes = [_axis_grid(s, res, b) for s, b in zip(T.domain.sides, T.breakpoints())]
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=1)


def simplex_lattice(n: int, steps: int) -> np.ndarray:
    """All weight vectors with entries ``k / steps`` summing to one."""
    if n == 1:
        return np.ones((1, 1))
    if n == 2:
        t = np.linspace(0.0, 1.0, steps + 1)
        return np.column_stack([t, 1.0 - t])
    rows = []
    for combo in itertools.combinations(range(steps + n - 1), n - 1):
        parts = np.diff(np.concatenate(([-1], combo, [steps + n - 1]))) - 1
        rows.append(parts / steps)
    return np.array(rows)


def lambda_grid(
    T: Correspondence, xs: np.ndarray, resolution: int, extra=()
) -> tuple[np.ndarray, np.ndarray]:
    """Weights ``Lam`` (lex order on ``lam_1``) and points ``Lam @ xs``.

    For two base points the exact weights where the segment crosses a
    breakpoint are added, and the crossing coordinate is snapped onto the
    breakpoint so the cell lookup is exact.  ``extra`` adds values of
    ``lam_1`` (such as reparameterization knots).
    """
    n = len(xs)
    if n > 2:
        steps = resolution - 1
        while steps > 1 and math.comb(steps + n - 1, n - 1) > MAX_LAMBDA_POINTS:
            steps -= 1
        lam = simplex_lattice(n, steps)
        return lam, lam @ xs
    if n == 1:
        return np.ones((1, 1)), xs.copy()
    x1, x2 = xs
    lam1 = set(np.linspace(0.0, 1.0, resolution).tolist())
    lam1.update(float(v) for v in extra if 0.0 <= v <= 1.0)
    snaps: dict[float, tuple[int, float]] = {}
    for k, b in enumerate(T.breakpoints()):
        d = x1[k] - x2[k]
        if d == 0:
            continue
        for bv in b:
            t = (bv - x2[k]) / d
            if 0.0 <= t <= 1.0:
                lam1.add(float(t))
                snaps[float(t)] = (k, float(bv))
    lam1 = np.array(sorted(lam1))
    lam = np.column_stack([lam1, 1.0 - lam1])
    pts = lam @ xs
    for i, t in enumerate(lam1):
        if t in snaps:
            k, bv = snaps[t]
            pts[i, k] = bv
    return lam, pts


class ValueTable:
    """Per-point value sets in padded arrays for vectorized membership.

    Parameters
    ----------
    T : Correspondence
    points : ndarray, shape (N, m)
    """

    def __init__(self, T: Correspondence, points):
        points = np.atleast_2d(np.asarray(points, dtype=float))
        if isinstance(T, PiecewiseCorrespondence):
            idx = T.locate_many(points)
            rows = [T.cells[c][1] for c in range(len(T.cells))]
            self.values = [rows[c] for c in idx]
            base = self._pad(rows)
            self.lo, self.hi, self.lo_open, self.hi_open = (a[idx] for a in base)
        else:
            self.values = [T(p) for p in points]
            self.lo, self.hi, self.lo_open, self.hi_open = self._pad(self.values)

    @staticmethod
    def _pad(values):
        width = max(1, max(len(v.intervals) for v in values))
        n = len(values)
        lo = np.full((n, width), np.inf)
        hi = np.full((n, width), -np.inf)
        lo_open = np.zeros((n, width), dtype=bool)
        hi_open = np.zeros((n, width), dtype=bool)
        for r, v in enumerate(values):
            for c, iv in enumerate(v.intervals):
                lo[r, c], hi[r, c] = iv.lo, iv.hi
                lo_open[r, c], hi_open[r, c] = iv.lo_open, iv.hi_open
        return lo, hi, lo_open, hi_open

    def contains(self, z) -> np.ndarray:
        """Membership of computed values ``z[k]`` in the ``k``-th value set.

        A value within ``ROUNDOFF`` (relative) of an endpoint is identified
        with that endpoint, so openness decides; this keeps combinations such
        as ``0.4 * 0.55 + 0.6 * 0.3`` from flipping with summation order.
        """
        z = np.atleast_1d(np.asarray(z, dtype=float))[:, None]
        with np.errstate(invalid="ignore"):
            at_lo = np.abs(z - self.lo) <= ROUNDOFF * np.maximum(1.0, np.abs(self.lo))
            at_hi = np.abs(z - self.hi) <= ROUNDOFF * np.maximum(1.0, np.abs(self.hi))
        above = np.where(at_lo, ~self.lo_open, np.where(self.lo_open, z > self.lo, z >= self.lo))
        below = np.where(at_hi, ~self.hi_open, np.where(self.hi_open, z < self.hi, z <= self.hi))
        return (above & below).any(axis=1)


def computed_member(T: Correspondence, x, z: float) -> bool:
    """``z in T(x)`` for a computed combination, with endpoint identification."""
    return bool(ValueTable(T, as_point(x)[None, :]).contains([z])[0])


# ---------------------------------------------------------------------------
# continuity falsifiers


def _persists(T: Correspondence, x, xp, violated: Callable[[IntervalUnion], bool]) -> bool:
    for t in PERSIST_STEPS:
        p = x + t * (xp - x)
        if not T.domain.contains(p) or not violated(T(p)):
            return False
    return True


def _usc_probe(S: IntervalUnion, delta: float) -> IntervalUnion:
    return S.closure().inflate(delta / 2, closed=False)


def falsify_usc(T: Correspondence, grid: GridSpec | None = None):
    """Search for ``x`` and an open ``V`` containing ``T(x)`` that nearby values leave.

    Returns
    -------
    Counterexample or None
        Witness keys: ``V`` (open set), ``neighbor``, ``neighbor_value``, ``delta``.
    """
    grid = grid or GridSpec()
    delta = grid.radius(T)
    for x in grid_points(T, grid):
        S = T(x)
        V = _usc_probe(S, delta)
        for xp in T.neighbors(x, delta):
            Sp = T(xp)
            if Sp.issubset(V):
                continue
            if not _persists(T, x, xp, lambda v: not v.issubset(V)):
                continue
            return Counterexample(
                "usc",
                x.tolist(),
                {"V": V, "value": S, "neighbor": xp.tolist(), "neighbor_value": Sp, "delta": delta},
                f"T({_fmt(x)}) = {S} lies in V = {V} but T({_fmt(xp)}) = {Sp} does not",
            )
    return None


def _lsc_probes(S: IntervalUnion, delta: float) -> list[IntervalUnion]:
    probes = []
    for iv in S.intervals:
        if iv.lo == iv.hi:
            probes.append(IntervalUnion.point(iv.lo).inflate(delta / 2, closed=False))
            continue
        if math.isinf(iv.lo) or math.isinf(iv.hi):
            c = iv.representative()
            probes.append(IntervalUnion.point(c).inflate(delta / 2, closed=False))
            continue
        w = iv.hi - iv.lo
        probes.append(IntervalUnion.of(iv).shrink(w / 4))
        shrunk = IntervalUnion.of(iv).shrink(delta / 2)
        if not shrunk.is_empty:
            probes.append(shrunk)
    return probes


def falsify_lsc(T: Correspondence, grid: GridSpec | None = None):
    """Search for ``x`` and an open ``V`` meeting ``T(x)`` that nearby values miss.

    Probes are the middle half of each component of ``T(x)``, then each
    component shrunk by ``delta / 2``; singletons get a ``delta / 2`` ball.
    """
    grid = grid or GridSpec()
    delta = grid.radius(T)
    for x in grid_points(T, grid):
        S = T(x)
        if S.is_empty:
            continue
        for V in _lsc_probes(S, delta):
            for xp in T.neighbors(x, delta):
                Sp = T(xp)
                if not (Sp & V).is_empty:
                    continue
                if not _persists(T, x, xp, lambda v: (v & V).is_empty):
                    continue
                return Counterexample(
                    "lsc",
                    x.tolist(),
                    {"V": V, "value": S, "neighbor": xp.tolist(), "neighbor_value": Sp, "delta": delta},
                    f"T({_fmt(x)}) = {S} meets V = {V} but T({_fmt(xp)}) = {Sp} misses it",
                )
    return None


def falsify_open_lower_sections(T: Correspondence, grid: GridSpec | None = None, ys=None):
    """Search for ``y`` whose lower section ``{x : y in T(x)}`` is not open.

    ``ys`` fixes the probed values; by default each grid point probes the
    closed endpoints and interior grid of its own value.
    """
    grid = grid or GridSpec()
    delta = grid.radius(T)
    fixed = None if ys is None else [float(y) for y in np.atleast_1d(ys)]
    for x in grid_points(T, grid):
        S = T(x)
        cands = fixed if fixed is not None else _inner_candidates(S, grid.value_resolution)
        for y in cands:
            if y not in S:
                continue
            for xp in T.neighbors(x, delta):
                if y in T(xp):
                    continue
                if not _persists(T, x, xp, lambda v: y not in v):
                    continue
                return Counterexample(
                    "ols",
                    x.tolist(),
                    {"y": y, "neighbor": xp.tolist(), "neighbor_value": T(xp), "delta": delta},
                    f"{_fmt_num(y)} is in T({_fmt(x)}) = {S} but not in T({_fmt(xp)}) = {T(xp)};"
                    f" the lower section of {_fmt_num(y)} is not open at {_fmt(x)}",
                )
    return None


def _inner_candidates(S: IntervalUnion, res: int) -> list[float]:
    out = []
    for iv in S.intervals:
        if not iv.lo_open:
            out.append(iv.lo)
        if not iv.hi_open and iv.hi != iv.lo:
            out.append(iv.hi)
        if iv.hi > iv.lo and math.isfinite(iv.lo) and math.isfinite(iv.hi):
            out.extend(np.linspace(iv.lo, iv.hi, res)[1:-1].tolist())
    return out


# ---------------------------------------------------------------------------
# weakly convex graph and relatives


def _base_values(T: Correspondence, xs) -> tuple[np.ndarray, list[IntervalUnion]]:
    xs = np.atleast_2d(np.asarray(xs, dtype=float))
    if xs.shape[1] != T.dim:
        xs = xs.reshape(-1, T.dim)
    values = []
    for i, x in enumerate(xs):
        v = T(x)
        if v.is_empty:
            raise EmptyValueAt(i, x.tolist())
        values.append(v)
    return xs, values


def _candidate_tuples(values: Sequence[IntervalUnion], res: int):
    return itertools.product(*[v.candidates(res) for v in values])


def find_wcg_tuple(T: Correspondence, xs, grid: GridSpec | None = None):
    """First candidate tuple satisfying the convex-graph relation on the weight grid.

    Returns
    -------
    (ys or None, failures)
        ``failures`` maps each rejected tuple to its first violated weight
        index, and ``lam``/``points`` are the grid used.
    """
    grid = grid or GridSpec()
    xs, values = _base_values(T, xs)
    lam, pts = lambda_grid(T, xs, grid.lambda_resolution)
    table = ValueTable(T, pts)
    failures = []
    common = np.ones(len(lam), dtype=bool)
    for ys in _candidate_tuples(values, grid.value_resolution):
        ys = np.array(ys)
        bad = ~table.contains(combine(lam, ys))
        if not bad.any():
            return ys, {"lam": lam, "points": pts, "failures": failures, "common": common}
        failures.append((ys, int(np.argmax(bad))))
        common &= bad
    return None, {"lam": lam, "points": pts, "failures": failures, "common": common}


def falsify_wcg(T: Correspondence, xs, grid: GridSpec | None = None):
    """Certify that no candidate tuple ``y_i in T(x_i)`` has a convex-combination graph.

    The certificate lists, for every candidate tuple, one weight vector where
    ``sum lam_i y_i`` leaves ``T(sum lam_i x_i)``.  When a single weight
    vector defeats every tuple it is reported as the location.
    """
    grid = grid or GridSpec()
    ys, info = find_wcg_tuple(T, xs, grid)
    if ys is not None:
        return None
    lam, pts, failures = info["lam"], info["points"], info["failures"]
    xs_arr = np.atleast_2d(np.asarray(xs, dtype=float)).reshape(-1, T.dim)
    if info["common"].any():
        k = _central_index(lam, info["common"])
    else:
        k = failures[0][1]
    rows = [
        {"ys": y.tolist(), "lam": lam[i].tolist(), "x": pts[i].tolist(), "z": float(combine(lam[i], y))}
        for y, i in failures
    ]
    return Counterexample(
        "wcg",
        pts[k].tolist(),
        {
            "xs": xs_arr.tolist(),
            "lam": lam[k].tolist(),
            "common": bool(info["common"].any()),
            "tuples_checked": len(failures),
            "violations": rows,
        },
        f"none of {len(failures)} candidate tuples works; at weights {_fmt(lam[k])} the point"
        f" {_fmt(pts[k])} has value {T(pts[k])} which no tuple's combination reaches",
    )


def _central_index(lam: np.ndarray, mask: np.ndarray) -> int:
    """Of the masked weight rows, the one closest to the barycenter."""
    idx = np.flatnonzero(mask)
    center = np.full(lam.shape[1], 1.0 / lam.shape[1])
    return int(idx[np.argmin(np.linalg.norm(lam[idx] - center, axis=1))])


def falsify_natural_quasi_concave(
    f, cone: str = "zero", grid: GridSpec | None = None, domain=None, pair_resolution: int = 21
):
    """Search for ``f(lam x1 + (1-lam) x2)`` outside ``co{f(x1), f(x2)} + C``.

    Parameters
    ----------
    f : Correspondence with singleton values, or callable with ``domain``
    cone : {"zero", "nonneg"}
        ``C = {0}`` or ``C = [0, inf)``.
    pair_resolution : int
        Points per axis for the base pairs; the weight grid uses
        ``grid.lambda_resolution`` capped at 1001.

    Pairs are scanned with ``x1`` ascending and ``x2`` descending; the first
    pair with a violation reports its worst weight.
    """
    grid = grid or GridSpec(lambda_resolution=101)
    if cone not in ("zero", "nonneg"):
        raise ValueError("cone must be 'zero' or 'nonneg'")
    if isinstance(f, Correspondence):
        box = f.domain

        def fv(p):
            v = f(p)
            if len(v.intervals) != 1 or v.inf != v.sup:
                raise ValueError(f"f is not single-valued at {list(p)}: {v}")
            return v.inf

        breaks = f.breakpoints()
    else:
        from corrkit.setvalue import Box

        box = Box.parse(domain)
        fv = lambda p: float(f(p))  # noqa: E731
        breaks = [np.array([s.lo, s.hi]) for s in box.sides]
    axes = [_axis_grid(s, pair_resolution, b) for s, b in zip(box.sides, breaks)]
    base = np.stack([m.ravel() for m in np.meshgrid(*axes, indexing="ij")], axis=1)
    fbase = np.array([fv(p) for p in base])
    lam = np.linspace(0.0, 1.0, min(grid.lambda_resolution, 1001))[1:-1]
    for i in range(len(base)):
        for j in range(len(base) - 1, i, -1):
            x1, x2 = base[i], base[j]
            lo = min(fbase[i], fbase[j])
            hi = max(fbase[i], fbase[j])
            pts = lam[:, None] * x1 + (1 - lam[:, None]) * x2
            vals = np.array([fv(p) for p in pts])
            gap = lo - vals
            if cone == "zero":
                gap = np.maximum(gap, vals - hi)
            slack = ROUNDOFF * max(1.0, abs(lo), abs(hi))
            if (gap > slack).any():
                k = int(np.argmax(gap))
                return Counterexample(
                    "nqc",
                    pts[k].tolist(),
                    {
                        "x1": x1.tolist(),
                        "x2": x2.tolist(),
                        "lam": float(lam[k]),
                        "f_x1": float(fbase[i]),
                        "f_x2": float(fbase[j]),
                        "f_x": float(vals[k]),
                        "cone": cone,
                    },
                    f"f at {_fmt(pts[k])} is {_fmt_num(vals[k])}, outside"
                    f" co{{{_fmt_num(fbase[i])}, {_fmt_num(fbase[j])}}} + C ({cone})",
                )
    return None


def _check_witness_values(T: Correspondence, xs: np.ndarray, ys: np.ndarray):
    for i, (x, y) in enumerate(zip(xs, ys)):
        if y not in T(x):
            raise WitnessValueNotInT(i, float(y), x.tolist())


def _apply_g(g: Reparameterization, lam: np.ndarray) -> np.ndarray:
    G = g(lam)
    sums = G.sum(axis=1)
    bad = np.abs(sums - 1.0) > TOL_SIMPLEX
    if bad.any():
        k = int(np.argmax(bad))
        raise ReparamNotSimplexValued(lam[k].tolist(), float(sums[k]))
    return G


def _knot_extras(g: Reparameterization) -> list[float]:
    if g.n != 2:
        return []
    out = []
    t1, t2 = g.breakpoints()
    out.extend(t1.tolist())
    out.extend((1.0 - t2).tolist())
    return out


def verify_wnq_witness(T: Correspondence, xs, witness: WnqWitness, grid: GridSpec | None = None):
    """Check ``sum g_i(lam_i) y_i in T(sum lam_i x_i)`` on the weight grid.

    Returns ``None`` on pass, otherwise the first violating weight vector.

    Raises
    ------
    WitnessValueNotInT
        If some ``y_i`` is not in ``T(x_i)``.
    ReparamNotSimplexValued
        If ``g`` leaves the simplex on the grid.
    """
    grid = grid or GridSpec()
    xs = np.atleast_2d(np.asarray(xs, dtype=float)).reshape(-1, T.dim)
    ys = witness.values
    if len(xs) != witness.n:
        raise ValueError("base points and witness arity differ")
    _check_witness_values(T, xs, ys)
    lam, pts = lambda_grid(T, xs, grid.lambda_resolution, _knot_extras(witness.g))
    G = _apply_g(witness.g, lam)
    z = combine(G, ys)
    ok = ValueTable(T, pts).contains(z)
    if ok.all():
        return None
    k = int(np.argmax(~ok))
    return Counterexample(
        "wnq",
        pts[k].tolist(),
        {"lam": lam[k].tolist(), "g_lam": G[k].tolist(), "ys": ys.tolist(), "z": float(z[k])},
        f"at weights {_fmt(lam[k])}: sum g_i(lam_i) y_i = {_fmt_num(z[k])}"
        f" is not in T({_fmt(pts[k])}) = {T(pts[k])}",
    )


def _knot_family(T: Correspondence, xs: np.ndarray) -> list[Reparameterization]:
    fam = [Reparameterization.identity(len(xs))]
    if len(xs) != 2:
        return fam
    knots = []
    x1, x2 = xs
    for k, b in enumerate(T.breakpoints()):
        d = x1[k] - x2[k]
        if d == 0:
            continue
        for bv in b:
            t = (bv - x2[k]) / d
            if 0.0 < t < 1.0:
                knots.append(float(t))
                knots.append(float(1.0 - t))
    knots.extend(k / 10 for k in range(1, 10))
    seen = set()
    for kn in knots:
        for orient in (0, 1):
            key = (round(kn, 15), orient)
            if key in seen:
                continue
            seen.add(key)
            fam.append(Reparameterization.one_knot(kn, orient))
    return fam


def search_wnq_witness(T: Correspondence, xs, grid: GridSpec | None = None):
    """First passing witness over candidate values times the one-knot family.

    The family starts with the identity, then knots where the segment between
    the two base points crosses a breakpoint, then knots ``k / 10``, each in
    both orientations.  With more than two base points only the identity is
    tried.
    """
    grid = grid or GridSpec()
    xs, values = _base_values(T, xs)
    family = _knot_family(T, xs)
    extras = [e for g in family for e in _knot_extras(g)]
    lam, pts = lambda_grid(T, xs, grid.lambda_resolution, extras)
    table = ValueTable(T, pts)
    tuples = [np.array(t) for t in _candidate_tuples(values, grid.value_resolution)]
    for g in family:
        G = g(lam)
        if np.any(np.abs(G.sum(axis=1) - 1.0) > TOL_SIMPLEX):
            continue
        for ys in tuples:
            if table.contains(combine(G, ys)).all():
                return WnqWitness(xs, ys, g)
    return None


def verify_star_witness(T: Correspondence, xs, ys, grid: GridSpec | None = None):
    """Check that every convex combination of ``ys`` lies in ``T(x)`` for every grid ``x``.

    In one dimension the combinations fill ``[min y, max y]``; that interval
    is tested exactly against each value set.
    """
    grid = grid or GridSpec()
    xs = np.atleast_2d(np.asarray(xs, dtype=float)).reshape(-1, T.dim)
    ys = np.asarray(ys, dtype=float).ravel()
    _check_witness_values(T, xs, ys)
    lo_i, hi_i = int(np.argmin(ys)), int(np.argmax(ys))
    hull = IntervalUnion.closed(ys[lo_i], ys[hi_i])
    pts = grid_points(T, grid)
    for x in pts:
        v = T(x)
        if hull.issubset(v):
            continue
        if ys[lo_i] not in v:
            z, lam = ys[lo_i], np.eye(len(ys))[lo_i]
        elif ys[hi_i] not in v:
            z, lam = ys[hi_i], np.eye(len(ys))[hi_i]
        else:
            z = _gap_point(hull, v)
            t = (ys[hi_i] - z) / (ys[hi_i] - ys[lo_i])
            lam = np.zeros(len(ys))
            lam[lo_i], lam[hi_i] = t, 1 - t
        return Counterexample(
            "star",
            x.tolist(),
            {"ys": ys.tolist(), "lam": lam.tolist(), "z": float(z)},
            f"combination {_fmt_num(z)} of {_fmt(ys)} is not in T({_fmt(x)}) = {v}",
        )
    return None


def _gap_point(hull: IntervalUnion, v: IntervalUnion) -> float:
    """A point of ``hull`` outside ``v`` (``hull`` convex, endpoints inside ``v``)."""
    for a, b in zip(v.intervals, v.intervals[1:]):
        if a.hi >= hull.inf and b.lo <= hull.sup:
            if a.hi_open:
                return a.hi
            if b.lo_open:
                return b.lo
            return 0.5 * (a.hi + b.lo)
    raise AssertionError("no gap found")


def verify_wnqs_property(
    A: Correspondence,
    K: Simplex,
    T_candidate: Correspondence,
    eps: float = 0.0,
    grid: GridSpec | None = None,
    witness: WnqWitness | None = None,
    agent: int = 0,
):
    """Check the (e-)WNQS property of ``T_candidate`` against ``A`` on ``K``.

    Clauses: (a) a WNQ witness on the vertices of ``K`` (given or searched);
    (b) ``T_candidate(x) <= A(x)`` on ``K`` for ``eps = 0``, or
    ``<= A(x) + (-eps, eps)`` for ``eps > 0``; (c) ``x[agent]`` is not in
    ``T_candidate(x)``.
    """
    grid = grid or GridSpec()
    if A.domain != T_candidate.domain:
        raise DomainMismatch("A and the candidate must share a domain")
    verts = K.vertices
    if verts.shape[1] != T_candidate.dim or not all(T_candidate.domain.contains(v) for v in verts):
        raise DomainMismatch(f"simplex {K} is not inside the domain {T_candidate.domain}")
    definition = "wnqs" if eps == 0 else "e-wnqs"
    # (a)
    if witness is None:
        witness = search_wnq_witness(T_candidate, verts, grid)
        if witness is None:
            return Counterexample(
                definition, verts[0].tolist(), {"clause": "a"},
                "no WNQ witness found on the simplex vertices",
            )
    elif not np.allclose(witness.points, verts):
        raise DomainMismatch("witness base points must be the simplex vertices in order")
    cex = verify_wnq_witness(T_candidate, verts, witness, grid)
    if cex is not None:
        return Counterexample(
            definition, cex.location, {"clause": "a", **cex.witness}, f"clause (a): {cex.trace}"
        )
    # (b), (c) on grid points of K plus its vertices
    pts = grid_points(T_candidate, grid)
    inside = np.all(K.barycentric_many(pts) >= -1e-10, axis=1) if K.n > 1 else np.all(pts == verts[0], axis=1)
    pts = np.vstack([verts, pts[inside]])
    for x in pts:
        cand = T_candidate(x)
        bound = A(x) if eps == 0 else A(x).inflate(eps, closed=False)
        if not cand.issubset(bound):
            return Counterexample(
                definition, x.tolist(), {"clause": "b", "value": cand, "bound": bound, "eps": eps},
                f"clause (b): candidate {cand} is not inside {bound} at {_fmt(x)}",
            )
        if x[agent] in cand:
            return Counterexample(
                definition, x.tolist(), {"clause": "c", "value": cand, "agent": agent},
                f"clause (c): coordinate {_fmt_num(x[agent])} lies in the candidate value {cand}",
            )
    return None


# ---------------------------------------------------------------------------
# replay


def recheck(T: Correspondence, cex: Counterexample, f=None) -> bool:
    """Replay a counterexample; ``True`` means the violation is reproduced."""
    w, x = cex.witness, as_point(cex.location)
    d = cex.definition
    if d in ("usc", "lsc"):
        V = IntervalUnion.parse(w["V"])
        xp = as_point(w["neighbor"])
        if np.max(np.abs(xp - x)) > w["delta"] * (1 + 1e-12):
            return False
        if d == "usc":
            return T(x).issubset(V) and not T(xp).issubset(V)
        return not (T(x) & V).is_empty and (T(xp) & V).is_empty
    if d == "ols":
        xp = as_point(w["neighbor"])
        return w["y"] in T(x) and w["y"] not in T(xp) and np.max(np.abs(xp - x)) <= w["delta"]
    if d == "wcg":
        return all(
            not computed_member(T, r["x"], r["z"]) and abs(float(combine(r["lam"], r["ys"])) - r["z"]) < 1e-12
            for r in w["violations"]
        )
    if d in ("wnq", "star"):
        return not computed_member(T, x, w["z"])
    if d == "nqc":
        lo, hi = min(w["f_x1"], w["f_x2"]), max(w["f_x1"], w["f_x2"])
        val = w["f_x"] if f is None else float(f(x))
        return val < lo or (w["cone"] == "zero" and val > hi)
    if d in ("wnqs", "e-wnqs"):
        clause = w.get("clause")
        if clause == "b":
            return not T(x).issubset(IntervalUnion.parse(w["bound"]))
        if clause == "c":
            return x[w["agent"]] in T(x)
        return True
    raise ValueError(f"unknown definition {d!r}")


def _fmt_num(v) -> str:
    from corrkit.setvalue import fmt_num

    return fmt_num(float(v))


def _fmt(x) -> str:
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if x.size == 1:
        return _fmt_num(x[0])
    return "(" + ", ".join(_fmt_num(v) for v in x) + ")"
