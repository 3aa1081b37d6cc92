"""Correspondences with finite interval-union values.

A correspondence ``T: X -> 2^Y`` is stored either as a
:class:`PiecewiseCorrespondence` (axis-aligned cells, constant value per
cell, exact endpoint semantics) or as a :class:`FunctionCorrespondence`
(an arbitrary callable returning interval unions, used for maps whose
endpoints move with ``x`` and for patched maps built by the equilibrium
routines).

Openness is exact: ``0 in IntervalUnion.parse("(0, 2]")`` is ``False`` no
matter how close the probe is.  Tolerances only enter through the explicit
``tol`` arguments of the closure checks.
"""
from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from corrkit.errors import DomainMismatch, OutsideDomain, PartitionError

__all__ = [
    "Interval",
    "IntervalUnion",
    "Box",
    "Region",
    "Correspondence",
    "PiecewiseCorrespondence",
    "FunctionCorrespondence",
    "as_point",
    "evaluate",
    "member",
    "closure_values",
    "convexify",
    "convexify_values",
    "intersect",
    "minkowski_inflate",
    "add_set",
    "graph_adherence",
    "limit_membership_check",
    "constant",
    "nonempty_region",
    "value_core",
]


def fmt_num(v: float) -> str:
    """Shortest round-tripping text for ``v`` (integers without ``.0``)."""
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    if float(v).is_integer() and abs(v) < 1e16:
        return str(int(v))
    return repr(float(v))


def as_point(x) -> np.ndarray:
    return np.atleast_1d(np.asarray(x, dtype=float)).ravel()


_INTERVAL_RE = re.compile(
    r"^\s*([\[\(])\s*([^,]+?)\s*,\s*([^\]\)]+?)\s*([\]\)])\s*$"
)


@dataclass(frozen=True)
class Interval:
    """A single interval with per-endpoint openness; may be empty."""

    lo: float
    hi: float
    lo_open: bool = False
    hi_open: bool = False

    def __post_init__(self):
        lo, hi = float(self.lo), float(self.hi)
        if math.isnan(lo) or math.isnan(hi):
            raise ValueError("interval endpoints must not be NaN")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        # infinite endpoints are never attained
        object.__setattr__(self, "lo_open", bool(self.lo_open) or math.isinf(lo))
        object.__setattr__(self, "hi_open", bool(self.hi_open) or math.isinf(hi))

    @classmethod
    def closed(cls, lo, hi):
        return cls(lo, hi, False, False)

    @classmethod
    def open(cls, lo, hi):
        return cls(lo, hi, True, True)

    @classmethod
    def point(cls, v):
        return cls(v, v, False, False)

    @classmethod
    def parse(cls, text: str) -> "Interval":
        """Parse ``"[0, 2)"``-style text."""
        m = _INTERVAL_RE.match(text)
        if not m:
            raise ValueError(f"cannot parse interval {text!r}")
        left, a, b, right = m.groups()
        return cls(float(a), float(b), left == "(", right == ")")

    @property
    def is_empty(self) -> bool:
        return self.lo > self.hi or (self.lo == self.hi and (self.lo_open or self.hi_open))

    @property
    def width(self) -> float:
        return max(self.hi - self.lo, 0.0)

    def __contains__(self, y) -> bool:
        y = float(y)
        if y < self.lo or y > self.hi:
            return False
        if y == self.lo and self.lo_open:
            return False
        if y == self.hi and self.hi_open:
            return False
        return True

    def contains_many(self, ys) -> np.ndarray:
        ys = np.asarray(ys, dtype=float)
        lo_ok = ys > self.lo if self.lo_open else ys >= self.lo
        hi_ok = ys < self.hi if self.hi_open else ys <= self.hi
        return lo_ok & hi_ok

    def closure(self) -> "Interval":
        return Interval(self.lo, self.hi, math.isinf(self.lo), math.isinf(self.hi))

    def closure_contains(self, y, tol: float = 0.0) -> bool:
        return self.lo - tol <= y <= self.hi + tol

    def intersect(self, other: "Interval") -> "Interval":
        if self.lo > other.lo:
            lo, lo_open = self.lo, self.lo_open
        elif self.lo < other.lo:
            lo, lo_open = other.lo, other.lo_open
        else:
            lo, lo_open = self.lo, self.lo_open or other.lo_open
        if self.hi < other.hi:
            hi, hi_open = self.hi, self.hi_open
        elif self.hi > other.hi:
            hi, hi_open = other.hi, other.hi_open
        else:
            hi, hi_open = self.hi, self.hi_open or other.hi_open
        return Interval(lo, hi, lo_open, hi_open)

    def issubset(self, other: "Interval") -> bool:
        if self.is_empty:
            return True
        if other.is_empty:
            return False
        lo_ok = self.lo > other.lo or (
            self.lo == other.lo and (self.lo_open or not other.lo_open)
        )
        hi_ok = self.hi < other.hi or (
            self.hi == other.hi and (self.hi_open or not other.hi_open)
        )
        return lo_ok and hi_ok

    def representative(self) -> float:
        """A deterministic member (midpoint, or the single point)."""
        if self.is_empty:
            raise ValueError("empty interval has no representative")
        if self.lo == self.hi:
            return self.lo
        if math.isinf(self.lo) and math.isinf(self.hi):
            return 0.0
        if math.isinf(self.lo):
            return self.hi - 1.0
        if math.isinf(self.hi):
            return self.lo + 1.0
        return 0.5 * (self.lo + self.hi)

    def __str__(self) -> str:
        return "{}{}, {}{}".format(
            "(" if self.lo_open else "[",
            fmt_num(self.lo),
            fmt_num(self.hi),
            ")" if self.hi_open else "]",
        )


def _as_interval(obj) -> Interval:
    if isinstance(obj, Interval):
        return obj
    if isinstance(obj, str):
        return Interval.parse(obj)
    lo, hi = obj
    return Interval.closed(lo, hi)


def _touching(a: Interval, b: Interval) -> bool:
    """Whether ``b`` (with ``b.lo >= a.lo``) overlaps or abuts ``a`` with no gap."""
    if b.lo < a.hi:
        return True
    return b.lo == a.hi and not (a.hi_open and b.lo_open)


def normalize(intervals: Iterable[Interval]) -> tuple[Interval, ...]:
    """Sort, drop empties, merge overlapping or abutting pieces."""
    items = sorted(
        (iv for iv in intervals if not iv.is_empty), key=lambda iv: (iv.lo, iv.lo_open)
    )
    out: list[Interval] = []
    for iv in items:
        if out and _touching(out[-1], iv):
            cur = out[-1]
            if iv.hi > cur.hi:
                hi, hi_open = iv.hi, iv.hi_open
            elif iv.hi < cur.hi:
                hi, hi_open = cur.hi, cur.hi_open
            else:
                hi, hi_open = cur.hi, cur.hi_open and iv.hi_open
            out[-1] = Interval(cur.lo, hi, cur.lo_open, hi_open)
        else:
            out.append(iv)
    return tuple(out)


@dataclass(frozen=True)
class IntervalUnion:
    """Finite union of disjoint, non-adjacent intervals (normalized on construction).

    >>> S = IntervalUnion.parse(["[-2, 0]", "(0, 2]"])
    >>> str(S)
    '[-2, 2]'
    >>> 0.0 in IntervalUnion.parse("(0, 2]")
    False
    """

    intervals: tuple[Interval, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "intervals", normalize(self.intervals))

    @classmethod
    def of(cls, *items) -> "IntervalUnion":
        return cls(tuple(_as_interval(it) for it in items))

    @classmethod
    def empty(cls) -> "IntervalUnion":
        return cls(())

    @classmethod
    def closed(cls, lo, hi) -> "IntervalUnion":
        return cls((Interval.closed(lo, hi),))

    @classmethod
    def point(cls, v) -> "IntervalUnion":
        return cls((Interval.point(v),))

    @classmethod
    def parse(cls, spec) -> "IntervalUnion":
        """Accepts one interval string, a list of them, or ``[]`` for the empty set."""
        if isinstance(spec, IntervalUnion):
            return spec
        if isinstance(spec, Interval):
            return cls((spec,))
        if isinstance(spec, str):
            text = spec.strip()
            if text in ("", "{}", "empty"):
                return cls.empty()
            parts = re.split(r"\s*(?:U|∪)\s*", text)
            return cls(tuple(Interval.parse(p) for p in parts))
        return cls(tuple(_as_interval(p) for p in spec))

    # -- queries ---------------------------------------------------------
    @property
    def is_empty(self) -> bool:
        return not self.intervals

    @property
    def inf(self) -> float:
        return self.intervals[0].lo if self.intervals else math.nan

    @property
    def sup(self) -> float:
        return self.intervals[-1].hi if self.intervals else math.nan

    def __contains__(self, y) -> bool:
        return any(y in iv for iv in self.intervals)

    def contains_many(self, ys) -> np.ndarray:
        ys = np.asarray(ys, dtype=float)
        out = np.zeros(ys.shape, dtype=bool)
        for iv in self.intervals:
            out |= iv.contains_many(ys)
        return out

    def distance(self, y: float) -> float:
        """Distance from ``y`` to the closure; ``inf`` for the empty set."""
        best = math.inf
        for iv in self.intervals:
            if y < iv.lo:
                d = iv.lo - y
            elif y > iv.hi:
                d = y - iv.hi
            else:
                return 0.0
            best = min(best, d)
        return best

    def issubset(self, other: "IntervalUnion") -> bool:
        # each connected piece of self must sit inside one piece of other
        return all(any(a.issubset(b) for b in other.intervals) for a in self.intervals)

    def min_element(self):
        """Least element, or ``None`` if the infimum is not attained."""
        if self.is_empty or self.intervals[0].lo_open:
            return None
        return self.intervals[0].lo

    def representative(self) -> float:
        if self.is_empty:
            raise ValueError("empty set has no representative")
        m = self.min_element()
        return m if m is not None else self.intervals[0].representative()

    def candidates(self, resolution: int = 11) -> list[float]:
        """Deterministic member list used by witness searches.

        Closed endpoints come first (ascending), then interior grid points,
        then points just inside open endpoints.
        """
        closed_ends, interior, nudged = [], [], []
        for iv in self.intervals:
            if iv.lo == iv.hi:
                closed_ends.append(iv.lo)
                continue
            if not iv.lo_open:
                closed_ends.append(iv.lo)
            if not iv.hi_open:
                closed_ends.append(iv.hi)
            if math.isinf(iv.lo) or math.isinf(iv.hi):
                interior.append(iv.representative())
                continue
            grid = np.linspace(iv.lo, iv.hi, max(resolution, 2))
            interior.extend(float(g) for g in grid[1:-1])
            eps = 1e-6 * (iv.hi - iv.lo)
            if iv.lo_open:
                nudged.append(iv.lo + eps)
            if iv.hi_open:
                nudged.append(iv.hi - eps)
        out, seen = [], set()
        for v in sorted(closed_ends) + sorted(interior) + sorted(nudged):
            if v not in seen and v in self:
                seen.add(v)
                out.append(v)
        return out

    # -- algebra ---------------------------------------------------------
    def closure(self) -> "IntervalUnion":
        return IntervalUnion(tuple(iv.closure() for iv in self.intervals))

    def hull(self) -> "IntervalUnion":
        """Convex hull; endpoint flags come from the extreme pieces."""
        if self.is_empty:
            return self
        first, last = self.intervals[0], self.intervals[-1]
        return IntervalUnion((Interval(first.lo, last.hi, first.lo_open, last.hi_open),))

    def intersection(self, other: "IntervalUnion") -> "IntervalUnion":
        return IntervalUnion(
            tuple(a.intersect(b) for a in self.intervals for b in other.intervals)
        )

    __and__ = intersection

    def union(self, other: "IntervalUnion") -> "IntervalUnion":
        return IntervalUnion(self.intervals + other.intervals)

    __or__ = union

    def inflate(self, eps: float, closed: bool = True) -> "IntervalUnion":
        """``S + (-eps, eps)``, or its closure when ``closed``."""
        if closed:
            pieces = (Interval.closed(iv.lo - eps, iv.hi + eps) for iv in self.intervals)
        else:
            pieces = (Interval.open(iv.lo - eps, iv.hi + eps) for iv in self.intervals)
        return IntervalUnion(tuple(pieces))

    def shrink(self, eps: float) -> "IntervalUnion":
        """Open pieces ``(lo + eps, hi - eps)``; pieces narrower than ``2 eps`` vanish."""
        return IntervalUnion(
            tuple(Interval.open(iv.lo + eps, iv.hi - eps) for iv in self.intervals)
        )

    def clip(self, box: Interval) -> "IntervalUnion":
        return IntervalUnion(tuple(iv.intersect(box) for iv in self.intervals))

    def __str__(self) -> str:
        if self.is_empty:
            return "{}"
        return " U ".join(str(iv) for iv in self.intervals)

    def to_json(self) -> list[str]:
        return [str(iv) for iv in self.intervals]


def _as_union(obj) -> IntervalUnion:
    return IntervalUnion.parse(obj)


@dataclass(frozen=True)
class Box:
    """Axis-aligned box, one :class:`Interval` per axis (openness per face)."""

    sides: tuple[Interval, ...]

    def __post_init__(self):
        object.__setattr__(self, "sides", tuple(_as_interval(s) for s in self.sides))

    @classmethod
    def closed(cls, lo, hi) -> "Box":
        lo, hi = as_point(lo), as_point(hi)
        return cls(tuple(Interval.closed(a, b) for a, b in zip(lo, hi)))

    @classmethod
    def parse(cls, spec) -> "Box":
        if isinstance(spec, Box):
            return spec
        if isinstance(spec, (str, Interval)):
            spec = [spec]
        return cls(tuple(_as_interval(s) for s in spec))

    @property
    def dim(self) -> int:
        return len(self.sides)

    @property
    def lo(self) -> np.ndarray:
        return np.array([s.lo for s in self.sides])

    @property
    def hi(self) -> np.ndarray:
        return np.array([s.hi for s in self.sides])

    @property
    def is_empty(self) -> bool:
        return any(s.is_empty for s in self.sides)

    def contains(self, x) -> bool:
        x = as_point(x)
        return all(v in s for v, s in zip(x, self.sides))

    def closure_contains(self, x, tol: float = 0.0) -> bool:
        x = as_point(x)
        return all(s.closure_contains(v, tol) for v, s in zip(x, self.sides))

    def intersect(self, other: "Box") -> "Box":
        return Box(tuple(a.intersect(b) for a, b in zip(self.sides, other.sides)))

    def ball(self, x, radius: float) -> "Box":
        x = as_point(x)
        return Box(tuple(Interval.closed(v - radius, v + radius) for v in x))

    def point_near(self, x, radius: float):
        """A member of ``self`` within L-inf distance ``radius`` of ``x``, or ``None``.

        Coordinates already inside a side are kept; otherwise the midpoint of
        the side clipped to the ball is used, so the point is strictly inside
        any open face.
        """
        x = as_point(x)
        out = np.empty_like(x)
        for k, (v, side) in enumerate(zip(x, self.sides)):
            if v in side:
                out[k] = v
                continue
            piece = side.intersect(Interval.closed(v - radius, v + radius))
            if piece.is_empty:
                return None
            out[k] = piece.representative()
        return out

    def closure_corners(self) -> np.ndarray:
        return self.corners()

    def corners(self) -> np.ndarray:
        return np.array(list(itertools.product(*[(s.lo, s.hi) for s in self.sides])))

    def __str__(self) -> str:
        return " x ".join(str(s) for s in self.sides)

    def to_json(self) -> list[str]:
        return [str(s) for s in self.sides]


class Correspondence:
    """Common interface of set-valued maps ``X -> 2^Y`` with 1-D values."""

    domain: Box
    codomain: Interval

    @property
    def dim(self) -> int:
        return self.domain.dim

    def __call__(self, x) -> IntervalUnion:  # pragma: no cover - abstract
        raise NotImplementedError

    def breakpoints(self) -> list[np.ndarray]:
        """Per-axis coordinates where the map may change (always includes the domain ends)."""
        return [np.array([s.lo, s.hi]) for s in self.domain.sides]

    def check_domain(self, x) -> np.ndarray:
        x = as_point(x)
        if x.size != self.dim or not self.domain.contains(x):
            raise OutsideDomain(f"{list(x)} is outside the domain {self.domain}")
        return x

    def hull_many(self, points) -> tuple[np.ndarray, np.ndarray]:
        """Infimum and supremum of the value at each point (NaN where empty)."""
        points = np.atleast_2d(np.asarray(points, dtype=float))
        lo = np.empty(len(points))
        hi = np.empty(len(points))
        for k, p in enumerate(points):
            v = self(p)
            lo[k], hi[k] = v.inf, v.sup
        return lo, hi

    def neighbors(self, x, radius: float) -> list[np.ndarray]:
        """Probe points of the domain within L-inf distance ``radius`` of ``x``."""
        x = as_point(x)
        out = []
        for k in range(self.dim):
            for step in (-radius, -0.5 * radius, 0.5 * radius, radius):
                p = x.copy()
                p[k] += step
                if self.domain.contains(p):
                    out.append(p)
            for b in self.breakpoints()[k]:
                if abs(b - x[k]) <= radius and b != x[k]:
                    p = x.copy()
                    p[k] = b
                    if self.domain.contains(p):
                        out.append(p)
        return out


class PiecewiseCorrespondence(Correspondence):
    """Cell-wise constant correspondence on a box.

    Parameters
    ----------
    domain : Box or list of interval strings
    codomain : Interval or interval string
        Closed interval containing every value.
    cells : sequence of (box, value)
        Boxes (with openness per face) partitioning ``domain`` exactly.

    Raises
    ------
    PartitionError
        If some domain point lies in no cell or in two cells.
    ValueError
        If a value leaves the codomain.
    """

    def __init__(self, domain, codomain, cells, name: str = ""):
        self.domain = Box.parse(domain)
        self.codomain = _as_interval(codomain)
        self.name = name
        self.cells = tuple((Box.parse(b), _as_union(v)) for b, v in cells)
        if not self.cells:
            raise PartitionError("a correspondence needs at least one cell")
        cod = IntervalUnion((self.codomain,))
        for box, value in self.cells:
            if box.dim != self.domain.dim:
                raise DomainMismatch(f"cell {box} has dimension {box.dim}")
            if not value.issubset(cod):
                raise ValueError(f"value {value} on cell {box} leaves codomain {self.codomain}")
        self._breaks = []
        for k in range(self.dim):
            pts = {self.domain.sides[k].lo, self.domain.sides[k].hi}
            for box, _ in self.cells:
                pts.update((box.sides[k].lo, box.sides[k].hi))
            self._breaks.append(np.array(sorted(p for p in pts if math.isfinite(p))))
        self._build_atom_table()
        self._lo = np.array([v.inf for _, v in self.cells])
        self._hi = np.array([v.sup for _, v in self.cells])

    # -- atoms: singletons at breakpoints and open gaps between them -----
    def _atom_interval(self, k: int, a: int) -> Interval:
        b = self._breaks[k]
        if a % 2 == 0:
            return Interval.point(b[a // 2])
        return Interval.open(b[a // 2], b[a // 2 + 1])

    def atom_box(self, index) -> Box:
        return Box(tuple(self._atom_interval(k, a) for k, a in enumerate(index)))

    def _build_atom_table(self):
        shape = tuple(2 * len(b) - 1 for b in self._breaks)
        table = np.full(shape, -1, dtype=int)
        for index in np.ndindex(*shape):
            rep = np.array(
                [self._atom_interval(k, a).representative() for k, a in enumerate(index)]
            )
            owners = [c for c, (box, _) in enumerate(self.cells) if box.contains(rep)]
            inside = self.domain.contains(rep)
            if inside and len(owners) != 1:
                what = "no cell" if not owners else f"cells {owners}"
                raise PartitionError(f"domain point {list(rep)} is covered by {what}")
            if not inside and owners:
                raise PartitionError(f"cell {owners[0]} reaches {list(rep)} outside the domain")
            if inside:
                table[index] = owners[0]
        self._table = table

    def breakpoints(self) -> list[np.ndarray]:
        return [b.copy() for b in self._breaks]

    @property
    def min_cell_width(self) -> float:
        widths = [s.width for box, _ in self.cells for s in box.sides if s.width > 0]
        return min(widths) if widths else math.inf

    def locate_many(self, points) -> np.ndarray:
        """Index of the cell holding each point, ``-1`` outside the domain."""
        points = np.atleast_2d(np.asarray(points, dtype=float))
        atoms, valid = [], np.ones(len(points), dtype=bool)
        for k, b in enumerate(self._breaks):
            v = points[:, k]
            j = np.searchsorted(b, v, side="left")
            jc = np.minimum(j, len(b) - 1)
            exact = (j < len(b)) & (b[jc] == v)
            between = (j > 0) & (j < len(b)) & ~exact
            valid &= exact | between
            atoms.append(np.where(exact, 2 * jc, np.maximum(2 * j - 1, 0)))
        out = np.full(len(points), -1, dtype=int)
        if valid.any():
            idx = tuple(a[valid] for a in atoms)
            out[valid] = self._table[idx]
        return out

    def locate(self, x) -> int:
        x = as_point(x)
        if x.size != self.dim:
            raise OutsideDomain(f"{list(x)} has the wrong dimension")
        c = int(self.locate_many(x[None, :])[0])
        if c < 0:
            raise OutsideDomain(f"{list(x)} is outside the domain {self.domain}")
        return c

    def __call__(self, x) -> IntervalUnion:
        return self.cells[self.locate(x)][1]

    def hull_many(self, points):
        idx = self.locate_many(points)
        if (idx < 0).any():
            bad = np.atleast_2d(points)[np.argmax(idx < 0)]
            raise OutsideDomain(f"{list(bad)} is outside the domain {self.domain}")
        return self._lo[idx], self._hi[idx]

    def contains_many(self, points, ys) -> np.ndarray:
        """Openness-exact test ``ys[k] in T(points[k])``."""
        idx = self.locate_many(points)
        ys = np.asarray(ys, dtype=float)
        out = np.zeros(len(idx), dtype=bool)
        for c in np.unique(idx):
            if c < 0:
                continue
            mask = idx == c
            out[mask] = self.cells[c][1].contains_many(ys[mask])
        return out

    def cells_near(self, x, radius: float) -> list[int]:
        """Cells meeting the closed L-inf ball of ``radius`` around ``x``."""
        ball = self.domain.ball(x, radius)
        return [c for c, (box, _) in enumerate(self.cells) if not box.intersect(ball).is_empty]

    def cells_adherent(self, x) -> list[int]:
        """Cells whose closure contains ``x``."""
        return [c for c, (box, _) in enumerate(self.cells) if box.closure_contains(x)]

    def neighbors(self, x, radius: float) -> list[np.ndarray]:
        out = []
        for c in self.cells_near(x, radius):
            p = self.cells[c][0].point_near(x, radius)
            if p is not None and self.domain.contains(p):
                out.append(p)
        return out

    def map_values(self, fn: Callable[[IntervalUnion], IntervalUnion], codomain=None):
        cod = self.codomain if codomain is None else _as_interval(codomain)
        return PiecewiseCorrespondence(
            self.domain, cod, [(b, fn(v)) for b, v in self.cells], name=self.name
        )

    def __repr__(self) -> str:
        body = "; ".join(f"{b} -> {v}" for b, v in self.cells)
        return f"PiecewiseCorrespondence({body})"


class FunctionCorrespondence(Correspondence):
    """Correspondence given by a callable ``x -> IntervalUnion``.

    ``breaks`` lists per-axis coordinates where the callable changes
    formula; falsifiers probe them explicitly.
    """

    def __init__(self, domain, codomain, fn, breaks=None, name: str = "", hull_fn=None):
        self.domain = Box.parse(domain)
        self.codomain = _as_interval(codomain)
        self.fn = fn
        self.name = name
        self._hull_fn = hull_fn
        ends = [[s.lo, s.hi] for s in self.domain.sides]
        if breaks is not None:
            for k, extra in enumerate(breaks):
                ends[k].extend(float(v) for v in extra)
        self._breaks = [np.array(sorted(set(e))) for e in ends]

    def breakpoints(self) -> list[np.ndarray]:
        return [b.copy() for b in self._breaks]

    def __call__(self, x) -> IntervalUnion:
        x = self.check_domain(x)
        return _as_union(self.fn(x))

    def hull_many(self, points):
        if self._hull_fn is not None:
            return self._hull_fn(np.atleast_2d(np.asarray(points, dtype=float)))
        return super().hull_many(points)

    def contains_many(self, points, ys) -> np.ndarray:
        points = np.atleast_2d(np.asarray(points, dtype=float))
        return np.array([y in self(p) for p, y in zip(points, np.asarray(ys, dtype=float))])

    def __repr__(self) -> str:
        return f"FunctionCorrespondence({self.name or self.fn!r} on {self.domain})"


# ---------------------------------------------------------------------------
# operations


def evaluate(T: Correspondence, x) -> IntervalUnion:
    return T(x)


def member(S: IntervalUnion, y: float) -> bool:
    return y in S


def convexify(S: IntervalUnion) -> IntervalUnion:
    return S.hull()


def _pointwise(name: str, T: Correspondence, fn, codomain=None) -> Correspondence:
    if isinstance(T, PiecewiseCorrespondence):
        return T.map_values(fn, codomain)
    cod = T.codomain if codomain is None else codomain
    return FunctionCorrespondence(
        T.domain, cod, lambda x: fn(T(x)), breaks=[b for b in T.breakpoints()], name=name
    )


def closure_values(T: Correspondence) -> Correspondence:
    return _pointwise("cl", T, IntervalUnion.closure)


def convexify_values(T: Correspondence) -> Correspondence:
    return _pointwise("co", T, IntervalUnion.hull)


def _refine(maps: Sequence[PiecewiseCorrespondence], combine, codomain) -> PiecewiseCorrespondence:
    """Common refinement of piecewise maps, value per atom = combine(values)."""
    domain = maps[0].domain
    breaks = [
        np.array(sorted(set().union(*(set(m._breaks[k].tolist()) for m in maps))))
        for k in range(domain.dim)
    ]
    shape = tuple(2 * len(b) - 1 for b in breaks)
    pieces = []
    for index in np.ndindex(*shape):
        sides = []
        for k, a in enumerate(index):
            b = breaks[k]
            sides.append(
                Interval.point(b[a // 2]) if a % 2 == 0 else Interval.open(b[a // 2], b[a // 2 + 1])
            )
        box = Box(tuple(sides))
        rep = np.array([s.representative() for s in sides])
        if not domain.contains(rep):
            continue
        pieces.append((box, combine([m(rep) for m in maps])))
    return PiecewiseCorrespondence(domain, codomain, merge_cells(pieces))


def merge_cells(pieces):
    """Greedily merge boxes with equal values that abut along one axis."""
    pieces = list(pieces)
    changed = True
    while changed:
        changed = False
        for i, j in itertools.permutations(range(len(pieces)), 2):
            (a, va), (b, vb) = pieces[i], pieces[j]
            if va != vb:
                continue
            axis = _abutting_axis(a, b)
            if axis is None:
                continue
            sa, sb = a.sides[axis], b.sides[axis]
            merged = Interval(sa.lo, sb.hi, sa.lo_open, sb.hi_open)
            sides = list(a.sides)
            sides[axis] = merged
            pieces[i] = (Box(tuple(sides)), va)
            del pieces[j]
            changed = True
            break
    return pieces


def _abutting_axis(a: Box, b: Box):
    axis = None
    for k, (sa, sb) in enumerate(zip(a.sides, b.sides)):
        if sa == sb:
            continue
        if axis is not None:
            return None
        if sa.hi == sb.lo and sa.hi_open != sb.lo_open:
            axis = k
        else:
            return None
    return axis


def intersect(T: Correspondence, F: Correspondence) -> Correspondence:
    """Pointwise ``T(x) & F(x)``; exact on the common cell refinement."""
    if T.domain != F.domain:
        raise DomainMismatch(f"domains differ: {T.domain} vs {F.domain}")
    cod = T.codomain.intersect(F.codomain)
    if isinstance(T, PiecewiseCorrespondence) and isinstance(F, PiecewiseCorrespondence):
        return _refine([T, F], lambda vs: vs[0] & vs[1], cod)
    breaks = [np.union1d(a, b) for a, b in zip(T.breakpoints(), F.breakpoints())]
    return FunctionCorrespondence(
        T.domain, cod, lambda x: T(x) & F(x), breaks=breaks, name="intersect"
    )


def minkowski_inflate(T: Correspondence, eps: float, Y=None) -> Correspondence:
    """``x -> cl(T(x) + (-eps, eps)) & Y``; empty values stay empty."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    Y = T.codomain if Y is None else _as_interval(Y)
    return _pointwise("inflate", T, lambda v: v.inflate(eps).clip(Y), codomain=Y)


def add_set(T: Correspondence, C, K) -> Correspondence:
    """``x -> (T(x) + C) & K`` for a closed interval ``C`` and compact interval ``K``."""
    C, K = _as_interval(C), _as_interval(K)

    def shifted(v: IntervalUnion) -> IntervalUnion:
        if C.is_empty:
            return IntervalUnion.empty()
        pieces = (
            Interval(iv.lo + C.lo, iv.hi + C.hi, iv.lo_open and C.lo_open, iv.hi_open and C.hi_open)
            for iv in v.intervals
        )
        return IntervalUnion(tuple(pieces)).clip(K)

    return _pointwise("add_set", T, shifted, codomain=K)


def constant(domain, codomain, value, name: str = "") -> PiecewiseCorrespondence:
    domain = Box.parse(domain)
    return PiecewiseCorrespondence(domain, codomain, [(domain, value)], name=name)


def graph_adherence(T: Correspondence, x, delta_schedule=None) -> IntervalUnion:
    """Values over a shrinking neighbourhood of ``x``, closed.

    With ``delta_schedule=None`` the limit is taken exactly: the result is the
    union of closed values of the cells whose closure contains ``x``.  With a
    schedule, the closed ball of radius ``delta_schedule[-1]`` is used, which
    over-approximates the adherence once the radius exceeds the distance to a
    neighbouring cell.  Always ``cl T(x)`` is a subset of the result.
    """
    x = T.check_domain(x)
    radius = None if delta_schedule is None else float(list(delta_schedule)[-1])
    if isinstance(T, PiecewiseCorrespondence):
        cells = T.cells_adherent(x) if radius is None else T.cells_near(x, radius)
        out = IntervalUnion.empty()
        for c in cells:
            out = out | T.cells[c][1]
        return out.closure()
    # sampled approximation for callables
    radii = [1e-9] if radius is None else list(delta_schedule)
    out = T(x)
    for r in radii:
        for p in T.neighbors(x, r):
            out = out | T(p)
    return out.closure()


def limit_membership_check(
    B: Correspondence, x, y: float, eps_schedule, tol: float = 1e-6, Y=None, delta_schedule=None
) -> bool:
    """Accept ``y`` in the graph adherence of ``B`` at ``x`` through its inflations.

    True iff ``y`` lies within ``tol`` of the adherence of every inflation
    ``cl(B + (-eps, eps)) & Y`` for ``eps`` in the schedule.
    """
    T_x = B.check_domain(x)
    for eps in eps_schedule:
        S = graph_adherence(minkowski_inflate(B, eps, Y), T_x, delta_schedule)
        if S.distance(y) > tol:
            return False
    return True


@dataclass(frozen=True)
class Region:
    """Finite union of boxes inside an ambient box, from an exact cell computation."""

    boxes: tuple[Box, ...]
    ambient: Box
    is_box: bool
    hull: Box | None
    is_proper: bool

    @property
    def is_empty(self) -> bool:
        return not self.boxes

    def contains(self, x) -> bool:
        return any(b.contains(x) for b in self.boxes)

    def to_json(self) -> dict:
        return {
            "boxes": [b.to_json() for b in self.boxes],
            "is_box": self.is_box,
            "hull": None if self.hull is None else self.hull.to_json(),
            "proper": self.is_proper,
            "empty": self.is_empty,
        }


def nonempty_region(T: PiecewiseCorrespondence) -> Region:
    """Exact set ``{x : T(x) nonempty}`` as a union of atom boxes."""
    shape = T._table.shape
    selected, inside = [], 0
    for index in np.ndindex(*shape):
        c = T._table[index]
        if c < 0:
            continue
        inside += 1
        if not T.cells[c][1].is_empty:
            selected.append(index)
    boxes = [T.atom_box(ix) for ix in selected]
    merged = tuple(b for b, _ in merge_cells([(b, IntervalUnion.empty()) for b in boxes]))
    is_box, hull = False, None
    if selected:
        arr = np.array(selected)
        lo, hi = arr.min(axis=0), arr.max(axis=0)
        is_box = len(selected) == int(np.prod(hi - lo + 1))
        if is_box:
            sides = []
            for k in range(T.dim):
                a, b = T._atom_interval(k, lo[k]), T._atom_interval(k, hi[k])
                sides.append(Interval(a.lo, b.hi, a.lo_open, b.hi_open))
            hull = Box(tuple(sides))
    return Region(merged, T.domain, is_box, hull, len(selected) < inside)


def value_core(T: PiecewiseCorrespondence) -> IntervalUnion:
    """Intersection of all cell values (the set common to every ``T(x)``)."""
    core = T.cells[0][1]
    for _, v in T.cells[1:]:
        core = core & v
    return core
