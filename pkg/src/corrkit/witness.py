"""Witness data: weight reparameterizations and the value tuples they act on."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["Reparameterization", "WnqWitness", "StarWitness", "TOL_SIMPLEX", "combine"]

TOL_SIMPLEX = 1e-9


def combine(weights, ys) -> np.ndarray:
    """Rows of ``weights @ ys``, clamped into ``[min ys, max ys]``.

    Weights are nonnegative and sum to one, so the exact combination lies in
    that hull; clamping removes roundoff such as ``0.45 -> 0.44999999999999996``.
    """
    ys = np.asarray(ys, dtype=float)
    return np.clip(np.asarray(weights, dtype=float) @ ys, ys.min(), ys.max())


@dataclass(frozen=True, eq=False)
class Reparameterization:
    """Per-coordinate monotone piecewise-linear maps ``g_i: [0, 1] -> [0, 1]``.

    Each component is given by its breakpoints ``(t, v)`` and evaluated with
    linear interpolation, so continuity holds by construction.

    Parameters
    ----------
    knots : sequence of (t, v) pairs of arrays
        ``t`` strictly increasing from 0 to 1, ``v`` non-decreasing from 0 to 1.
    """

    knots: tuple

    def __post_init__(self):
        comps = []
        for t, v in self.knots:
            t = np.asarray(t, dtype=float)
            v = np.asarray(v, dtype=float)
            if t.shape != v.shape or t.ndim != 1 or t.size < 2:
                raise ValueError("each component needs matching 1-D breakpoint arrays")
            if t[0] != 0.0 or t[-1] != 1.0 or np.any(np.diff(t) < 0):
                raise ValueError("breakpoints must run from 0 to 1 in order")
            if v[0] != 0.0 or v[-1] != 1.0:
                raise ValueError("g_i(0) = 0 and g_i(1) = 1 are required")
            if np.any(np.diff(v) < 0) or v.min() < 0 or v.max() > 1:
                raise ValueError("components must be monotone with range in [0, 1]")
            comps.append((t, v))
        object.__setattr__(self, "knots", tuple(comps))

    @property
    def n(self) -> int:
        return len(self.knots)

    @classmethod
    def identity(cls, n: int) -> "Reparameterization":
        return cls(tuple(([0.0, 1.0], [0.0, 1.0]) for _ in range(n)))

    @classmethod
    def one_knot(cls, knot: float, orientation: int = 0) -> "Reparameterization":
        """Two-coordinate map with a shared knot ``0 < knot <= 1``.

        The leading coordinate (index ``orientation``) rises linearly to 1 on
        ``[0, knot]`` and stays there; the other stays at 0 on
        ``[0, 1 - knot]`` and rises to 1.  Their sum is 1 whenever the weights
        sum to 1.  ``knot = 1`` gives the identity.
        """
        if not 0.0 < knot <= 1.0:
            raise ValueError("knot must lie in (0, 1]")
        lead = ([0.0, knot, 1.0], [0.0, 1.0, 1.0]) if knot < 1 else ([0.0, 1.0], [0.0, 1.0])
        tail = ([0.0, 1.0 - knot, 1.0], [0.0, 0.0, 1.0]) if knot < 1 else ([0.0, 1.0], [0.0, 1.0])
        comps = (lead, tail) if orientation == 0 else (tail, lead)
        return cls(comps)

    def breakpoints(self) -> list[np.ndarray]:
        return [t.copy() for t, _ in self.knots]

    def __call__(self, lam) -> np.ndarray:
        lam = np.asarray(lam, dtype=float)
        single = lam.ndim == 1
        lam = np.atleast_2d(lam)
        if lam.shape[1] != self.n:
            raise ValueError(f"expected {self.n} weights, got {lam.shape[1]}")
        out = np.column_stack([np.interp(lam[:, i], t, v) for i, (t, v) in enumerate(self.knots)])
        return out[0] if single else out

    def is_identity(self) -> bool:
        return all(np.array_equal(np.interp(t, t, v), t) for t, v in self.knots)

    def to_json(self) -> list:
        return [{"t": t.tolist(), "v": v.tolist()} for t, v in self.knots]

    @classmethod
    def from_json(cls, data) -> "Reparameterization":
        return cls(tuple((c["t"], c["v"]) for c in data))


@dataclass(frozen=True, eq=False)
class WnqWitness:
    """Base points ``x_i``, values ``y_i`` and the reparameterization ``g``."""

    points: np.ndarray
    values: np.ndarray
    g: Reparameterization

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim == 1:
            pts = pts[:, None]
        vals = np.asarray(self.values, dtype=float).ravel()
        if len(pts) != len(vals) or len(vals) != self.g.n:
            raise ValueError("points, values and g must have the same arity")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "values", vals)

    @property
    def n(self) -> int:
        return len(self.values)

    def to_json(self) -> dict:
        return {
            "kind": "wnq",
            "points": self.points.tolist(),
            "values": self.values.tolist(),
            "g": self.g.to_json(),
        }


@dataclass(frozen=True, eq=False)
class StarWitness:
    """Values ``y_i`` whose convex combinations lie in every value set."""

    points: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim == 1:
            pts = pts[:, None]
        vals = np.asarray(self.values, dtype=float).ravel()
        if len(pts) != len(vals):
            raise ValueError("points and values must have the same length")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "values", vals)

    @property
    def n(self) -> int:
        return len(self.values)

    def to_json(self) -> dict:
        return {"kind": "star", "points": self.points.tolist(), "values": self.values.tolist()}
