"""Simplex geometry: barycentric coordinates and barycentric subdivision."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from corrkit.errors import DegenerateSimplex, NotInAffineHull, WeightsNotNormalized

TOL_AFFINE = 1e-9
TOL_BARY = 1e-10

__all__ = ["Simplex", "barycentric", "from_barycentric", "subdivide", "TOL_AFFINE", "TOL_BARY"]


@dataclass(frozen=True, eq=False)
class Simplex:
    """Convex hull of ``n`` affinely independent points in ``R^d``.

    Vertex order is meaningful: witness value ``y_i`` pairs with ``a_i``.

    Parameters
    ----------
    vertices : array_like, shape (n, d)
        A 1-D list is read as ``n`` points on the real line.

    Examples
    --------
    >>> K = Simplex([0.0, 4.0])
    >>> K.barycentric(3.0).tolist()
    [0.25, 0.75]
    """

    vertices: np.ndarray
    _edges: np.ndarray = field(init=False, repr=False)
    _pinv: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=float)
        if v.ndim == 1:
            v = v[:, None]
        if v.ndim != 2 or v.shape[0] < 1:
            raise DegenerateSimplex("a simplex needs at least one vertex")
        if not np.all(np.isfinite(v)):
            raise DegenerateSimplex("vertex coordinates must be finite")
        n, d = v.shape
        if n > d + 1:
            raise DegenerateSimplex(f"{n} vertices cannot be affinely independent in R^{d}")
        edges = (v[1:] - v[0]).T  # d x (n-1)
        if n > 1:
            scale = max(np.abs(edges).max(), 1.0)
            if np.linalg.matrix_rank(edges, tol=1e-12 * scale) < n - 1:
                raise DegenerateSimplex("vertices are affinely dependent")
        v.setflags(write=False)
        object.__setattr__(self, "vertices", v)
        object.__setattr__(self, "_edges", edges)
        object.__setattr__(self, "_pinv", np.linalg.pinv(edges) if n > 1 else np.zeros((0, d)))

    @classmethod
    def standard(cls, n: int) -> "Simplex":
        """Unit vectors ``e_1..e_n`` in ``R^n``."""
        return cls(np.eye(n))

    @property
    def n(self) -> int:
        return self.vertices.shape[0]

    @property
    def ambient_dim(self) -> int:
        return self.vertices.shape[1]

    @property
    def dim(self) -> int:
        return self.n - 1

    def __eq__(self, other) -> bool:
        return isinstance(other, Simplex) and np.array_equal(self.vertices, other.vertices)

    def __hash__(self) -> int:
        return hash(self.vertices.tobytes())

    def __repr__(self) -> str:
        return f"Simplex({self.vertices.tolist()})"

    # -- coordinates -----------------------------------------------------
    def barycentric(self, x, tol_affine: float = TOL_AFFINE) -> np.ndarray:
        """Weights ``lam`` with ``x = sum lam_i a_i`` and ``sum lam_i = 1``.

        Weights in ``[-TOL_BARY, 0)`` are snapped to zero so that points on a
        shared face classify consistently.

        Raises
        ------
        NotInAffineHull
            If ``x`` is farther than ``tol_affine`` from the affine hull.
        """
        x = np.atleast_1d(np.asarray(x, dtype=float)).ravel()
        if x.size != self.ambient_dim:
            raise NotInAffineHull(f"point has dimension {x.size}, simplex lives in R^{self.ambient_dim}")
        hit = np.flatnonzero(np.all(self.vertices == x, axis=1))
        if hit.size:
            return np.eye(self.n)[hit[0]]
        rel = x - self.vertices[0]
        if self.n == 1:
            tail = np.zeros(0)
        elif self.n - 1 == self.ambient_dim:
            tail = np.linalg.solve(self._edges, rel)
        else:
            tail = self._pinv @ rel
        resid = float(np.linalg.norm(self._edges @ tail - rel)) if self.n > 1 else float(np.linalg.norm(rel))
        if resid > tol_affine:
            raise NotInAffineHull(f"{x.tolist()} is {resid:.3g} away from the affine hull")
        lam = np.concatenate(([1.0 - tail.sum()], tail))
        snap = (lam < 0) & (lam >= -TOL_BARY)
        if snap.any():
            lam[snap] = 0.0
            lam /= lam.sum()
        return lam

    def barycentric_many(self, xs) -> np.ndarray:
        """Vectorized :meth:`barycentric` without the affine-hull check."""
        xs = np.atleast_2d(np.asarray(xs, dtype=float))
        if xs.shape[1] != self.ambient_dim:
            xs = xs.reshape(-1, self.ambient_dim)
        rel = xs - self.vertices[0]
        if self.n == 1:
            return np.ones((len(xs), 1))
        if self.n - 1 == self.ambient_dim:
            tail = np.linalg.solve(self._edges, rel.T).T
        else:
            tail = rel @ self._pinv.T
        lam = np.column_stack([1.0 - tail.sum(axis=1), tail])
        lam[(lam < 0) & (lam >= -TOL_BARY)] = 0.0
        return lam / lam.sum(axis=1, keepdims=True)

    def from_barycentric(self, lam) -> np.ndarray:
        lam = np.asarray(lam, dtype=float).ravel()
        if lam.size != self.n:
            raise WeightsNotNormalized(f"expected {self.n} weights, got {lam.size}")
        total = lam.sum()
        if abs(total - 1.0) > TOL_BARY:
            raise WeightsNotNormalized(f"weights sum to {total!r}")
        return lam @ self.vertices

    def contains(self, x, tol: float = TOL_BARY) -> bool:
        try:
            lam = self.barycentric(x)
        except NotInAffineHull:
            return False
        return bool(np.all(lam >= -tol))

    # -- metric facts ----------------------------------------------------
    @property
    def barycenter(self) -> np.ndarray:
        return self.vertices.mean(axis=0)

    def diameter(self) -> float:
        v = self.vertices
        if self.n == 1:
            return 0.0
        return float(max(np.linalg.norm(a - b) for a, b in itertools.combinations(v, 2)))

    def volume(self) -> float:
        """``(n-1)``-dimensional volume, ``sqrt(det(E^T E)) / (n-1)!``."""
        if self.n == 1:
            return 1.0
        gram = self._edges.T @ self._edges
        return float(math.sqrt(max(np.linalg.det(gram), 0.0)) / math.factorial(self.n - 1))

    def lipschitz(self) -> float:
        """Euclidean Lipschitz constant of ``x -> lambda(x)`` on the affine hull."""
        if self.n == 1:
            return 0.0
        M = np.vstack([-self._pinv.sum(axis=0), self._pinv])
        return float(np.linalg.norm(M, 2))

    def subdivide(self, depth: int = 1) -> list["Simplex"]:
        return subdivide(self, depth)

    def to_json(self) -> dict:
        return {"vertices": self.vertices.tolist()}


def barycentric(K: Simplex, x) -> np.ndarray:
    return K.barycentric(x)


def from_barycentric(K: Simplex, lam) -> np.ndarray:
    return K.from_barycentric(lam)


def _subdivide_once(K: Simplex) -> list[Simplex]:
    v = K.vertices
    cells = []
    for perm in itertools.permutations(range(K.n)):
        chain = np.cumsum(v[list(perm)], axis=0) / np.arange(1, K.n + 1)[:, None]
        cells.append(Simplex(chain))
    return cells


def subdivide(K: Simplex, depth: int = 1) -> list[Simplex]:
    """Barycentric subdivision iterated ``depth`` times (``n!`` cells per level).

    Cell ``k`` at one level has vertices ``b_1..b_n`` where ``b_j`` is the
    barycenter of the first ``j`` vertices in the ``k``-th permutation.
    """
    if depth < 1:
        raise ValueError("depth must be at least 1")
    cells = [K]
    for _ in range(depth):
        cells = [c for cell in cells for c in _subdivide_once(cell)]
    return cells
