"""Finite abstract economies and two equilibrium constructions.

An economy has agents ``i`` with strategy interval ``X_i`` and
correspondences ``A_i, P_i, B_i`` from ``X = prod X_i`` into ``X_i``.  An
equilibrium is a point ``x`` with ``x_i`` in the adherence of ``B_i`` at
``x`` and ``A_i(x) & P_i(x)`` empty for every agent.

Both constructions patch a per-agent map: on a simplex ``K_i`` containing
``W_i = {x : A_i(x) & P_i(x) nonempty}`` the agent plays a continuous
selection, elsewhere the (inflated) closed constraint set, and a fixed point
of the product map is sought.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from corrkit.errors import (
    CertificateFailed,
    IterateEscapedQ,
    LimitCheckFailed,
    NoFixedPointWithinTolerance,
    OutsideDomain,
    ToleranceNotReached,
    WitnessRejected,
    WNotProper,
)
from corrkit.fixedpoint import FixedPointResult, approx_fixed_point_setvalued
from corrkit.properties import GridSpec, grid_points, verify_wnqs_property
from corrkit.selection import Selection, build_selection, wnq_witness_from_constant_core
from corrkit.setvalue import (
    Box,
    Correspondence,
    FunctionCorrespondence,
    Interval,
    IntervalUnion,
    PiecewiseCorrespondence,
    Region,
    as_point,
    closure_values,
    graph_adherence,
    intersect,
    limit_membership_check,
    minkowski_inflate,
    nonempty_region,
)
from corrkit.simplex import Simplex
from corrkit.witness import WnqWitness

__all__ = [
    "Agent",
    "AbstractEconomy",
    "AgentVerdict",
    "EquilibriumCertificate",
    "compute_W",
    "equilibrium_via_selection",
    "equilibrium_via_approximation",
    "verify_equilibrium",
    "interior_mask",
    "eps_schedule",
]

DEFAULT_TOL = 1e-6


@dataclass(frozen=True, eq=False)
class Agent:
    """One agent: strategy interval and three correspondences on the product box."""

    name: str
    X: Interval
    A: Correspondence
    P: Correspondence
    B: Correspondence
    K: Simplex | None = None
    witness: WnqWitness | None = None

    def __post_init__(self):
        if isinstance(self.X, str):
            object.__setattr__(self, "X", Interval.parse(self.X))


def _atom_points(maps: Sequence[PiecewiseCorrespondence]) -> np.ndarray:
    """One representative point per atom of the common refinement of ``maps``."""
    domain = maps[0].domain
    reps_per_axis = []
    for k in range(domain.dim):
        b = np.array(sorted(set().union(*(set(m.breakpoints()[k].tolist()) for m in maps))))
        reps = list(b)
        reps.extend(0.5 * (b[:-1] + b[1:]))
        reps_per_axis.append(np.array(sorted(reps)))
    mesh = np.meshgrid(*reps_per_axis, indexing="ij")
    pts = np.stack([m.ravel() for m in mesh], axis=1)
    return np.array([p for p in pts if domain.contains(p)])


class AbstractEconomy:
    """Validated collection of agents.

    Raises
    ------
    DomainMismatch
        If a correspondence is not defined on the product of the strategy sets.
    ValueError
        If some ``B_i`` value is empty or ``A_i(x)`` is not inside ``B_i(x)``.
    """

    def __init__(self, agents: Sequence[Agent], grid: GridSpec | None = None):
        from corrkit.errors import DomainMismatch

        self.agents = tuple(agents)
        if not self.agents:
            raise ValueError("an economy needs at least one agent")
        self.X = Box(tuple(a.X for a in self.agents))
        for i, ag in enumerate(self.agents):
            for label in ("A", "P", "B"):
                corr = getattr(ag, label)
                if corr.domain != self.X:
                    raise DomainMismatch(
                        f"{label} of agent {ag.name} is defined on {corr.domain}, expected {self.X}"
                    )
            self._check_constraints(i, ag, grid)

    def _check_constraints(self, i: int, ag: Agent, grid):
        if isinstance(ag.A, PiecewiseCorrespondence) and isinstance(ag.B, PiecewiseCorrespondence):
            pts = _atom_points([ag.A, ag.B])
        else:
            pts = grid_points(ag.B, grid or GridSpec(resolution=201))
        for p in pts:
            b = ag.B(p)
            if b.is_empty:
                raise ValueError(f"B of agent {ag.name} is empty at {p.tolist()}")
            if not ag.A(p).issubset(b):
                raise ValueError(f"A({p.tolist()}) = {ag.A(p)} is not inside B = {b} for agent {ag.name}")

    @property
    def n_agents(self) -> int:
        return len(self.agents)

    def preference_map(self, i: int) -> Correspondence:
        ag = self.agents[i]
        return intersect(ag.A, ag.P)


def compute_W(econ: AbstractEconomy, i: int) -> Region:
    """Exact region where ``A_i & P_i`` is nonempty."""
    S = econ.preference_map(i)
    if isinstance(S, PiecewiseCorrespondence):
        return nonempty_region(S)
    raise TypeError("W is computed exactly only for piecewise-constant A and P")


def eps_schedule(eps0: float = 0.1, steps: int = 12) -> list[float]:
    """``eps0 * 2**-k`` for ``k = 0..steps``."""
    return [eps0 * 2.0 ** (-k) for k in range(steps + 1)]


# ---------------------------------------------------------------------------
# certificates


@dataclass
class AgentVerdict:
    name: str
    coordinate: float
    closure_distance: float
    adherence_distance: float
    closure_member: bool
    adherence_member: bool
    empty: bool
    constraint: list
    adherence: list
    preferred: list

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "coordinate": self.coordinate,
            "closure_distance": self.closure_distance,
            "adherence_distance": self.adherence_distance,
            "closure_member": self.closure_member,
            "adherence_member": self.adherence_member,
            "preferred_empty": self.empty,
            "constraint_closure": self.constraint,
            "constraint_adherence": self.adherence,
            "preferred_set": self.preferred,
        }


@dataclass
class EquilibriumCertificate:
    """Per-agent verdicts at a candidate point plus the method trace.

    ``passed`` requires exact emptiness and the adherence-form membership for
    every agent; with ``require_closure`` the closure form is required too.
    """

    point: np.ndarray
    agents: list
    tol: float
    method: str = "verify"
    trace: dict = field(default_factory=dict)
    require_closure: bool = False

    @property
    def passed(self) -> bool:
        return all(
            v.empty and v.adherence_member and (v.closure_member or not self.require_closure)
            for v in self.agents
        )

    def failures(self) -> list[str]:
        out = []
        for v in self.agents:
            if not v.empty:
                out.append(f"{v.name}: A & P = {v.preferred} is not empty")
            if not v.adherence_member:
                out.append(f"{v.name}: coordinate {v.coordinate} is {v.adherence_distance:.3g} from the adherence of B")
            elif self.require_closure and not v.closure_member:
                out.append(f"{v.name}: coordinate {v.coordinate} is {v.closure_distance:.3g} from cl B")
        return out

    def to_json(self) -> dict:
        return {
            "point": [float(v) for v in self.point],
            "passed": self.passed,
            "tol": self.tol,
            "method": self.method,
            "require_closure": self.require_closure,
            "agents": [v.to_json() for v in self.agents],
            "failures": self.failures(),
            "trace": self.trace,
        }


def verify_equilibrium(
    econ: AbstractEconomy, x, tol: float = DEFAULT_TOL, require_closure: bool = False
) -> EquilibriumCertificate:
    """Check the equilibrium conditions at ``x``; both membership forms are reported.

    Raises
    ------
    OutsideDomain
    """
    x = as_point(x)
    if x.size != econ.X.dim or not econ.X.contains(x):
        raise OutsideDomain(f"{x.tolist()} is outside {econ.X}")
    verdicts = []
    for i, ag in enumerate(econ.agents):
        clB = ag.B(x).closure()
        adh = graph_adherence(ag.B, x)
        pref = ag.A(x) & ag.P(x)
        dc, da = clB.distance(x[i]), adh.distance(x[i])
        verdicts.append(
            AgentVerdict(
                ag.name, float(x[i]), float(dc), float(da), dc <= tol, da <= tol, pref.is_empty,
                clB.to_json(), adh.to_json(), pref.to_json(),
            )
        )
    return EquilibriumCertificate(x, verdicts, tol, require_closure=require_closure)


# ---------------------------------------------------------------------------
# patching helpers


def _simplex_mask(K: Simplex, pts: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    lam = K.barycentric_many(pts)
    rel = pts - K.vertices[0]
    on_hull = np.ones(len(pts), dtype=bool)
    if K.n - 1 < K.ambient_dim:
        tail = lam[:, 1:]
        resid = np.linalg.norm(tail @ (K.vertices[1:] - K.vertices[0]) - rel, axis=1)
        on_hull = resid <= 1e-9
    return on_hull & np.all(lam >= -tol, axis=1)


def interior_mask(K: Simplex, X: Box, pts, tol: float = 1e-12) -> np.ndarray:
    """Points of ``K`` that are interior to ``K`` relative to ``X``.

    A point on the facet ``lam_j = 0`` stays interior only if every feasible
    direction of the box at that point keeps ``lam_j`` from decreasing.
    """
    pts = np.atleast_2d(np.asarray(pts, dtype=float))
    if K.n - 1 < X.dim:
        return np.zeros(len(pts), dtype=bool)
    inside = _simplex_mask(K, pts)
    pinv = np.linalg.pinv((K.vertices[1:] - K.vertices[0]).T)
    grads = np.vstack([-pinv.sum(axis=0), pinv])  # row j = gradient of lam_j
    lam = K.barycentric_many(pts)
    lo, hi = X.lo, X.hi
    out = inside.copy()
    for r in np.flatnonzero(inside):
        p = pts[r]
        at_lo = p <= lo + tol
        at_hi = p >= hi - tol
        for j in np.flatnonzero(lam[r] <= tol):
            g = grads[j]
            free = ~(at_lo | at_hi)
            if np.any(np.abs(g[free]) > tol) or np.any(g[at_lo] < -tol) or np.any(g[at_hi] > tol):
                out[r] = False
                break
    return out


def _patched(
    f: Selection, K: Simplex, outside: Correspondence, X: Box, interior: bool, name: str
) -> FunctionCorrespondence:
    """``{f(x)}`` on ``K`` (or its interior), ``outside(x)`` elsewhere."""

    def on_k(pts):
        return interior_mask(K, X, pts) if interior else _simplex_mask(K, pts)

    def fn(x):
        if on_k(x[None, :])[0]:
            return IntervalUnion.point(f(x))
        return outside(x)

    def hull(pts):
        mask = on_k(pts)
        lo, hi = outside.hull_many(pts)
        if mask.any():
            vals = f.evaluate_many(pts[mask])
            lo, hi = lo.copy(), hi.copy()
            lo[mask] = vals
            hi[mask] = vals
        return lo, hi

    breaks = [np.union1d(b, K.vertices[:, k]) for k, b in enumerate(outside.breakpoints())]
    return FunctionCorrespondence(X, outside.codomain, fn, breaks=breaks, name=name, hull_fn=hull)


def _region_inside_simplex(W: Region, K: Simplex) -> bool:
    return all(all(K.contains(c, tol=1e-10) for c in box.closure_corners()) for box in W.boxes)


def _default_simplex(W: Region, X: Box) -> Simplex:
    if X.dim != 1 or not W.is_box:
        raise ValueError("a simplex K must be supplied when W is not a 1-D interval")
    side = W.hull.sides[0]
    return Simplex([side.lo, side.hi])


def _solve(maps, tol, grid, warm=None) -> FixedPointResult:
    try:
        return approx_fixed_point_setvalued(maps, tol=tol, grid=grid, warm_start=warm)
    except ToleranceNotReached as exc:
        raise NoFixedPointWithinTolerance(
            str(exc), best_point=exc.best_point, best_residual=exc.best_residual
        ) from None


# ---------------------------------------------------------------------------
# construction 1: selection patching


def equilibrium_via_selection(
    econ: AbstractEconomy,
    Ks: Sequence[Simplex | None] | None = None,
    witnesses: Sequence[WnqWitness | None] | None = None,
    tol: float = DEFAULT_TOL,
    grid: GridSpec | None = None,
) -> EquilibriumCertificate:
    """Equilibrium from continuous selections of ``A_i & P_i`` on ``K_i``.

    For each agent with nonempty ``W_i``: check ``W_i`` is a proper subset of
    ``X`` and lies in ``K_i``, verify the WNQS property of ``A_i & P_i`` on
    ``K_i`` (witness given, taken from the agent, or the constant-core
    witness), build ``f_i`` and patch ``T_i = {f_i}`` on closed ``K_i`` and
    ``cl B_i`` elsewhere.  A fixed point of the product is then certified.

    Raises
    ------
    WNotProper, WitnessRejected, NoFixedPointWithinTolerance, CertificateFailed
    """
    grid = grid or GridSpec()
    Ks = list(Ks) if Ks is not None else [ag.K for ag in econ.agents]
    witnesses = list(witnesses) if witnesses is not None else [ag.witness for ag in econ.agents]
    maps, Ws, agent_trace = [], [], []
    for i, ag in enumerate(econ.agents):
        W = compute_W(econ, i)
        Ws.append(W)
        clB = closure_values(ag.B)
        if W.is_empty:
            maps.append(clB)
            agent_trace.append({"agent": ag.name, "W": W.to_json(), "patched": False})
            continue
        if not W.is_proper:
            raise WNotProper(
                f"W for agent {ag.name} is all of X; the patched map would be a selection"
                " of A & P everywhere and its fixed point x would satisfy x_i in A_i(x) & P_i(x),"
                " which the coordinate-exclusion clause forbids"
            )
        K = Ks[i] if Ks[i] is not None else _default_simplex(W, econ.X)
        if not _region_inside_simplex(W, K):
            raise ValueError(f"W for agent {ag.name} is not contained in K = {K}")
        S = econ.preference_map(i)
        witness = witnesses[i]
        if witness is None:
            witness = wnq_witness_from_constant_core(S, K)
        cex = verify_wnqs_property(S, K, S, 0.0, grid, witness=witness, agent=i)
        if cex is not None:
            raise WitnessRejected(cex, agent=ag.name)
        f = build_selection(K, S, witness, grid)
        maps.append(_patched(f, K, clB, econ.X, interior=False, name=f"T_{ag.name}"))
        agent_trace.append(
            {"agent": ag.name, "W": W.to_json(), "patched": True, "K": K.to_json(), "witness": witness.to_json()}
        )
    result = _solve(maps, tol, grid)
    x = result.point
    for i, W in enumerate(Ws):
        if W.contains(x):
            raise CertificateFailed(
                f"fixed point {x.tolist()} lies in W of agent {econ.agents[i].name}"
                f" (residual {result.residual:.3g})"
            )
    cert = verify_equilibrium(econ, x, tol, require_closure=True)
    cert.method = "selection"
    cert.trace = {"agents": agent_trace, "fixed_point": result.to_json(), "D_i": "X_i"}
    if not cert.passed:
        raise CertificateFailed("; ".join(cert.failures()))
    return cert


# ---------------------------------------------------------------------------
# construction 2: epsilon inflation


Supplier = Callable[[int, float], tuple]


def _in_Q(econ: AbstractEconomy, x: np.ndarray, eps: float, tol: float):
    """First agent violating ``Q_eps`` at ``x``, with the reason, or ``None``."""
    for i, ag in enumerate(econ.agents):
        inflated = ag.B(x).inflate(eps).clip(ag.X)
        if inflated.distance(x[i]) > tol:
            return i, f"coordinate {x[i]} is outside cl(B + eps) = {inflated}"
        pref = ag.A(x) & ag.P(x)
        if not pref.is_empty:
            return i, f"A & P = {pref} is not empty"
    return None


def _inflation_nested(B: Correspondence, e_small: float, e_big: float, pts) -> bool:
    for p in pts:
        v = B(p)
        if not v.inflate(e_small).issubset(v.inflate(e_big)):
            return False
    return True


def equilibrium_via_approximation(
    econ: AbstractEconomy,
    Ks: Sequence[Simplex | None] | None = None,
    eps_values: Sequence[float] | None = None,
    tol: float = DEFAULT_TOL,
    suppliers: Sequence[Supplier | None] | None = None,
    grid: GridSpec | None = None,
) -> EquilibriumCertificate:
    """Equilibrium as the limit of fixed points of inflated patched maps.

    For each ``eps`` in the decreasing schedule and each agent with a
    simplex: a candidate correspondence and witness are obtained (from the
    supplier ``(i, eps) -> (candidate, against, witness)`` or by default
    ``(A_i + (-eps, eps)) & P_i`` checked against ``A_i``), the e-WNQS
    property is verified, and the agent's map is ``{f(x)}`` on the interior
    of ``K_i`` relative to ``X`` and ``cl(B_i(x) + eps) & X_i`` elsewhere.
    Each fixed point must lie in ``Q_eps`` and in the previous ``Q``; the
    last one must pass the limit check against ``B_i``.

    Raises
    ------
    WitnessRejected, NoFixedPointWithinTolerance, IterateEscapedQ, LimitCheckFailed
    """
    grid = grid or GridSpec()
    eps_values = list(eps_values) if eps_values is not None else eps_schedule()
    if any(b >= a for a, b in zip(eps_values, eps_values[1:])) or min(eps_values) <= 0:
        raise ValueError("the eps schedule must be positive and strictly decreasing")
    Ks = list(Ks) if Ks is not None else [ag.K for ag in econ.agents]
    suppliers = list(suppliers) if suppliers is not None else [None] * econ.n_agents
    check_pts = grid_points(econ.agents[0].B, GridSpec(resolution=min(grid.resolution, 201)))
    iterates, rows = [], []
    warm = None
    prev_eps = None
    for eps in eps_values:
        maps, agent_rows = [], []
        for i, ag in enumerate(econ.agents):
            outside = minkowski_inflate(ag.B, eps, ag.X)
            if Ks[i] is None:
                maps.append(outside)
                continue
            K = Ks[i]
            if suppliers[i] is not None:
                candidate, against, witness = suppliers[i](i, eps)
            else:
                candidate = _default_candidate(ag, eps)
                against, witness = ag.A, None
            if witness is None:
                witness = wnq_witness_from_constant_core(candidate, K)
            cex = verify_wnqs_property(against, K, candidate, eps, grid, witness=witness, agent=i)
            if cex is not None:
                raise WitnessRejected(cex, agent=ag.name, eps=eps)
            f = build_selection(K, candidate, witness, grid)
            maps.append(_patched(f, K, outside, econ.X, interior=True, name=f"T_{ag.name}^{eps}"))
            agent_rows.append({"agent": ag.name, "witness": witness.to_json()})
        result = _solve(maps, tol, grid, warm)
        x = result.point
        bad = _in_Q(econ, x, eps, tol)
        if bad is not None:
            i, why = bad
            raise IterateEscapedQ(
                f"iterate {x.tolist()} leaves Q at eps={eps!r} for agent {econ.agents[i].name}: {why}",
                agent=econ.agents[i].name, eps=eps, point=x.tolist(),
            )
        nested = True
        if prev_eps is not None:
            nested = _in_Q(econ, x, prev_eps, tol) is None and all(
                _inflation_nested(ag.B, eps, prev_eps, check_pts) for ag in econ.agents
            )
            if not nested:
                raise IterateEscapedQ(
                    f"Q nesting fails between eps={prev_eps!r} and eps={eps!r} at {x.tolist()}",
                    eps=eps, point=x.tolist(),
                )
        iterates.append(x)
        rows.append(
            {"eps": eps, "point": x.tolist(), "residual": result.residual, "in_Q": True, "nested": nested,
             "agents": agent_rows}
        )
        warm = x
        prev_eps = eps
    x = iterates[-1]
    for i, ag in enumerate(econ.agents):
        if not limit_membership_check(ag.B, x, x[i], eps_values, tol, Y=ag.X):
            raise LimitCheckFailed(f"agent {ag.name}: {x[i]} fails the limit check at {x.tolist()}")
        if not limit_membership_check(ag.B, x, x[i], [eps_values[-1]], tol, Y=ag.X):
            raise LimitCheckFailed(f"agent {ag.name}: {x[i]} is outside the smallest inflation")
    cert = verify_equilibrium(econ, x, tol)
    cert.method = "approximation"
    cert.trace = {"iterates": rows, "eps_schedule": list(eps_values), "limit_check": True, "D_i": "X_i"}
    if not cert.passed:
        raise LimitCheckFailed("; ".join(cert.failures()))
    return cert


def _default_candidate(ag: Agent, eps: float) -> Correspondence:
    def inflated_pref(v: IntervalUnion) -> IntervalUnion:
        return v.inflate(eps, closed=False)

    from corrkit.setvalue import _pointwise

    A_open = _pointwise("A+V", ag.A, inflated_pref, codomain=Interval(-math.inf, math.inf))
    if isinstance(ag.A, PiecewiseCorrespondence) and isinstance(ag.P, PiecewiseCorrespondence):
        from corrkit.setvalue import _refine

        return _refine([A_open, ag.P], lambda vs: vs[0] & vs[1], ag.X)
    return FunctionCorrespondence(
        ag.A.domain, ag.X, lambda x: A_open(x) & ag.P(x),
        breaks=[np.union1d(a, b) for a, b in zip(ag.A.breakpoints(), ag.P.breakpoints())],
    )
