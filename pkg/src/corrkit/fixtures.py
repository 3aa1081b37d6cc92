"""Named fixtures used by the tests, demos and bundled documents.

``ex1`` is the three-piece map on ``[0, 4]`` that is neither usc nor lsc,
fails the weakly-convex-graph test but admits a one-knot WNQ witness.
``econ1`` is a one-agent economy whose preference region ``W = [0, 0.4]`` is
a proper subset of ``X = [0, 1]``.
"""
from __future__ import annotations

import numpy as np

from corrkit.setvalue import (
    FunctionCorrespondence,
    IntervalUnion,
    PiecewiseCorrespondence,
    constant,
)

__all__ = [
    "ex1",
    "constant_unit",
    "diagonal_band",
    "lower_triangle",
    "singleton_identity",
    "open_band",
    "alternating",
    "separated",
    "econ1",
    "econ1_full_w",
]


def ex1() -> PiecewiseCorrespondence:
    return PiecewiseCorrespondence(
        ["[0, 4]"],
        "[-2, 2]",
        [
            (["[0, 2)"], "[0, 2]"),
            (["[2, 2]"], "[-2, 0]"),
            (["(2, 4]"], "(0, 2]"),
        ],
        name="ex1",
    )


def constant_unit(domain="[0, 1]") -> PiecewiseCorrespondence:
    """``T(x) = [0, 1]`` everywhere."""
    return constant([domain], "[0, 1]", "[0, 1]", name="constant")


def alternating() -> PiecewiseCorrespondence:
    """Cells alternate between ``[0, 1]`` and ``[0.4, 0.7]``; core ``[0.4, 0.7]``."""
    return PiecewiseCorrespondence(
        ["[0, 1]"],
        "[0, 1]",
        [
            (["[0, 0.25)"], "[0, 1]"),
            (["[0.25, 0.5)"], "[0.4, 0.7]"),
            (["[0.5, 0.75)"], "[0, 1]"),
            (["[0.75, 1]"], "[0.4, 0.7]"),
        ],
        name="alternating",
    )


def separated() -> PiecewiseCorrespondence:
    """Two cells with far-apart values; no witness can bridge them."""
    return PiecewiseCorrespondence(
        ["[0, 1]"],
        "[0, 10]",
        [(["[0, 0.5]"], "[0, 1]"), (["(0.5, 1]"], "[9, 10]")],
        name="separated",
    )


def _hull_affine(lo_fn, hi_fn):
    def hull(points):
        x = points[:, 0]
        return lo_fn(x), hi_fn(x)

    return hull


def diagonal_band() -> FunctionCorrespondence:
    """``T(x) = [x, x + 1]`` on ``[0, 1]`` (convex graph)."""
    return FunctionCorrespondence(
        ["[0, 1]"],
        "[0, 2]",
        lambda x: IntervalUnion.closed(x[0], x[0] + 1),
        name="diagonal_band",
        hull_fn=_hull_affine(lambda x: x, lambda x: x + 1),
    )


def lower_triangle() -> FunctionCorrespondence:
    """``T(x) = [0, x]`` on ``[0, 1]`` (closed graph, usc)."""
    return FunctionCorrespondence(
        ["[0, 1]"],
        "[0, 1]",
        lambda x: IntervalUnion.closed(0.0, x[0]),
        name="lower_triangle",
        hull_fn=_hull_affine(np.zeros_like, lambda x: x),
    )


def singleton_identity() -> FunctionCorrespondence:
    """``T(x) = {x}`` on ``[0, 1]``."""
    return FunctionCorrespondence(
        ["[0, 1]"],
        "[0, 1]",
        lambda x: IntervalUnion.point(x[0]),
        name="singleton_identity",
        hull_fn=_hull_affine(lambda x: x, lambda x: x),
    )


def open_band() -> FunctionCorrespondence:
    """``T(x) = (x, x + 1)`` on ``[0, 1]`` (open lower sections)."""
    from corrkit.setvalue import Interval

    return FunctionCorrespondence(
        ["[0, 1]"],
        "[0, 2]",
        lambda x: IntervalUnion((Interval.open(x[0], x[0] + 1),)),
        name="open_band",
        hull_fn=_hull_affine(lambda x: x, lambda x: x + 1),
    )


def econ1(full_w: bool = False):
    """One agent on ``X = [0, 1]``.

    ``A = [0, 0.5]``, ``B = [0, 0.6]`` everywhere; ``P = [0.45, 0.5]`` on
    ``[0, 0.4]`` and empty on ``(0.4, 1]``.  With ``full_w`` the preference is
    ``[0.45, 0.5]`` everywhere so that ``W = X``.
    """
    from corrkit.economy import AbstractEconomy, Agent

    X = ["[0, 1]"]
    A = constant(X, "[0, 1]", "[0, 0.5]", name="A")
    B = constant(X, "[0, 1]", "[0, 0.6]", name="B")
    if full_w:
        P = constant(X, "[0, 1]", "[0.45, 0.5]", name="P")
    else:
        P = PiecewiseCorrespondence(
            X, "[0, 1]", [(["[0, 0.4]"], "[0.45, 0.5]"), (["(0.4, 1]"], [])], name="P"
        )
    return AbstractEconomy([Agent("agent1", "[0, 1]", A, P, B)])


def econ1_full_w():
    return econ1(full_w=True)
