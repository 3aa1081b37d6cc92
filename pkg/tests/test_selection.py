import csv

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from corrkit import fixtures as fx
from corrkit.errors import EmptyCore, NoWcgTuple, WitnessRejected
from corrkit.properties import GridSpec, verify_wnq_witness
from corrkit.selection import (
    Selection,
    build_selection,
    build_selection_star,
    export_csv,
    validate_selection,
    wnq_witness_from_constant_core,
    wnq_witness_from_convex_graph,
)
from corrkit.simplex import Simplex
from corrkit.witness import Reparameterization, StarWitness, WnqWitness

K04 = Simplex([[0.0], [4.0]])
K01 = Simplex([[0.0], [1.0]])
EX1_WITNESS = WnqWitness([[0.0], [4.0]], [0.0, 2.0], Reparameterization.one_knot(0.5))


def test_constant_selection():
    T = fx.constant_unit()
    f = build_selection(K01, T, WnqWitness([[0.0], [1.0]], [0.5, 0.5], Reparameterization.identity(2)))
    assert np.all(f.evaluate_many(np.linspace(0, 1, 101)) == 0.5)
    rep = validate_selection(f, T, GridSpec(1001))
    assert rep.ok and rep.modulus == 0.0


def test_star_midpoint():
    T = fx.constant_unit("[0, 4]")
    f = build_selection_star(K04, T, [0.2, 0.8])
    assert f(2.0) == pytest.approx(0.5, abs=1e-15)
    g = build_selection_star(K04, T, [0.3, 0.3])
    assert np.all(g.evaluate_many(np.linspace(0, 4, 41)) == 0.3)


def test_star_rejected_on_ex1():
    with pytest.raises(WitnessRejected):
        build_selection_star(K04, fx.ex1(), [0.0, 2.0])


def test_ex1_selection_closed_form():
    """f(x) = 0 on [0, 2], x - 2 on [2, 4]."""
    f = build_selection(K04, fx.ex1(), EX1_WITNESS)
    xs = np.linspace(0, 4, 4001)
    assert np.allclose(f.evaluate_many(xs), np.maximum(xs - 2.0, 0.0), atol=1e-12)


def test_ex1_selection_valid_and_continuous():
    T = fx.ex1()
    f = build_selection(K04, T, EX1_WITNESS)
    fine = validate_selection(f, T, GridSpec(10_001))
    coarse = validate_selection(f, T, GridSpec(5_001))
    assert fine.violations == [] and fine.n_points >= 10_000
    assert fine.modulus > 0
    # halving the spacing halves the modulus, within a factor of 3
    assert 1 / 3 <= (coarse.modulus / fine.modulus) / 2 <= 3


def test_corrupted_witness_detected():
    T = fx.ex1()
    bad = WnqWitness([[0.0], [4.0]], [0.0, 2.0], Reparameterization.identity(2))
    with pytest.raises(WitnessRejected) as info:
        build_selection(K04, T, bad)
    assert info.value.counterexample.location == pytest.approx([2.0])
    rep = validate_selection(Selection(K04, bad), T, GridSpec(10_001))
    assert [2.0, 1.0] in [list(v) for v in rep.violations]


def test_vertex_interpolation():
    f = build_selection(K04, fx.ex1(), EX1_WITNESS)
    assert f(0.0) == 0.0 and f(4.0) == 2.0


def test_witness_points_must_be_vertices():
    with pytest.raises(ValueError):
        build_selection(K04, fx.ex1(), WnqWitness([[1.0], [3.0]], [0.0, 2.0], Reparameterization.one_knot(0.5)))


def test_constant_core_witnesses():
    w = wnq_witness_from_constant_core(fx.alternating(), K01)
    assert list(w.values) == [0.4, 0.4]
    assert verify_wnq_witness(fx.alternating(), K01.vertices, w, GridSpec()) is None
    w = wnq_witness_from_constant_core(fx.constant_unit(), K01)
    assert list(w.values) == [0.0, 0.0]
    with pytest.raises(EmptyCore):
        wnq_witness_from_constant_core(fx.ex1(), K04)


def test_convex_graph_witnesses():
    w = wnq_witness_from_convex_graph(fx.diagonal_band(), K01)
    assert list(w.values) == [0.0, 1.0] and w.g.is_identity()
    assert verify_wnq_witness(fx.diagonal_band(), K01.vertices, w, GridSpec()) is None
    w = wnq_witness_from_convex_graph(fx.constant_unit(), K01)
    assert w.values[0] == w.values[1]
    with pytest.raises(NoWcgTuple):
        wnq_witness_from_convex_graph(fx.ex1(), K04)


@given(st.floats(0, 4), st.floats(0, 4), st.floats(0, 1), st.floats(-1, 1), st.floats(-1, 1))
def test_star_selection_is_affine(x1, x2, lam, y1, y2):
    f = Selection(K04, StarWitness(K04.vertices, [y1, y2]))
    lhs = f(lam * x1 + (1 - lam) * x2)
    rhs = lam * f(x1) + (1 - lam) * f(x2)
    assert abs(lhs - rhs) <= 1e-12


def test_two_dimensional_selection():
    from corrkit.setvalue import constant

    K = Simplex([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
    T2 = constant(["[0, 1]", "[0, 1]"], "[0, 1]", "[0.2, 0.9]")
    f = build_selection(K, T2, WnqWitness(K.vertices, [0.2, 0.5, 0.9], Reparameterization.identity(3)))
    assert f([0.0, 1.0]) == 0.9 and f([0.25, 0.25]) == pytest.approx(0.5 * 0.2 + 0.25 * 0.5 + 0.25 * 0.9)
    assert validate_selection(f, T2, GridSpec(101)).ok


def test_export_csv(tmp_path):
    f = build_selection(K04, fx.ex1(), EX1_WITNESS)
    path = tmp_path / "f.csv"
    n = export_csv(f, path, 11)
    rows = list(csv.reader(open(path)))
    assert rows[0] == ["x", "f"] and n == 11 and len(rows) == 12
    assert [float(v) for v in rows[-1]] == [4.0, 2.0]


def test_single_valued_selections_are_natural_quasi_concave():
    """Explicit-form selections sum g_i(lam_i) y_i pass the C = {0} check on these fixtures."""
    from corrkit.properties import falsify_natural_quasi_concave
    from corrkit.setvalue import constant

    f = build_selection(K04, fx.ex1(), EX1_WITNESS)
    assert falsify_natural_quasi_concave(f, "zero", domain=["[0, 4]"]) is None
    g = build_selection(K01, fx.diagonal_band(), wnq_witness_from_convex_graph(fx.diagonal_band(), K01))
    assert falsify_natural_quasi_concave(g, "zero", domain=["[0, 1]"]) is None
    K = Simplex([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
    T2 = constant(["[0, 1]", "[0, 1]"], "[0, 1]", "[0, 1]")
    h = build_selection(K, T2, WnqWitness(K.vertices, [0.1, 0.9, 0.4], Reparameterization.identity(3)))
    assert falsify_natural_quasi_concave(h, "zero", domain=["[0, 0.5]", "[0, 0.5]"], pair_resolution=6) is None
