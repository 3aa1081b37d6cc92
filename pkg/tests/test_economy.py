import numpy as np
import pytest

from corrkit import fixtures as fx
from corrkit.economy import (
    AbstractEconomy,
    Agent,
    compute_W,
    eps_schedule,
    equilibrium_via_approximation,
    equilibrium_via_selection,
    verify_equilibrium,
)
from corrkit.errors import DomainMismatch, IterateEscapedQ, WNotProper
from corrkit.setvalue import closure_values, constant, minkowski_inflate
from corrkit.simplex import Simplex

X2 = ["[0, 1]", "[0, 1]"]


def _supplier(econ):
    ag = econ.agents[0]
    cand = constant(["[0, 1]"], "[0, 1]", "[0.45, 0.5]")
    against = closure_values(ag.B)
    return lambda i, eps: (cand, against, None)


def test_compute_w_exact_and_grid_agreement():
    econ = fx.econ1()
    W = compute_W(econ, 0)
    assert W.is_proper and W.is_box and not W.is_empty
    S = econ.preference_map(0)
    for x in np.linspace(0, 1, 10_001):
        assert W.contains([x]) == (not S(x).is_empty)


def test_compute_w_empty_and_full():
    econ = AbstractEconomy([Agent("a", "[0, 1]", constant(["[0, 1]"], "[0, 1]", "[0, 0.5]"),
                                  constant(["[0, 1]"], "[0, 1]", []), constant(["[0, 1]"], "[0, 1]", "[0, 1]"))])
    assert compute_W(econ, 0).is_empty
    assert not compute_W(fx.econ1_full_w(), 0).is_proper


def test_selection_route_econ1():
    econ = fx.econ1()
    cert = equilibrium_via_selection(econ)
    x = cert.point[0]
    assert 0.4 < x <= 0.6
    v = cert.agents[0]
    assert v.empty and v.closure_distance <= 1e-6 and v.adherence_member
    again = verify_equilibrium(econ, cert.point, cert.tol)
    assert again.passed


def test_patched_map_has_no_fixed_point_in_w():
    xs = np.linspace(0, 0.4, 4001)
    assert np.min(np.abs(0.45 - xs)) > 0


def test_selection_route_rejects_full_w():
    with pytest.raises(WNotProper, match="all of X"):
        equilibrium_via_selection(fx.econ1_full_w())


def test_all_w_empty_gives_constraint_fixed_point():
    c = (0.3, 0.7)
    agents = [
        Agent(f"a{i}", "[0, 1]", constant(X2, "[0, 1]", f"[{c[i]}, {c[i]}]"), constant(X2, "[0, 1]", []),
              constant(X2, "[0, 1]", f"[{c[i]}, {c[i]}]"))
        for i in range(2)
    ]
    cert = equilibrium_via_selection(AbstractEconomy(agents))
    assert cert.point == pytest.approx(list(c), abs=cert.tol)


def test_approximation_default_candidate_escapes_q():
    with pytest.raises(IterateEscapedQ) as info:
        equilibrium_via_approximation(fx.econ1(), [Simplex([[0.0], [0.4]])])
    assert info.value.agent == "agent1"


def test_approximation_supplier_route():
    econ = fx.econ1()
    eps = eps_schedule(0.1, 12)
    cert = equilibrium_via_approximation(econ, [Simplex([[0.0], [0.44]])], eps, suppliers=[_supplier(econ)])
    rows = cert.trace["iterates"]
    assert len(rows) == 13 and all(r["in_Q"] and r["nested"] for r in rows)
    assert cert.trace["limit_check"] and cert.passed
    assert verify_equilibrium(econ, cert.point, cert.tol).passed


def test_q_nesting_cellwise():
    B = fx.econ1().agents[0].B
    eps = eps_schedule(0.1, 12)
    xs = np.linspace(0, 1, 1001)
    for big, small in zip(eps, eps[1:]):
        Bb, Bs = minkowski_inflate(B, big), minkowski_inflate(B, small)
        assert all(Bs(x).issubset(Bb(x)) for x in xs)


def test_verify_examples():
    econ = fx.econ1()
    ok = verify_equilibrium(econ, [0.5])
    assert ok.passed and ok.agents[0].closure_member and ok.agents[0].adherence_member
    bad = verify_equilibrium(econ, [0.2])
    assert not bad.passed and "[0.45, 0.5]" in bad.failures()[0]
    far = verify_equilibrium(econ, [0.7], tol=1e-6)
    assert not far.passed and far.agents[0].closure_distance == pytest.approx(0.1)


def test_closure_form_implies_adherence_form():
    econ = fx.econ1()
    for x in np.linspace(0, 1, 201):
        v = verify_equilibrium(econ, [x]).agents[0]
        assert (not v.closure_member) or v.adherence_member


def test_economy_validation():
    A = constant(["[0, 1]"], "[0, 1]", "[0, 0.7]")
    B = constant(["[0, 1]"], "[0, 1]", "[0, 0.6]")
    P = constant(["[0, 1]"], "[0, 1]", [])
    with pytest.raises(ValueError):
        AbstractEconomy([Agent("a", "[0, 1]", A, P, B)])
    with pytest.raises(DomainMismatch):
        AbstractEconomy([Agent("a", "[0, 2]", B, P, B)])
    with pytest.raises(ValueError):
        AbstractEconomy([Agent("a", "[0, 1]", P, P, P)])


def test_certificate_json_reports_both_forms():
    data = equilibrium_via_selection(fx.econ1()).to_json()
    agent = data["agents"][0]
    assert {"closure_member", "adherence_member", "preferred_empty"} <= set(agent)
    assert data["trace"]["D_i"] == "X_i"
