"""Acceptance criteria, one test per criterion.

Each test prints a single ``ACCEPTANCE <n>: PASS|FAIL <summary>`` line to the
terminal (outside pytest's capture) and then re-raises on failure.
"""
import json
import re
import time
from contextlib import contextmanager

import numpy as np
import pytest

from corrkit import fixtures as fx
from corrkit.cli import COMMANDS, main
from corrkit.documents import bundled_path
from corrkit.economy import (
    eps_schedule,
    equilibrium_via_approximation,
    equilibrium_via_selection,
    verify_equilibrium,
)
from corrkit.errors import EmptyCore, NoWcgTuple, WNotProper
from corrkit.fixedpoint import brouwer_fixed_point, composed_fixed_point
from corrkit.properties import (
    GridSpec,
    _apply_g,
    falsify_usc,
    falsify_wcg,
    lambda_grid,
    verify_wnq_witness,
)
from corrkit.selection import (
    build_selection,
    validate_selection,
    wnq_witness_from_constant_core,
    wnq_witness_from_convex_graph,
)
from corrkit.setvalue import add_set, closure_values, constant, graph_adherence, minkowski_inflate
from corrkit.simplex import Simplex
from corrkit.witness import Reparameterization, WnqWitness
from test_fixedpoint import TEST_MAPS

GRID = GridSpec()
K01 = Simplex([[0.0], [1.0]])
K04 = Simplex([[0.0], [4.0]])
TRI = Simplex([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
TET = Simplex([[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]])


@contextmanager
def criterion(capsys, n: int, title: str):
    """Print one PASS/FAIL line for criterion ``n``; details go in the yielded dict."""
    info: dict = {}
    try:
        yield info
    except BaseException as exc:
        with capsys.disabled():
            print(f"\nACCEPTANCE {n}: FAIL {title} ({type(exc).__name__}: {exc})")
        raise
    extra = "; ".join(f"{k}={v}" for k, v in info.items())
    with capsys.disabled():
        print(f"\nACCEPTANCE {n}: PASS {title}" + (f" [{extra}]" if extra else ""))


def _timed_cli(tmp_path, *args):
    out = tmp_path / f"report_{len(list(tmp_path.iterdir()))}.json"
    t0 = time.perf_counter()
    code = main([*args, str(out)])
    return code, json.loads(out.read_text()), time.perf_counter() - t0


def test_acceptance_01_example_semicontinuity(tmp_path, capsys):
    with criterion(capsys, 1, "EX1 usc and lsc counterexamples at x = 2") as info:
        step = 4.0 / (GRID.resolution - 1)
        for cmd in ("check-usc", "check-lsc"):
            code, rep, dt = _timed_cli(tmp_path, cmd, "ex1.json")
            assert code == 1 and rep["verdict"] == "counterexample"
            loc = rep["result"]["counterexample"]["location"]
            assert abs(loc[0] - 2.0) <= step, loc
            assert dt < 1.0, f"{cmd} took {dt:.3f}s"
            info[cmd] = f"x={loc[0]} in {dt:.3f}s"


def test_acceptance_02_example_wcg(tmp_path, capsys):
    with criterion(capsys, 2, "EX1 has no WCG tuple at base points {1, 3}") as info:
        code, rep, dt = _timed_cli(tmp_path, "check-wcg", "ex1.json", "--points", "1,3")
        assert code == 1 and rep["verdict"] == "counterexample"
        assert dt < 1.0, f"took {dt:.3f}s"
        # the exhaustive candidate set includes every value endpoint
        assert falsify_wcg(fx.ex1(), [[1.0], [3.0]], GRID) is not None
        for y1 in (0.0, 2.0, 1.0):
            for y2 in (2.0, 1e-9, 1.0):
                lam = np.linspace(0, 1, 1001)
                pts = lam * 1.0 + (1 - lam) * 3.0
                z = lam * y1 + (1 - lam) * y2
                assert not all(z[k] in fx.ex1()(pts[k]) for k in range(lam.size))
        info["runtime"] = f"{dt:.3f}s"


def _one_knot_witness(x1: float, x2: float) -> tuple[WnqWitness, float]:
    lam_star = (x2 - 2.0) / (x2 - x1)
    g = Reparameterization(
        (([0.0, lam_star, 1.0], [0.0, 1.0, 1.0]), ([0.0, 1.0 - lam_star, 1.0], [0.0, 0.0, 1.0]))
    )
    return WnqWitness([[x1], [x2]], [0.0, 2.0], g), lam_star


def _case_b_oracle(lam1: np.ndarray, lam_star: float) -> np.ndarray:
    """Closed-form combined value: 2 (1 - lam1 / lam*) left of the knot, 0 beyond it."""
    return np.where(lam1 < lam_star, (1.0 - lam1 / lam_star) * 2.0, 0.0)


def test_acceptance_03_example_wnq(capsys):
    with criterion(capsys, 3, "one-knot WNQ witness on {1, 3} and {0, 4}") as info:
        grid = GridSpec(lambda_resolution=1000)
        T = fx.ex1()
        for x1, x2 in ((1.0, 3.0), (0.0, 4.0)):
            w, lam_star = _one_knot_witness(x1, x2)
            assert lam_star * x1 + (1 - lam_star) * x2 == pytest.approx(2.0, abs=1e-15)
            assert verify_wnq_witness(T, [[x1], [x2]], w, grid) is None
            lam, _ = lambda_grid(T, np.array([[x1], [x2]]), 1000, [lam_star])
            G = _apply_g(w.g, lam)
            z = G @ w.values
            assert np.allclose(z, _case_b_oracle(lam[:, 0], lam_star), atol=1e-12)
            info[f"{{{x1:g},{x2:g}}}"] = f"lam*={lam_star:g}, {lam.shape[0]} weights"


def test_acceptance_04_selection_validity(capsys):
    with criterion(capsys, 4, "EX1 selection on [0, 4] valid and continuous") as info:
        T = fx.ex1()
        w, _ = _one_knot_witness(0.0, 4.0)
        f = build_selection(K04, T, w)
        fine = validate_selection(f, T, GridSpec(10_001))
        coarse = validate_selection(f, T, GridSpec(5_001))
        assert fine.n_points >= 10_000 and fine.violations == []
        assert coarse.violations == []
        ratio = coarse.modulus / fine.modulus
        assert 2 / 3 <= ratio <= 6, ratio
        info["points"] = fine.n_points
        info["modulus_ratio"] = f"{ratio:.4f}"


def test_acceptance_05_composed_fixed_point(capsys):
    with criterion(capsys, 5, "composed fixed point of s(f(x)) with s(y) = y + 2") as info:
        T = fx.ex1()
        w, _ = _one_knot_witness(0.0, 4.0)

        def s(y):
            return y + 2.0

        t0 = time.perf_counter()
        r = composed_fixed_point(K04, T, w, s, tol=1e-9)
        dt = time.perf_counter() - t0
        x = float(r.point[0])
        f = build_selection(K04, T, w)
        assert abs(s(f(x)) - x) <= 1e-9
        # closed form: s(f(x)) = max(x, 2), so the fixed set is [2, 4]
        assert abs(max(x, 2.0) - x) <= 1e-9 and 2.0 - 1e-9 <= x <= 4.0
        assert r.notes["post_gap"] <= 2e-9
        assert dt < 1.0, f"took {dt:.3f}s"
        info["x*"] = f"{x:.12g}"
        info["runtime"] = f"{dt:.3f}s"


def test_acceptance_06_brouwer_properties(capsys):
    with criterion(capsys, 6, "Sperner parity, identity and swap") as info:
        rows = 0
        for name, K, h in TEST_MAPS:
            r = brouwer_fixed_point(h, K, tol=1e-9)
            counts = [row["completely_labeled"] for row in r.trace if row.get("completely_labeled") is not None]
            # a vertex that is already a fixed point ends the search before any subdivision
            assert counts or (r.iterations == 0 and r.residual == 0.0), name
            assert all(c % 2 == 1 for c in counts), (name, counts)
            rows += len(counts)
        ident = brouwer_fixed_point(lambda x: x, TRI)
        assert ident.residual == 0.0
        swap = brouwer_fixed_point(lambda x: x[::-1].copy(), Simplex([[1.0, 0.0], [0.0, 1.0]]))
        assert np.max(np.abs(swap.point - 0.5)) <= 1e-9
        info["maps"] = len(TEST_MAPS)
        info["parity_rows"] = rows


def test_acceptance_07_barycentric_round_trip(capsys, rng):
    with criterion(capsys, 7, "barycentric round trip within 1e-12") as info:
        skew = Simplex([[0.3, -1.2, 2.0], [4.1, 0.7, -0.5], [-2.2, 3.3, 1.1], [0.9, 0.4, 5.0]])
        worst = 0.0
        for K in (K04, TRI, TET, skew):
            lam = rng.dirichlet(np.ones(K.n), size=1000)
            for l in lam:
                x = K.from_barycentric(l)
                back = K.barycentric(x)
                worst = max(worst, float(np.max(np.abs(K.from_barycentric(back) - x))))
                worst = max(worst, float(np.max(np.abs(back - l))))
        assert worst <= 1e-12, worst
        info["max_error"] = f"{worst:.2e}"


def _adherence_cases(T, Y, rng, special_x):
    """20 (x, y) pairs with y placed on, just beyond, and well beyond adherence endpoints."""
    lo, hi = T.domain.sides[0].lo, T.domain.sides[0].hi
    xs = list(special_x) + list(rng.uniform(lo, hi, 20 - len(special_x)))
    offsets = [0.0, 2.0**-22, -(2.0**-22), 2.0**-21, 2.0**-10, 0.05]
    out = []
    for k, x in enumerate(xs):
        S = graph_adherence(T, x)
        ends = [e for iv in S.intervals for e in (iv.lo, iv.hi)] or [0.5 * (Y[0] + Y[1])]
        e = ends[k % len(ends)]
        d = offsets[k % len(offsets)]
        sign = 1.0 if e == ends[-1] else -1.0
        y = float(np.clip(e + sign * d, Y[0], Y[1]))
        out.append((float(x), y))
    return out


ADHERENCE_FIXTURES = [
    ("ex1", fx.ex1, (-2.0, 2.0), [2.0, 0.0, 4.0]),
    ("alternating", fx.alternating, (0.0, 1.0), [0.25, 0.5, 0.75]),
    ("econ1_B", lambda: fx.econ1().agents[0].B, (0.0, 1.0), [0.4, 1.0]),
    ("separated", fx.separated, (0.0, 10.0), [0.5, 1.0]),
]


def test_acceptance_08_inflated_adherence(capsys, rng):
    with criterion(capsys, 8, "inflated adherence membership implies adherence membership") as info:
        eps = [2.0**-k for k in range(1, 21)]
        for name, make, Y, special in ADHERENCE_FIXTURES:
            T = make()
            inflated = [minkowski_inflate(T, e, Y) for e in eps]
            premise = 0
            for x, y in _adherence_cases(T, Y, rng, special):
                if all(y in graph_adherence(Te, x) for Te in inflated):
                    premise += 1
                    d = graph_adherence(T, x).distance(y)
                    assert d <= 1e-6, (name, x, y, d)
            assert premise >= 10, (name, premise)
            info[name] = f"{premise}/20 premise"


SHIFTED_FIXTURES = [
    ("constant", fx.constant_unit),
    ("lower_triangle", fx.lower_triangle),
    ("diagonal_band", fx.diagonal_band),
    ("singleton_identity", fx.singleton_identity),
    ("econ1_A", lambda: fx.econ1().agents[0].A),
    ("econ1_B", lambda: fx.econ1().agents[0].B),
]


def test_acceptance_09_shifted_usc(capsys):
    with criterion(capsys, 9, "(A + C) & K stays usc") as info:
        cases = 0
        for name, make in SHIFTED_FIXTURES:
            A = make()
            assert falsify_usc(A, GRID) is None, name
            for C, K in (("[-0.1, 0.2]", "[0, 1.5]"), ("[0.3, 0.3]", "[0.2, 0.9]"), ("[-1, 1]", "[-0.5, 0.25]")):
                S = add_set(A, C, K)
                assert falsify_usc(S, GRID) is None, (name, C, K)
                cases += 1
        info["cases"] = cases


def test_acceptance_10_equilibrium_selection(capsys):
    with criterion(capsys, 10, "ECON1 equilibrium via selection") as info:
        econ = fx.econ1()
        t0 = time.perf_counter()
        cert = equilibrium_via_selection(econ)
        dt = time.perf_counter() - t0
        x = float(cert.point[0])
        # exhaustive-grid oracle for the fixed set (0.4, 0.6]
        ag = econ.agents[0]
        grid = np.linspace(0, 1, 10_001)
        fixed = [g for g in grid if (ag.A(g) & ag.P(g)).is_empty and g in closure_values(ag.B)(g)]
        assert min(fixed) > 0.4 and max(fixed) == pytest.approx(0.6)
        assert 0.4 < x <= 0.6
        v = cert.agents[0]
        assert v.closure_distance <= 1e-6 and v.empty
        assert (ag.A(cert.point) & ag.P(cert.point)).is_empty
        with pytest.raises(WNotProper, match="all of X"):
            equilibrium_via_selection(fx.econ1_full_w())
        assert dt < 5.0, f"took {dt:.3f}s"
        info["x"] = f"{x:.9g}"
        info["runtime"] = f"{dt:.3f}s"


def test_acceptance_11_equilibrium_approximation(capsys):
    with criterion(capsys, 11, "ECON1 equilibrium via eps-approximation") as info:
        econ = fx.econ1()
        ag = econ.agents[0]
        cand = constant(["[0, 1]"], "[0, 1]", "[0.45, 0.5]")
        against = closure_values(ag.B)
        eps = eps_schedule(0.1, 12)
        cert = equilibrium_via_approximation(
            econ, [Simplex([[0.0], [0.44]])], eps, suppliers=[lambda i, e: (cand, against, None)]
        )
        rows = cert.trace["iterates"]
        assert len(rows) == 13
        # independent closed form: Q_eps = (0.4, 0.6 + eps] for ECON1
        prev = None
        for row in rows:
            x, e = row["point"][0], row["eps"]
            assert 0.4 < x <= 0.6 + e + cert.tol, row
            if prev is not None:
                assert 0.4 < x <= 0.6 + prev + cert.tol, row
            assert row["in_Q"] and row["nested"]
            prev = e
        assert cert.trace["limit_check"] and cert.passed
        assert verify_equilibrium(econ, cert.point, cert.tol).passed
        info["iterates"] = len(rows)
        info["x"] = f"{cert.point[0]:.9g}"


def test_acceptance_12_automatic_witnesses(capsys):
    with criterion(capsys, 12, "constant-core and convex-graph witnesses") as info:
        checked = 0
        for T, K in ((fx.alternating(), K01), (fx.constant_unit(), K01)):
            w = wnq_witness_from_constant_core(T, K)
            assert verify_wnq_witness(T, K.vertices, w, GRID) is None
            checked += 1
        for T, K in ((fx.diagonal_band(), K01), (fx.constant_unit(), K01)):
            w = wnq_witness_from_convex_graph(T, K)
            assert verify_wnq_witness(T, K.vertices, w, GRID) is None
            checked += 1
        with pytest.raises(EmptyCore):
            wnq_witness_from_constant_core(fx.ex1(), K04)
        with pytest.raises(NoWcgTuple):
            wnq_witness_from_convex_graph(fx.ex1(), K04)
        info["witnesses"] = checked


TIMESTAMP = re.compile(r'^\s*"timestamp": .*\n', re.MULTILINE)


def _bundled_inputs() -> list[str]:
    root = bundled_path("ex1.json").parent
    return sorted(p.name for p in root.glob("*.json"))


def test_acceptance_13_determinism(tmp_path, capsys):
    with criterion(capsys, 13, "byte-identical reports across repeated runs") as info:
        runs = 0
        for cmd in sorted(COMMANDS) + ["demo-ex1"]:
            inputs = [None] if cmd == "demo-ex1" else _bundled_inputs()
            for name in inputs:
                texts = []
                for rep in range(2):
                    out = tmp_path / f"{cmd}_{name}_{rep}.json"
                    args = [cmd] + ([name] if name else []) + [str(out)]
                    main(args)
                    texts.append(TIMESTAMP.sub("", out.read_text()))
                assert texts[0] == texts[1], (cmd, name)
                runs += 1
        info["command_input_pairs"] = runs
