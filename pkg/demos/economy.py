"""Equilibrium of the one-agent abstract economy ECON1.

The agent chooses x in [0, 1]. The constraint A is [0, 0.5], the constraint
B is [0, 0.6] and the preference P is [0.45, 0.5] on [0, 0.4] and empty
beyond. An equilibrium is a point x in cl B(x) where A(x) and P(x) do not
meet, so the equilibrium set is (0.4, 0.6].

The script computes W, then finds an equilibrium by the selection route and
by the eps-approximation route, and verifies both certificates.

Run with ``python3 demos/economy.py``.
"""
from corrkit import fixtures as fx
from corrkit.economy import (
    compute_W,
    eps_schedule,
    equilibrium_via_approximation,
    equilibrium_via_selection,
    verify_equilibrium,
)
from corrkit.errors import WNotProper
from corrkit.setvalue import closure_values, constant
from corrkit.simplex import Simplex


def main() -> None:
    econ = fx.econ1()
    W = compute_W(econ, 0)
    print("W (points where the preferred set is nonempty):", " U ".join(str(b) for b in W.boxes))

    cert = equilibrium_via_selection(econ)
    print(f"\nselection route: x = {cert.point[0]:.9g}, passed = {cert.passed}")
    v = cert.agents[0]
    print(f"  distance to cl B(x) = {v.closure_distance:.1e}, A(x) & P(x) empty = {v.empty}")

    try:
        equilibrium_via_selection(fx.econ1_full_w())
    except WNotProper as exc:
        print("\nW = X variant rejected:", exc)

    ag = econ.agents[0]
    candidate = constant(["[0, 1]"], "[0, 1]", "[0.45, 0.5]")
    against = closure_values(ag.B)
    cert = equilibrium_via_approximation(
        econ,
        [Simplex([[0.0], [0.44]])],
        eps_schedule(0.1, 12),
        suppliers=[lambda i, eps: (candidate, against, None)],
    )
    print("\napproximation route")
    for row in cert.trace["iterates"]:
        print(f"  eps = {row['eps']:.6f}  iterate {row['point'][0]:.9g}")
    print(f"  limit point {cert.point[0]:.9g}, limit check {cert.trace['limit_check']}")
    print("  re-verified:", verify_equilibrium(econ, cert.point, cert.tol).passed)


if __name__ == "__main__":
    main()
