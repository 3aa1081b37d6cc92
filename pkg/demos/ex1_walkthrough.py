"""Walk through the three-piece correspondence EX1 on [0, 4].

EX1 takes the value [0, 2] left of 2, [-2, 0] at 2 and (0, 2] right of 2.
The script shows that it is neither usc nor lsc and has no weakly convex
graph tuple. It then builds a one-knot WNQ witness, derives a continuous
selection from it and finds a fixed point of s(f(x)) with s(y) = y + 2.

Run with ``python3 demos/ex1_walkthrough.py``.
"""
import numpy as np

from corrkit import fixtures as fx
from corrkit.fixedpoint import composed_fixed_point
from corrkit.properties import GridSpec, falsify_lsc, falsify_usc, falsify_wcg, verify_wnq_witness
from corrkit.selection import build_selection, validate_selection
from corrkit.simplex import Simplex
from corrkit.witness import Reparameterization, WnqWitness


def main() -> None:
    T = fx.ex1()
    grid = GridSpec()
    for x in (1.0, 2.0, 3.0):
        print(f"T({x:g}) = {T(x)}")

    print("\nsemicontinuity")
    print("  usc:", falsify_usc(T, grid).trace)
    print("  lsc:", falsify_lsc(T, grid).trace)

    print("\nweakly convex graph at base points 1 and 3")
    cex = falsify_wcg(T, [[1.0], [3.0]], grid)
    print("  no tuple:", cex.trace)

    print("\nWNQ witness with one knot")
    K = Simplex([[0.0], [4.0]])
    witness = WnqWitness(K.vertices, [0.0, 2.0], Reparameterization.one_knot(0.5))
    verdict = verify_wnq_witness(T, K.vertices, witness, grid)
    print("  verify_wnq_witness:", "pass" if verdict is None else verdict.trace)

    f = build_selection(K, T, witness)
    xs = np.linspace(0, 4, 9)
    print("\ncontinuous selection f on [0, 4]")
    for x, y in zip(xs, f.evaluate_many(xs)):
        print(f"  f({x:.1f}) = {y:.3f}   T = {T(x)}")
    rep = validate_selection(f, T, GridSpec(10_001))
    print(f"  {rep.n_points} grid points, {len(rep.violations)} violations, modulus {rep.modulus:.2e}")

    r = composed_fixed_point(K, T, witness, lambda y: y + 2.0)
    x = float(r.point[0])
    print(f"\nfixed point of s(f(x)), s(y) = y + 2: x* = {x:.12g}, residual {r.residual:.1e}")
    print(f"  T(x*) = {T(x)}, s(f(x*)) = {f(x) + 2:.12g}")


if __name__ == "__main__":
    main()
