"""Sperner-based fixed points of a few continuous self-maps of simplices.

For each map the script prints the fixed point, the residual |h(x) - x|
and the number of completely labeled cells at every subdivision depth.
By Sperner's lemma each of those counts is odd.

Run with ``python3 demos/brouwer_maps.py``.
"""
import numpy as np

from corrkit.fixedpoint import brouwer_fixed_point
from corrkit.simplex import Simplex

UNIT = Simplex([[0.0], [1.0]])
TRI = Simplex([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
M = np.array([[0.5, 0.2, 0.3], [0.3, 0.6, 0.1], [0.2, 0.2, 0.6]])


def markov(x):
    return TRI.from_barycentric(M @ TRI.barycentric(x))


def softmax(x):
    A = np.array([[0.0, 2.0, -1.0], [-1.5, 0.3, 1.0], [1.0, -0.7, 0.5]])
    z = np.exp(A @ TRI.barycentric(x))
    return TRI.from_barycentric(z / z.sum())


def main() -> None:
    cases = [
        ("cos on [0, 1]", UNIT, np.cos),
        ("swap on the 1-simplex", Simplex([[1.0, 0.0], [0.0, 1.0]]), lambda x: x[::-1].copy()),
        ("Markov chain on the triangle", TRI, markov),
        ("softmax response on the triangle", TRI, softmax),
    ]
    for title, K, h in cases:
        r = brouwer_fixed_point(h, K, tol=1e-10)
        counts = [row["completely_labeled"] for row in r.trace if row.get("completely_labeled") is not None]
        print(title)
        print(f"  x* = {np.array2string(r.point, precision=10)}  residual {r.residual:.1e}  method {r.method}")
        print(f"  completely labeled cells per depth: {counts[:12]}{' ...' if len(counts) > 12 else ''}")

    w, v = np.linalg.eig(M)
    p = np.real(v[:, np.argmin(np.abs(w - 1))])
    print("\nstationary distribution from the eigenvector:", np.round(p / p.sum(), 10))
    r = brouwer_fixed_point(markov, TRI, tol=1e-10)
    print("barycentric weights of the Sperner fixed point:", np.round(TRI.barycentric(r.point), 10))


if __name__ == "__main__":
    main()
