import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from corrkit import fixtures as fx
from corrkit.errors import DomainMismatch, OutsideDomain, PartitionError
from corrkit.setvalue import (
    Box,
    Interval,
    IntervalUnion,
    PiecewiseCorrespondence,
    add_set,
    closure_values,
    constant,
    convexify,
    evaluate,
    graph_adherence,
    intersect,
    limit_membership_check,
    member,
    minkowski_inflate,
    nonempty_region,
    normalize,
)

# --------------------------------------------------------------------------
# brute-force oracle over raw (unnormalized) interval lists


def raw_contains(raw, y):
    return any(
        (lo < y or (y == lo and not lo_open)) and (y < hi or (y == hi and not hi_open))
        for lo, hi, lo_open, hi_open in raw
    )


def raw_distance(raw, y):
    live = [(lo, hi) for lo, hi, lo_open, hi_open in raw if lo < hi or (lo == hi and not lo_open and not hi_open)]
    if not live:
        return np.inf
    return min(max(lo - y, 0.0, y - hi) for lo, hi in live)


endpoint = st.integers(-8, 8).map(lambda k: k / 2)
raw_interval = st.tuples(endpoint, endpoint, st.booleans(), st.booleans()).map(
    lambda t: (min(t[0], t[1]), max(t[0], t[1]), t[2], t[3])
)
raw_union = st.lists(raw_interval, max_size=4)


def build(raw):
    return IntervalUnion([Interval(lo, hi, a, b) for lo, hi, a, b in raw])


def probes(*raws):
    pts = {-5.0, 5.0}
    for raw in raws:
        for lo, hi, _, _ in raw:
            for v in (lo, hi):
                pts.update((v, v - 0.25, v + 0.25, v - 1e-9, v + 1e-9))
    return sorted(pts)


@given(raw_union)
def test_normalization_preserves_membership(raw):
    S = build(raw)
    for y in probes(raw):
        assert (y in S) == raw_contains(raw, y)


@given(raw_union)
def test_normalization_invariants_and_idempotence(raw):
    S = build(raw)
    ivs = S.intervals
    for iv in ivs:
        assert iv.lo <= iv.hi
        if iv.lo == iv.hi:
            assert not iv.lo_open and not iv.hi_open
    for a, b in zip(ivs, ivs[1:]):
        assert a.hi < b.lo or (a.hi == b.lo and a.hi_open and b.lo_open)
    assert normalize(normalize(ivs)) == normalize(ivs) == tuple(ivs)
    assert str(IntervalUnion.parse(str(S))) == str(S)


@given(raw_union, raw_union)
def test_boolean_algebra(ra, rb):
    A, B = build(ra), build(rb)
    for y in probes(ra, rb):
        assert (y in (A & B)) == (raw_contains(ra, y) and raw_contains(rb, y))
        assert (y in (A | B)) == (raw_contains(ra, y) or raw_contains(rb, y))


@given(raw_union, st.sampled_from([0.25, 0.5, 1.0]))
def test_closure_and_inflation_match_distance(raw, eps):
    S = build(raw)
    clo, inf_c, inf_o = S.closure(), S.inflate(eps), S.inflate(eps, closed=False)
    for y in probes(raw):
        d = raw_distance(raw, y)
        assert (y in clo) == (d == 0)
        assert (y in inf_c) == (d <= eps)
        assert (y in inf_o) == (d < eps)
        if np.isfinite(d):
            assert S.distance(y) == pytest.approx(d)


@given(raw_union)
def test_closure_grows_and_hull_contains(raw):
    S = build(raw)
    for y in probes(raw):
        if y in S:
            assert y in S.closure() and y in S.hull()


# --------------------------------------------------------------------------
# the three-piece example and reference values


def test_ex1_values():
    T = fx.ex1()
    assert str(evaluate(T, 2)) == "[-2, 0]"
    assert str(evaluate(T, 1)) == "[0, 2]"
    assert str(evaluate(T, 3)) == "(0, 2]"
    assert len(T.cells) == 3


def test_ex1_boundaries_exact():
    T = fx.ex1()
    assert 0 in T(2) and 0 not in T(2.0000001) and 0 in T(1.9999999)
    with pytest.raises(OutsideDomain):
        T(4.5)


def test_member_examples():
    assert member(IntervalUnion.parse("[-2, 0]"), 0)
    assert not member(IntervalUnion.parse("(0, 2]"), 0)
    assert not member(IntervalUnion.empty(), 1)


def test_closure_values_examples():
    T = fx.ex1()
    assert str(closure_values(T)(3)) == "[0, 2]"
    P = fx.econ1().agents[0].P
    assert closure_values(P)(0.9).is_empty


def test_convexify_examples():
    assert str(convexify(IntervalUnion.parse("[0, 1] U [2, 3]"))) == "[0, 3]"
    assert str(convexify(IntervalUnion.parse("(0, 1)"))) == "(0, 1)"
    assert convexify(IntervalUnion.empty()).is_empty


def test_intersect_examples():
    a, b = IntervalUnion.parse("[0, 2]"), IntervalUnion.parse("(1, 3)")
    assert str(a & b) == "(1, 2]"
    assert (a & IntervalUnion.parse("[3, 4]")).is_empty
    T = fx.ex1()
    F = constant(["[0, 4]"], "[-2, 2]", "[-2, 0]")
    assert str(intersect(T, F)(1)) == "[0, 0]"
    with pytest.raises(DomainMismatch):
        intersect(T, fx.constant_unit())


def test_minkowski_examples():
    T = constant(["[0, 1]"], "[0, 4]", "[0, 1]")
    assert str(minkowski_inflate(T, 0.5, Interval.closed(0, 4))(0.3)) == "[0, 1.5]"
    P = fx.econ1().agents[0].P
    assert minkowski_inflate(P, 0.5)(0.9).is_empty
    S = IntervalUnion.parse("[-2, 0] U (0, 2]")
    inflated = S.inflate(0.1).clip(Interval.closed(-2, 2))
    assert str(inflated) == "[-2, 2]"
    ys = np.linspace(-3, 3, 6001)
    dense = [raw_distance([(-2, 0, False, False), (0, 2, True, False)], y) <= 0.1 and -2 <= y <= 2 for y in ys]
    assert np.array_equal(inflated.contains_many(ys), np.array(dense))


def test_minkowski_monotone():
    T = fx.ex1()
    xs = np.linspace(0, 4, 1001)
    for e1, e2 in [(0.01, 0.1), (0.1, 0.5)]:
        small, big = minkowski_inflate(T, e1), minkowski_inflate(T, e2)
        assert all(small(x).issubset(big(x)) for x in xs)


def test_graph_adherence_examples():
    T = fx.ex1()
    assert str(graph_adherence(T, 2)) == "[-2, 2]"
    assert str(graph_adherence(T, [2], [0.5, 0.1, 0.01])) == "[-2, 2]"
    assert str(graph_adherence(T, 1)) == "[0, 2]"
    assert str(graph_adherence(T, 3, [0.1, 0.01])) == "[0, 2]"
    C = fx.constant_unit()
    assert str(graph_adherence(C, 0.3)) == "[0, 1]"


def test_graph_adherence_oracle(rng):
    """Cells meeting the closed ball: union of their closed values."""
    T = fx.alternating()
    for x in rng.uniform(0, 1, 50):
        for delta in (0.2, 0.05):
            got = graph_adherence(T, x, [delta])
            oracle = IntervalUnion.empty()
            for y in np.linspace(max(0, x - delta), min(1, x + delta), 2001):
                oracle = oracle | T(y).closure()
            assert oracle.issubset(got)


def test_limit_membership_examples():
    B = fx.ex1()
    assert limit_membership_check(B, 2, 1.5, [2.0**-k for k in range(1, 21)])
    assert limit_membership_check(B, 1, 0.5, [0.1])
    C = constant(["[0, 1]"], "[0, 2]", "[0, 1]")
    assert not limit_membership_check(C, 0.5, 1.1, [0.1 * 2.0**-k for k in range(5)])


def test_closure_grows_on_grid():
    T = fx.ex1()
    clT = closure_values(T)
    ys = np.linspace(-2, 2, 41)
    for x in np.linspace(0, 4, 1001):
        v, c = T(x), clT(x)
        assert all((y not in v) or (y in c) for y in ys)


def test_partition_errors():
    with pytest.raises(PartitionError):
        PiecewiseCorrespondence(["[0, 2]"], "[0, 1]", [(["[0, 1]"], "[0, 1]"), (["[1, 2]"], "[0, 1]")])
    with pytest.raises(PartitionError):
        PiecewiseCorrespondence(["[0, 2]"], "[0, 1]", [(["[0, 1)"], "[0, 1]"), (["(1, 2]"], "[0, 1]")])
    with pytest.raises(ValueError):
        PiecewiseCorrespondence(["[0, 1]"], "[0, 1]", [(["[0, 1]"], "[0, 3]")])


def test_two_dimensional_locate():
    T = PiecewiseCorrespondence(
        ["[0, 1]", "[0, 1]"],
        "[0, 1]",
        [
            (["[0, 0.5]", "[0, 1]"], "[0, 0.2]"),
            (["(0.5, 1]", "[0, 0.5)"], "[0.3, 0.4]"),
            (["(0.5, 1]", "[0.5, 1]"], "[0.6, 1]"),
        ],
    )
    assert str(T([0.5, 0.9])) == "[0, 0.2]"
    assert str(T([0.7, 0.5])) == "[0.6, 1]"
    assert str(T([0.7, 0.49])) == "[0.3, 0.4]"
    assert str(graph_adherence(T, [0.5, 0.5])) == "[0, 0.2] U [0.3, 0.4] U [0.6, 1]"


def test_add_set_and_region():
    A = fx.ex1()
    S = add_set(A, "[0, 1]", "[-2, 2]")
    assert str(S(2)) == "[-2, 1]"
    P = fx.econ1().agents[0].P
    W = nonempty_region(P)
    assert W.contains([0.4]) and not W.contains([0.41]) and W.is_proper and W.is_box


def test_box_parse_and_corners():
    b = Box.parse(["[0, 1)", "(2, 3]"])
    assert b.contains([0, 3]) and not b.contains([1, 3]) and b.closure_contains([1, 2])
    assert len(b.corners()) == 4
