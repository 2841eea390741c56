from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from pclab.backend import FLOAT, RATIONAL as Q
from pclab.errors import ValidationError
from pclab.intervals import Interval, IntervalSet, Where, complement_in_unit, interval_set, normalize


def iset(*parts, backend=Q):
    return interval_set(parts, backend)


# -- worked examples -------------------------------------------------------------------


def test_adjacent_half_open_merge():
    s = iset(("0", "0.5", True, False), ("0.5", "1", True, False))
    assert s == IntervalSet.unit(Q)
    assert len(s) == 1


def test_normalize_empty_and_canonical():
    assert len(normalize([], Q)) == 0
    s = iset(("0.1", "0.4", True, True), ("0.5", "0.8", True, True))
    assert [str(c) for c in s] == ["[1/10, 2/5]", "[1/2, 4/5]"]


def test_open_touching_does_not_merge():
    s = iset(("0", "0.5", True, False), ("0.5", "1", False, False))
    assert len(s) == 2
    assert Q("0.5") not in s


def test_complement_example():
    s = iset(("0.1", "0.19", True, False), ("0.59", "0.8", True, False))
    c = complement_in_unit(s)
    assert c == iset(("0", "0.1", True, False), ("0.19", "0.59", True, False), ("0.8", "1", True, False))


def test_complement_trivial_cases():
    assert complement_in_unit(IntervalSet.empty(Q)) == IntervalSet.unit(Q)
    assert len(complement_in_unit(IntervalSet.unit(Q))) == 0


def test_locate():
    s = iset(("0.19", "0.59", True, False))
    assert s.locate(Q("0.19")) == (Where.BOUNDARY, 0, True)
    assert s.locate(Q("0.59")) == (Where.BOUNDARY, 0, False)
    assert s.locate(Q("0.3")) == (Where.INTERIOR, 0, True)
    assert s.locate(Q("0.7")) == (Where.EXTERIOR, None, False)


def test_intersections():
    a = iset(("0", "0.5", True, False))
    b = iset(("0.5", "1", True, False))
    assert not a.intersect(b)
    assert a.is_disjoint(b)
    closed = iset(("0", "0.5", True, True))
    assert closed.intersect(b) == IntervalSet([Interval.point(Q("0.5"))], Q)
    assert iset(("0.1", "0.4", True, True)).intersect(iset(("0.2", "0.8", True, True))) == iset(("0.2", "0.4", True, True))


@pytest.mark.parametrize(
    "lo,hi,lc,hc",
    [("0.5", "0.4", True, True), ("-0.1", "0.4", True, True), ("0.2", "1.5", True, True), ("0.3", "0.3", True, False)],
)
def test_malformed_interval_rejected(lo, hi, lc, hc):
    with pytest.raises(ValidationError, match="malformed interval"):
        Interval(Q(lo), Q(hi), lc, hc)


def test_interior_drops_points_and_opens_ends():
    s = IntervalSet([Interval.point(Q("0.2")), Interval(Q("0.3"), Q("0.6"), True, True)], Q)
    assert s.interior() == iset(("0.3", "0.6", False, False))


def test_length_and_records():
    s = iset(("0.1", "0.4", True, True), ("0.5", "0.8", True, False))
    assert s.length == Q("0.6")
    assert s.to_records()[1] == {"lo": "1/2", "hi": "4/5", "lo_closed": True, "hi_closed": False}


def test_float_snapping_prevents_slivers():
    a = iset((0.0, 0.3, True, False), backend=FLOAT)
    b = iset((0.1 + 0.2, 1.0, True, False), backend=FLOAT)
    assert len(a.union(b)) == 1
    assert not a.intersect(b)


# -- properties ------------------------------------------------------------------------

GRID = [Fraction(k, 40) for k in range(41)]


@st.composite
def raw_intervals(draw):
    lo = draw(st.sampled_from(GRID))
    hi = draw(st.sampled_from([g for g in GRID if g >= lo]))
    if lo == hi:
        return Interval.point(Q(lo))
    return Interval(Q(lo), Q(hi), draw(st.booleans()), draw(st.booleans()))


interval_lists = st.lists(raw_intervals(), max_size=6)
PROBES = [Q(Fraction(k, 1000)) for k in range(1000)] + [Q(g) for g in GRID[:-1]]


def member_raw(raw, x):
    for iv in raw:
        if (iv.lo < x < iv.hi) or (x == iv.lo and iv.lo_closed) or (x == iv.hi and iv.hi_closed):
            return True
    return False


def canonical(s):
    comps = list(s)
    for u, v in zip(comps, comps[1:]):
        if u.hi > v.lo:
            return False
        if u.hi == v.lo and (u.hi_closed or v.lo_closed):
            return False
    return True


@settings(max_examples=150, deadline=None)
@given(interval_lists)
def test_normalize_preserves_membership_and_is_canonical(raw):
    s = normalize(raw, Q)
    assert canonical(s)
    assert all((x in s) == member_raw(raw, x) for x in PROBES)


@settings(max_examples=100, deadline=None)
@given(interval_lists, st.randoms(use_true_random=False))
def test_normalize_idempotent_and_order_independent(raw, rnd):
    s = normalize(raw, Q)
    assert normalize(list(s), Q) == s
    shuffled = list(raw)
    rnd.shuffle(shuffled)
    assert normalize(shuffled, Q) == s


@settings(max_examples=150, deadline=None)
@given(interval_lists)
def test_complement_involution(raw):
    s = normalize(raw, Q)
    # restrict to [0, 1): the involution holds on subsets of the half-open unit interval
    s = s.intersect(IntervalSet.unit(Q))
    assert complement_in_unit(complement_in_unit(s)) == s
    c = complement_in_unit(s)
    assert all((x in c) != (x in s) for x in PROBES)


@settings(max_examples=150, deadline=None)
@given(interval_lists, interval_lists)
def test_intersection_is_pointwise_and(ra, rb):
    a, b = normalize(ra, Q), normalize(rb, Q)
    c = a.intersect(b)
    assert canonical(c)
    assert all((x in c) == ((x in a) and (x in b)) for x in PROBES)
    assert a.is_disjoint(b) == (not c)
    u = a.union(b)
    assert all((x in u) == ((x in a) or (x in b)) for x in PROBES)
