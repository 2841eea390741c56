import dataclasses

import pytest

from conftest import q
from pclab.errors import QuasiPartitionError
from pclab.maps import Affine, PiecewiseContraction, build_inverse, gap_set, validate_system
from pclab.quasipartition import (
    HitVerdict,
    QuasiPartition,
    build_quasi_partition,
    return_powers,
    components_from_hull,
    default_budget,
    gap_hitting_time,
    symbolic_itinerary_from_tau,
    verify_quasi_partition,
)


@pytest.fixture
def deep(s2):
    # x_1 = phi_1(phi_1(z)) with z = 0.07 in the interior of G
    z = q("0.07")
    phi = s2.branches[0]
    return PiecewiseContraction(s2, (phi(phi(z)),))


@pytest.fixture
def three():
    s = validate_system([Affine("0.2", "0.05"), Affine("0.2", "0.4"), Affine("0.2", "0.75")])
    return PiecewiseContraction(s, (q("0.3"), q("0.9426")))


def test_hitting_time_immediate(f_right, g2):
    hit = gap_hitting_time(f_right, g2, 1)
    assert (hit.q, hit.trail, hit.verdict) == (0, (q("0.3"),), HitVerdict.INTERIOR)


def test_hitting_time_cut_in_image(s2, g2):
    f = PiecewiseContraction(s2, (q("0.35"),))
    assert gap_set(f).locate(q("0.35")).where.value == "interior"
    assert gap_hitting_time(f, g2, 1).q == 0


def test_hitting_time_deep_cut(deep, g2):
    assert deep.cuts[0] == q("1363/10000")
    hit = gap_hitting_time(deep, g2, 1)
    assert hit.q == 2
    assert hit.trail == (q("1363/10000"), q("121/1000"), q("7/100"))


def test_hitting_time_verdicts(s2, g2, deep):
    hit = gap_hitting_time(deep, g2, 1, budget=1)
    assert (hit.verdict, len(hit.trail)) == (HitVerdict.EXHAUSTED, 2)
    # 0.1 = phi_1(0) is the open right end of the gap component [0, 0.1)
    f = PiecewiseContraction(s2, (q("0.1"),))
    assert gap_hitting_time(f, g2, 1).verdict is HitVerdict.BOUNDARY
    with pytest.raises(ValueError):
        gap_hitting_time(f, g2, 2)


def test_default_budget(f_right, g2):
    # shortest gap component 0.1, expansion 10/3
    assert default_budget(f_right, g2) == 20


def test_s2_quasi_partition(f_right):
    qp = build_quasi_partition(f_right)
    assert qp.hull == (q("0.3"),)
    assert [(J.lo, J.hi, J.lo_closed, J.hi_closed) for J in qp.components] == [
        (0, q("0.3"), False, False),
        (q("0.3"), 1, False, False),
    ]
    assert qp.tau == (0, 1) and qp.eta == (1, 2)
    assert (qp.q, qp.m) == (0, 2)
    assert verify_quasi_partition(f_right, qp).ok


def test_deep_cut_quasi_partition(deep):
    qp = build_quasi_partition(deep)
    assert qp.hull == (q("7/100"), q("121/1000"), q("1363/10000"))
    assert (qp.q, qp.m) == (2, 4)
    assert qp.tau == (1, 2, 3, 3)
    report = verify_quasi_partition(deep, qp)
    assert report.ok, str(report)


def test_component_count_formula(three):
    qp = build_quasi_partition(three)
    assert sorted(h.q for h in qp.hits) == [0, 1]
    assert qp.m == 1 + sum(h.q + 1 for h in qp.hits) == 4
    assert verify_quasi_partition(three, qp).ok


def test_all_q_zero_gives_m_equal_n(f_right):
    assert build_quasi_partition(f_right).m == f_right.n


def test_construction_refuses(s2, f1, deep):
    with pytest.raises(QuasiPartitionError) as err:
        build_quasi_partition(PiecewiseContraction(s2, (q("4/9"),)), k_max=200)
    assert err.value.reason == "g-connection"
    with pytest.raises(QuasiPartitionError) as err:
        build_quasi_partition(PiecewiseContraction(s2, (q("0.1"),)))
    assert err.value.reason == "hit-boundary"
    with pytest.raises(QuasiPartitionError) as err:
        build_quasi_partition(deep, budget=1)
    assert err.value.reason == "budget-exhausted"
    with pytest.raises(QuasiPartitionError) as err:
        build_quasi_partition(f1)
    assert err.value.reason == "general-mode"


def test_adversarial_tau_fails_with_witness(f_right):
    qp = build_quasi_partition(f_right)
    bad = dataclasses.replace(qp, tau=(1, 1))
    report = verify_quasi_partition(f_right, bad)
    assert not report.ok
    p2 = next(c for c in report.failures if c.name.startswith("invariance"))
    assert p2.witness is not None
    assert "FAIL" in str(report)


def test_missing_cut_fails_hull(deep):
    qp = build_quasi_partition(deep)
    hull = qp.hull[:-1]
    bad = dataclasses.replace(qp, hull=hull, components=components_from_hull(deep, hull), tau=(1, 2, 2), eta=(1, 1, 1))
    report = verify_quasi_partition(deep, bad)
    assert any(c.name.startswith("hull") for c in report.failures)


def _p2_holds(f, hull):
    comps = components_from_hull(f, hull)
    tau, eta = [], []
    for J in comps:
        mid = (J.lo + J.hi) / 2
        i = f.branch_index(mid)
        y = f.branches[i - 1](mid)
        eta.append(i)
        tau.append(next((k for k, T in enumerate(comps) if T.lo < y < T.hi), 0))
    qp = QuasiPartition(f, tuple(hull), comps, tuple(tau), tuple(eta), ())
    report = verify_quasi_partition(f, qp)
    return next(c for c in report.checks if c.name.startswith("invariance")).passed


@pytest.mark.parametrize("fixture", ["deep", "three"])
def test_hull_minimality(fixture, request):
    f = request.getfixturevalue(fixture)
    qp = build_quasi_partition(f)
    assert _p2_holds(f, qp.hull)
    cuts = set(f.cuts)
    for h in qp.hull:
        if h in cuts:
            continue
        reduced = [p for p in qp.hull if p != h]
        assert not _p2_holds(f, reduced), f"invariance survives without {h}"


def test_backward_consistency_and_trail_consistency(deep):
    qp = build_quasi_partition(deep)
    for hit in qp.hits:
        for k in range(hit.q):
            assert deep(hit.trail[k + 1]) == hit.trail[k]
    # every preimage of a trail point that exists is again a trail point
    trail_points = {y for h in qp.hits for y in h.trail}
    g = build_inverse(deep.system)
    for y in trail_points:
        x = g(y)
        if deep(x) == y and y not in gap_set(deep):
            assert x in trail_points


def test_return_powers():
    assert return_powers(0) == (1, 2, 3)
    assert all(p > 2 for p in return_powers(2))


def test_symbolic_itinerary_from_tau(f_right, deep):
    qp = build_quasi_partition(f_right)
    w0, w1 = symbolic_itinerary_from_tau(qp, 0), symbolic_itinerary_from_tau(qp, 1)
    assert (w0.preperiod, w0.period, w0.expand(4)) == (0, 1, (1, 1, 1, 1))
    assert (w1.preperiod, w1.period, w1.expand(4)) == (0, 1, (2, 2, 2, 2))
    qp = build_quasi_partition(deep)
    for ell in range(qp.m):
        w = symbolic_itinerary_from_tau(qp, ell)
        assert w.preperiod + w.period <= qp.m
