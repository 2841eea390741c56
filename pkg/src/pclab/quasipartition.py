"""Invariant quasi-partitions built from backward orbits of the cuts.

For each cut ``x_i`` the expanding map ``g`` is iterated until the orbit
enters the gap set ``G = [0, 1) - f([0, 1))``. Because ``g`` inverts ``f`` on
its image, the trail ``x_i, g(x_i), ..., g^{q_i}(x_i)`` is the chain of
``f``-preimages of ``x_i``. Removing every trail point from (0, 1) leaves
finitely many open intervals ``J_l`` which ``f`` maps into one another; the
induced transition ``tau`` certifies that every itinerary is eventually
periodic.

Component indices are 0-based; ``eta`` values are 1-based branch digits.
"""

from __future__ import annotations

import math
from bisect import bisect_left
from dataclasses import dataclass
from enum import Enum

from .errors import InvariantViolation, QuasiPartitionError
from .intervals import Interval, IntervalSet, Where
from .maps import ExpandingMap, PiecewiseContraction, build_inverse, gap_set, pc_image
from .orbits import ItineraryWord, detect_g_connection


class HitVerdict(str, Enum):
    INTERIOR = "hit-interior"
    BOUNDARY = "hit-boundary"
    EXHAUSTED = "budget-exhausted"


@dataclass(frozen=True)
class GapHit:
    """Backward orbit of cut ``cut`` (1-based) until it reaches the gap set.

    ``q`` is the hitting time when ``verdict`` is ``INTERIOR`` and the index of
    the last trail point otherwise.
    """

    cut: int
    q: int
    trail: tuple
    verdict: HitVerdict


def default_budget(f: PiecewiseContraction, g: ExpandingMap | None = None, gaps: IntervalSet | None = None) -> int:
    """``10 * ceil(log(1 / shortest gap component) / log(expansion))``."""
    g = g or build_inverse(f.system)
    gaps = gaps if gaps is not None else gap_set(f)
    lengths = [float(c.length) for c in gaps if not c.is_point]
    shortest = min(lengths)
    c = float(g.expansion)
    return max(10, 10 * math.ceil(math.log(1 / shortest) / math.log(c)))


def gap_hitting_time(
    f: PiecewiseContraction,
    g: ExpandingMap,
    i: int,
    budget: int | None = None,
    gaps: IntervalSet | None = None,
) -> GapHit:
    """Iterate ``g`` from cut ``i`` until the orbit lands in the gap set.

    Stops with ``HitVerdict.INTERIOR`` at the first iterate inside the
    interior of ``G``; ``BOUNDARY`` when an iterate lands on the boundary of
    ``G`` (or on 1), which only happens at g-connections; ``EXHAUSTED`` after
    ``budget`` applications of ``g``.
    """
    if not 1 <= i <= len(f.cuts):
        raise ValueError(f"cut index {i} out of range 1..{len(f.cuts)}")
    gaps = gaps if gaps is not None else gap_set(f)
    if budget is None:
        budget = default_budget(f, g, gaps)
    b = f.backend
    y = f.cuts[i - 1]
    trail = [y]
    for step in range(budget + 1):
        loc = gaps.locate(y) if b.cmp(y, 1) < 0 else None
        if loc is None or loc.where is Where.BOUNDARY:
            return GapHit(i, step, tuple(trail), HitVerdict.BOUNDARY)
        if loc.where is Where.INTERIOR:
            return GapHit(i, step, tuple(trail), HitVerdict.INTERIOR)
        if step == budget:
            break
        y = g(y)
        trail.append(y)
    return GapHit(i, budget, tuple(trail), HitVerdict.EXHAUSTED)


@dataclass(frozen=True)
class QuasiPartition:
    """Components ``J_l``, hull ``H`` and the transition maps.

    Attributes
    ----------
    hull : tuple
        Sorted finite set ``H``; the components are the gaps between
        consecutive points of ``{0} + H + {1}``.
    components : tuple of Interval
        Open intervals ``J_0, ..., J_{m-1}``, left to right.
    tau : tuple of int
        ``f(J_l)`` is contained in ``J_{tau[l]}``.
    eta : tuple of int
        ``J_l`` is contained in the continuity interval ``I_{eta[l]}``.
    hits : tuple of GapHit
        One per cut; the trails are the sets ``Q_i``.
    """

    f: PiecewiseContraction
    hull: tuple
    components: tuple
    tau: tuple
    eta: tuple
    hits: tuple

    @property
    def m(self) -> int:
        return len(self.components)

    @property
    def q(self) -> int:
        return max((h.q for h in self.hits), default=0)

    @property
    def trails(self) -> tuple:
        return tuple(h.trail for h in self.hits)

    def component_of(self, x) -> int | None:
        """Index of the component containing ``x``, or ``None`` for ``x`` in ``H`` or ``x = 0``."""
        return _component_index(self.f.backend, self.hull, x)


def _component_index(b, hull, x):
    if b.cmp(x, 0) <= 0 or b.cmp(x, 1) >= 0:
        return None
    k = bisect_left(hull, x)
    if k < len(hull) and b.eq(hull[k], x):
        return None
    if k > 0 and b.eq(hull[k - 1], x):
        return None
    return k


def _dedupe_sorted(b, points):
    out = []
    for p in sorted(points):
        if not out or not b.eq(out[-1], p):
            out.append(p)
    return tuple(out)


def components_from_hull(f: PiecewiseContraction, hull) -> tuple:
    b = f.backend
    ends = (b(0),) + tuple(hull) + (b(1),)
    return tuple(Interval(lo, hi, False, False) for lo, hi in zip(ends, ends[1:]))


def build_quasi_partition(
    f: PiecewiseContraction,
    g: ExpandingMap | None = None,
    budget: int | None = None,
    k_max: int | None = None,
) -> QuasiPartition:
    """Run the backward-orbit construction for ``f``.

    Raises :class:`QuasiPartitionError` (reason ``"g-connection"``,
    ``"hit-boundary"`` or ``"budget-exhausted"``) when the construction does
    not apply, and :class:`InvariantViolation` when the resulting components
    fail the invariance check. Passing ``k_max`` first scans for
    g-connections up to that horizon.
    """
    if f.general:
        raise QuasiPartitionError(
            "general-mode", "the quasi-partition pipeline needs a map with disjoint images in (0, 1)"
        )
    g = g or build_inverse(f.system)
    b = f.backend
    if k_max:
        conn = detect_g_connection(f, g, k_max)
        if conn is not None:
            raise QuasiPartitionError(
                "g-connection", f"g^{conn.k}(x_{conn.i}) = x_{conn.j}", {"connection": conn}
            )
    gaps = gap_set(f)
    if budget is None:
        budget = default_budget(f, g, gaps)
    hits = tuple(gap_hitting_time(f, g, i, budget, gaps) for i in range(1, len(f.cuts) + 1))
    for hit in hits:
        if hit.verdict is not HitVerdict.INTERIOR:
            raise QuasiPartitionError(
                hit.verdict.value,
                f"backward orbit of x_{hit.cut} ended with {hit.verdict.value} after {hit.q} steps",
                {"hit": hit},
            )
    hull = _dedupe_sorted(b, [p for h in hits for p in h.trail])
    components = components_from_hull(f, hull)
    tau, eta = [], []
    for ell, J in enumerate(components):
        mid = (J.lo + J.hi) / 2
        branch = f.branch_index(mid)
        eta.append(branch)
        target = _component_index(b, hull, f.branches[branch - 1](mid))
        if target is None:
            raise InvariantViolation(
                f"f maps the midpoint of J_{ell} onto the hull", {"component": ell}
            )
        witness = _p2_witness(f, components, hull, ell, branch, target)
        if witness is not None:
            raise InvariantViolation(
                f"f(J_{ell}) is not inside J_{target}; rerun on the rational backend",
                {"component": ell, "witness": witness},
            )
        tau.append(target)
    return QuasiPartition(f, hull, components, tuple(tau), tuple(eta), hits)


def _p2_witness(f, components, hull, ell, branch, target):
    """Endpoint test for f(J) within J_target; returns an offending point or None."""
    b = f.backend
    J, T = components[ell], components[target]
    phi = f.branches[branch - 1]
    u, v = phi(J.lo), phi(J.hi)
    lo, hi = (u, v) if u <= v else (v, u)
    if b.lt(lo, T.lo):
        return lo
    if b.lt(T.hi, hi):
        return hi
    k = bisect_left(hull, lo)
    while k < len(hull) and b.le(hull[k], lo):
        k += 1
    if k < len(hull) and b.lt(hull[k], hi):
        return hull[k]
    return None


# -- verification ------------------------------------------------------------


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str = ""
    witness: object = None


@dataclass(frozen=True)
class VerificationReport:
    checks: tuple

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def failures(self) -> tuple:
        return tuple(c for c in self.checks if not c.passed)

    def __str__(self):
        lines = [f"{'PASS' if c.passed else 'FAIL'} {c.name}{': ' + c.detail if c.detail else ''}" for c in self.checks]
        return "\n".join(lines)


def forward_images(f: PiecewiseContraction, s: IntervalSet, count: int) -> list:
    """``[s, f(s), ..., f^count(s)]``."""
    out = [s]
    for _ in range(count):
        out.append(pc_image(f, out[-1]))
    return out


def _some_point(s: IntervalSet):
    c = s[0]
    return c.lo if c.is_point else (c.lo + c.hi) / 2


def return_powers(q: int) -> tuple:
    return (q + 1, q + 2, 2 * q + 3)


def verify_quasi_partition(f: PiecewiseContraction, qp: QuasiPartition) -> VerificationReport:
    """Re-check a quasi-partition from scratch with interval-set arithmetic.

    Checks the hull contents, the invariance ``f(J_l) in J_{tau(l)}`` (as an
    exact image of the open interval), branch containment, the trail
    structure, pairwise disjointness of ``G, f(G), ..., f^q(G)``, containment
    of every trail point in the interior ``E`` of their union, and
    ``f^p(E) & E = {}`` for three powers ``p > q``.
    """
    b = f.backend
    checks = []
    hull = qp.hull
    missing = [x for x in f.cuts if not any(b.eq(x, h) for h in hull)]
    outside = [h for h in hull if not (b.lt(0, h) and b.lt(h, 1))]
    unsorted = any(not b.lt(u, v) for u, v in zip(hull, hull[1:]))
    expected = components_from_hull(f, hull)
    comps_ok = IntervalSet(qp.components, b) == IntervalSet(expected, b) and len(qp.components) == len(hull) + 1
    p1 = not missing and not outside and not unsorted and comps_ok
    checks.append(
        Check(
            "hull: finite hull containing every cut",
            p1,
            "" if p1 else f"missing cuts {missing}, outside (0,1) {outside}, sorted={not unsorted}, components match={comps_ok}",
            (missing or outside or None),
        )
    )
    if len(qp.tau) != qp.m or len(qp.eta) != qp.m:
        checks.append(Check("invariance: f(J) in J_tau", False, "tau/eta length differs from component count"))
        return VerificationReport(tuple(checks))

    bad = []
    for ell, J in enumerate(qp.components):
        image = pc_image(f, IntervalSet((J,), b))
        target = IntervalSet((qp.components[qp.tau[ell]],), b)
        extra = image.difference(target)
        if extra:
            bad.append((ell, _some_point(extra)))
    checks.append(
        Check(
            "invariance: f(J) in J_tau",
            not bad,
            "" if not bad else "; ".join(f"f(J_{l}) leaves J_{qp.tau[l]} at {b.format(w)}" for l, w in bad),
            bad[0][1] if bad else None,
        )
    )

    bad_eta = []
    for ell, J in enumerate(qp.components):
        I = f.intervals[qp.eta[ell] - 1]
        if not IntervalSet((J,), b).issubset(IntervalSet((I,), b)):
            bad_eta.append(ell)
    checks.append(
        Check("eta: each J inside its continuity interval", not bad_eta, "" if not bad_eta else f"components {bad_eta}")
    )

    G = gap_set(f)
    trail_bad = []
    for hit in qp.hits:
        tr = hit.trail
        if hit.verdict is not HitVerdict.INTERIOR or hit.q != len(tr) - 1:
            trail_bad.append(f"x_{hit.cut}: verdict {hit.verdict.value}")
            continue
        if G.locate(tr[-1]).where is not Where.INTERIOR:
            trail_bad.append(f"x_{hit.cut}: last trail point not interior to G")
        if any(G.locate(y).member for y in tr[:-1]):
            trail_bad.append(f"x_{hit.cut}: earlier trail point in G")
        for k in range(len(tr) - 1):
            if not b.eq(f(tr[k + 1]), tr[k]):
                trail_bad.append(f"x_{hit.cut}: f(trail[{k + 1}]) != trail[{k}]")
                break
        if not b.eq(tr[0], f.cuts[hit.cut - 1]):
            trail_bad.append(f"x_{hit.cut}: trail does not start at the cut")
    checks.append(
        Check("trails: backward chains ending inside G", not trail_bad, "; ".join(trail_bad))
    )

    q = qp.q
    layers = forward_images(f, G, q)
    overlap = [(a, c) for a in range(len(layers)) for c in range(a + 1, len(layers)) if layers[a].intersect(layers[c])]
    checks.append(
        Check(
            f"gap layers: G, f(G), ..., f^{q}(G) pairwise disjoint",
            not overlap,
            "" if not overlap else f"overlapping powers {overlap}",
        )
    )

    union = IntervalSet((), b)
    for layer in layers:
        union = union.union(layer)
    E = union.interior()
    not_in_E = [y for h in qp.hits for y in h.trail if E.locate(y).where is not Where.INTERIOR]
    checks.append(
        Check(
            "trails in E: every trail point in the interior E of the union",
            not not_in_E,
            "" if not not_in_E else f"points {[b.format(y) for y in not_in_E]}",
            not_in_E[0] if not_in_E else None,
        )
    )

    meets = []
    for p in return_powers(q):
        img = E
        for _ in range(p):
            img = pc_image(f, img)
        if img.intersect(E):
            meets.append(p)
    checks.append(
        Check(
            f"no return: f^p(E) disjoint from E for p in {return_powers(q)}",
            not meets,
            "" if not meets else f"powers {meets}",
        )
    )
    return VerificationReport(tuple(checks))


def symbolic_itinerary_from_tau(qp: QuasiPartition, start: int) -> ItineraryWord:
    """Exact eventually periodic itinerary of every point of component ``start``.

    Follows ``l_{k+1} = tau(l_k)`` until the first repeat and reads the digits
    through ``eta``; ``preperiod + period <= m`` always.
    """
    seen = {}
    path = []
    ell = start
    while ell not in seen:
        seen[ell] = len(path)
        path.append(ell)
        ell = qp.tau[ell]
    s = seen[ell]
    return ItineraryWord(tuple(qp.eta[l] for l in path), s, len(path) - s)
