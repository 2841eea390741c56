"""Periodic orbits, phantom attractors and basins.

Every cycle of the transition map ``tau`` of a quasi-partition carries one
periodic orbit: the return map of the cycle is a contraction of the first
component into itself, and its unique fixed point generates the orbit.
:func:`direct_attractor_oracle` reaches the same orbits by brute-force
iteration and is kept independent of the quasi-partition route so the two
can be cross-checked.

A *phantom attractor* is a point that orbits accumulate on but which is not
periodic: the branch word of the limit is broken by the branch the map
actually uses at the limit point.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .errors import InvariantViolation, NumericalError
from .maps import Affine, PiecewiseContraction
from .quasipartition import QuasiPartition, build_quasi_partition, verify_quasi_partition


@dataclass(frozen=True)
class PeriodicOrbit:
    points: tuple
    word: tuple
    stable: bool
    cycle: tuple = ()
    power: int | None = None  # iterate of f whose fixed point was solved for

    @property
    def period(self) -> int:
        return len(self.points)


@dataclass(frozen=True)
class Phantom:
    point: object
    word: tuple
    reason: str


@dataclass(frozen=True)
class Undetermined:
    reason: str = "no recurrence within the probe window"


@dataclass(frozen=True)
class BasinEntry:
    x: object
    orbit: int | None
    iterations: int


@dataclass
class AttractorReport:
    """Orbits found for one map, with sampled basin attribution.

    ``mode`` is ``"quasi-partition"`` for maps with disjoint images and
    ``"direct"`` for general-mode maps, where orbits and phantoms come from
    the brute-force oracle.
    """

    orbits: list
    basins: list = field(default_factory=list)
    phantoms: list = field(default_factory=list)
    mode: str = "quasi-partition"
    qp: QuasiPartition | None = None

    @property
    def r(self) -> int:
        return len(self.orbits)

    @property
    def unattributed(self) -> list:
        return [e for e in self.basins if e.orbit is None]

    def basin_histogram(self) -> dict:
        hist = {}
        for e in self.basins:
            hist[e.orbit] = hist.get(e.orbit, 0) + 1
        return hist

    def convergence_stats(self) -> dict:
        its = [e.iterations for e in self.basins if e.orbit is not None]
        if not its:
            return {"attributed": 0, "mean_iterations": None, "max_iterations": None}
        return {"attributed": len(its), "mean_iterations": sum(its) / len(its), "max_iterations": max(its)}


# -- cycles of tau -----------------------------------------------------------


def tau_cycles(tau: Sequence[int]) -> list[list[int]]:
    """All cycles of a finite functional graph, each rotated to start at its smallest index.

    >>> tau_cycles((1, 1, 0))
    [[1]]
    """
    state = [0] * len(tau)  # 0 unseen, 1 on current path, 2 done
    cycles = []
    for start in range(len(tau)):
        path = []
        v = start
        while state[v] == 0:
            state[v] = 1
            path.append(v)
            v = tau[v]
        if state[v] == 1:
            cyc = path[path.index(v):]
            k = cyc.index(min(cyc))
            cycles.append(cyc[k:] + cyc[:k])
        for u in path:
            state[u] = 2
    return sorted(cycles)


# -- fixed points of branch words ------------------------------------------


def _compose_affine(f, word):
    alpha, beta = f.backend(1), f.backend(0)
    for w in word:
        br = f.branches[w - 1]
        alpha, beta = br.slope * alpha, br.slope * beta + br.intercept
    return alpha, beta


def _word_map(f, word, y):
    for w in word:
        y = f.branches[w - 1](y)
    return y


def word_fixed_point(f: PiecewiseContraction, word: Sequence[int], start=None, max_iter: int = 100_000):
    """Fixed point of ``phi_{w_{p-1}} o ... o phi_{w_0}`` on the real line.

    Returns ``(y, power)``. Affine words on the rational backend are solved
    exactly, squaring the word first when its composite reverses
    orientation. Otherwise the composite contraction is iterated from
    ``start`` until the Banach error bound drops below ``1e-14``.
    """
    p = len(word)
    affine = all(isinstance(f.branches[w - 1], Affine) for w in word)
    if affine and f.backend.exact:
        alpha, _ = _compose_affine(f, word)
        power = p if alpha > 0 else 2 * p
        alpha, beta = _compose_affine(f, tuple(word) * (power // p))
        return beta / (1 - alpha), power
    kappa = 1.0
    for w in word:
        kappa *= float(f.branches[w - 1].kappa)
    y = f.backend(0.5) if start is None else start
    for _ in range(max_iter):
        y_next = _word_map(f, word, y)
        step = abs(y_next - y)
        y = y_next
        if step == 0 or step * kappa / (1 - kappa) <= 1e-14:
            return y, p
    raise NumericalError(f"word {word} did not converge in {max_iter} iterations")


def _closes(f, y, z) -> bool:
    b = f.backend
    return b.eq(y, z) if b.exact else abs(y - z) <= 1e-12


def _orbit_from(f, y, word):
    """Follow f from y along word; Phantom at the first point whose branch breaks it."""
    pts = [y]
    for t, w in enumerate(word):
        pt = pts[-1]
        if not 0 <= pt < 1 or f.branch_index(pt) != w:
            return Phantom(pt, tuple(word), f"branch at the limit breaks the word at position {t}")
        pts.append(f(pt))
    if not _closes(f, pts[-1], y):
        return Phantom(y, tuple(word), "orbit does not close")
    return tuple(pts[:-1])


def is_stable(f: PiecewiseContraction, points) -> bool:
    b = f.backend
    return not any(b.eq(p, x) for p in points for x in f.cuts)


def locate_periodic_orbit(f: PiecewiseContraction, qp: QuasiPartition, cycle: Sequence[int]):
    """Periodic orbit carried by a cycle of ``tau``, or a :class:`Phantom`."""
    word = tuple(qp.eta[l] for l in cycle)
    J = qp.components[cycle[0]]
    y, power = word_fixed_point(f, word, start=(J.lo + J.hi) / 2)
    b = f.backend
    if not (b.lt(J.lo, y) and b.lt(y, J.hi)):
        return Phantom(y, word, "fixed point of the return map is not inside its component")
    pts = _orbit_from(f, y, word)
    if isinstance(pts, Phantom):
        return pts
    return PeriodicOrbit(pts, word, is_stable(f, pts), tuple(cycle), power)


def fixed_points(f: PiecewiseContraction) -> list:
    """Points with ``f(y) == y``: fixed points of each branch lying in its own interval."""
    out = []
    for i in range(1, f.n + 1):
        y, _ = word_fixed_point(f, (i,))
        if 0 <= y < 1 and f.branch_index(y) == i and _closes(f, f(y), y):
            out.append(y)
    return out


# -- basins ------------------------------------------------------------------


def attribute_point(f: PiecewiseContraction, orbits, x, tol: float = 1e-8, max_iter: int = 100_000):
    """Iterate ``x`` until it is within ``tol`` of an orbit point with the matching branch.

    Returns ``(orbit index or None, iterations)``.
    """
    targets = [(pt, j, orb.word[t]) for j, orb in enumerate(orbits) for t, pt in enumerate(orb.points)]
    y = x
    for k in range(max_iter + 1):
        branch = f.branch_index(y)
        for pt, j, w in targets:
            if w == branch and abs(y - pt) <= tol:
                return j, k
        if k < max_iter:
            y = f.branches[branch - 1](y)
    return None, max_iter


def sample_points(backend, count: int, rng=None) -> list:
    """``count`` initial points: a midpoint grid, or uniform draws when ``rng`` is given."""
    if rng is None:
        return [backend((2 * k + 1)) / (2 * count) for k in range(count)]
    from fractions import Fraction

    draws = rng.random(count)
    if backend.exact:
        return [backend(Fraction(float(u)).limit_denominator(10**6)) for u in draws]
    return [float(u) for u in draws]


def attractor_set(
    f: PiecewiseContraction,
    samples=100,
    rng=None,
    tol: float = 1e-8,
    max_iter: int = 100_000,
    qp: QuasiPartition | None = None,
    k_max: int | None = 200,
    budget: int | None = None,
) -> AttractorReport:
    """All periodic orbits of ``f`` with basins attributed on sampled points.

    ``samples`` is a count (grid or ``rng`` draws) or an explicit sequence of
    initial points. For maps with disjoint images the orbits come from the
    cycles of ``tau`` and ``1 <= r <= n`` is enforced; general-mode maps fall
    back to :func:`direct_attractor_oracle` and may report ``r = 0`` with
    phantom attractors.
    """
    b = f.backend
    xs = sample_points(b, samples, rng) if isinstance(samples, int) else [b(x) for x in samples]
    if f.general:
        return _direct_report(f, xs)
    if qp is None:
        qp = build_quasi_partition(f, budget=budget, k_max=k_max)
        report = verify_quasi_partition(f, qp)
        if not report.ok:
            raise InvariantViolation("quasi-partition failed verification", {"report": str(report)})
    orbits = []
    for cyc in tau_cycles(qp.tau):
        res = locate_periodic_orbit(f, qp, cyc)
        if isinstance(res, Phantom):
            raise InvariantViolation(
                f"tau cycle {cyc} produced a phantom attractor at {b.format(res.point)}",
                {"cycle": cyc, "phantom": res},
            )
        orbits.append(res)
    seen = set()
    for orb in orbits:
        for pt in orb.points:
            key = pt if b.exact else round(float(pt), 10)
            if key in seen:
                raise InvariantViolation("two tau cycles produced the same orbit")
            seen.add(key)
    if not 1 <= len(orbits) <= f.n:
        raise InvariantViolation(f"found r = {len(orbits)} periodic orbits for n = {f.n}")
    basins = []
    for x in xs:
        j, its = attribute_point(f, orbits, x, tol, max_iter)
        basins.append(BasinEntry(x, j, its))
    return AttractorReport(orbits, basins, [], "quasi-partition", qp)


def _same_orbit(points_a, points_b, tol) -> bool:
    if len(points_a) != len(points_b):
        return False
    return all(any(abs(u - v) <= tol for v in points_b) for u in points_a)


def _direct_report(f, xs, tol: float = 1e-10) -> AttractorReport:
    orbits, phantoms, basins = [], [], []
    for x in xs:
        res = direct_attractor_oracle(f, x)
        if isinstance(res, PeriodicOrbit):
            for j, orb in enumerate(orbits):
                if _same_orbit(orb.points, res.points, tol):
                    break
            else:
                orbits.append(res)
                j = len(orbits) - 1
            basins.append(BasinEntry(x, j, 0))
        else:
            if isinstance(res, Phantom) and not any(abs(p.point - res.point) <= tol for p in phantoms):
                phantoms.append(res)
            basins.append(BasinEntry(x, None, 0))
    return AttractorReport(orbits, basins, phantoms, "direct", None)


# -- brute-force oracle --------------------------------------------------------


def direct_attractor_oracle(f: PiecewiseContraction, x, burn_in: int = 200, probe_len: int = 100, tol: float = 1e-9):
    """Find the attractor of ``x`` by iterating ``f`` directly.

    After ``burn_in`` steps, the least ``p`` for which the probe window's
    branch word is ``p``-periodic and the last point recurs within ``tol`` is
    taken as the period. The limit is refined by solving for the fixed point
    of that branch word and then checked against the branches ``f`` really
    uses there. Returns a :class:`PeriodicOrbit`, a :class:`Phantom` or an
    :class:`Undetermined`.
    """
    y = f.backend(x)
    for _ in range(burn_in):
        y = f(y)
    pts, digits = [y], []
    for _ in range(probe_len):
        i = f.branch_index(y)
        digits.append(i)
        y = f.branches[i - 1](y)
        pts.append(y)
    L = probe_len
    for p in range(1, L // 2 + 1):
        if any(digits[k] != digits[k + p] for k in range(L - p)):
            continue
        if abs(pts[L] - pts[L - p]) > tol:
            continue
        word = tuple(digits[:p])
        y_star, power = word_fixed_point(f, word, start=pts[0])
        res = _orbit_from(f, y_star, word)
        if isinstance(res, Phantom):
            return res
        return PeriodicOrbit(res, word, is_stable(f, res), (), power)
    return Undetermined()
