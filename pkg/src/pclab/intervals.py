"""Finite unions of subintervals of [0, 1] with per-endpoint openness flags.

Intervals carry explicit ``lo_closed`` / ``hi_closed`` flags because the
half-open continuity intervals of a piecewise contraction make endpoint
membership load-bearing. Every :class:`IntervalSet` is kept canonical:
components sorted, pairwise disjoint and non-adjacent.

>>> from pclab.backend import RATIONAL as Q
>>> s = IntervalSet.from_raw([Interval(Q("0"), Q("1/2"), True, False),
...                           Interval(Q("1/2"), Q("1"), True, False)], Q)
>>> print(s)
[0, 1)
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Iterator, NamedTuple, Sequence

from .backend import RATIONAL, Backend, format_scalar
from .errors import ValidationError


@dataclass(frozen=True)
class Interval:
    lo: object
    hi: object
    lo_closed: bool = True
    hi_closed: bool = False

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValidationError(f"malformed interval {self}: lo > hi")
        if self.lo < 0 or self.hi > 1:
            raise ValidationError(f"malformed interval {self}: outside [0, 1]")
        if self.lo == self.hi and not (self.lo_closed and self.hi_closed):
            raise ValidationError(
                f"malformed interval {self}: a degenerate interval must be a closed point"
            )

    @classmethod
    def closed(cls, lo, hi):
        return cls(lo, hi, True, True)

    @classmethod
    def open(cls, lo, hi):
        return cls(lo, hi, False, False)

    @classmethod
    def point(cls, x):
        return cls(x, x, True, True)

    @property
    def is_point(self) -> bool:
        return self.lo == self.hi

    @property
    def length(self):
        return self.hi - self.lo

    def __str__(self):
        left = "[" if self.lo_closed else "("
        right = "]" if self.hi_closed else ")"
        return f"{left}{format_scalar(self.lo)}, {format_scalar(self.hi)}{right}"

    def to_record(self, backend: Backend = RATIONAL) -> dict:
        return {
            "lo": backend.format(self.lo),
            "hi": backend.format(self.hi),
            "lo_closed": self.lo_closed,
            "hi_closed": self.hi_closed,
        }


class Where(str, Enum):
    INTERIOR = "interior"
    BOUNDARY = "boundary"
    EXTERIOR = "exterior"


class Location(NamedTuple):
    """Result of :meth:`IntervalSet.locate`.

    ``where`` is ``INTERIOR`` when x lies in the topological interior of
    component ``index``; ``BOUNDARY`` when x is an endpoint of that component
    (``member`` says whether the endpoint is included); ``EXTERIOR`` otherwise,
    with ``index`` set to ``None``.
    """

    where: Where
    index: int | None
    member: bool


def _make(backend: Backend, lo, lo_closed, hi, hi_closed) -> Interval | None:
    c = backend.cmp(lo, hi)
    if c > 0:
        return None
    if c == 0:
        if lo_closed and hi_closed:
            return Interval(lo, lo, True, True)
        return None
    return Interval(lo, hi, lo_closed, hi_closed)


class IntervalSet:
    """Canonical finite union of intervals in [0, 1].

    Instances are immutable. Build them through :meth:`from_raw` (which
    normalizes) unless the components are already known to be canonical.
    """

    __slots__ = ("_components", "backend")

    def __init__(self, components: Iterable[Interval] = (), backend: Backend = RATIONAL):
        object.__setattr__(self, "_components", tuple(components))
        object.__setattr__(self, "backend", backend)

    def __setattr__(self, name, value):
        raise AttributeError("IntervalSet is immutable")

    @classmethod
    def from_raw(cls, raw: Iterable[Interval], backend: Backend = RATIONAL) -> "IntervalSet":
        return normalize(raw, backend)

    @classmethod
    def empty(cls, backend: Backend = RATIONAL) -> "IntervalSet":
        return cls((), backend)

    @classmethod
    def unit(cls, backend: Backend = RATIONAL) -> "IntervalSet":
        return cls((Interval(backend(0), backend(1), True, False),), backend)

    @property
    def components(self) -> tuple[Interval, ...]:
        return self._components

    def __iter__(self) -> Iterator[Interval]:
        return iter(self._components)

    def __len__(self):
        return len(self._components)

    def __getitem__(self, k) -> Interval:
        return self._components[k]

    def __bool__(self):
        return bool(self._components)

    def __eq__(self, other):
        if not isinstance(other, IntervalSet):
            return NotImplemented
        if len(self) != len(other):
            return False
        b = self.backend
        for u, v in zip(self, other):
            if (
                not b.eq(u.lo, v.lo)
                or not b.eq(u.hi, v.hi)
                or u.lo_closed != v.lo_closed
                or u.hi_closed != v.hi_closed
            ):
                return False
        return True

    def __hash__(self):
        return hash(self._components) if self.backend.exact else id(self)

    def __repr__(self):
        return f"IntervalSet({str(self)})"

    def __str__(self):
        if not self._components:
            return "{}"
        return " U ".join(str(c) for c in self._components)

    def __contains__(self, x) -> bool:
        return self.locate(x).member

    @property
    def length(self):
        """Lebesgue length, the sum of component lengths."""
        return sum((c.length for c in self._components), self.backend(0))

    def locate(self, x) -> Location:
        b = self.backend
        lo, hi = 0, len(self._components)
        # binary search for the last component with lo <= x
        while lo < hi:
            mid = (lo + hi) // 2
            if b.cmp(self._components[mid].lo, x) <= 0:
                lo = mid + 1
            else:
                hi = mid
        for k in (lo - 1, lo):
            if not 0 <= k < len(self._components):
                continue
            iv = self._components[k]
            c_lo = b.cmp(x, iv.lo)
            c_hi = b.cmp(x, iv.hi)
            if c_lo > 0 and c_hi < 0:
                return Location(Where.INTERIOR, k, True)
            if c_lo == 0:
                return Location(Where.BOUNDARY, k, iv.lo_closed)
            if c_hi == 0:
                return Location(Where.BOUNDARY, k, iv.hi_closed)
        return Location(Where.EXTERIOR, None, False)

    def complement(self) -> "IntervalSet":
        return complement_in_unit(self)

    def intersect(self, other: "IntervalSet") -> "IntervalSet":
        return intersect(self, other)

    def union(self, other: "IntervalSet") -> "IntervalSet":
        return normalize(list(self) + list(other), self.backend)

    def difference(self, other: "IntervalSet") -> "IntervalSet":
        return intersect(self, complement_in_unit(other))

    def is_disjoint(self, other: "IntervalSet") -> bool:
        return is_disjoint(self, other)

    def interior(self) -> "IntervalSet":
        """Topological interior in the real line; point components vanish."""
        return IntervalSet(
            (Interval(c.lo, c.hi, False, False) for c in self._components if not c.is_point),
            self.backend,
        )

    def issubset(self, other: "IntervalSet") -> bool:
        return self.intersect(other) == self

    def to_records(self) -> list[dict]:
        return [c.to_record(self.backend) for c in self._components]


def _sort_key(backend: Backend):
    # closed lower endpoints sort first so point components merge deterministically
    if backend.exact:
        return lambda iv: (iv.lo, not iv.lo_closed)
    return lambda iv: (float(iv.lo), not iv.lo_closed)


def normalize(raw: Iterable[Interval], backend: Backend = RATIONAL) -> IntervalSet:
    """Canonical form of a finite union of intervals.

    >>> from pclab.backend import RATIONAL as Q
    >>> print(normalize([Interval(Q("0.1"), Q("0.4"), True, True),
    ...                  Interval(Q("0.5"), Q("0.8"), True, True)]))
    [1/10, 2/5] U [1/2, 4/5]
    """
    items = []
    for iv in raw:
        if not isinstance(iv, Interval):
            raise ValidationError(f"expected Interval, got {iv!r}")
        items.append(iv)
    if not items:
        return IntervalSet((), backend)
    items.sort(key=_sort_key(backend))
    b = backend
    out: list[list] = []
    for iv in items:
        if out:
            lo, lo_c, hi, hi_c = out[-1]
            c = b.cmp(iv.lo, hi)
            if c < 0 or (c == 0 and (hi_c or iv.lo_closed)):
                ch = b.cmp(iv.hi, hi)
                if ch > 0:
                    out[-1][2], out[-1][3] = iv.hi, iv.hi_closed
                elif ch == 0:
                    out[-1][3] = hi_c or iv.hi_closed
                if b.cmp(iv.lo, lo) == 0:
                    out[-1][1] = lo_c or iv.lo_closed
                continue
        out.append([iv.lo, iv.lo_closed, iv.hi, iv.hi_closed])
    comps = []
    for lo, lo_c, hi, hi_c in out:
        if b.cmp(lo, hi) == 0:
            comps.append(Interval(lo, lo, True, True))
        else:
            comps.append(Interval(lo, hi, lo_c, hi_c))
    return IntervalSet(comps, backend)


def complement_in_unit(s: IntervalSet) -> IntervalSet:
    """Return [0, 1) minus ``s``.

    >>> from pclab.backend import RATIONAL as Q
    >>> print(complement_in_unit(IntervalSet.empty(Q)))
    [0, 1)
    """
    b = s.backend
    prev, prev_closed = b(0), True
    out = []
    for iv in s:
        piece = _make(b, prev, prev_closed, iv.lo, not iv.lo_closed)
        if piece is not None:
            out.append(piece)
        prev, prev_closed = iv.hi, not iv.hi_closed
    if b.cmp(prev, 1) < 0:
        out.append(Interval(prev, b(1), prev_closed, False))
    return IntervalSet(out, b)


def _intersect_pair(b: Backend, u: Interval, v: Interval) -> Interval | None:
    c = b.cmp(u.lo, v.lo)
    if c > 0:
        lo, lo_c = u.lo, u.lo_closed
    elif c < 0:
        lo, lo_c = v.lo, v.lo_closed
    else:
        lo, lo_c = u.lo, u.lo_closed and v.lo_closed
    c = b.cmp(u.hi, v.hi)
    if c < 0:
        hi, hi_c = u.hi, u.hi_closed
    elif c > 0:
        hi, hi_c = v.hi, v.hi_closed
    else:
        hi, hi_c = u.hi, u.hi_closed and v.hi_closed
    return _make(b, lo, lo_c, hi, hi_c)


def intersect(a: IntervalSet, other: IntervalSet) -> IntervalSet:
    """Exact intersection by a two-pointer sweep over sorted components."""
    b = a.backend
    out = []
    i = j = 0
    A, B = a.components, other.components
    while i < len(A) and j < len(B):
        piece = _intersect_pair(b, A[i], B[j])
        if piece is not None:
            out.append(piece)
        c = b.cmp(A[i].hi, B[j].hi)
        if c < 0:
            i += 1
        elif c > 0:
            j += 1
        else:
            i += 1
            j += 1
    return normalize(out, b)


def is_disjoint(a: IntervalSet, other: IntervalSet) -> bool:
    return not intersect(a, other)


def interval_set(pairs: Sequence[tuple], backend: Backend = RATIONAL) -> IntervalSet:
    """Convenience constructor from ``(lo, hi, lo_closed, hi_closed)`` tuples."""
    return normalize(
        [Interval(backend(lo), backend(hi), lc, hc) for lo, hi, lc, hc in pairs], backend
    )
