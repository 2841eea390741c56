"""Branch systems, piecewise contractions and their expanding left-inverse.

A :class:`BranchSystem` holds ``n`` injective contractions ``phi_i`` of [0, 1]
whose images ``A_i`` are pairwise disjoint closed subintervals of (0, 1).
Choosing cuts ``0 < x_1 < ... < x_{n-1} < 1`` and a side for each cut gives a
:class:`PiecewiseContraction` ``f`` equal to ``phi_i`` on the i-th continuity
interval. :func:`build_inverse` produces the map ``g`` that inverts every
branch on its image and stretches every complementary gap affinely onto
[0, 1]; ``g(f(x)) == x`` holds for every ``f`` over the same system.

Branch numbers and cut numbers are 1-based, matching the digits of an
itinerary. Partition pieces of ``g`` are addressed by 0-based position.
"""

from __future__ import annotations

import math
from bisect import bisect_left, bisect_right
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Sequence

import numpy as np

from .backend import RATIONAL, Backend, get_backend
from .errors import (
    ContractionError,
    DomainError,
    ImageBoundsError,
    OverlappingImagesError,
    ValidationError,
)
from .intervals import Interval, IntervalSet, normalize


# -- branches ---------------------------------------------------------------


@dataclass(frozen=True)
class Affine:
    """phi(x) = slope * x + intercept."""

    slope: object
    intercept: object
    kind = "affine"

    def with_backend(self, backend: Backend) -> "Affine":
        return Affine(backend(self.slope), backend(self.intercept))

    @property
    def coefficients(self) -> tuple:
        return (self.slope, self.intercept)

    def __call__(self, x):
        return self.slope * x + self.intercept

    def derivative(self, x):
        return self.slope

    def inverse(self, y):
        return (y - self.intercept) / self.slope

    @property
    def increasing(self) -> bool:
        return self.slope > 0

    @property
    def kappa(self):
        return abs(self.slope)

    @property
    def min_slope(self):
        return abs(self.slope)

    def check(self, index: int) -> None:
        if not 0 < abs(self.slope) < 1:
            raise ContractionError(
                f"branch {index}: slope {self.slope} violates 0 < |a| < 1"
            )


@dataclass(frozen=True)
class Quadratic:
    """phi(x) = c0 + c1 x + c2 x^2, monotone on [0, 1]."""

    c0: object
    c1: object
    c2: object
    kind = "quadratic"

    def with_backend(self, backend: Backend) -> "Quadratic":
        if backend.exact:
            raise ValidationError(
                "quadratic branches need square roots for their inverse; use the float backend"
            )
        return Quadratic(backend(self.c0), backend(self.c1), backend(self.c2))

    @property
    def coefficients(self) -> tuple:
        return (self.c0, self.c1, self.c2)

    def __call__(self, x):
        return self.c0 + x * (self.c1 + self.c2 * x)

    def derivative(self, x):
        return self.c1 + 2 * self.c2 * x

    def inverse(self, y):
        # root with c1 + 2 c2 x of the same sign as c1, written to avoid cancellation
        disc = self.c1 * self.c1 + 4 * self.c2 * (y - self.c0)
        if isinstance(disc, np.ndarray):
            root = np.sqrt(np.maximum(disc, 0.0))
        else:
            root = math.sqrt(max(disc, 0.0))
        sigma = 1.0 if self.c1 > 0 else -1.0
        return 2 * (y - self.c0) / (self.c1 + sigma * root)

    @property
    def increasing(self) -> bool:
        return self.c1 > 0

    @property
    def kappa(self):
        return max(abs(self.derivative(0.0)), abs(self.derivative(1.0)))

    @property
    def min_slope(self):
        return min(abs(self.derivative(0.0)), abs(self.derivative(1.0)))

    def check(self, index: int) -> None:
        if self.c2 != 0:
            crit = -self.c1 / (2 * self.c2)
            if 0 <= crit <= 1:
                raise ContractionError(
                    f"branch {index}: critical point {crit} lies in [0, 1]"
                )
        d0, d1 = self.derivative(0.0), self.derivative(1.0)
        if (d0 > 0) != (d1 > 0) or d0 == 0 or d1 == 0:
            raise ContractionError(f"branch {index}: derivative vanishes on [0, 1]")
        if not (abs(d0) < 1 and abs(d1) < 1):
            raise ContractionError(
                f"branch {index}: |D phi| reaches {max(abs(d0), abs(d1))} >= 1"
            )


Branch = Affine | Quadratic


def image_bounds(branch: Branch) -> tuple:
    a, b = branch(0), branch(1)
    return (a, b) if a <= b else (b, a)


def map_interval(branch: Branch, iv: Interval, backend: Backend) -> Interval:
    """Image of ``iv`` under a monotone branch, endpoint flags carried along."""
    a, b = branch(iv.lo), branch(iv.hi)
    if branch.increasing:
        lo, hi, lc, hc = a, b, iv.lo_closed, iv.hi_closed
    else:
        lo, hi, lc, hc = b, a, iv.hi_closed, iv.lo_closed
    if iv.is_point or backend.eq(lo, hi):
        return Interval(lo, lo, True, True)
    if not backend.exact:
        # float images of points of [0, 1) can land a rounding error outside it
        lo, hi = min(max(lo, 0.0), 1.0), min(max(hi, 0.0), 1.0)
    return Interval(lo, hi, lc, hc)


# -- systems ----------------------------------------------------------------


class BranchSystem:
    """A checked family of contraction branches.

    Attributes
    ----------
    branches : tuple
        Branch descriptors, coefficients coerced to ``backend``.
    images : tuple of Interval or None
        Closed images ``A_i`` (``None`` in general mode).
    gaps : tuple of Interval or None
        Components ``B_1, ..., B_{n+1}`` of [0, 1) minus the images, left to
        right (``None`` in general mode).
    kappas : tuple
        Contraction constant of each branch.
    """

    def __init__(self, branches, backend: Backend = RATIONAL, general: bool = False):
        backend = get_backend(backend)
        if not branches:
            raise ValidationError("a branch system needs at least one branch")
        self.backend = backend
        self.general = general
        self.branches = tuple(b.with_backend(backend) for b in branches)
        for i, br in enumerate(self.branches, start=1):
            br.check(i)
        self.kappas = tuple(br.kappa for br in self.branches)
        self.images = None
        self.gaps = None
        if not general:
            self._check_images()

    @property
    def n(self) -> int:
        return len(self.branches)

    @property
    def kappa(self):
        return max(self.kappas)

    def _check_images(self):
        b = self.backend
        bounds = [image_bounds(br) for br in self.branches]
        for i, (lo, hi) in enumerate(bounds, start=1):
            if b.cmp(lo, 0) <= 0 or b.cmp(hi, 1) >= 0:
                raise ImageBoundsError(
                    f"branch {i}: image [{b.format(lo)}, {b.format(hi)}] is not inside (0, 1)"
                )
        order = sorted(range(self.n), key=lambda k: bounds[k][0])
        for k, k2 in zip(order, order[1:]):
            if b.cmp(bounds[k][1], bounds[k2][0]) >= 0:
                raise OverlappingImagesError(
                    f"images of branches {k + 1} and {k2 + 1} intersect"
                )
        self.images = tuple(Interval(lo, hi, True, True) for lo, hi in bounds)
        gaps = []
        prev, prev_closed = b(0), True
        for k in order:
            lo, hi = bounds[k]
            gaps.append(Interval(prev, lo, prev_closed, False))
            prev, prev_closed = hi, False
        gaps.append(Interval(prev, b(1), False, False))
        self.gaps = tuple(gaps)

    def __repr__(self):
        kinds = ", ".join(
            f"{br.kind}({', '.join(self.backend.format(c) for c in br.coefficients)})"
            for br in self.branches
        )
        mode = ", general" if self.general else ""
        return f"BranchSystem([{kinds}], backend={self.backend.name}{mode})"


def validate_system(branches: Sequence[Branch], backend="rational", general=False) -> BranchSystem:
    """Check a list of branch descriptors and return the resulting system.

    Raises :class:`ImageBoundsError`, :class:`OverlappingImagesError` or
    :class:`ContractionError`, each naming the offending branch.
    """
    return BranchSystem(branches, get_backend(backend), general)


# -- the piecewise contraction ---------------------------------------------


class Side(str, Enum):
    """Which continuity interval a cut belongs to."""

    LEFT = "left"
    RIGHT = "right"

    @classmethod
    def parse(cls, value) -> "Side":
        if isinstance(value, Side):
            return value
        v = str(value).lower().removeprefix("attach-")
        try:
            return cls(v)
        except ValueError:
            raise ValidationError(f"unknown side {value!r}; expected 'left' or 'right'") from None


@dataclass(frozen=True)
class ParameterPoint:
    """Cuts ``0 < x_1 < ... < x_{n-1} < 1``."""

    cuts: tuple

    def __post_init__(self):
        prev = 0
        for x in self.cuts:
            if not prev < x:
                raise ValidationError(f"cuts {list(map(str, self.cuts))} are not increasing in (0, 1)")
            prev = x
        if self.cuts and not self.cuts[-1] < 1:
            raise ValidationError(f"cut {self.cuts[-1]} is not below 1")


@dataclass(frozen=True)
class BoundaryAssignment:
    sides: tuple

    @classmethod
    def all(cls, side, count: int) -> "BoundaryAssignment":
        return cls((Side.parse(side),) * count)

    @classmethod
    def enumerate(cls, count: int) -> list["BoundaryAssignment"]:
        """All ``2**count`` assignments, in lexicographic left/right order."""
        out = []
        for mask in range(2**count):
            out.append(
                cls(tuple(Side.RIGHT if (mask >> k) & 1 else Side.LEFT for k in range(count)))
            )
        return out


class PiecewiseContraction:
    """The map equal to branch ``i`` on the continuity interval ``I_i``.

    Parameters
    ----------
    system : BranchSystem
    cuts : sequence of scalars or ParameterPoint
        ``n - 1`` increasing discontinuities in (0, 1).
    sides : sequence, str or BoundaryAssignment, optional
        ``"left"`` puts the cut ``x_i`` in ``I_i``; ``"right"`` puts it in
        ``I_{i+1}``. A single string applies to every cut. Defaults to
        ``"right"``, i.e. ``I_i = [x_{i-1}, x_i)``.
    """

    def __init__(self, system: BranchSystem, cuts, sides=Side.RIGHT):
        b = system.backend
        self.system = system
        self.backend = b
        raw_cuts = cuts.cuts if isinstance(cuts, ParameterPoint) else cuts
        self.params = ParameterPoint(tuple(b(x) for x in raw_cuts))
        if len(self.params.cuts) != system.n - 1:
            raise ValidationError(
                f"{system.n} branches need {system.n - 1} cuts, got {len(self.params.cuts)}"
            )
        if isinstance(sides, BoundaryAssignment):
            sides = sides.sides
        if isinstance(sides, (str, Side)):
            sides = (sides,) * len(self.params.cuts)
        self.assignment = BoundaryAssignment(tuple(Side.parse(s) for s in sides))
        if len(self.assignment.sides) != len(self.params.cuts):
            raise ValidationError("one side is needed per cut")
        self.cuts = self.params.cuts
        self.sides = self.assignment.sides
        self.intervals = self._continuity_intervals()
        self.general = system.general
        if self.general:
            self._check_self_map()

    @property
    def n(self) -> int:
        return self.system.n

    @property
    def branches(self):
        return self.system.branches

    @property
    def endpoints(self) -> tuple:
        """``(x_0, x_1, ..., x_n)`` with ``x_0 = 0`` and ``x_n = 1``."""
        return (self.backend(0),) + self.cuts + (self.backend(1),)

    def _continuity_intervals(self) -> tuple[Interval, ...]:
        ends = self.endpoints
        out = []
        for i in range(self.n):
            lo_closed = i == 0 or self.sides[i - 1] is Side.RIGHT
            hi_closed = i < self.n - 1 and self.sides[i] is Side.LEFT
            out.append(Interval(ends[i], ends[i + 1], lo_closed, hi_closed))
        return tuple(out)

    def _check_self_map(self):
        b = self.backend
        for i, (br, iv) in enumerate(zip(self.branches, self.intervals), start=1):
            a, c = br(iv.lo), br(iv.hi)
            lo, hi = (a, c) if a <= c else (c, a)
            if b.cmp(lo, 0) < 0 or b.cmp(hi, 1) > 0:
                raise ImageBoundsError(f"branch {i} maps I_{i} outside [0, 1)")

    def branch_index(self, x) -> int:
        """1-based index ``i`` with ``x`` in ``I_i``."""
        if not 0 <= x < 1:
            raise DomainError(f"x = {x} is outside [0, 1)")
        cuts = self.cuts
        k = bisect_left(cuts, x)  # number of cuts strictly below x
        b = self.backend
        if not b.exact:
            if k > 0 and b.eq(cuts[k - 1], x):
                k -= 1
        if k < len(cuts) and b.eq(cuts[k], x):
            return k + 1 if self.sides[k] is Side.LEFT else k + 2
        return k + 1

    def __call__(self, x):
        return self.branches[self.branch_index(x) - 1](x)

    def __repr__(self):
        b = self.backend
        cuts = ", ".join(b.format(c) for c in self.cuts)
        sides = ",".join(s.value for s in self.sides)
        return f"PiecewiseContraction({self.system!r}, cuts=({cuts}), sides=({sides}))"


def pc_eval(f: PiecewiseContraction, x):
    return f(x)


def pc_branch(f: PiecewiseContraction, x) -> int:
    return f.branch_index(x)


def pc_image(f: PiecewiseContraction, s: IntervalSet) -> IntervalSet:
    """Exact image ``f(s)`` of an interval set contained in [0, 1)."""
    b = f.backend
    pieces = []
    for br, iv in zip(f.branches, f.intervals):
        part = s.intersect(IntervalSet((iv,), b))
        for comp in part:
            pieces.append(map_interval(br, comp, b))
    return normalize(pieces, b)


def pc_image_set(f: PiecewiseContraction) -> IntervalSet:
    """``f([0, 1))`` as a union of the images of the continuity intervals."""
    b = f.backend
    return normalize([map_interval(br, iv, b) for br, iv in zip(f.branches, f.intervals)], b)


def gap_set(f: PiecewiseContraction) -> IntervalSet:
    """The gap set ``G = [0, 1) minus f([0, 1))``."""
    return pc_image_set(f).complement()


# -- the expanding left-inverse ---------------------------------------------


@dataclass(frozen=True)
class Piece:
    """One partition piece of the expanding map.

    ``label`` is ``"A<i>"`` for the image of branch ``i`` or ``"B<j>"`` for
    the j-th gap. ``forward`` maps the piece onto [0, 1]; ``backward`` is its
    inverse from [0, 1] onto the closure of the piece.
    """

    label: str
    interval: Interval
    forward: Callable = field(repr=False)
    backward: Callable = field(repr=False)
    increasing: bool = True
    min_slope: object = None
    slope: object = None  # constant slope for affine pieces, else None


class ExpandingMap:
    """Left-inverse of every map over a :class:`BranchSystem`.

    Ties at piece boundaries go to the closed images ``A_i``; ``g(0) = 0`` and
    ``g(1) = 1``.
    """

    def __init__(self, system: BranchSystem):
        if system.general:
            raise ValidationError(
                "general-mode systems have no expanding left-inverse; images are not disjoint in (0, 1)"
            )
        b = system.backend
        self.system = system
        self.backend = b
        pieces = []
        for i, (br, img) in enumerate(zip(system.branches, system.images), start=1):
            slope = (1 / br.slope) if isinstance(br, Affine) else None
            pieces.append(
                Piece(f"A{i}", img, br.inverse, br, br.increasing, 1 / br.kappa, slope)
            )
        last = len(system.gaps)
        for j, gap in enumerate(system.gaps, start=1):
            iv = Interval(gap.lo, gap.hi, gap.lo_closed, j == last)
            lo, width = gap.lo, gap.hi - gap.lo
            inv_w = 1 / width
            pieces.append(
                Piece(
                    f"B{j}",
                    iv,
                    (lambda x, lo=lo, s=inv_w: (x - lo) * s),
                    (lambda y, lo=lo, w=width: lo + y * w),
                    True,
                    inv_w,
                    inv_w,
                )
            )
        pieces.sort(key=lambda p: p.interval.lo)
        self.pieces = tuple(pieces)
        self._los = [p.interval.lo for p in self.pieces]
        self.expansion = min(p.min_slope for p in self.pieces)

    @property
    def d(self) -> int:
        return len(self.pieces)

    def piece_index(self, x) -> int:
        if not 0 <= x <= 1:
            raise DomainError(f"x = {x} is outside [0, 1]")
        b = self.backend
        los = self._los
        k = bisect_right(los, x) - 1
        if not b.exact:
            if k + 1 < len(los) and b.eq(x, los[k + 1]):
                k += 1
        if k > 0 and not self.pieces[k].interval.lo_closed and b.eq(x, los[k]):
            k -= 1
        return k

    def __call__(self, x):
        y = self.pieces[self.piece_index(x)].forward(x)
        if not self.backend.exact:
            y = min(max(y, 0.0), 1.0)
        return y

    def __repr__(self):
        return f"ExpandingMap({self.system!r}, d={self.d})"


def build_inverse(system: BranchSystem) -> ExpandingMap:
    return ExpandingMap(system)


def g_eval(g: ExpandingMap, x):
    return g(x)


def g_branch(g: ExpandingMap, x) -> int:
    """0-based index of the partition piece of ``g`` containing ``x``."""
    return g.piece_index(x)
