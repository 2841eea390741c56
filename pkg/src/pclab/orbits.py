"""Forward and backward orbits, itineraries and g-connections."""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

from .maps import ExpandingMap, PiecewiseContraction


@dataclass(frozen=True)
class ItineraryWord:
    """A finite digit word, optionally certified eventually periodic.

    When ``period`` is set, ``digits`` holds at least the preperiod followed
    by one full period, and :meth:`expand` extends it indefinitely. A word
    with ``period is None`` is only known up to ``len(digits)``.
    """

    digits: tuple
    preperiod: int | None = None
    period: int | None = None

    @property
    def classification(self) -> str:
        return "truncated" if self.period is None else "eventually-periodic"

    def expand(self, length: int) -> tuple:
        if self.period is None:
            if length > len(self.digits):
                raise ValueError(f"truncated word has only {len(self.digits)} digits")
            return self.digits[:length]
        s, p = self.preperiod, self.period
        return tuple(self.digits[k] if k < s else self.digits[s + (k - s) % p] for k in range(length))

    def __str__(self):
        if self.period is None:
            return "".join(map(str, self.digits)) + "..."
        s, p = self.preperiod, self.period
        head = "".join(map(str, self.digits[:s]))
        tail = "".join(map(str, self.digits[s : s + p]))
        return f"{head}({tail})"


class Periodicity(NamedTuple):
    preperiod: int
    period: int


class GConnection(NamedTuple):
    """``g^k(x_i) == x_j`` for cut ``i`` (1-based) and endpoint ``j`` in 0..n."""

    i: int
    j: int
    k: int


def forward_orbit(f: PiecewiseContraction, x, n_steps: int) -> list:
    """``[x, f(x), ..., f^N(x)]``."""
    x = f.backend(x)
    out = [x]
    for _ in range(n_steps):
        x = f(x)
        out.append(x)
    return out


def g_orbit(g: ExpandingMap, x, n_steps: int) -> list:
    x = g.backend(x)
    out = [x]
    for _ in range(n_steps):
        x = g(x)
        out.append(x)
    return out


def coded_orbit(f: PiecewiseContraction, x, n_steps: int):
    """Points ``x_0 .. x_N`` and digits ``d_0 .. d_{N-1}`` in one pass."""
    pts = [x]
    digits = []
    for _ in range(n_steps):
        i = f.branch_index(x)
        digits.append(i)
        x = f.branches[i - 1](x)
        pts.append(x)
    return pts, digits


def _tail_candidates(digits, min_repeats: int = 3):
    """Yield ``(s, p)`` where the word is p-periodic from s on, over a long enough tail."""
    n = len(digits)
    for p in range(1, n // min_repeats + 1):
        s = 0
        for k in range(n - p - 1, -1, -1):
            if digits[k] != digits[k + p]:
                s = k + 1
                break
        if n - s >= max(min_repeats * p, n // 2):
            yield Periodicity(s, p)


def least_period(digits, min_repeats: int = 3) -> Periodicity | None:
    """Smallest ``(s, p)`` with ``digits[k] == digits[k + p]`` for all ``k >= s``.

    Only pairs whose periodic tail covers at least ``min_repeats`` periods and
    half of the word are accepted, so short tails do not count as evidence.
    """
    return min(_tail_candidates(digits, min_repeats), default=None)


def detect_eventual_period(
    f: PiecewiseContraction, x, horizon: int = 200, tol: float = 1e-9
) -> Periodicity | None:
    """Heuristic eventual period of the itinerary of ``x``.

    The digit word over ``horizon`` steps must be periodic from the preperiod
    on, and the orbit must have settled: ``|f^H(x) - f^(H-p)(x)| <= tol``.
    Returns ``None`` when no pair qualifies within the horizon; this is a
    finite-horizon heuristic, not a certificate.
    """
    if horizon < 2:
        raise ValueError("horizon must be at least 2")
    return _settled_period(*coded_orbit(f, f.backend(x), horizon), tol)


def _settled_period(pts, digits, tol):
    settled = (c for c in _tail_candidates(digits) if abs(pts[-1] - pts[-1 - c.period]) <= tol)
    return min(settled, default=None)


def itinerary(f: PiecewiseContraction, x, n_steps: int, classify: bool = True, tol: float = 1e-9) -> ItineraryWord:
    """Digits ``d_0 .. d_{N-1}`` of ``x``, with the heuristic classification attached."""
    pts, digits = coded_orbit(f, f.backend(x), n_steps)
    word = ItineraryWord(tuple(digits))
    if classify and n_steps >= 3:
        per = _settled_period(pts, digits, tol)
        if per is not None:
            word = ItineraryWord(word.digits, per.preperiod, per.period)
    return word


def detect_g_connection(f: PiecewiseContraction, g: ExpandingMap, k_max: int = 200) -> GConnection | None:
    """First ``(i, j, k)`` with ``g^k(x_i) == x_j``, ``1 <= k <= k_max``, or ``None``.

    On the rational backend the comparison is exact, so the answer is decided
    up to the horizon.
    """
    if k_max < 1:
        raise ValueError("k_max must be at least 1")
    b = f.backend
    ends = f.endpoints
    if b.exact:
        lookup = {}
        for j, e in enumerate(ends):
            lookup.setdefault(e, j)
    for i, x in enumerate(f.cuts, start=1):
        y = x
        for k in range(1, k_max + 1):
            y = g(y)
            if b.exact:
                j = lookup.get(y)
                if j is not None:
                    return GConnection(i, j, k)
            else:
                for j, e in enumerate(ends):
                    if b.eq(y, e):
                        return GConnection(i, j, k)
    return None
