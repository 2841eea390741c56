"""Presets, parameter sampling and campaign driver.

A campaign draws parameter points uniformly from the simplex of increasing
cuts, runs the whole pipeline on each resulting map and tallies the
outcomes. Discarded samples (g-connections, exhausted budgets, boundary
hits) are data: their rate estimates the exceptional null set. Invariant
violations are recorded and never masked.

Every trial draws from its own generator seeded by ``(seed, trial)`` so
results do not depend on execution order.
"""

from __future__ import annotations

import json
import time
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from .attractors import attribute_point, attractor_set, direct_attractor_oracle, PeriodicOrbit
from .backend import get_backend
from .errors import InvariantViolation, QuasiPartitionError, ValidationError
from .maps import (
    Affine,
    BoundaryAssignment,
    BranchSystem,
    ParameterPoint,
    PiecewiseContraction,
    Quadratic,
    Side,
    build_inverse,
)
from .orbits import detect_g_connection, itinerary
from .quasipartition import build_quasi_partition, symbolic_itinerary_from_tau, verify_quasi_partition

SCHEMA_VERSION = 1


# -- presets -------------------------------------------------------------------


@dataclass(frozen=True)
class Preset:
    name: str
    system: BranchSystem
    cuts: tuple | None = None
    sides: tuple | None = None
    description: str = ""

    def contraction(self, cuts=None, sides=None) -> PiecewiseContraction:
        cuts = cuts if cuts is not None else self.cuts
        if cuts is None:
            raise ValidationError(f"preset {self.name!r} has no default cuts; pass some")
        sides = sides if sides is not None else (self.sides or Side.RIGHT)
        return PiecewiseContraction(self.system, cuts, sides)


PRESET_NAMES = ("example-4.1-f1", "example-4.1-f2", "example-4.1-f2-eps", "S2", "S3", "S4")


def preset(name: str, backend=None, eps="1/10") -> Preset:
    """Build a named preset system.

    ``example-4.1-f2-eps`` takes the shift ``eps`` in (0, 1/4).
    """
    if name in ("example-4.1-f1", "example-4.1-f2", "example-4.1-f2-eps"):
        b = get_backend(backend or "rational")
        shift = b(0)
        if name.endswith("eps"):
            shift = b(eps)
            if not 0 < shift < b("1/4"):
                raise ValidationError(f"eps must lie in (0, 1/4), got {eps}")
        branches = [Affine(b("1/2"), b("1/4") + shift), Affine(b("1/2"), b("-1/4") + shift)]
        side = Side.RIGHT if name == "example-4.1-f1" else Side.LEFT
        desc = {
            "example-4.1-f1": "x/2 + 1/4 on [0,1/2), x/2 - 1/4 on [1/2,1); no periodic orbit",
            "example-4.1-f2": "same branches with the cut attached left; fixed point 1/2",
            "example-4.1-f2-eps": f"f2 shifted up by eps = {b.format(shift)}; no fixed point",
        }[name]
        system = BranchSystem(branches, b, general=True)
        return Preset(name, system, (b("1/2"),), (side,), desc)
    if name == "S2":
        b = get_backend(backend or "rational")
        system = BranchSystem([Affine("0.3", "0.1"), Affine("0.3", "0.5")], b)
        return Preset(name, system, None, None, "two affine branches of slope 3/10")
    if name == "S3":
        b = get_backend(backend or "float")
        system = BranchSystem([Quadratic(0.15, 0.25, 0.05), Affine(0.3, 0.62)], b)
        return Preset(name, system, None, None, "one quadratic and one affine branch")
    if name == "S4":
        b = get_backend(backend or "rational")
        system = BranchSystem(
            [Affine("0.15", "0.05"), Affine("0.15", "0.3"), Affine("-0.15", "0.7"), Affine("0.15", "0.8")], b
        )
        return Preset(name, system, None, None, "four affine branches, one decreasing")
    raise ValidationError(f"unknown preset {name!r}; available: {', '.join(PRESET_NAMES)}")


def presets(backend=None) -> dict:
    return {name: preset(name, backend) for name in PRESET_NAMES}


# -- sampling ------------------------------------------------------------------


def sample_omega(n: int, rng: np.random.Generator, backend="rational", max_retries: int = 100) -> ParameterPoint:
    """``n - 1`` sorted uniform cuts; rational cuts have denominator at most 10**6."""
    if n < 2:
        raise ValidationError("sampling cuts needs n >= 2")
    b = get_backend(backend)
    for _ in range(max_retries):
        u = np.sort(rng.random(n - 1))
        if b.exact:
            cuts = [b(Fraction(float(v)).limit_denominator(10**6)) for v in u]
        else:
            cuts = [float(v) for v in u]
        if all(0 < c < 1 for c in cuts) and all(x < y for x, y in zip(cuts, cuts[1:])):
            return ParameterPoint(tuple(cuts))
    raise ValidationError(f"could not draw {n - 1} distinct cuts in {max_retries} attempts")


def random_affine_system(n: int, rng: np.random.Generator, backend="rational", denominator: int = 1000) -> BranchSystem:
    """Random affine system with disjoint images in (0, 1).

    Image lengths and gap lengths are drawn from a Dirichlet split of the
    unit interval, then rounded to multiples of ``1/denominator``; slopes
    take random signs.
    """
    b = get_backend(backend)
    while True:
        w = rng.dirichlet(np.ones(2 * n + 1))
        ticks = np.round(np.cumsum(w) * denominator).astype(int)
        ends = [0] + list(ticks[:-1]) + [denominator]
        lengths = np.diff(ends)
        if (lengths <= 0).any():
            continue
        image_lengths = lengths[1::2]
        if (image_lengths >= denominator).any():
            continue
        branches = []
        order = rng.permutation(n)
        slots = []
        for k in range(n):
            lo = Fraction(int(ends[2 * k + 1]), denominator)
            hi = Fraction(int(ends[2 * k + 2]), denominator)
            slots.append((lo, hi))
        for i in range(n):
            lo, hi = slots[order[i]]
            slope = hi - lo
            if rng.random() < 0.5:
                branches.append(Affine(slope, lo))
            else:
                branches.append(Affine(-slope, hi))
        return BranchSystem(branches, b)


# -- trials --------------------------------------------------------------------


@dataclass
class CampaignConfig:
    system: str | dict = "S2"
    trials: int = 100
    seed: int = 0
    backend: str | None = None
    assignment: str = "all-right"  # all-left | all-right | enumerate-all
    k_max: int = 200
    gap_budget: int | None = None
    basin_points: int = 100
    basin_tol: float = 1e-8
    basin_cap: int = 100_000
    oracle_points: int = 10
    itinerary_points: int = 10
    eps: str = "1/10"
    workers: int = 1
    records_path: str | None = None
    summary_path: str | None = None

    def __post_init__(self):
        if self.trials < 1:
            raise ValidationError("trials must be at least 1")
        for name in ("k_max", "basin_cap"):
            if getattr(self, name) < 1:
                raise ValidationError(f"{name} must be positive")
        if self.gap_budget is not None and self.gap_budget < 1:
            raise ValidationError("gap_budget must be positive")
        if self.assignment not in ("all-left", "all-right", "enumerate-all"):
            raise ValidationError(f"unknown assignment policy {self.assignment!r}")
        self.build_system()

    @classmethod
    def from_dict(cls, data: dict) -> "CampaignConfig":
        known = {k: v for k, v in data.items() if k in cls.__dataclass_fields__}
        unknown = set(data) - set(known)
        if unknown:
            raise ValidationError(f"unknown campaign config keys: {sorted(unknown)}")
        return cls(**known)

    @classmethod
    def load(cls, path) -> "CampaignConfig":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))

    def build_system(self) -> BranchSystem:
        if isinstance(self.system, str):
            return preset(self.system, self.backend, self.eps).system
        from .io import system_from_dict

        data = dict(self.system)
        if self.backend:
            data["backend"] = self.backend
        return system_from_dict(data)

    def assignments(self, count: int) -> list:
        if self.assignment == "enumerate-all":
            return BoundaryAssignment.enumerate(count)
        side = Side.LEFT if self.assignment == "all-left" else Side.RIGHT
        return [BoundaryAssignment.all(side, count)]


@dataclass
class TrialRecord:
    trial: int
    cuts: list
    sides: list
    outcome: str  # success | discarded | invariant-violation
    reason: str | None = None
    r: int | None = None
    periods: list | None = None
    q: int | None = None
    m: int | None = None
    orbits: list | None = None
    unattributed: int | None = None
    details: dict = field(default_factory=dict)
    elapsed_s: float = 0.0
    schema: int = SCHEMA_VERSION

    def to_record(self) -> dict:
        return asdict(self)


def _fmt(b, x):
    return b.format(x)


def run_trial(system: BranchSystem, params, assignment, config: CampaignConfig, rng=None, trial: int = 0) -> TrialRecord:
    """Full pipeline on one map; always returns exactly one outcome."""
    t0 = time.perf_counter()
    b = system.backend
    rng = rng if rng is not None else np.random.default_rng([config.seed, trial])
    f = PiecewiseContraction(system, params, assignment)
    rec = TrialRecord(trial, [_fmt(b, x) for x in f.cuts], [s.value for s in f.sides], "success")

    def done(outcome, reason=None, **details):
        rec.outcome, rec.reason = outcome, reason
        rec.details.update(details)
        rec.elapsed_s = time.perf_counter() - t0
        return rec

    g = build_inverse(system)
    try:
        qp = build_quasi_partition(f, g, budget=config.gap_budget, k_max=config.k_max)
    except QuasiPartitionError as exc:
        return done("discarded", exc.reason, message=str(exc))
    except InvariantViolation as exc:
        return done("invariant-violation", "quasi-partition", message=str(exc))
    rec.q, rec.m = qp.q, qp.m
    report = verify_quasi_partition(f, qp)
    if not report.ok:
        return done("invariant-violation", "verification", report=str(report))
    try:
        att = attractor_set(
            f, config.basin_points, rng, config.basin_tol, config.basin_cap, qp=qp
        )
    except InvariantViolation as exc:
        return done("invariant-violation", "attractors", message=str(exc))
    rec.r = att.r
    rec.periods = [o.period for o in att.orbits]
    rec.orbits = [[_fmt(b, p) for p in o.points] for o in att.orbits]
    rec.unattributed = len(att.unattributed)
    if not all(o.stable for o in att.orbits):
        return done("invariant-violation", "unstable-orbit")
    if att.unattributed:
        return done("invariant-violation", "unattributed-basin", points=[_fmt(b, e.x) for e in att.unattributed])

    from .attractors import sample_points

    for x in sample_points(b, config.oracle_points, rng):
        res = direct_attractor_oracle(f, x)
        j, _ = attribute_point(f, att.orbits, x, config.basin_tol, config.basin_cap)
        if not isinstance(res, PeriodicOrbit) or j is None or not _orbit_matches(att.orbits[j], res, 1e-10):
            return done("invariant-violation", "oracle-mismatch", x=_fmt(b, x), oracle=repr(res))

    length = max(2 * qp.m, 50)
    for x in sample_points(b, config.itinerary_points, rng):
        ell = qp.component_of(x)
        if ell is None:
            continue
        word = symbolic_itinerary_from_tau(qp, ell)
        if word.preperiod + word.period > qp.m:
            return done("invariant-violation", "certificate-length", x=_fmt(b, x))
        if itinerary(f, x, length, classify=False).digits != word.expand(length):
            return done("invariant-violation", "itinerary-mismatch", x=_fmt(b, x), word=str(word))
    return done("success")


def _orbit_matches(orbit: PeriodicOrbit, other: PeriodicOrbit, tol: float) -> bool:
    if orbit.period != other.period:
        return False
    return all(any(abs(u - v) <= tol for v in other.points) for u in orbit.points)


# -- campaigns -------------------------------------------------------------------


@dataclass
class CampaignSummary:
    system: str
    n: int
    parameter_points: int
    records: int
    success: int
    discarded: dict
    violations: dict
    r_distribution: dict
    period_distribution: dict
    q_distribution: dict
    m_distribution: dict
    max_r: int | None
    seed: int
    schema: int = SCHEMA_VERSION

    @property
    def success_rate(self) -> float:
        return self.success / self.records

    def to_record(self) -> dict:
        d = asdict(self)
        d["success_rate"] = self.success_rate
        return d


def _trial_records(config: CampaignConfig, trial: int) -> list[TrialRecord]:
    system = config.build_system()
    rng = np.random.default_rng([config.seed, trial])
    params = sample_omega(system.n, rng, system.backend)
    return [
        run_trial(system, params, a, config, rng, trial) for a in config.assignments(system.n - 1)
    ]


def summarize(config: CampaignConfig, records: list[TrialRecord]) -> CampaignSummary:
    system = config.build_system()
    ok = [r for r in records if r.outcome == "success"]

    def dist(values):
        return {str(k): v for k, v in sorted(Counter(values).items())}

    return CampaignSummary(
        system=config.system if isinstance(config.system, str) else "inline",
        n=system.n,
        parameter_points=config.trials,
        records=len(records),
        success=len(ok),
        discarded=dist(r.reason for r in records if r.outcome == "discarded"),
        violations=dist(r.reason for r in records if r.outcome == "invariant-violation"),
        r_distribution=dist(r.r for r in ok),
        period_distribution=dist(p for r in ok for p in r.periods),
        q_distribution=dist(r.q for r in ok),
        m_distribution=dist(r.m for r in ok),
        max_r=max((r.r for r in records if r.r is not None), default=None),
        seed=config.seed,
    )


def run_campaign(config: CampaignConfig):
    """Run every trial, streaming records to ``config.records_path`` as JSON lines.

    Returns ``(summary, records)``.
    """
    records: list[TrialRecord] = []
    sink = open(config.records_path, "w") if config.records_path else None
    try:
        if config.workers > 1:
            with ProcessPoolExecutor(config.workers) as pool:
                batches = pool.map(_trial_records, [config] * config.trials, range(config.trials))
                for batch in batches:
                    _emit(batch, records, sink)
        else:
            for trial in range(config.trials):
                _emit(_trial_records(config, trial), records, sink)
    finally:
        if sink:
            sink.close()
    summary = summarize(config, records)
    if config.summary_path:
        Path(config.summary_path).write_text(json.dumps(summary.to_record(), indent=2, sort_keys=True) + "\n")
    return summary, records


def _emit(batch, records, sink):
    records.extend(batch)
    if sink:
        for rec in batch:
            sink.write(json.dumps(rec.to_record(), sort_keys=True) + "\n")
        sink.flush()


def gconnection_census(system: BranchSystem, samples: int, seed: int = 0, k_max: int = 200, side=Side.RIGHT) -> list:
    """Parameter points (with their connection) among ``samples`` draws that have a g-connection."""
    g = build_inverse(system)
    hits = []
    for trial in range(samples):
        rng = np.random.default_rng([seed, trial])
        params = sample_omega(system.n, rng, system.backend)
        f = PiecewiseContraction(system, params, side)
        conn = detect_g_connection(f, g, k_max)
        if conn is not None:
            hits.append((params, conn))
    return hits
