"""System files and report records.

A system file is JSON::

    {"backend": "rational",
     "branches": [{"kind": "affine", "coefficients": ["3/10", "1/10"]}, ...],
     "general_mode": false,
     "cuts": ["3/10"], "sides": ["left"]}

``cuts`` and ``sides`` are optional. Scalars may be given as strings
(``"3/10"``, ``"0.3"``) or numbers; strings keep rationals exact.
Records are flat dicts of JSON-safe values and are written as JSON or CSV.
"""

from __future__ import annotations

import csv
import io as _io
import json
import sys
from pathlib import Path

from .attractors import AttractorReport, PeriodicOrbit, Phantom
from .backend import Backend, get_backend
from .errors import ValidationError
from .maps import Affine, BranchSystem, PiecewiseContraction, Quadratic, Side
from .orbits import ItineraryWord
from .quasipartition import QuasiPartition

BRANCH_KINDS = {"affine": (Affine, 2), "quadratic": (Quadratic, 3)}


def branch_from_dict(data: dict, backend: Backend):
    try:
        kind = data["kind"]
        coefficients = data["coefficients"]
    except (KeyError, TypeError):
        raise ValidationError(f"branch needs 'kind' and 'coefficients': {data!r}") from None
    if kind not in BRANCH_KINDS:
        raise ValidationError(f"unknown branch kind {kind!r}; expected one of {sorted(BRANCH_KINDS)}")
    cls, arity = BRANCH_KINDS[kind]
    if len(coefficients) != arity:
        raise ValidationError(f"{kind} branch takes {arity} coefficients, got {len(coefficients)}")
    return cls(*(backend(str(c)) for c in coefficients))


def system_from_dict(data: dict, backend=None) -> BranchSystem:
    b = get_backend(backend or data.get("backend", "rational"))
    if "branches" not in data or not isinstance(data["branches"], list):
        raise ValidationError("system file needs a 'branches' list")
    branches = [branch_from_dict(d, b) for d in data["branches"]]
    return BranchSystem(branches, b, general=bool(data.get("general_mode", False)))


def system_to_dict(system: BranchSystem) -> dict:
    b = system.backend
    return {
        "backend": b.name,
        "general_mode": system.general,
        "branches": [
            {"kind": br.kind, "coefficients": [b.format(c) for c in br.coefficients]} for br in system.branches
        ],
    }


def read_json(path) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: not valid JSON ({exc})") from None


def load_system(path, backend=None) -> BranchSystem:
    return system_from_dict(read_json(path), backend)


def contraction_from_dict(data: dict, backend=None, cuts=None, sides=None) -> PiecewiseContraction:
    """Map from a system file, with ``cuts``/``sides`` overriding the file's own."""
    system = system_from_dict(data, backend)
    cuts = cuts if cuts is not None else data.get("cuts")
    if cuts is None:
        if system.n != 1:
            raise ValidationError("no cuts given; pass --cuts or add 'cuts' to the system file")
        cuts = []
    sides = sides if sides is not None else data.get("sides", "right")
    if isinstance(sides, list):
        sides = [Side.parse(s) for s in sides]
    return PiecewiseContraction(system, [system.backend(str(c)) for c in cuts], sides)


def interval_record(iv, backend: Backend) -> dict:
    return iv.to_record(backend)


# -- records ---------------------------------------------------------------------


def orbit_records(points, digits, backend: Backend) -> list[dict]:
    """Per-step ``{k, x_k, d_k}``; the last point has no digit when ``len(points) > len(digits)``."""
    return [
        {"k": k, "x_k": backend.format(x), "d_k": digits[k] if k < len(digits) else None}
        for k, x in enumerate(points)
    ]


def itinerary_record(word: ItineraryWord) -> dict:
    return {
        "digits": "".join(map(str, word.digits)),
        "classification": word.classification,
        "preperiod": word.preperiod,
        "period": word.period,
        "word": str(word),
    }


def qp_record(qp: QuasiPartition) -> dict:
    b = qp.f.backend
    return {
        "H": [b.format(h) for h in qp.hull],
        "components": [
            {"index": l, "lo": b.format(J.lo), "hi": b.format(J.hi), "eta": qp.eta[l], "tau": qp.tau[l]}
            for l, J in enumerate(qp.components)
        ],
        "tau": list(qp.tau),
        "eta": list(qp.eta),
        "q": qp.q,
        "m": qp.m,
        "trails": [
            {"cut": h.cut, "q": h.q, "verdict": h.verdict.value, "trail": [b.format(x) for x in h.trail]}
            for h in qp.hits
        ],
    }


def orbit_record(orbit, backend: Backend) -> dict:
    if isinstance(orbit, PeriodicOrbit):
        return {
            "kind": "periodic",
            "period": orbit.period,
            "points": [backend.format(p) for p in orbit.points],
            "word": "".join(map(str, orbit.word)),
            "stable": orbit.stable,
        }
    if isinstance(orbit, Phantom):
        return {"kind": "phantom", "point": backend.format(orbit.point), "word": "".join(map(str, orbit.word)), "reason": orbit.reason}
    return {"kind": "undetermined", "reason": orbit.reason}


def attractor_record(report: AttractorReport, backend: Backend) -> dict:
    hist = report.basin_histogram()
    return {
        "mode": report.mode,
        "r": report.r,
        "orbits": [orbit_record(o, backend) for o in report.orbits],
        "phantoms": [orbit_record(p, backend) for p in report.phantoms],
        "basin_histogram": [{"orbit": k, "count": v} for k, v in sorted(hist.items(), key=lambda kv: (kv[0] is None, kv[0] or 0))],
        "convergence": report.convergence_stats(),
    }


# -- writers -----------------------------------------------------------------------


def _flat(value):
    if isinstance(value, (dict, list, tuple)):
        return json.dumps(value, sort_keys=True)
    return value


def dumps(payload, fmt: str = "json") -> str:
    """Serialise a dict (JSON only) or a list of flat records (JSON or CSV)."""
    if fmt == "json":
        return json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if fmt != "csv":
        raise ValidationError(f"unknown format {fmt!r}")
    rows = payload if isinstance(payload, list) else [payload]
    fields = []
    for row in rows:
        fields.extend(k for k in row if k not in fields)
    buf = _io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: _flat(v) for k, v in row.items()})
    return buf.getvalue()


def emit(payload, fmt: str = "json", out=None) -> None:
    """Write to ``out`` (a path) or stdout."""
    text = dumps(payload, fmt)
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)
