"""Provenance-tagged run reports with JSON-lines and CSV emission.

Every numeric quantity a report carries is wrapped in a Tagged value
naming where it came from: "measured" for quantities computed from the
run's own output, "ground-truth" for values known by construction of the
instance, "bound" for theoretical targets the output is graded against.
Reports serialize to one JSON object per line; the canonical form leaves
wall-clock time out so reruns of the same (config, seed) compare equal
byte for byte.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from fractions import Fraction

from ..errors import ParamError

PROVENANCES = ("measured", "ground-truth", "bound")


def _plain(value):
    """JSON-safe view of a value; Fractions stay exact as strings."""
    if isinstance(value, Fraction):
        return str(value) if value.denominator != 1 else int(value)
    if isinstance(value, (tuple, list)):
        return [_plain(v) for v in value]
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (bool, int, float, str)) or value is None:
        return value
    return str(value)


@dataclass(frozen=True)
class Tagged:
    """A value plus the provenance of its number."""

    value: object
    provenance: str

    def __post_init__(self):
        if self.provenance not in PROVENANCES:
            raise ParamError(f"unknown provenance {self.provenance!r}")

    def jsonable(self) -> dict:
        return {"value": _plain(self.value), "provenance": self.provenance}


def measured(value) -> Tagged:
    return Tagged(value, "measured")


def ground_truth(value) -> Tagged:
    return Tagged(value, "ground-truth")


def bound(value) -> Tagged:
    return Tagged(value, "bound")


@dataclass
class RunReport:
    """One solver run on one instance: config echo, outcome, metrics.

    status is "ok", "solver-failure" (the solver ran and honestly gave
    up), or "input-error" (the combination was malformed); error carries
    the message for the failing cases. metrics maps names to Tagged
    values; flags holds plain booleans and strings.
    """

    solver: str
    config: dict
    seed: int
    status: str
    metrics: dict = field(default_factory=dict)
    flags: dict = field(default_factory=dict)
    vector: tuple | None = None
    error: str | None = None
    wall_time_s: float | None = None

    def jsonable(self, include_timing: bool = True) -> dict:
        out = {
            "solver": self.solver,
            "config": _plain(self.config),
            "seed": self.seed,
            "status": self.status,
            "metrics": {k: self.metrics[k].jsonable()
                        for k in sorted(self.metrics)},
            "flags": {k: _plain(self.flags[k]) for k in sorted(self.flags)},
            "vector": None if self.vector is None else _plain(self.vector),
            "error": self.error,
        }
        if include_timing:
            out["wall_time_s"] = self.wall_time_s
        return out

    def canonical_json(self) -> str:
        """Timing-free serialization; identical across reruns."""
        return json.dumps(self.jsonable(include_timing=False),
                          sort_keys=True, separators=(",", ":"))

    def json_line(self) -> str:
        return json.dumps(self.jsonable(), sort_keys=True,
                          separators=(",", ":"))


def write_jsonl(reports, path) -> int:
    """One report per line; returns the number written."""
    count = 0
    with open(path, "w", encoding="ascii") as fh:
        for rep in reports:
            fh.write(rep.json_line())
            fh.write("\n")
            count += 1
    return count


def write_csv(reports, path) -> int:
    """Flat table for spreadsheets: metric columns carry value and
    provenance side by side; wall time is left out by design."""
    reports = list(reports)
    metric_names = sorted({k for r in reports for k in r.metrics})
    flag_names = sorted({k for r in reports for k in r.flags})
    head = ["solver", "seed", "status", "error", "config"]
    for name in metric_names:
        head += [name, name + ":provenance"]
    head += flag_names
    with open(path, "w", encoding="ascii", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(head)
        for r in reports:
            row = [r.solver, r.seed, r.status, r.error or "",
                   json.dumps(_plain(r.config), sort_keys=True)]
            for name in metric_names:
                tag = r.metrics.get(name)
                row += ["" if tag is None else _plain(tag.value),
                        "" if tag is None else tag.provenance]
            for name in flag_names:
                row.append(_plain(r.flags.get(name, "")))
            writer.writerow(row)
    return len(reports)
