from __future__ import annotations

import math
from dataclasses import dataclass, field


def _jsonable(v):
    if isinstance(v, float) and not math.isfinite(v):
        return "inf" if v > 0 else ("-inf" if v < 0 else "nan")
    return v


@dataclass
class AxiomResult:
    name: str
    passed: bool
    worst_violation: float
    witness: dict | None = None
    checked: int = 0

    def to_json(self):
        return {
            "name": self.name,
            "pass": bool(self.passed),
            "worst_violation": _jsonable(float(self.worst_violation)),
            "witness": self.witness,
            "checked": self.checked,
        }


@dataclass
class SuiteReport:
    suite: str
    config: dict
    results: list = field(default_factory=list)
    skipped: dict = field(default_factory=dict)

    @property
    def passed(self):
        return all(r.passed for r in self.results)

    def __getitem__(self, name):
        for r in self.results:
            if r.name == name:
                return r
        raise KeyError(name)

    def to_json(self):
        return {
            "suite": self.suite,
            "config": self.config,
            "pass": self.passed,
            "axioms": [r.to_json() for r in self.results],
            "skipped": self.skipped,
        }


class ViolationTracker:
    """Running worst violation per axiom."""

    def __init__(self, names, tol):
        self.tol = tol
        self.worst = {n: 0.0 for n in names}
        self.witness = {n: None for n in names}
        self.count = {n: 0 for n in names}
        self.failed = {n: False for n in names}

    def record(self, name, violation, witness=None, failed=None):
        self.count[name] += 1
        v = float(violation)
        if failed is None:
            failed = not (v <= self.tol)
        if failed:
            self.failed[name] = True
        if v > self.worst[name] or (math.isnan(v) and not math.isnan(self.worst[name])):
            self.worst[name] = v
            self.witness[name] = witness

    def results(self):
        return [
            AxiomResult(n, not self.failed[n], self.worst[n], self.witness[n], self.count[n])
            for n in self.worst
        ]
