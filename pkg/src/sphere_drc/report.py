"""Metrics record shared by every audit, estimate and CLI subcommand."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np


def jsonable(obj):
    """Convert numpy scalars/arrays, tuples, sets and Fractions for json."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, (set, frozenset)):
        return sorted(jsonable(v) for v in obj)
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        return x if math.isfinite(x) else str(x)
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if isinstance(obj, Fraction):
        return f"{obj.numerator}/{obj.denominator}"
    return obj


@dataclass
class Report:
    operation: str
    parameters: dict
    passed: bool
    metrics: dict = field(default_factory=dict)
    seed: int | None = None
    mode: str = "exhaustive"
    details: list = field(default_factory=list)
    # wall-clock data; never part of the canonical bytes
    meta: dict = field(default_factory=dict)

    def __bool__(self):
        return bool(self.passed)

    def to_dict(self, include_meta: bool = False) -> dict:
        out = {
            "operation": self.operation,
            "parameters": jsonable(self.parameters),
            "seed": self.seed,
            "mode": self.mode,
            "metrics": jsonable(self.metrics),
            "pass": bool(self.passed),
            "details": jsonable(self.details),
        }
        if include_meta:
            out["meta"] = jsonable(self.meta)
        return out

    def to_json(self, include_meta: bool = False) -> str:
        return json.dumps(self.to_dict(include_meta), sort_keys=True, indent=2) + "\n"

    @classmethod
    def from_dict(cls, d: dict) -> "Report":
        return cls(operation=d["operation"], parameters=d["parameters"], passed=d["pass"],
                   metrics=d.get("metrics", {}), seed=d.get("seed"), mode=d.get("mode", "exhaustive"),
                   details=d.get("details", []), meta=d.get("meta", {}))

    def __eq__(self, other):
        return isinstance(other, Report) and self.to_json() == other.to_json()
