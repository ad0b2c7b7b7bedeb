"""Run configuration and the versioned table of desk-scale defaults."""

from __future__ import annotations

import os
from dataclasses import dataclass, field, replace
from fractions import Fraction

from ..core_graph import DEFAULT_MAX_MEMBERS, DEFAULT_MAX_RADIUS
from ..families import FamilySpec, parse_family

DEFAULTS_VERSION = "2026.10-1"

# Per-family parameters used when a flag is not given.  Changing any entry
# changes report contents, so bump DEFAULTS_VERSION along with it.
DEFAULTS = {
    "oplus_complete": {"window_radius": 16, "r_max": 8, "lambda_floor": "1/256"},
    "shifted_oplus_complete": {"window_radius": 8, "r_max": 4, "lambda_floor": "1/256"},
    "regular_tree": {"window_radius": 3, "r_max": 4, "lambda_floor": "1/4096"},
    "comb": {"window_radius": 8, "r_max": 8, "lambda_floor": "1/4096"},
    "steplike_dyadic": {"window_radius": 64, "r_max": 64, "lambda_floor": "1/256"},
    "complete": {"window_radius": 1, "r_max": 1, "lambda_floor": "1/1000"},
    "star": {"window_radius": 2, "r_max": 2, "lambda_floor": "1/1000"},
    "linear": {"window_radius": 16, "r_max": 16, "lambda_floor": "1/1000"},
    "cycle": {"window_radius": 16, "r_max": 16, "lambda_floor": "1/1000"},
    "edge_list": {"window_radius": 8, "r_max": 8, "lambda_floor": "1/1000"},
}

# Suite-level knobs (trial counts, escalation steps, thresholds).
SUITE_DEFAULTS = {
    "random_families": 200,
    "interval_samples": 500,
    "interval_window": 64,
    "lemma42_trials": 100,
    "domination_trials": 100,
    "eq2_random": 200,
    "eq2_sizes": list(range(2, 11)),
    "tree_floor": "1/4096",
    "comb_floor": "1/4096",
}


def threads_from_env(default: int = 1) -> int:
    raw = os.environ.get("MAXGRAPH_THREADS", "")
    if not raw.strip():
        return default
    try:
        n = int(raw)
    except ValueError:
        raise ValueError(f"MAXGRAPH_THREADS must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise ValueError(f"MAXGRAPH_THREADS must be a positive integer, got {raw!r}")
    return n


@dataclass(frozen=True)
class RunConfig:
    family: FamilySpec | None = None
    window_radius: int = 8
    r_max: int = 8
    lambda_floor: Fraction = Fraction(1, 256)
    seed: int = 0
    output_format: str = "json"
    max_members: int = DEFAULT_MAX_MEMBERS
    max_radius: int = DEFAULT_MAX_RADIUS
    threads: int = 1
    suite: dict = field(default_factory=lambda: dict(SUITE_DEFAULTS))

    def __post_init__(self):
        if self.window_radius < 0 or self.r_max < 0:
            raise ValueError("window_radius and r_max must be nonnegative")
        if self.lambda_floor <= 0:
            raise ValueError("lambda_floor must be positive")
        if self.max_members < 1 or self.max_radius < 1 or self.threads < 1:
            raise ValueError("resource caps must be positive")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        if self.output_format not in ("json", "csv", "text"):
            raise ValueError(f"unknown output format {self.output_format!r}")

    @classmethod
    def for_family(cls, family, **overrides) -> "RunConfig":
        spec = parse_family(family) if isinstance(family, str) else family
        base = DEFAULTS.get(spec.kind if spec else "", {}) if spec else {}
        kw = {"window_radius": base.get("window_radius", 8), "r_max": base.get("r_max", 8),
              "lambda_floor": Fraction(base.get("lambda_floor", "1/256"))}
        kw.update({k: v for k, v in overrides.items() if v is not None})
        if "lambda_floor" in kw:
            kw["lambda_floor"] = Fraction(kw["lambda_floor"])
        kw.setdefault("threads", threads_from_env())
        return cls(family=spec, **kw)

    def with_(self, **changes) -> "RunConfig":
        return replace(self, **changes)

    def describe(self) -> dict:
        return {
            "family": self.family.label() if self.family else None,
            "window_radius": self.window_radius,
            "r_max": self.r_max,
            "lambda_floor": self.lambda_floor,
            "seed": self.seed,
            "max_members": self.max_members,
            "max_radius": self.max_radius,
            "defaults_version": DEFAULTS_VERSION,
        }
