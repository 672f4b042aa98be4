"""Run configuration: a dataclass mirroring the JSON config file."""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace

from .errors import ParameterError
from .reference import DEFAULT_GRID_N, PotentialSpec

ALL_SUITES = ("eti", "reverse-hc", "hjb-dual", "domination", "converge-w2",
              "tensorize", "concentration", "infconv-lsi", "poincare")

EPSILON_LADDER = (1.0, 0.5, 0.25, 0.125, 0.0625)
T_LADDER = (0.25, 0.5, 1.0, 2.0, 4.0)


@dataclass
class RunConfig:
    potential: PotentialSpec = field(default_factory=lambda: PotentialSpec.quadratic(1.0))
    grid_n: int = DEFAULT_GRID_N
    domain: tuple[float, float] | None = None  # defaults to +-5 sigma (quadratic)
    epsilon: float = 1.0
    t: float = 1.0
    s: float = 0.5
    lam: float | None = None  # defaults to 2 * lam_u for quadratic potentials
    seed: int = 0
    tol: float = 1e-8
    suites: tuple[str, ...] = ALL_SUITES
    out_dir: str = "results"
    jobs: int = 1
    draws: int | None = None  # overrides per-suite defaults when set
    control_lambda: float | None = None  # negative-control constant; bisection when unset
    full_output: bool = False

    def __post_init__(self):
        if self.grid_n < 8:
            raise ParameterError("grid_n must be at least 8")
        if self.domain is not None:
            lo, hi = self.domain
            if not lo < hi:
                raise ParameterError("domain needs lo < hi")
        if self.epsilon <= 0 or self.t <= 0:
            raise ParameterError("epsilon and t must be positive")
        if not 0.0 < self.s < self.t:
            raise ParameterError("need 0 < s < t")
        if self.lam is not None and self.lam <= 0:
            raise ParameterError("lambda must be positive")
        if self.tol <= 0:
            raise ParameterError("tol must be positive")
        unknown = set(self.suites) - set(ALL_SUITES)
        if unknown:
            raise ParameterError(f"unknown suites: {sorted(unknown)}")

    def to_json_dict(self) -> dict:
        return {
            "potential": self.potential.to_json_dict(),
            "grid_n": self.grid_n,
            "domain": list(self.domain) if self.domain else None,
            "epsilon": self.epsilon,
            "t": self.t,
            "s": self.s,
            "lambda": self.lam,
            "seed": self.seed,
            "tol": self.tol,
            "suites": list(self.suites),
            "out_dir": self.out_dir,
            "jobs": self.jobs,
            "draws": self.draws,
            "control_lambda": self.control_lambda,
            "full_output": self.full_output,
        }

    @classmethod
    def from_json_dict(cls, payload: dict) -> "RunConfig":
        if not isinstance(payload, dict):
            raise ParameterError("config must be a JSON object")
        kw = {}
        if "potential" in payload:
            kw["potential"] = PotentialSpec.from_json_dict(payload["potential"])
        for key, attr in (("grid_n", "grid_n"), ("epsilon", "epsilon"),
                          ("t", "t"), ("s", "s"), ("lambda", "lam"),
                          ("seed", "seed"), ("tol", "tol"),
                          ("out_dir", "out_dir"), ("jobs", "jobs"),
                          ("draws", "draws"),
                          ("control_lambda", "control_lambda"),
                          ("full_output", "full_output")):
            if key in payload and payload[key] is not None:
                kw[attr] = payload[key]
        if payload.get("domain") is not None:
            lo, hi = payload["domain"]
            kw["domain"] = (float(lo), float(hi))
        if payload.get("suites") is not None:
            kw["suites"] = tuple(payload["suites"])
        return cls(**kw)

    def with_overrides(self, **kw) -> "RunConfig":
        kw = {k: v for k, v in kw.items() if v is not None}
        return replace(self, **kw)

    def canonical_json(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True)
