"""Run configuration and deterministic seed derivation.

Every stochastic stage draws its generator from one run seed, so a whole
pipeline run is reproducible from the configuration alone.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
from dataclasses import dataclass
from pathlib import Path

_MAX_SEED = 2**64 - 1


@dataclass(frozen=True)
class CorpusConfig:
    """Hyperparameters and run controls shared by all pipeline stages.

    alpha and eta are the document-topic and topic-relation Dirichlet
    priors; gamma is the partition penalty factor in (0, 1) used by the
    topic-count estimator. max_depth caps the tree depth when set
    (default: data-driven, unlimited).
    """

    alpha: float = 1.0
    eta: float = 0.1
    gamma: float = 0.01
    max_depth: int | None = None
    gibbs_iterations: int = 2000
    acrp_max_passes: int = 100
    rng_seed: int = 0

    def __post_init__(self):
        if not self.alpha > 0:
            raise ValueError(f"alpha must be > 0, got {self.alpha}")
        if not self.eta > 0:
            raise ValueError(f"eta must be > 0, got {self.eta}")
        if not 0 < self.gamma < 1:
            raise ValueError(f"gamma must be in (0, 1), got {self.gamma}")
        if self.max_depth is not None and self.max_depth < 1:
            raise ValueError(f"max_depth must be >= 1 or None, got {self.max_depth}")
        if self.gibbs_iterations < 0:
            raise ValueError(f"gibbs_iterations must be >= 0, got {self.gibbs_iterations}")
        if self.acrp_max_passes < 1:
            raise ValueError(f"acrp_max_passes must be >= 1, got {self.acrp_max_passes}")
        if not 0 <= self.rng_seed <= _MAX_SEED:
            raise ValueError(f"rng_seed must fit in 64 unsigned bits, got {self.rng_seed}")

    def replace(self, **changes) -> "CorpusConfig":
        return dataclasses.replace(self, **changes)

    def as_dict(self) -> dict:
        return dataclasses.asdict(self)


def derive_seed(run_seed: int, *parts: str) -> int:
    """Derive a child generator seed from the run seed and a label path.

    Stable across platforms and runs; distinct label paths give
    independent streams, so work scheduled in any order (or in parallel)
    produces identical results.
    """
    h = hashlib.sha256()
    h.update(str(run_seed).encode("utf-8"))
    for part in parts:
        h.update(b"\x1f")
        h.update(part.encode("utf-8"))
    return int.from_bytes(h.digest()[:8], "big")


def config_from_dict(data: dict) -> CorpusConfig:
    known = {f.name for f in dataclasses.fields(CorpusConfig)}
    unknown = set(data) - known
    if unknown:
        raise ValueError(f"unknown config keys: {sorted(unknown)}")
    return CorpusConfig(**data)


def load_config(path: str | Path) -> CorpusConfig:
    """Load a CorpusConfig from a JSON or TOML file.

    A run manifest (which embeds its config under a "config" key) is
    accepted too, so a recorded run can be replayed directly.
    """
    path = Path(path)
    if path.suffix.lower() == ".toml":
        try:
            import tomllib
        except ModuleNotFoundError:
            import tomli as tomllib
        data = tomllib.loads(path.read_text(encoding="utf-8"))
    else:
        data = json.loads(path.read_text(encoding="utf-8"))
    if not isinstance(data, dict):
        raise ValueError(f"{path}: config must be a table/object")
    if isinstance(data.get("config"), dict):
        data = data["config"]
    return config_from_dict(data)
