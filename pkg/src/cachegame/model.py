"""Core domain types, configuration handling and the Zipf popularity generator."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from pathlib import Path

import numpy as np

PROB_TOL = 1e-9
CAPACITY_TOL = 1e-6


def _frozen_array(values, name: str) -> np.ndarray:
    arr = np.array(values, dtype=float)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be a one-dimensional vector")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class LibraryConfig:
    """File library: N files of B bits, each split into n fragments."""

    num_files: int
    file_size_bits: int = 1
    fragments_per_file: int = 100

    def __post_init__(self):
        if self.num_files < 1:
            raise ValueError("num_files must be >= 1")
        if self.file_size_bits < 1:
            raise ValueError("file_size_bits must be >= 1")
        if self.fragments_per_file < 1:
            raise ValueError("fragments_per_file must be >= 1")


@dataclass(frozen=True)
class PopularityDist:
    """Request probabilities of the legitimate users over the file library."""

    probs: np.ndarray

    def __post_init__(self):
        probs = _frozen_array(self.probs, "probs")
        object.__setattr__(self, "probs", probs)
        if probs.size < 1:
            raise ValueError("popularity needs at least one file")
        if np.any(probs < 0):
            raise ValueError("popularity entries must be non-negative")
        if abs(probs.sum() - 1.0) > PROB_TOL:
            raise ValueError("popularity must sum to 1")

    @property
    def num_files(self) -> int:
        return self.probs.size


@dataclass(frozen=True)
class CoverageProfile:
    """gamma[d-1] = probability that a user is covered by exactly d SBSs."""

    gamma: np.ndarray

    def __post_init__(self):
        gamma = _frozen_array(self.gamma, "gamma")
        object.__setattr__(self, "gamma", gamma)
        if gamma.size < 1:
            raise ValueError("coverage profile needs at least one entry")
        if np.any(gamma < 0):
            raise ValueError("coverage probabilities must be non-negative")
        if abs(gamma.sum() - 1.0) > PROB_TOL:
            raise ValueError("coverage probabilities must sum to 1")

    @property
    def max_coverage(self) -> int:
        return self.gamma.size


@dataclass(frozen=True)
class Placement:
    """Proportional placement q_j = m_j / n, limited by the SBS cache size M."""

    q: np.ndarray
    cache_size: float

    def __post_init__(self):
        q = np.array(self.q, dtype=float)
        if q.ndim != 1 or q.size < 1:
            raise ValueError("placement must be a non-empty vector")
        if np.any(q < -PROB_TOL) or np.any(q > 1.0 + PROB_TOL):
            raise ValueError("placement entries must lie in [0, 1]")
        # tolerate solver-level rounding at the box boundary
        q = np.clip(q, 0.0, 1.0)
        q.setflags(write=False)
        object.__setattr__(self, "q", q)
        if self.cache_size <= 0:
            raise ValueError("cache size must be positive")
        if q.sum() > self.cache_size + CAPACITY_TOL:
            raise ValueError("placement exceeds cache capacity")

    @property
    def num_files(self) -> int:
        return self.q.size

    @classmethod
    def uniform(cls, num_files: int, cache_size: float) -> "Placement":
        frac = min(cache_size / num_files, 1.0)
        return cls(q=np.full(num_files, frac), cache_size=cache_size)


@dataclass(frozen=True)
class GameConfig:
    """Full problem instance: adversary fraction plus library, demand and coverage."""

    alpha: float
    library: LibraryConfig
    popularity: PopularityDist
    coverage: CoverageProfile
    cache_size: float

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError("alpha must lie in [0, 1]")
        if not 0.0 < self.cache_size < self.library.num_files:
            raise ValueError("cache size must satisfy 0 < M < N")
        if self.popularity.num_files != self.library.num_files:
            raise ValueError("popularity size does not match the library")

    def with_alpha(self, alpha: float) -> "GameConfig":
        return dataclasses.replace(self, alpha=alpha)


@dataclass(frozen=True)
class RateBreakdown:
    """Per-request backhaul rates: legitimate, adversarial and their alpha-mix."""

    r_legit: float
    r_adv: float
    r_total: float


def zipf_popularity(num_files: int, exponent: float) -> PopularityDist:
    """Zipf popularity p_j proportional to 1/j^z; z = 0 gives a uniform demand."""
    if num_files < 1:
        raise ValueError("num_files must be >= 1")
    if exponent < 0:
        raise ValueError("Zipf exponent must be non-negative")
    weights = 1.0 / np.arange(1, num_files + 1, dtype=float) ** exponent
    return PopularityDist(probs=weights / weights.sum())


def quantize_placement(placement: Placement, n: int,
                       popularity: PopularityDist | None = None) -> np.ndarray:
    """Round q to integer packet counts m with sum(m) <= floor(M * n).

    Rounding is to the nearest integer; if the rounded counts overshoot the
    cache capacity, files that were rounded up lose one packet each, least
    popular first, until the capacity holds.  Without an explicit popularity
    the file index is used as the popularity rank (lower index = more popular).
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    q = placement.q
    m = np.floor(q * n + 0.5).astype(np.int64)
    capacity = int(np.floor(placement.cache_size * n + 1e-9))
    excess = int(m.sum()) - capacity
    if excess > 0:
        if popularity is not None:
            if popularity.num_files != q.size:
                raise ValueError("popularity size does not match the placement")
            # least popular first; ties broken towards the higher index
            order = sorted(range(q.size), key=lambda j: (popularity.probs[j], -j))
        else:
            order = range(q.size - 1, -1, -1)
        for j in order:
            if excess == 0:
                break
            if m[j] > q[j] * n + 1e-12:
                m[j] -= 1
                excess -= 1
    if excess > 0:  # cannot happen for a feasible placement
        raise AssertionError("capacity repair failed")
    m.setflags(write=False)
    return m


CONFIG_KEYS = {
    "num_files": int,
    "zipf_exponent": float,
    "cache_size": float,
    "alpha": float,
    "fragments_per_file": int,
    "mbs_radius_m": float,
    "sbs_spacing_m": float,
    "sbs_radius_m": float,
    "user_density_per_m2": float,
    "seed": int,
}

DEFAULT_CONFIG = {
    "num_files": 200,
    "zipf_exponent": 0.7,
    "cache_size": 20.0,
    "alpha": 0.0,
    "fragments_per_file": 100,
    "mbs_radius_m": 500.0,
    "sbs_spacing_m": 60.0,
    "sbs_radius_m": 45.0,
    "user_density_per_m2": 0.05,
    "seed": 1,
}


def load_config(path: str | Path | None = None, overrides: dict | None = None) -> dict:
    """Read a `key = value` config file on top of the defaults.

    Lines are `key = value` (or `key: value`); blank lines and `#` comments
    are ignored.  Unknown keys and malformed values are rejected.
    """
    cfg = dict(DEFAULT_CONFIG)
    if path is not None:
        for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            sep = "=" if "=" in line else ":"
            if sep not in line:
                raise ValueError(f"{path}:{lineno}: expected 'key = value'")
            key, value = (part.strip() for part in line.split(sep, 1))
            if key not in CONFIG_KEYS:
                raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
            try:
                cfg[key] = CONFIG_KEYS[key](value)
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: bad value for {key}: {value!r}") from exc
    if overrides:
        for key, value in overrides.items():
            if key not in CONFIG_KEYS:
                raise ValueError(f"unknown config key {key!r}")
            if value is not None:
                cfg[key] = CONFIG_KEYS[key](value)
    return cfg
