"""Request-level Monte Carlo simulation with explicit MDS packet accounting.

Serves as an independent check of the closed-form rates: each request draws
a user type, a file and a coverage count, and accrues the packet deficit
the MBS has to send over the backhaul.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .game import best_response
from .model import GameConfig, Placement, PopularityDist, quantize_placement


@dataclass(frozen=True)
class CodedPlacement:
    """Integer packet placement: m_j packets per SBS, n - m_j kept at the MBS."""

    n: int
    m: np.ndarray

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be >= 1")
        m = np.array(self.m, dtype=np.int64)
        m.setflags(write=False)
        object.__setattr__(self, "m", m)
        if np.any(m < 0) or np.any(m > self.n):
            raise ValueError("packet counts must lie in [0, n]")

    @property
    def mbs_reserve(self) -> np.ndarray:
        return self.n - self.m

    @classmethod
    def from_placement(cls, placement: Placement, n: int,
                       popularity: PopularityDist | None = None) -> "CodedPlacement":
        return cls(n=n, m=quantize_placement(placement, n, popularity))


def packet_accounting_check(placement: CodedPlacement, d: int) -> bool:
    """Verify the MDS counting identity for a coverage count of d SBSs.

    A user collects d*m_j distinct packets from the SBSs; recovery needs the
    MBS reserve of n - m_j packets to cover any remaining deficit.  Holds
    for every m_j in [0, n] and d >= 1; False flags a model violation.
    """
    if d < 1:
        raise ValueError("coverage count must be >= 1")
    from_sbs = d * placement.m
    deficit = np.maximum(placement.n - from_sbs, 0)
    reserve_ok = np.all(deficit <= placement.mbs_reserve)
    recovered = np.minimum(from_sbs, placement.n) + deficit >= placement.n
    return bool(reserve_ok and np.all(recovered))


@dataclass(frozen=True)
class SimReport:
    """Aggregate of a simulation run; the mean is in files per request."""

    requests: int
    backhaul_fraction_mean: float
    backhaul_fraction_stderr: float
    per_coverage_counts: np.ndarray

    def __post_init__(self):
        counts = np.array(self.per_coverage_counts, dtype=np.int64)
        counts.setflags(write=False)
        object.__setattr__(self, "per_coverage_counts", counts)
        if counts.sum() != self.requests:
            raise ValueError("coverage counts must sum to the request count")


def simulate(placement: Placement, cfg: GameConfig, n: int,
             num_requests: int, seed: int) -> SimReport:
    """Simulate num_requests deliveries against the quantized placement.

    A request is adversarial with probability alpha; legitimate users draw a
    file from the popularity, adversaries all target the least cached file.
    The per-request cost is max(n - d*m_j, 0)/n.  Deterministic per seed.
    """
    if num_requests < 1:
        raise ValueError("need at least one request")
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = np.random.default_rng(seed)
    m = quantize_placement(placement, n, cfg.popularity)
    j_star, _ = best_response(placement)
    num_files = placement.num_files
    s = cfg.coverage.max_coverage

    is_adv = rng.random(num_requests) < cfg.alpha
    files = np.full(num_requests, j_star, dtype=np.int64)
    num_legit = int(np.count_nonzero(~is_adv))
    if num_legit:
        files[~is_adv] = rng.choice(num_files, size=num_legit, p=cfg.popularity.probs)
    coverage = rng.choice(np.arange(1, s + 1), size=num_requests, p=cfg.coverage.gamma)

    cost = np.maximum(n - coverage * m[files], 0) / n
    mean = float(cost.mean())
    stderr = float(cost.std(ddof=1) / math.sqrt(num_requests)) if num_requests > 1 else 0.0
    counts = np.bincount(coverage, minlength=s + 1)[1:]
    return SimReport(
        requests=num_requests,
        backhaul_fraction_mean=mean,
        backhaul_fraction_stderr=stderr,
        per_coverage_counts=counts,
    )
