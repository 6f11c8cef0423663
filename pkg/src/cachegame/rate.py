"""Closed-form backhaul rates for a given placement.

A user covered by d SBSs receives d*q_j of the requested file from the
caches; the MBS sends the deficit max(1 - d*q_j, 0) over the backhaul.
Rates are normalized per request and per file.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import CoverageProfile, Placement, PopularityDist, RateBreakdown, PROB_TOL


@dataclass(frozen=True)
class AdversaryStrategy:
    """Request distribution induced by the adversary users."""

    probs: np.ndarray

    def __post_init__(self):
        probs = np.array(self.probs, dtype=float)
        probs.setflags(write=False)
        object.__setattr__(self, "probs", probs)
        if probs.ndim != 1 or probs.size < 1:
            raise ValueError("strategy must be a non-empty vector")
        if np.any(probs < 0) or abs(probs.sum() - 1.0) > PROB_TOL:
            raise ValueError("strategy must be a probability distribution")

    @classmethod
    def point_mass(cls, num_files: int, target: int) -> "AdversaryStrategy":
        if not 0 <= target < num_files:
            raise ValueError("target file out of range")
        probs = np.zeros(num_files)
        probs[target] = 1.0
        return cls(probs=probs)

    @classmethod
    def from_requests(cls, requests, num_files: int) -> "AdversaryStrategy":
        requests = np.asarray(requests, dtype=np.int64)
        if requests.size == 0:
            raise ValueError("need at least one request")
        if np.any(requests < 0) or np.any(requests >= num_files):
            raise ValueError("request index out of range")
        counts = np.bincount(requests, minlength=num_files)
        return cls(probs=counts / requests.size)


def deficit_rate(q: np.ndarray, weights: np.ndarray, gamma: np.ndarray) -> float:
    """sum_d sum_j gamma_d * w_j * max(1 - d*q_j, 0) on raw arrays."""
    d = np.arange(1, gamma.size + 1, dtype=float)
    deficit = np.maximum(1.0 - np.outer(d, q), 0.0)
    return float(gamma @ deficit @ weights)


def legit_rate(placement: Placement, popularity: PopularityDist,
               coverage: CoverageProfile) -> float:
    """Average backhaul rate of a legitimate user requesting by popularity."""
    if popularity.num_files != placement.num_files:
        raise ValueError("popularity size does not match the placement")
    return deficit_rate(placement.q, popularity.probs, coverage.gamma)


def adversary_rate(placement: Placement, coverage: CoverageProfile,
                   strategy: AdversaryStrategy) -> float:
    """Average backhaul rate of an adversary user with the given strategy."""
    if strategy.probs.size != placement.num_files:
        raise ValueError("strategy size does not match the placement")
    return deficit_rate(placement.q, strategy.probs, coverage.gamma)


def total_rate(alpha: float, r_legit: float, r_adv: float) -> RateBreakdown:
    """Mix the per-user rates by the adversary fraction alpha."""
    if not 0.0 <= alpha <= 1.0:
        raise ValueError("alpha must lie in [0, 1]")
    if not (-PROB_TOL <= r_legit <= 1.0 + PROB_TOL
            and -PROB_TOL <= r_adv <= 1.0 + PROB_TOL):
        raise ValueError("rates must lie in [0, 1]")
    r_legit = min(max(r_legit, 0.0), 1.0)
    r_adv = min(max(r_adv, 0.0), 1.0)
    return RateBreakdown(
        r_legit=r_legit,
        r_adv=r_adv,
        r_total=alpha * r_adv + (1.0 - alpha) * r_legit,
    )
