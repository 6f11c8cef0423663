"""Stackelberg game between the cache-filling MBS and congestion-seeking users.

The follower (the adversaries) best-responds by requesting the least cached
file, so the leader minimizes

    (1-a) * sum_{d,j} gamma_d p_j max(1 - d q_j, 0)
      + a * sum_d gamma_d max(1 - d min(q), 0)

over the box-and-capacity polytope {0 <= q <= 1, sum q <= M}.  The objective
is piecewise linear and convex, and is solved exactly as a linear program:
auxiliary t_{d,j} >= max(1 - d q_j, 0), a scalar mu <= q_j for min(q), and
s_d >= max(1 - d mu, 0).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import sparse
from scipy.optimize import linprog

from .model import GameConfig, Placement, RateBreakdown
from .rate import AdversaryStrategy, adversary_rate, legit_rate, total_rate

_STATUS = {0: "optimal", 2: "infeasible"}


@dataclass(frozen=True)
class EquilibriumResult:
    q_star: Placement
    j_star: int
    rates: RateBreakdown
    solver_status: str


@dataclass(frozen=True)
class ThresholdResult:
    """Regime boundaries of the equilibrium placement over an alpha grid.

    alpha_thr_1: first grid alpha where q*(alpha) leaves the no-adversary
    optimum; alpha_thr_2: first grid alpha where q*(alpha) reaches the
    uniform placement.  None marks a threshold absent on the grid.
    """

    alpha_thr_1: float | None
    alpha_thr_2: float | None
    results: tuple[EquilibriumResult, ...]


def best_response(placement: Placement) -> tuple[int, AdversaryStrategy]:
    """Adversary best response: point mass on the least cached file.

    Ties break to the lowest index; the achieved rate is tie-independent.
    """
    j_star = int(np.argmin(placement.q))
    return j_star, AdversaryStrategy.point_mass(placement.num_files, j_star)


@lru_cache(maxsize=16)
def _lp_constraints(num_files: int, max_cov: int):
    """Sparse A_ub for the epigraph LP; depends only on the problem shape.

    Variable layout: q (N), t (S*N, d-major), mu (1), s (S).
    """
    n, s = num_files, max_cov
    nvars = n + s * n + 1 + s
    mu_col = n + s * n
    rows, cols, vals = [], [], []
    ri = 0
    # t_{d,j} >= 1 - d q_j   <=>   -d q_j - t_{d,j} <= -1
    for d in range(1, s + 1):
        for j in range(n):
            rows += [ri, ri]
            cols += [j, n + (d - 1) * n + j]
            vals += [-float(d), -1.0]
            ri += 1
    # mu <= q_j
    for j in range(n):
        rows += [ri, ri]
        cols += [mu_col, j]
        vals += [1.0, -1.0]
        ri += 1
    # s_d >= 1 - d mu
    for d in range(1, s + 1):
        rows += [ri, ri]
        cols += [mu_col, mu_col + d]
        vals += [-float(d), -1.0]
        ri += 1
    # sum q <= M (rhs filled per instance)
    rows += [ri] * n
    cols += list(range(n))
    vals += [1.0] * n
    ri += 1
    a_ub = sparse.csr_matrix((vals, (rows, cols)), shape=(ri, nvars))
    bounds = [(0.0, 1.0)] * n + [(0.0, None)] * (s * n) + [(0.0, 1.0)] + [(0.0, None)] * s
    return a_ub, bounds


def _canonicalize(q: np.ndarray, probs: np.ndarray) -> np.ndarray:
    """Non-increasing rearrangement of q aligned with popularity order.

    By the rearrangement inequality this never worsens the objective, and it
    makes per-index trajectories deterministic.  Files of equal popularity
    keep index order.
    """
    order = np.argsort(-probs, kind="stable")
    canon = np.empty_like(q)
    canon[order] = np.sort(q)[::-1]
    return canon


def equilibrium_placement(cfg: GameConfig, tol: float = 1e-7) -> EquilibriumResult:
    """Leader's equilibrium placement, solved exactly as a linear program."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    n = cfg.library.num_files
    s = cfg.coverage.max_coverage
    probs = cfg.popularity.probs
    gamma = cfg.coverage.gamma
    a_ub, bounds = _lp_constraints(n, s)
    b_ub = np.concatenate([
        -np.ones(s * n),
        np.zeros(n),
        -np.ones(s),
        [cfg.cache_size],
    ])
    c = np.zeros(n + s * n + 1 + s)
    for d in range(s):
        c[n + d * n: n + (d + 1) * n] = (1.0 - cfg.alpha) * gamma[d] * probs
    c[n + s * n + 1:] = cfg.alpha * gamma
    res = linprog(
        c, A_ub=a_ub, b_ub=b_ub, bounds=bounds, method="highs",
        options={
            "primal_feasibility_tolerance": min(tol, 1e-7),
            "dual_feasibility_tolerance": min(tol, 1e-7),
        },
    )
    status = _STATUS.get(res.status, "iteration-limit")
    if res.x is None:
        q = Placement.uniform(n, cfg.cache_size).q
    else:
        q = _canonicalize(np.clip(res.x[:n], 0.0, 1.0), probs)
    placement = Placement(q=q, cache_size=cfg.cache_size)
    j_star, strategy = best_response(placement)
    r_l = legit_rate(placement, cfg.popularity, cfg.coverage)
    r_a = adversary_rate(placement, cfg.coverage, strategy)
    return EquilibriumResult(
        q_star=placement,
        j_star=j_star,
        rates=total_rate(cfg.alpha, r_l, r_a),
        solver_status=status,
    )


def no_adversary_placement(cfg: GameConfig, tol: float = 1e-7) -> Placement:
    """Optimal placement against purely popularity-driven demand (alpha = 0)."""
    return equilibrium_placement(cfg.with_alpha(0.0), tol=tol).q_star


def worst_case_rate(cfg: GameConfig) -> float:
    """Closed-form equilibrium rate when every user is an adversary.

    With alpha = 1 the leader plays uniformly, q_j = M/N, and the rate is
    sum_d gamma_d max(1 - d M/N, 0).
    """
    frac = cfg.cache_size / cfg.library.num_files
    d = np.arange(1, cfg.coverage.max_coverage + 1, dtype=float)
    return float(cfg.coverage.gamma @ np.maximum(1.0 - d * frac, 0.0))


def sweep_equilibria(cfg: GameConfig, alphas, tol: float = 1e-7) -> list[EquilibriumResult]:
    """Equilibrium solves for each alpha on a grid (independent solves)."""
    return [equilibrium_placement(cfg.with_alpha(float(a)), tol=tol) for a in alphas]


def detect_thresholds(cfg: GameConfig, alpha_grid, distance_tol: float = 1e-3,
                      tol: float = 1e-7,
                      results: list[EquilibriumResult] | None = None) -> ThresholdResult:
    """Locate the branching and gathering points of the placement trajectory.

    alpha_thr_1 is the smallest grid alpha whose equilibrium placement moves
    more than distance_tol (infinity norm) away from the no-adversary
    optimum; alpha_thr_2 the smallest grid alpha within distance_tol of the
    uniform placement.  `results` may carry precomputed solves for the grid.
    """
    alphas = np.asarray(alpha_grid, dtype=float)
    if alphas.size == 0:
        raise ValueError("alpha grid must be non-empty")
    if np.any(np.diff(alphas) < 0):
        raise ValueError("alpha grid must be sorted")
    if alphas[0] < 0 or alphas[-1] > 1:
        raise ValueError("alpha grid must lie in [0, 1]")
    if distance_tol <= 0:
        raise ValueError("distance_tol must be positive")
    if results is None:
        results = sweep_equilibria(cfg, alphas, tol=tol)
    elif len(results) != alphas.size:
        raise ValueError("results do not match the alpha grid")
    q_ref = no_adversary_placement(cfg, tol=tol).q
    q_uni = Placement.uniform(cfg.library.num_files, cfg.cache_size).q
    thr_1 = thr_2 = None
    for a, res in zip(alphas, results):
        q = res.q_star.q
        if thr_1 is None and np.max(np.abs(q - q_ref)) > distance_tol:
            thr_1 = float(a)
        if thr_2 is None and np.max(np.abs(q - q_uni)) <= distance_tol:
            thr_2 = float(a)
    return ThresholdResult(alpha_thr_1=thr_1, alpha_thr_2=thr_2, results=tuple(results))
