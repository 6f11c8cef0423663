"""Command-line driver: builds instances from a config file and emits CSV.

Subcommands: gamma, placement, sweep-alpha, sweep-r, sweep-cache,
thresholds, simulate.  Exit codes: 0 success, 2 invalid configuration,
3 solver failure in any row.
"""

from __future__ import annotations

import argparse
import csv
import io
import sys
from pathlib import Path

import numpy as np

from . import game, geometry, rate, simulator
from .model import (CONFIG_KEYS, GameConfig, LibraryConfig, Placement,
                    load_config, quantize_placement, zipf_popularity)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_SOLVER = 3


def parse_grid(text: str) -> list[float]:
    """Parse a sweep grid: either 'a:b:step' or a comma list 'a,b,c'."""
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError(f"grid must be 'a:b:step', got {text!r}")
        start, stop, step = (float(p) for p in parts)
        if step <= 0 or stop < start:
            raise ValueError(f"bad grid range {text!r}")
        count = int(round((stop - start) / step))
        grid = [round(start + k * step, 12) for k in range(count + 1)]
    else:
        grid = [float(p) for p in text.split(",") if p.strip()]
    if not grid:
        raise ValueError("grid must be non-empty")
    if any(b < a for a, b in zip(grid, grid[1:])):
        raise ValueError("grid must be sorted")
    return grid


def _fmt(value: float) -> str:
    return f"{value:.6f}"


def build_geometry(cfg: dict) -> geometry.NetworkGeometry:
    return geometry.NetworkGeometry(
        mbs_radius=cfg["mbs_radius_m"],
        sbs_spacing=cfg["sbs_spacing_m"],
        sbs_radius=cfg["sbs_radius_m"],
        user_density=cfg["user_density_per_m2"],
    )


def build_game_config(cfg: dict, samples: int) -> GameConfig:
    geom = build_geometry(cfg)
    areas = geometry.coverage_areas_unit_cell(geom, samples, cfg["seed"])
    return GameConfig(
        alpha=cfg["alpha"],
        library=LibraryConfig(
            num_files=cfg["num_files"],
            fragments_per_file=cfg["fragments_per_file"],
        ),
        popularity=zipf_popularity(cfg["num_files"], cfg["zipf_exponent"]),
        coverage=geometry.coverage_profile(areas),
        cache_size=cfg["cache_size"],
    )


def _reference_rates(cfg: GameConfig, tol: float):
    """Legit/adversarial rate pairs of the two Fig-reference placements."""
    q0 = game.no_adversary_placement(cfg, tol=tol)
    uni = Placement.uniform(cfg.library.num_files, cfg.cache_size)
    pairs = []
    for pl in (q0, uni):
        _, strat = game.best_response(pl)
        pairs.append((
            rate.legit_rate(pl, cfg.popularity, cfg.coverage),
            rate.adversary_rate(pl, cfg.coverage, strat),
        ))
    return pairs


def _mix(alpha: float, pair: tuple[float, float]) -> float:
    return alpha * pair[1] + (1.0 - alpha) * pair[0]


def cmd_gamma(cfg: dict, args) -> tuple[list[list[str]], list[str], int]:
    geom = build_geometry(cfg)
    areas = geometry.coverage_areas_unit_cell(geom, args.samples, cfg["seed"])
    gamma = geometry.coverage_profile(areas).gamma
    rows = [[str(d + 1), _fmt(areas.areas[d]), _fmt(gamma[d])]
            for d in range(gamma.size)]
    return rows, ["d", "area_m2", "gamma"], EXIT_OK


def _placement_header(num_files: int) -> list[str]:
    return ["alpha", "R_total", "R_legit", "R_adv", "j_star"] + [
        f"q_{j}" for j in range(1, num_files + 1)
    ]


def _placement_row(alpha: float, res: game.EquilibriumResult) -> list[str]:
    return [
        _fmt(alpha), _fmt(res.rates.r_total), _fmt(res.rates.r_legit),
        _fmt(res.rates.r_adv), str(res.j_star + 1),
    ] + [_fmt(v) for v in res.q_star.q]


def cmd_placement(cfg: dict, args):
    gcfg = build_game_config(cfg, args.samples)
    res = game.equilibrium_placement(gcfg)
    code = EXIT_OK if res.solver_status == "optimal" else EXIT_SOLVER
    return [_placement_row(gcfg.alpha, res)], _placement_header(gcfg.library.num_files), code


def cmd_sweep_alpha(cfg: dict, args):
    gcfg = build_game_config(cfg, args.samples)
    alphas = args.alpha_grid
    refs = _reference_rates(gcfg, tol=1e-7)
    results = game.sweep_equilibria(gcfg, alphas)
    rows, code = [], EXIT_OK
    for alpha, res in zip(alphas, results):
        if res.solver_status != "optimal":
            code = EXIT_SOLVER
        rows.append([
            _fmt(alpha), _fmt(res.rates.r_total), _fmt(res.rates.r_legit),
            _fmt(res.rates.r_adv), str(res.j_star + 1),
            _fmt(_mix(alpha, refs[0])), _fmt(_mix(alpha, refs[1])),
            res.solver_status,
        ])
    header = ["alpha", "R_total", "R_legit", "R_adv", "j_star",
              "R_ref_noadv", "R_ref_uniform", "status"]
    return rows, header, code


def cmd_sweep_r(cfg: dict, args):
    rows, code = [], EXIT_OK
    for r in args.r_grid:
        sub = dict(cfg, sbs_radius_m=r)
        gcfg = build_game_config(sub, args.samples)
        res = game.equilibrium_placement(gcfg)
        if res.solver_status != "optimal":
            code = EXIT_SOLVER
        rows.append([
            _fmt(r), *[_fmt(g) for g in gcfg.coverage.gamma],
            _fmt(res.rates.r_total), _fmt(res.rates.r_legit),
            _fmt(res.rates.r_adv), str(res.j_star + 1), res.solver_status,
        ])
    header = ["r_m", "gamma_1", "gamma_2", "gamma_3", "gamma_4",
              "R_total", "R_legit", "R_adv", "j_star", "status"]
    return rows, header, code


def cmd_sweep_cache(cfg: dict, args):
    gcfg = build_game_config(cfg, args.samples)
    rows, code = [], EXIT_OK
    for cache in args.cache_grid:
        res = game.equilibrium_placement(
            GameConfig(alpha=gcfg.alpha, library=gcfg.library,
                       popularity=gcfg.popularity, coverage=gcfg.coverage,
                       cache_size=cache))
        if res.solver_status != "optimal":
            code = EXIT_SOLVER
        rows.append([
            _fmt(cache), _fmt(res.rates.r_total), _fmt(res.rates.r_legit),
            _fmt(res.rates.r_adv), str(res.j_star + 1), res.solver_status,
        ])
    header = ["cache_size", "R_total", "R_legit", "R_adv", "j_star", "status"]
    return rows, header, code


def cmd_thresholds(cfg: dict, args):
    gcfg = build_game_config(cfg, args.samples)
    alphas = args.alpha_grid
    detection = game.detect_thresholds(gcfg, alphas)
    q_ref = game.no_adversary_placement(gcfg).q
    q_uni = Placement.uniform(gcfg.library.num_files, gcfg.cache_size).q
    rows, code = [], EXIT_OK
    for alpha, res in zip(alphas, detection.results):
        if res.solver_status != "optimal":
            code = EXIT_SOLVER
        q = res.q_star.q
        nonzero = np.nonzero(q > 1e-9)[0]
        q_mu = q[nonzero[-1]] if nonzero.size else 0.0
        rows.append([
            _fmt(alpha), _fmt(q.min()), _fmt(q.max()), _fmt(q_mu),
            _fmt(np.max(np.abs(q - q_ref))), _fmt(np.max(np.abs(q - q_uni))),
            _fmt(res.rates.r_total), res.solver_status,
        ])
    header = ["alpha", "q_min", "q_max", "q_mu",
              "dist_noadv", "dist_uniform", "R_total", "status"]
    if detection.alpha_thr_1 is not None:
        print(f"alpha_thr_1 = {detection.alpha_thr_1:.6f}")
    else:
        print("alpha_thr_1: no branching on the grid")
    if detection.alpha_thr_2 is not None:
        print(f"alpha_thr_2 = {detection.alpha_thr_2:.6f}")
    else:
        print("alpha_thr_2: no gathering on the grid")
    return rows, header, code


def cmd_simulate(cfg: dict, args):
    gcfg = build_game_config(cfg, args.samples)
    n = cfg["fragments_per_file"]
    rows, code = [], EXIT_OK
    for i, alpha in enumerate(args.alpha_grid):
        sub = gcfg.with_alpha(alpha)
        res = game.equilibrium_placement(sub)
        if res.solver_status != "optimal":
            code = EXIT_SOLVER
        report = simulator.simulate(res.q_star, sub, n, args.requests,
                                    cfg["seed"] + i)
        m = quantize_placement(res.q_star, n, gcfg.popularity)
        quantized = Placement(q=m / n, cache_size=gcfg.cache_size)
        j_star, strat = res.j_star, rate.AdversaryStrategy.point_mass(
            gcfg.library.num_files, res.j_star)
        analytic_mn = rate.total_rate(
            alpha,
            rate.legit_rate(quantized, gcfg.popularity, gcfg.coverage),
            rate.adversary_rate(quantized, gcfg.coverage, strat),
        ).r_total
        stderr = report.backhaul_fraction_stderr
        z = ((report.backhaul_fraction_mean - analytic_mn) / stderr
             if stderr > 0 else 0.0)
        rows.append([
            _fmt(alpha), str(report.requests),
            _fmt(report.backhaul_fraction_mean), _fmt(stderr),
            *[str(c) for c in report.per_coverage_counts],
            _fmt(res.rates.r_total), _fmt(analytic_mn), _fmt(z),
            res.solver_status,
        ])
    header = (["alpha", "requests", "mean", "stderr"]
              + [f"count_d{d}" for d in range(1, gcfg.coverage.max_coverage + 1)]
              + ["analytic_q", "analytic_mn", "z_score", "status"])
    return rows, header, code


COMMANDS = {
    "gamma": cmd_gamma,
    "placement": cmd_placement,
    "sweep-alpha": cmd_sweep_alpha,
    "sweep-r": cmd_sweep_r,
    "sweep-cache": cmd_sweep_cache,
    "thresholds": cmd_thresholds,
    "simulate": cmd_simulate,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="key = value config file")
    common.add_argument("--out", type=Path, help="output CSV path (default stdout)")
    common.add_argument("--samples", type=int, default=1_000_000,
                        help="Monte Carlo samples for the coverage profile")
    common.add_argument("--alpha-grid", type=parse_grid, default="0:1:0.01",
                        help="alpha sweep grid, a:b:step or comma list")
    common.add_argument("--r-grid", type=parse_grid, default="45:60:5",
                        help="SBS radius grid in meters")
    common.add_argument("--cache-grid", type=parse_grid, default="10:40:10",
                        help="cache size grid in files")
    common.add_argument("--requests", type=int, default=100_000,
                        help="requests per simulated row")
    for key, typ in CONFIG_KEYS.items():
        common.add_argument(f"--{key}", type=typ, dest=key, default=None,
                            help=f"override config key {key}")

    parser = argparse.ArgumentParser(
        prog="cachegame",
        description="Adversary-robust coded cache placement experiments",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    for grid_name in ("alpha_grid", "r_grid", "cache_grid"):
        value = getattr(args, grid_name)
        if isinstance(value, str):
            setattr(args, grid_name, parse_grid(value))
    try:
        overrides = {key: getattr(args, key) for key in CONFIG_KEYS}
        cfg = load_config(args.config, overrides)
        if any(a < 0 or a > 1 for a in args.alpha_grid):
            raise ValueError("alpha grid must lie in [0, 1]")
        rows, header, code = COMMANDS[args.command](cfg, args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    if args.out is None:
        sys.stdout.write(buf.getvalue())
    else:
        args.out.write_text(buf.getvalue())
    return code


if __name__ == "__main__":
    sys.exit(main())
