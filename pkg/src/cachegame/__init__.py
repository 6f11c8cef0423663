"""Adversary-robust MDS coded cache placement for heterogeneous networks."""

from .model import (CoverageProfile, GameConfig, LibraryConfig, Placement,
                    PopularityDist, RateBreakdown, load_config,
                    quantize_placement, zipf_popularity)
from .geometry import (CoverageAreas, NetworkGeometry, coverage_areas_unit_cell,
                       coverage_profile, deployment_counts)
from .rate import AdversaryStrategy, adversary_rate, legit_rate, total_rate
from .game import (EquilibriumResult, ThresholdResult, best_response,
                   detect_thresholds, equilibrium_placement,
                   no_adversary_placement, sweep_equilibria, worst_case_rate)
from .simulator import (CodedPlacement, SimReport, packet_accounting_check,
                        simulate)

__all__ = [
    "AdversaryStrategy", "CodedPlacement", "CoverageAreas", "CoverageProfile",
    "EquilibriumResult", "GameConfig", "LibraryConfig", "NetworkGeometry",
    "Placement", "PopularityDist", "RateBreakdown", "SimReport",
    "ThresholdResult", "adversary_rate", "best_response",
    "coverage_areas_unit_cell", "coverage_profile", "deployment_counts",
    "detect_thresholds", "equilibrium_placement", "legit_rate", "load_config",
    "no_adversary_placement", "packet_accounting_check", "quantize_placement",
    "simulate", "sweep_equilibria", "total_rate", "worst_case_rate",
    "zipf_popularity",
]

__version__ = "0.1.0"
