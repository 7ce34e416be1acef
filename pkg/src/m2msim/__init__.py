"""Joint relay selection and dynamic RF interface setting for uplink M2M cells."""

from m2msim.algorithms import STANDARD_ALGORITHMS, AlgorithmConfig, run_algorithm
from m2msim.channel import (
    BLUETOOTH,
    LTE,
    WIFI,
    ZWAVE,
    FadingParams,
    RfInterfaceSpec,
)
from m2msim.graph import AssignmentGraph, build_graph, compute_quota, sample_links
from m2msim.kap import brute_force_kap, hungarian_min, solve_kap
from m2msim.topology import CellSnapshot, generate_snapshot

__version__ = "0.1.0"

__all__ = [
    "AlgorithmConfig",
    "AssignmentGraph",
    "BLUETOOTH",
    "CellSnapshot",
    "FadingParams",
    "LTE",
    "RfInterfaceSpec",
    "STANDARD_ALGORITHMS",
    "WIFI",
    "ZWAVE",
    "brute_force_kap",
    "build_graph",
    "compute_quota",
    "generate_snapshot",
    "hungarian_min",
    "run_algorithm",
    "sample_links",
    "solve_kap",
]
