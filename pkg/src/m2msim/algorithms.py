"""DiTOSA, SORSA and DORSA as interface configurations of one pipeline.

All three build the same k-AP graph and solve it exactly; they differ
only in which M2M interfaces contribute relay columns:

* DiTOSA: none (direct transmission only),
* SORSA_X: the single interface X,
* DORSA_X-Y...: several interfaces, chosen per relay by the solver.
"""

from __future__ import annotations

import enum
import time
from dataclasses import dataclass
from typing import Sequence

from m2msim.channel import FadingParams
from m2msim.graph import AssignmentGraph, Capacities, LinkSet, build_graph
from m2msim.kap import Matching, solve_kap
from m2msim.topology import CellSnapshot

INTERFACE_LETTERS = {"W": "wifi", "B": "bluetooth", "Z": "zwave"}


class Family(str, enum.Enum):
    DITOSA = "DiTOSA"
    SORSA = "SORSA"
    DORSA = "DORSA"


@dataclass(frozen=True)
class AlgorithmConfig:
    name: str
    interfaces: tuple[str, ...]
    family: Family

    def __post_init__(self):
        n = len(self.interfaces)
        if len(set(self.interfaces)) != n:
            raise ValueError(f"{self.name}: duplicate interfaces")
        if self.family is Family.DITOSA and n != 0:
            raise ValueError("DiTOSA uses no relay interfaces")
        if self.family is Family.SORSA and n != 1:
            raise ValueError("SORSA uses exactly one relay interface")
        if self.family is Family.DORSA and n < 1:
            raise ValueError("DORSA needs at least one relay interface")

    @classmethod
    def from_name(cls, name: str) -> "AlgorithmConfig":
        """Parse ``DiTOSA``, ``SORSA_W`` or ``DORSA_W-B-Z`` style names."""
        if name == "DiTOSA":
            return cls(name, (), Family.DITOSA)
        family, _, letters = name.partition("_")
        try:
            fam = Family(family)
            ifaces = tuple(INTERFACE_LETTERS[c] for c in letters.split("-"))
        except (ValueError, KeyError):
            raise ValueError(f"unknown algorithm name {name!r}") from None
        return cls(name, ifaces, fam)


STANDARD_ALGORITHMS = tuple(
    AlgorithmConfig.from_name(n)
    for n in (
        "DiTOSA",
        "SORSA_W",
        "SORSA_B",
        "SORSA_Z",
        "DORSA_W-B",
        "DORSA_W-Z",
        "DORSA_B-Z",
        "DORSA_W-B-Z",
    )
)


class RouteKind(str, enum.Enum):
    DIRECT = "direct"
    TWO_HOP = "relay"
    UNMATCHED = "unmatched"


@dataclass(frozen=True)
class Route:
    source: int
    kind: RouteKind
    rate: float = 0.0
    relay: int | None = None
    interface: str | None = None


@dataclass(frozen=True)
class RouteAssignment:
    routes: tuple[Route, ...]
    total_rate: float

    @property
    def matched(self) -> int:
        return sum(r.kind is not RouteKind.UNMATCHED for r in self.routes)

    @property
    def unmatched(self) -> int:
        return len(self.routes) - self.matched

    @property
    def n_sources(self) -> int:
        return len(self.routes)


def decode_assignment(matching: Matching, graph: AssignmentGraph) -> RouteAssignment:
    """Turn a solver matching into one route per source.

    Column ``H`` of source ``i``: below ``N_r * N_t`` it is relay
    ``H // N_t`` on interface ``H % N_t``; up to ``N_r * N_t + Q_BS`` it is
    a BS channel; anything beyond is a padding column (unmatched).
    """
    n_rel_cols = graph.n_relay_columns
    n_right = graph.n_right
    if matching.padded_assignment is not None:
        cols = [int(c) for c in matching.padded_assignment[: graph.n_left]]
    else:
        cols = [matching.assignment.get(i, n_right) for i in range(graph.n_left)]

    routes = []
    for i, h in enumerate(cols):
        sid = graph.source_ids[i] if graph.source_ids else i
        if h < 0:
            raise RuntimeError(f"negative column {h} for source {i}")
        if h < n_rel_cols:
            relay, iface = divmod(h, graph.n_interfaces)
            routes.append(
                Route(
                    sid,
                    RouteKind.TWO_HOP,
                    float(graph.weights[i, h]),
                    graph.relay_ids[relay] if graph.relay_ids else relay,
                    graph.interface_names[iface] if graph.interface_names else str(iface),
                )
            )
        elif h < n_right:
            routes.append(Route(sid, RouteKind.DIRECT, float(graph.weights[i, h])))
        else:
            routes.append(Route(sid, RouteKind.UNMATCHED))
    if sum(r.kind is not RouteKind.UNMATCHED for r in routes) > graph.quota:
        raise RuntimeError("decoded more connections than the BS quota")
    return RouteAssignment(tuple(routes), matching.total_real_weight)


def interface_indices(config: AlgorithmConfig, snapshot: CellSnapshot) -> list[int]:
    names = [spec.name for spec in snapshot.m2m_interfaces]
    try:
        return [names.index(n) for n in config.interfaces]
    except ValueError:
        raise ValueError(f"{config.name}: snapshot lacks one of {config.interfaces}") from None


def run_algorithm(
    config: AlgorithmConfig,
    snapshot: CellSnapshot,
    links: LinkSet,
    params: FadingParams,
    capacities: Capacities | None = None,
) -> RouteAssignment:
    graph = build_graph(snapshot, links, params, interface_indices(config, snapshot), capacities)
    return decode_assignment(solve_kap(graph.weights, graph.quota), graph)


def timed_run(
    config: AlgorithmConfig,
    snapshot: CellSnapshot,
    links: LinkSet,
    params: FadingParams,
    capacities: Capacities | None = None,
) -> tuple[RouteAssignment, float]:
    """``run_algorithm`` plus its wall-clock time in milliseconds."""
    start = time.perf_counter()
    result = run_algorithm(config, snapshot, links, params, capacities)
    return result, (time.perf_counter() - start) * 1e3


def resolve_algorithms(names: Sequence[str] | None) -> tuple[AlgorithmConfig, ...]:
    if not names:
        return STANDARD_ALGORITHMS
    return tuple(AlgorithmConfig.from_name(n) for n in names)
