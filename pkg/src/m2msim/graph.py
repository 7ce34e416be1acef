"""Weighted bipartite relay-selection graph.

Rows are sources. Columns are, in order:

* one column per (relay, M2M interface) pair, column ``j`` meaning relay
  ``j // N_t`` on interface ``j % N_t``;
* ``Q_BS`` identical columns for the base station channels.

A relay-interface column carries the decode-and-forward rate of the
route ``source -> relay -> BS``; a BS column carries the direct rate.
Unusable routes keep a zero-weight edge so the matrix stays dense.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from m2msim.channel import (
    FadingParams,
    RfInterfaceSpec,
    db_to_linear,
    draw_gain_components,
    link_capacity,
    m2m_sinr_matrix,
    noise_power,
    two_hop_rate,
)
from m2msim.topology import CellSnapshot


@dataclass(frozen=True)
class LinkSet:
    """Sampled gains of one snapshot, shared by every algorithm run on it.

    ``m2m_gain_db[t, i, j]`` is the gain from source ``i`` to relay ``j`` on
    M2M interface ``t``; ``m2b_gain_db[k]`` is the gain from machine ``k``
    (by id) to the base station on the M2B interface.
    """

    m2m_gain_db: np.ndarray
    m2b_gain_db: np.ndarray
    sr_distance: np.ndarray
    bs_distance: np.ndarray


def _distances(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.hypot(a[:, None, 0] - b[None, :, 0], a[:, None, 1] - b[None, :, 1])


def sample_links(snapshot: CellSnapshot, params: FadingParams, rng: np.random.Generator) -> LinkSet:
    """Draw shadowing and fading for every link the graph can use.

    Each M2M interface gets its own independent draws, one interface at a
    time in snapshot order, followed by the M2B draws for all machines.
    """
    src = snapshot.positions(snapshot.sources)
    rel = snapshot.positions(snapshot.relays)
    everyone = snapshot.positions(snapshot.machines)
    sr = _distances(src, rel)
    bs = _distances(everyone, np.asarray([snapshot.bs_position], dtype=float))[:, 0]

    m2m = np.empty((snapshot.n_interfaces,) + sr.shape)
    for t in range(snapshot.n_interfaces):
        pl, sh, fd = draw_gain_components(sr, params, rng)
        m2m[t] = -pl + sh + fd
    pl, sh, fd = draw_gain_components(bs, params, rng)
    return LinkSet(m2m, -pl + sh + fd, sr, bs)


@dataclass(frozen=True)
class Capacities:
    """Per-hop rates in bits/s (unquantized)."""

    m2m: np.ndarray       # (N_t, N_s, N_r)
    direct: np.ndarray    # (N_s,)
    relay_bs: np.ndarray  # (N_r,)


def link_capacities(snapshot: CellSnapshot, links: LinkSet, params: FadingParams) -> Capacities:
    rbw = snapshot.requested_bw
    noise = noise_power(rbw, params)
    src_ids = np.array([m.id for m in snapshot.sources], dtype=int)
    rel_ids = np.array([m.id for m in snapshot.relays], dtype=int)

    m2m = np.zeros_like(links.m2m_gain_db)
    for t, spec in enumerate(snapshot.m2m_interfaces):
        s = m2m_sinr_matrix(spec.machine_tx_power, db_to_linear(links.m2m_gain_db[t]), noise)
        m2m[t] = link_capacity(rbw, s, spec, links.sr_distance)

    lte = snapshot.m2b_interface
    snr = lte.machine_tx_power * db_to_linear(links.m2b_gain_db) / noise
    rates = np.asarray(link_capacity(rbw, snr, lte, links.bs_distance), dtype=float)
    return Capacities(m2m, rates[src_ids], rates[rel_ids])


def compute_quota(
    m2b_spec: RfInterfaceSpec,
    requested_bw: float,
    max_channels: int | None = None,
    n_sources: int | None = None,
) -> int:
    """Number of simultaneous BS connections.

    ``floor(total M2B bandwidth / requested bandwidth)``, capped by the
    channel count and by the number of sources (extra BS columns could
    never be used and only enlarge the solve).
    """
    if requested_bw <= 0:
        raise ValueError("requested bandwidth must be positive")
    quota = math.floor(m2b_spec.total_bandwidth / requested_bw)
    # guard the float division against landing just below an integer
    if (quota + 1) * requested_bw <= m2b_spec.total_bandwidth:
        quota += 1
    if max_channels is None:
        max_channels = m2b_spec.max_channels
    if max_channels is not None:
        quota = min(quota, max_channels)
    if n_sources is not None:
        quota = min(quota, n_sources)
    return max(quota, 0)


class VertexKind(str, enum.Enum):
    RELAY_INTERFACE = "relay"
    BS_CHANNEL = "bs"


@dataclass(frozen=True)
class RightVertex:
    kind: VertexKind
    relay: int | None = None
    interface: int | None = None
    channel: int | None = None


@dataclass(frozen=True)
class AssignmentGraph:
    weights: np.ndarray
    quota: int
    n_relays: int
    n_interfaces: int
    source_ids: tuple[int, ...] = ()
    relay_ids: tuple[int, ...] = ()
    interface_names: tuple[str, ...] = ()

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if w.ndim != 2:
            raise ValueError("weights must be a 2-D matrix")
        if w.shape[1] != self.n_relay_columns + self.quota:
            raise ValueError(
                f"expected {self.n_relay_columns + self.quota} columns, got {w.shape[1]}"
            )
        if np.any(w < 0) or not np.all(np.isfinite(w)):
            raise ValueError("weights must be finite and nonnegative")
        if self.quota > w.shape[0]:
            raise ValueError("quota cannot exceed the number of sources")
        object.__setattr__(self, "weights", w)

    @property
    def n_left(self) -> int:
        return self.weights.shape[0]

    @property
    def n_relay_columns(self) -> int:
        return self.n_relays * self.n_interfaces

    @property
    def n_right(self) -> int:
        return self.weights.shape[1]

    def vertex(self, column: int) -> RightVertex:
        if not 0 <= column < self.n_right:
            raise IndexError(f"column {column} out of range")
        if column < self.n_relay_columns:
            relay, iface = divmod(column, self.n_interfaces)
            return RightVertex(VertexKind.RELAY_INTERFACE, relay=relay, interface=iface)
        return RightVertex(VertexKind.BS_CHANNEL, channel=column - self.n_relay_columns)

    @property
    def right_vertices(self) -> list[RightVertex]:
        return [self.vertex(j) for j in range(self.n_right)]


def build_graph(
    snapshot: CellSnapshot,
    links: LinkSet,
    params: FadingParams,
    interfaces: Sequence[int] | None = None,
    capacities: Capacities | None = None,
) -> AssignmentGraph:
    """Assemble the relay-selection graph for a subset of M2M interfaces.

    Args:
        snapshot: The cell.
        links: Gains sampled for every interface of ``snapshot``.
        params: Propagation and noise parameters.
        interfaces: Indices into ``snapshot.m2m_interfaces`` to offer as
            relay interfaces, in column order. ``None`` uses all of them;
            an empty sequence gives a direct-only graph. Interfaces
            narrower than the requested bandwidth get no columns at all.
        capacities: Precomputed :func:`link_capacities`, to share the work
            between algorithms evaluated on the same instance.

    Weights are rates floored to whole bits/s. Integer-valued weights keep
    the padded assignment exact in float64, so optimal totals of
    different interface sets compare without rounding noise.
    """
    if interfaces is None:
        interfaces = range(snapshot.n_interfaces)
    interfaces = [
        t for t in interfaces if snapshot.m2m_interfaces[t].total_bandwidth >= snapshot.requested_bw
    ]
    if capacities is None:
        capacities = link_capacities(snapshot, links, params)

    n_s, n_r, n_t = snapshot.n_sources, snapshot.n_relays, len(interfaces)
    quota = compute_quota(snapshot.m2b_interface, snapshot.requested_bw, n_sources=n_s)

    relay_block = np.empty((n_s, n_r, n_t))
    for col, t in enumerate(interfaces):
        relay_block[:, :, col] = two_hop_rate(capacities.m2m[t], capacities.relay_bs[None, :])
    weights = np.empty((n_s, n_r * n_t + quota))
    weights[:, : n_r * n_t] = relay_block.reshape(n_s, n_r * n_t)
    weights[:, n_r * n_t :] = capacities.direct[:, None]

    return AssignmentGraph(
        np.floor(weights),
        quota,
        n_r,
        n_t,
        tuple(m.id for m in snapshot.sources),
        tuple(m.id for m in snapshot.relays),
        tuple(snapshot.m2m_interfaces[t].name for t in interfaces),
    )
