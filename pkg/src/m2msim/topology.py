"""Single-cell snapshots: a base station at the center and machines around it.

Snapshot text format (one record per line, whitespace separated)::

    width height bs_x bs_y rbw_hz
    id role x y          # role is S (source) or R (relay)
    ...

Blank lines and lines starting with ``#`` are ignored.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from m2msim.channel import BLUETOOTH, LTE, WIFI, ZWAVE, RfInterfaceSpec


class Role(str, enum.Enum):
    SOURCE = "S"
    RELAY = "R"


@dataclass(frozen=True)
class Machine:
    id: int
    x: float
    y: float
    role: Role

    @property
    def position(self) -> tuple[float, float]:
        return (self.x, self.y)


@dataclass(frozen=True)
class CellSnapshot:
    """One time snapshot of the cell.

    Machines keep the order they were generated or read in; ``sources``
    and ``relays`` preserve that order, and the graph uses it for row and
    relay column numbering.
    """

    width: float
    height: float
    bs_position: tuple[float, float]
    machines: tuple[Machine, ...]
    requested_bw: float
    m2m_interfaces: tuple[RfInterfaceSpec, ...] = (WIFI, BLUETOOTH, ZWAVE)
    m2b_interface: RfInterfaceSpec = LTE
    _sources: tuple[Machine, ...] = field(init=False, repr=False, compare=False)
    _relays: tuple[Machine, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.width <= 0 or self.height <= 0:
            raise ValueError("cell dimensions must be positive")
        if self.requested_bw <= 0:
            raise ValueError("requested bandwidth must be positive")
        ids = [m.id for m in self.machines]
        if sorted(ids) != list(range(len(ids))):
            raise ValueError("machine ids must be unique and dense in [0, N)")
        for m in self.machines:
            if not (0.0 <= m.x <= self.width and 0.0 <= m.y <= self.height):
                raise ValueError(f"machine {m.id} lies outside the cell")
        object.__setattr__(self, "machines", tuple(self.machines))
        object.__setattr__(self, "m2m_interfaces", tuple(self.m2m_interfaces))
        object.__setattr__(self, "_sources", tuple(m for m in self.machines if m.role is Role.SOURCE))
        object.__setattr__(self, "_relays", tuple(m for m in self.machines if m.role is Role.RELAY))

    @property
    def sources(self) -> tuple[Machine, ...]:
        return self._sources

    @property
    def relays(self) -> tuple[Machine, ...]:
        return self._relays

    @property
    def n_sources(self) -> int:
        return len(self._sources)

    @property
    def n_relays(self) -> int:
        return len(self._relays)

    @property
    def n_interfaces(self) -> int:
        return len(self.m2m_interfaces)

    def positions(self, machines) -> np.ndarray:
        return np.array([m.position for m in machines], dtype=float).reshape(-1, 2)

    def with_interfaces(self, m2m_interfaces, m2b_interface=None) -> "CellSnapshot":
        return CellSnapshot(
            self.width,
            self.height,
            self.bs_position,
            self.machines,
            self.requested_bw,
            tuple(m2m_interfaces),
            m2b_interface or self.m2b_interface,
        )


def generate_snapshot(
    n_sources: int,
    n_relays: int,
    rng: np.random.Generator,
    *,
    width: float = 500.0,
    height: float = 500.0,
    requested_bw: float = 200e3,
    m2m_interfaces=(WIFI, BLUETOOTH, ZWAVE),
    m2b_interface: RfInterfaceSpec = LTE,
) -> CellSnapshot:
    """Place machines i.i.d. uniformly over the rectangle.

    The first ``n_sources`` machines are sources and the rest relays.
    """
    if n_sources < 0 or n_relays < 0:
        raise ValueError("machine counts must be >= 0")
    n = n_sources + n_relays
    xy = rng.uniform(0.0, 1.0, size=(n, 2)) * np.array([width, height])
    machines = tuple(
        Machine(i, float(xy[i, 0]), float(xy[i, 1]), Role.SOURCE if i < n_sources else Role.RELAY)
        for i in range(n)
    )
    return CellSnapshot(
        width,
        height,
        (width / 2.0, height / 2.0),
        machines,
        requested_bw,
        tuple(m2m_interfaces),
        m2b_interface,
    )


def format_snapshot(snapshot: CellSnapshot) -> str:
    lines = [
        f"{snapshot.width!r} {snapshot.height!r} {snapshot.bs_position[0]!r} "
        f"{snapshot.bs_position[1]!r} {snapshot.requested_bw!r}"
    ]
    for m in snapshot.machines:
        lines.append(f"{m.id} {m.role.value} {m.x!r} {m.y!r}")
    return "\n".join(lines) + "\n"


def write_snapshot(snapshot: CellSnapshot, path) -> None:
    Path(path).write_text(format_snapshot(snapshot))


class SnapshotFormatError(ValueError):
    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


def parse_snapshot(text: str, m2m_interfaces=(WIFI, BLUETOOTH, ZWAVE), m2b_interface=LTE) -> CellSnapshot:
    header = None
    machines = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if header is None:
            if len(parts) != 5:
                raise SnapshotFormatError(lineno, "header must be 'width height bs_x bs_y rbw_hz'")
            try:
                header = [float(p) for p in parts]
            except ValueError as exc:
                raise SnapshotFormatError(lineno, str(exc)) from None
            continue
        if len(parts) != 4:
            raise SnapshotFormatError(lineno, "machine line must be 'id role x y'")
        try:
            mid = int(parts[0])
            role = Role(parts[1].upper())
            x, y = float(parts[2]), float(parts[3])
        except ValueError as exc:
            raise SnapshotFormatError(lineno, str(exc)) from None
        machines.append(Machine(mid, x, y, role))
    if header is None:
        raise SnapshotFormatError(0, "empty snapshot file")
    width, height, bs_x, bs_y, rbw = header
    machines.sort(key=lambda m: m.id)
    try:
        return CellSnapshot(width, height, (bs_x, bs_y), tuple(machines), rbw, tuple(m2m_interfaces), m2b_interface)
    except ValueError as exc:
        raise SnapshotFormatError(0, str(exc)) from None


def read_snapshot(path, **kwargs) -> CellSnapshot:
    return parse_snapshot(Path(path).read_text(), **kwargs)
