"""Flat ``key = value`` configuration with the evaluated cell's defaults.

Lines may carry ``#`` comments. Every key has a default, unknown keys are
rejected, and :func:`dump_config` writes a file that :func:`load_config`
reads back to an identical :class:`SimConfig`.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from pathlib import Path

from m2msim.channel import BLUETOOTH, LTE, WIFI, ZWAVE, FadingParams, LinkKind, RfInterfaceSpec

S4_REQUESTED_BW_KHZ = (20, 100, 200, 400, 600, 800, 1000, 2000, 6000, 10000, 15000, 20000)

_IFACE_FIELDS = (
    ("uplink_center_frequency_mhz", "uplink_center_frequency", float),
    ("total_bandwidth_hz", "total_bandwidth", float),
    ("machine_tx_power_w", "machine_tx_power", float),
    ("bs_tx_power_w", "bs_tx_power", float),
    ("max_device_rate_bps", "max_device_rate", float),
    ("max_range_m", "max_range", float),
)
_FADING_FIELDS = (
    ("shadowing_mean_db", "shadowing_mean_db"),
    ("shadowing_std_db", "shadowing_std_db"),
    ("rayleigh_scale", "rayleigh_scale"),
    ("path_loss_exponent", "path_loss_exponent"),
    ("reference_distance_m", "reference_distance"),
    ("noise_psd_dbm_hz", "noise_psd"),
)


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class SimConfig:
    wifi: RfInterfaceSpec = WIFI
    bluetooth: RfInterfaceSpec = BLUETOOTH
    zwave: RfInterfaceSpec = ZWAVE
    lte: RfInterfaceSpec = LTE
    fading: FadingParams = FadingParams()
    width: float = 500.0
    height: float = 500.0
    n_machines: int = 120
    runs: int = 200
    seed: int = 0
    step: int = 10
    max_sources: int = 120
    requested_bw: float = 200e3
    s1_n_machines: int = 240
    s2_n_relays: int = 120
    s3_n_sources: int = 120
    s4_n_sources: int = 120
    s4_n_relays: int = 120
    s4_requested_bw_khz: tuple[float, ...] = S4_REQUESTED_BW_KHZ
    custom_points: tuple[tuple[int, int, float], ...] = field(default=())

    @property
    def m2m_interfaces(self) -> tuple[RfInterfaceSpec, ...]:
        return (self.wifi, self.bluetooth, self.zwave)


def _fmt(value) -> str:
    if isinstance(value, float) and value.is_integer() and abs(value) < 1e15:
        return str(int(value))
    return repr(value) if isinstance(value, float) else str(value)


def _scalar_keys() -> dict[str, tuple[str, type]]:
    return {
        "cell.width_m": ("width", float),
        "cell.height_m": ("height", float),
        "cell.n_machines": ("n_machines", int),
        "sim.runs": ("runs", int),
        "sim.seed": ("seed", int),
        "sim.step": ("step", int),
        "sim.max_sources": ("max_sources", int),
        "sim.requested_bw_hz": ("requested_bw", float),
        "s1.n_machines": ("s1_n_machines", int),
        "s2.n_relays": ("s2_n_relays", int),
        "s3.n_sources": ("s3_n_sources", int),
        "s4.n_sources": ("s4_n_sources", int),
        "s4.n_relays": ("s4_n_relays", int),
    }


def config_items(cfg: SimConfig) -> list[tuple[str, str]]:
    items = []
    for key, (attr, _) in _scalar_keys().items():
        items.append((key, _fmt(getattr(cfg, attr))))
    items.append(("s4.requested_bw_khz", ",".join(_fmt(float(v)) for v in cfg.s4_requested_bw_khz)))
    for key, attr in _FADING_FIELDS:
        items.append((f"channel.{key}", _fmt(float(getattr(cfg.fading, attr)))))
    for iface in ("wifi", "bluetooth", "zwave", "lte"):
        spec = getattr(cfg, iface)
        for key, attr, _ in _IFACE_FIELDS:
            items.append((f"{iface}.{key}", _fmt(float(getattr(spec, attr)))))
    items.append(("lte.max_channels", str(cfg.lte.max_channels)))
    if cfg.custom_points:
        items.append(
            ("custom.points", " ".join(f"{s}:{r}:{_fmt(float(b))}" for s, r, b in cfg.custom_points))
        )
    return items


def dump_config(cfg: SimConfig = SimConfig()) -> str:
    lines = ["# m2msim configuration (key = value)"]
    lines += [f"{k} = {v}" for k, v in config_items(cfg)]
    return "\n".join(lines) + "\n"


def parse_config_text(text: str) -> dict[str, str]:
    values: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        values[key.strip()] = value.strip()
    return values


def _parse_points(text: str) -> tuple[tuple[int, int, float], ...]:
    points = []
    for tok in text.split():
        try:
            s, r, b = tok.split(":")
            points.append((int(s), int(r), float(b)))
        except ValueError:
            raise ConfigError(f"bad custom point {tok!r}; expected n_sources:n_relays:rbw_hz") from None
    return tuple(points)


def apply_overrides(cfg: SimConfig, values: dict[str, str]) -> SimConfig:
    """Return ``cfg`` with string ``values`` applied; unknown keys raise."""
    scalars = _scalar_keys()
    changes: dict[str, object] = {}
    fading: dict[str, float] = {}
    ifaces: dict[str, dict[str, object]] = {}
    for key, raw in values.items():
        try:
            if key in scalars:
                attr, typ = scalars[key]
                changes[attr] = typ(float(raw)) if typ is int else float(raw)
                if typ is int and float(raw) != int(float(raw)):
                    raise ValueError(f"{raw!r} is not an integer")
            elif key == "s4.requested_bw_khz":
                changes["s4_requested_bw_khz"] = tuple(float(v) for v in raw.split(","))
            elif key == "custom.points":
                changes["custom_points"] = _parse_points(raw)
            elif key.startswith("channel."):
                attr = dict(_FADING_FIELDS).get(key.split(".", 1)[1])
                if attr is None:
                    raise ConfigError(f"unknown key {key!r}")
                fading[attr] = float(raw)
            elif key.split(".", 1)[0] in ("wifi", "bluetooth", "zwave", "lte"):
                iface, name = key.split(".", 1)
                if iface == "lte" and name == "max_channels":
                    ifaces.setdefault(iface, {})["max_channels"] = int(raw)
                    continue
                attr = {k: a for k, a, _ in _IFACE_FIELDS}.get(name)
                if attr is None:
                    raise ConfigError(f"unknown key {key!r}")
                ifaces.setdefault(iface, {})[attr] = float(raw)
            else:
                raise ConfigError(f"unknown key {key!r}")
        except ConfigError:
            raise
        except ValueError as exc:
            raise ConfigError(f"{key}: {exc}") from None
    try:
        if fading:
            changes["fading"] = dataclasses.replace(cfg.fading, **fading)
        for iface, attrs in ifaces.items():
            changes[iface] = dataclasses.replace(getattr(cfg, iface), **attrs)
        out = dataclasses.replace(cfg, **changes)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    if out.lte.kind is not LinkKind.M2B:
        raise ConfigError("lte must be an M2B interface")
    return out


def load_config(path, base: SimConfig | None = None) -> SimConfig:
    return apply_overrides(base or SimConfig(), parse_config_text(Path(path).read_text()))
