"""Link budget, SINR and Shannon capacity for M2M and M2B links.

Gains are handled in dB and converted to linear power ratios only where
they enter an SINR. The sign convention is

    gain_db = -path_loss_db + shadowing_db + fading_db

so that a longer link always attenuates the received power.

Every function accepts numpy arrays as well as scalars; the scenario
harness evaluates whole source x relay matrices at once.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np


class LinkKind(str, enum.Enum):
    M2M = "M2M"
    M2B = "M2B"


@dataclass(frozen=True)
class RfInterfaceSpec:
    """Static radio parameters of one interface technology.

    Attributes:
        name: Short identifier, e.g. ``"wifi"``.
        uplink_center_frequency: Carrier frequency in MHz (informational;
            the distance-power path loss model does not use it).
        total_bandwidth: Total bandwidth of the interface in Hz.
        machine_tx_power: Transmit power of a machine in watts.
        bs_tx_power: Transmit power of the base station in watts.
        max_device_rate: Per-device rate cap in bits/s.
        max_range: Maximum usable link distance in meters.
        kind: Whether the interface serves M2M or M2B links.
        max_channels: Channel count limit; only meaningful for M2B.
    """

    name: str
    uplink_center_frequency: float
    total_bandwidth: float
    machine_tx_power: float
    bs_tx_power: float
    max_device_rate: float
    max_range: float
    kind: LinkKind = LinkKind.M2M
    max_channels: int | None = None

    def __post_init__(self):
        if self.total_bandwidth <= 0:
            raise ValueError(f"{self.name}: total_bandwidth must be positive")
        if self.max_device_rate <= 0:
            raise ValueError(f"{self.name}: max_device_rate must be positive")
        if self.max_range <= 0:
            raise ValueError(f"{self.name}: max_range must be positive")
        if self.machine_tx_power <= 0 or self.bs_tx_power <= 0:
            raise ValueError(f"{self.name}: transmit powers must be positive")
        if self.max_channels is not None and self.max_channels < 0:
            raise ValueError(f"{self.name}: max_channels must be >= 0")


# Default radio parameters of the evaluated cell.
WIFI = RfInterfaceSpec("wifi", 5600.0, 20e6, 0.1, 0.1, 54e6, 120.0)
BLUETOOTH = RfInterfaceSpec("bluetooth", 2400.0, 1e6, 2.5e-3, 2.5e-3, 3e6, 10.0)
ZWAVE = RfInterfaceSpec("zwave", 908.42, 200e3, 1e-3, 1e-3, 100e3, 30.0)
LTE = RfInterfaceSpec(
    "lte", 1910.0, 20e6, 0.2, 10.0, 100e6, 1000.0, kind=LinkKind.M2B, max_channels=128
)


@dataclass(frozen=True)
class FadingParams:
    """Large- and small-scale propagation parameters.

    ``noise_psd`` is the effective receiver noise density in dBm/Hz; the
    noise power of a link is this density integrated over the link
    bandwidth (see :func:`noise_power`). The default of -85 dBm/Hz lumps
    thermal noise (-174 dBm/Hz) together with receiver noise figure and
    the loss up to the reference distance, which the log-distance model
    leaves out. With bare thermal noise every direct LTE link runs at
    ~90 dB SNR and relaying never pays off.
    """

    shadowing_mean_db: float = 0.0
    shadowing_std_db: float = 8.0
    rayleigh_scale: float = 1.0
    path_loss_exponent: float = 4.0
    reference_distance: float = 10.0
    noise_psd: float = -85.0

    def __post_init__(self):
        if self.shadowing_std_db < 0:
            raise ValueError("shadowing_std_db must be >= 0")
        if self.rayleigh_scale <= 0:
            raise ValueError("rayleigh_scale must be positive")
        if self.path_loss_exponent <= 0:
            raise ValueError("path_loss_exponent must be positive")
        if self.reference_distance <= 0:
            raise ValueError("reference_distance must be positive")


@dataclass(frozen=True)
class LinkRealization:
    path_loss_db: float
    shadowing_db: float
    fading_db: float

    @property
    def gain_db(self) -> float:
        return -self.path_loss_db + self.shadowing_db + self.fading_db

    @property
    def gain_linear(self) -> float:
        return db_to_linear(self.gain_db)


def db_to_linear(value_db):
    return np.power(10.0, np.asarray(value_db, dtype=float) / 10.0)


def path_loss_db(distance, params: FadingParams = FadingParams()):
    """Log-distance path loss ``10 * beta * log10(d / d0)`` in dB.

    Distances below the reference distance give a negative loss; this is
    deliberate and not clamped.
    """
    d = np.asarray(distance, dtype=float)
    if np.any(~(d > 0)):
        raise ValueError("distance must be strictly positive")
    pl = 10.0 * params.path_loss_exponent * np.log10(d / params.reference_distance)
    return pl if pl.ndim else float(pl)


def draw_gain_components(distance, params: FadingParams, rng: np.random.Generator):
    """Sample shadowing and fading for an array of link distances.

    Returns ``(path_loss_db, shadowing_db, fading_db)`` arrays shaped like
    ``distance``. Shadowing is drawn before fading for the whole array, so
    the draw order is fixed for a given shape.
    """
    pl = np.asarray(path_loss_db(distance, params), dtype=float)
    shadowing = rng.normal(params.shadowing_mean_db, params.shadowing_std_db, size=pl.shape)
    amplitude = rng.rayleigh(params.rayleigh_scale, size=pl.shape)
    fading = 20.0 * np.log10(amplitude)
    return pl, shadowing, fading


def sample_link(distance: float, params: FadingParams, rng: np.random.Generator) -> LinkRealization:
    pl, shadowing, fading = draw_gain_components(float(distance), params, rng)
    return LinkRealization(float(pl), float(shadowing), float(fading))


def noise_power(bandwidth, params: FadingParams = FadingParams()):
    """Noise power in watts over ``bandwidth`` Hz."""
    b = np.asarray(bandwidth, dtype=float)
    out = np.power(10.0, (params.noise_psd + 10.0 * np.log10(b) - 30.0) / 10.0)
    return out if out.ndim else float(out)


def sinr(tx_power: float, gain: float, interferers=(), noise: float = 1.0) -> float:
    """SINR of one link; ``interferers`` is an iterable of (power W, linear gain)."""
    if noise <= 0:
        raise ValueError("noise power must be positive")
    if gain < 0:
        raise ValueError("gain must be >= 0")
    interference = 0.0
    for p_k, h_k in interferers:
        if h_k < 0:
            raise ValueError("interferer gain must be >= 0")
        interference += p_k * h_k
    return tx_power * gain / (noise + interference)


def m2m_sinr_matrix(tx_power: float, gain: np.ndarray, noise: float) -> np.ndarray:
    """SINR of every source -> relay link on one M2M interface.

    ``gain[i, j]`` is the linear gain from source ``i`` to relay ``j``.
    Every other source on the same interface interferes at the relay,
    whether or not it ends up transmitting there.
    """
    received = tx_power * np.asarray(gain, dtype=float)
    total = received.sum(axis=0, keepdims=True)
    interference = np.maximum(total - received, 0.0)
    return received / (noise + interference)


def shannon_rate(bandwidth, sinr_value):
    return np.asarray(bandwidth, dtype=float) * np.log2(1.0 + np.asarray(sinr_value, dtype=float))


def link_capacity(bandwidth, sinr_value, spec: RfInterfaceSpec, distance):
    """Achievable rate in bits/s of a link on ``spec``.

    The Shannon rate is capped at the interface's per-device maximum. A
    link is unusable (rate 0) when it is longer than the interface range
    or when the requested bandwidth exceeds what the interface offers.
    """
    b = np.asarray(bandwidth, dtype=float)
    s = np.asarray(sinr_value, dtype=float)
    if np.any(b <= 0):
        raise ValueError("bandwidth must be positive")
    if np.any(s < 0):
        raise ValueError("sinr must be >= 0")
    rate = np.minimum(shannon_rate(b, s), spec.max_device_rate)
    usable = (np.asarray(distance, dtype=float) <= spec.max_range) & (b <= spec.total_bandwidth)
    out = np.where(usable, rate, 0.0)
    return out if out.ndim else float(out)


def two_hop_rate(first_hop, second_hop):
    """Decode-and-forward rate: the weaker hop limits the route."""
    if np.any(np.asarray(first_hop) < 0) or np.any(np.asarray(second_hop) < 0):
        raise ValueError("hop rates must be >= 0")
    out = np.minimum(first_hop, second_hop)
    return out if np.ndim(out) else float(out)
