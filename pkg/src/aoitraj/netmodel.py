"""Sensor field, LoS link budget and the inter-visit cost matrix.

All quantities are linear SI units.  Decibel values only appear at the
file/CLI boundary (see :func:`db_to_linear` and friends).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DomainError

Point = tuple[float, float]


def _require_positive(name: str, value: float) -> None:
    if not (value > 0) or not math.isfinite(value):
        raise DomainError(f"{name} must be a positive finite number, got {value!r}")


# ---------------------------------------------------------------------------
# dB helpers (ingestion boundary only)
# ---------------------------------------------------------------------------

def db_to_linear(db: float) -> float:
    return 10.0 ** (db / 10.0)


def dbm_to_watts(dbm: float) -> float:
    return 10.0 ** ((dbm - 30.0) / 10.0)


def _shortest_inverse(target: float, approx: float, forward) -> float:
    # Prefer the shortest decimal whose forward conversion lands exactly on
    # ``target`` so that files written by hand survive a load/save cycle.
    for digits in range(0, 16):
        cand = round(approx, digits)
        if forward(cand) == target:
            return cand
    return approx


def linear_to_db(value: float) -> float:
    _require_positive("linear ratio", value)
    return _shortest_inverse(value, 10.0 * math.log10(value), db_to_linear)


def watts_to_dbm(value: float) -> float:
    _require_positive("power", value)
    return _shortest_inverse(value, 10.0 * math.log10(value) + 30.0, dbm_to_watts)


# ---------------------------------------------------------------------------
# Domain types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RadioParams:
    """Air-interface and flight parameters shared by every link.

    Attributes:
        bandwidth_hz: system bandwidth B.
        ref_gain: channel power gain at 1 m, linear (not dB).
        altitude_m: constant flight altitude h.
        noise_power_w: receiver noise power, watts.
        speed_mps: constant cruise speed V.
    """

    bandwidth_hz: float = 5e6
    ref_gain: float = 1e-6
    altitude_m: float = 50.0
    noise_power_w: float = 1e-14
    speed_mps: float = 20.0

    def __post_init__(self) -> None:
        for name in ("bandwidth_hz", "ref_gain", "altitude_m", "noise_power_w", "speed_mps"):
            _require_positive(name, getattr(self, name))

    @property
    def channel_gain(self) -> float:
        """LoS power gain straight below the UAV, ``ref_gain / altitude**2``."""
        return self.ref_gain / self.altitude_m**2


@dataclass(frozen=True)
class SensorNode:
    id: int
    position: Point
    tx_power_w: float = 0.1
    packet_bits: float = 1e6

    def __post_init__(self) -> None:
        _require_positive("tx_power_w", self.tx_power_w)
        _require_positive("packet_bits", self.packet_bits)
        object.__setattr__(self, "position", (float(self.position[0]), float(self.position[1])))


@dataclass(frozen=True)
class Scenario:
    """A data center, M >= 1 sensor nodes and the radio they share.

    Node ids must run 1..M in order; index 0 is reserved for the data
    center everywhere in the package.
    """

    data_center: Point
    nodes: tuple[SensorNode, ...]
    radio: RadioParams = field(default_factory=RadioParams)

    def __post_init__(self) -> None:
        object.__setattr__(self, "nodes", tuple(self.nodes))
        object.__setattr__(
            self, "data_center", (float(self.data_center[0]), float(self.data_center[1]))
        )
        if len(self.nodes) < 1:
            raise DomainError("a scenario needs at least one sensor node")
        ids = [n.id for n in self.nodes]
        if ids != list(range(1, len(ids) + 1)):
            raise DomainError(f"node ids must be 1..M in order, got {ids}")
        seen: dict[Point, int] = {self.data_center: 0}
        for n in self.nodes:
            if n.position in seen:
                raise DomainError(
                    f"nodes {seen[n.position]} and {n.id} share position {n.position}"
                )
            seen[n.position] = n.id

    @property
    def m(self) -> int:
        return len(self.nodes)

    def positions(self) -> np.ndarray:
        """(M+1, 2) array of coordinates, row 0 being the data center."""
        return np.array([self.data_center] + [n.position for n in self.nodes], dtype=float)


class TransitCostMatrix:
    """Inter-visit times ``eta[i, j]`` over nodes 0..M (0 = data center).

    Row ``i >= 1`` includes node i's upload time, row 0 is pure flight time.
    The diagonal is NaN so any accidental read poisons the result instead of
    passing silently.
    """

    __slots__ = ("_values",)

    def __init__(self, values: np.ndarray | Sequence[Sequence[float]]):
        arr = np.array(values, dtype=float)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] < 2:
            raise DomainError(f"expected an (M+1)x(M+1) matrix with M >= 1, got shape {arr.shape}")
        np.fill_diagonal(arr, np.nan)
        off = arr[~np.eye(arr.shape[0], dtype=bool)]
        if not np.all(np.isfinite(off)) or np.any(off <= 0):
            raise DomainError("off-diagonal transit costs must be positive and finite")
        arr.setflags(write=False)
        self._values = arr

    @property
    def values(self) -> np.ndarray:
        return self._values

    @property
    def m(self) -> int:
        """Number of sensor nodes (excluding the data center)."""
        return self._values.shape[0] - 1

    def __getitem__(self, ij: tuple[int, int]) -> float:
        i, j = ij
        assert i != j, "diagonal transit cost is undefined"
        return float(self._values[i, j])

    def scaled(self, c: float) -> "TransitCostMatrix":
        return TransitCostMatrix(self._values * c)

    def __repr__(self) -> str:
        return f"TransitCostMatrix(m={self.m})"


# ---------------------------------------------------------------------------
# Operations
# ---------------------------------------------------------------------------

def link_snr(radio: RadioParams, tx_power_w: float) -> float:
    """Receive SNR of a node transmitting straight up to the hovering UAV."""
    _require_positive("tx_power_w", tx_power_w)
    # grouping beta / (h^2 sigma^2) first keeps the reference case at exactly 4000
    return radio.ref_gain / (radio.altitude_m**2 * radio.noise_power_w) * tx_power_w


def uplink_rate(radio: RadioParams, tx_power_w: float) -> float:
    """Shannon rate ``B * log2(1 + SNR)`` of the LoS uplink, bit/s."""
    return radio.bandwidth_hz * math.log2(1.0 + link_snr(radio, tx_power_w))


def upload_time(packet_bits: float, rate: float) -> float:
    _require_positive("packet_bits", packet_bits)
    _require_positive("rate", rate)
    return packet_bits / rate


def transit_matrix(scenario: Scenario) -> TransitCostMatrix:
    """Build ``eta[i, j] = upload_time(i) + |s_i - s_j| / V``.

    The data center uploads nothing, so row 0 holds flight times only.
    """
    pos = scenario.positions()
    diff = pos[:, None, :] - pos[None, :, :]
    dist = np.hypot(diff[..., 0], diff[..., 1])
    off = ~np.eye(len(pos), dtype=bool)
    if np.any(dist[off] <= 0):
        i, j = np.argwhere((dist <= 0) & off)[0]
        raise DomainError(f"nodes {i} and {j} are coincident")
    t_tx = np.zeros(len(pos))
    for n in scenario.nodes:
        t_tx[n.id] = upload_time(n.packet_bits, uplink_rate(scenario.radio, n.tx_power_w))
    eta = t_tx[:, None] + dist / scenario.radio.speed_mps
    return TransitCostMatrix(eta)


def _disk_points(rng: np.random.Generator, count: int, radius: float) -> np.ndarray:
    # sqrt on the radial draw makes the density uniform in area
    r = radius * np.sqrt(rng.random(count))
    theta = 2.0 * np.pi * rng.random(count)
    return np.column_stack((r * np.cos(theta), r * np.sin(theta)))


def random_scenario(
    m: int,
    radius_m: float = 1000.0,
    radio: RadioParams | None = None,
    tx_power_w: float = 0.1,
    packet_bits: float = 1e6,
    seed: int = 0,
) -> Scenario:
    """Drop a data center and ``m`` nodes uniformly over a disk.

    Deterministic for a given seed (PCG64 via ``numpy.random.default_rng``).
    """
    if int(m) != m or m < 1:
        raise DomainError(f"m must be a positive integer, got {m!r}")
    _require_positive("radius_m", radius_m)
    radio = radio or RadioParams()
    rng = np.random.default_rng(seed)
    while True:
        pts = _disk_points(rng, int(m) + 1, radius_m)
        if len({(float(x), float(y)) for x, y in pts}) == len(pts):
            break
    nodes = tuple(
        SensorNode(i, (float(pts[i, 0]), float(pts[i, 1])), tx_power_w, packet_bits)
        for i in range(1, int(m) + 1)
    )
    return Scenario((float(pts[0, 0]), float(pts[0, 1])), nodes, radio)
