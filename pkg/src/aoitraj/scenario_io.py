"""JSON scenario files.

Schema::

    {
      "data_center": {"x": 0.0, "y": 0.0},
      "radio": {"bandwidth_hz": 5e6, "ref_gain_db": -60.0, "altitude_m": 50.0,
                "noise_power_dbm": -110.0, "speed_mps": 20.0},
      "nodes": [{"id": 1, "x": 100.0, "y": 0.0, "tx_power_w": 0.1,
                 "packet_bits": 1000000.0}, ...]
    }

``ref_gain_db`` is in dB and ``noise_power_dbm`` in dBm; both become linear
on load and are converted back on save.
"""

from __future__ import annotations

import json
import os
from pathlib import Path
from typing import Any

from .errors import DomainError
from .netmodel import (
    RadioParams,
    Scenario,
    SensorNode,
    db_to_linear,
    dbm_to_watts,
    linear_to_db,
    watts_to_dbm,
)


def radio_to_dict(radio: RadioParams) -> dict[str, float]:
    return {
        "bandwidth_hz": radio.bandwidth_hz,
        "ref_gain_db": linear_to_db(radio.ref_gain),
        "altitude_m": radio.altitude_m,
        "noise_power_dbm": watts_to_dbm(radio.noise_power_w),
        "speed_mps": radio.speed_mps,
    }


def radio_from_dict(d: dict[str, Any]) -> RadioParams:
    defaults = radio_to_dict(RadioParams())
    unknown = set(d) - set(defaults)
    if unknown:
        raise DomainError(f"unknown radio fields: {sorted(unknown)}")
    merged = {**defaults, **d}
    return RadioParams(
        bandwidth_hz=float(merged["bandwidth_hz"]),
        ref_gain=db_to_linear(float(merged["ref_gain_db"])),
        altitude_m=float(merged["altitude_m"]),
        noise_power_w=dbm_to_watts(float(merged["noise_power_dbm"])),
        speed_mps=float(merged["speed_mps"]),
    )


def scenario_to_dict(scenario: Scenario) -> dict[str, Any]:
    return {
        "data_center": {"x": scenario.data_center[0], "y": scenario.data_center[1]},
        "radio": radio_to_dict(scenario.radio),
        "nodes": [
            {
                "id": n.id,
                "x": n.position[0],
                "y": n.position[1],
                "tx_power_w": n.tx_power_w,
                "packet_bits": n.packet_bits,
            }
            for n in scenario.nodes
        ],
    }


def scenario_from_dict(d: dict[str, Any]) -> Scenario:
    try:
        dc = d["data_center"]
        nodes = [
            SensorNode(
                int(n["id"]),
                (float(n["x"]), float(n["y"])),
                float(n["tx_power_w"]),
                float(n["packet_bits"]),
            )
            for n in d["nodes"]
        ]
        return Scenario((float(dc["x"]), float(dc["y"])), tuple(nodes), radio_from_dict(d.get("radio", {})))
    except KeyError as exc:
        raise DomainError(f"scenario is missing field {exc}") from None


def dumps_scenario(scenario: Scenario) -> str:
    return json.dumps(scenario_to_dict(scenario), indent=2) + "\n"


def save_scenario(scenario: Scenario, path: str | os.PathLike) -> None:
    Path(path).write_text(dumps_scenario(scenario))


def load_scenario(path: str | os.PathLike) -> Scenario:
    with open(path) as fh:
        return scenario_from_dict(json.load(fh))
