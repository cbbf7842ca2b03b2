"""Command line entry point.

Usage::

    aoitraj gen    --m 14 --seed 7 --out scenario.json
    aoitraj solve  --scenario scenario.json --algo dp --algo ga --objective max-aoi --out run/
    aoitraj sweep  --ms 5 6 7 8 9 --trials 10 --algo dp --algo ga --out sweep/
    aoitraj curves --m 14 --seed 7 --algo dp --algo ga --algo greedy --objective max-aoi --out fig2/

``--config file.json`` supplies defaults for any flag; flags given on the
command line win.  Config keys are the long flag names with dashes
replaced by underscores (``ga_generations``, ``ref_gain_db``, ...); ``algo``
and ``objective`` take lists.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import fields

from . import bench
from .errors import DomainError
from .heuristic import GaParams
from .metrics import Objective
from .scenario_io import radio_from_dict

log = logging.getLogger("aoitraj")

_GA_FLAGS = {f.name: f for f in fields(GaParams)}


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON file with default values for any flag")
    p.add_argument("--m", type=int, help="number of sensor nodes for a generated scenario")
    p.add_argument("--radius", type=float, help="disk radius in meters (default 1000)")
    p.add_argument("--seed", type=int, help="scenario seed (base seed for sweeps)")
    p.add_argument("--tx-power", type=float, help="node transmit power, W (default 0.1)")
    p.add_argument("--packet-bits", type=float, help="packet length, bits (default 1e6)")
    p.add_argument("--bandwidth-hz", type=float, help="system bandwidth (default 5e6)")
    p.add_argument("--ref-gain-db", type=float, help="channel gain at 1 m in dB (default -60)")
    p.add_argument("--altitude", type=float, help="flight altitude, m (default 50)")
    p.add_argument("--noise-dbm", type=float, help="receiver noise power in dBm (default -110)")
    p.add_argument("--speed", type=float, help="flight speed, m/s (default 20)")
    p.add_argument("--out", help="output file (gen) or directory")
    p.add_argument("-v", "--verbose", action="store_true")


def _solver_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--scenario", help="scenario JSON file (otherwise one is generated)")
    p.add_argument("--algo", action="append", choices=bench.ALGORITHMS, help="repeatable")
    p.add_argument("--objective", action="append", choices=[o.value for o in Objective], help="repeatable")
    p.add_argument("--timing", action="store_true", help="also write wall-clock times (breaks byte-identical reruns)")
    for name, f in _GA_FLAGS.items():
        flag = "--ga-" + name.replace("_", "-")
        if f.type in (bool, "bool"):
            p.add_argument(flag, action=argparse.BooleanOptionalAction, default=None)
        else:
            conv = float if f.type in (float, "float") else int
            p.add_argument(flag, type=conv, default=None, help=f"default {f.default}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="aoitraj", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate a random scenario file")
    _common(gen)

    for name, help_ in (
        ("solve", "solve one scenario"),
        ("curves", "per-position age curves for one scenario"),
        ("sweep", "solve random scenarios over a range of M"),
    ):
        p = sub.add_parser(name, help=help_)
        _common(p)
        _solver_flags(p)
        if name == "sweep":
            p.add_argument("--ms", type=int, nargs="+", help="values of M to sweep")
            p.add_argument("--trials", type=int, help="scenarios per M (default 10)")
    return parser


def _merged(args: argparse.Namespace) -> dict:
    opts: dict = {}
    if args.config:
        with open(args.config) as fh:
            opts.update(json.load(fh))
    for k, v in vars(args).items():
        if v is not None and k != "config":
            opts[k] = v
    return opts


def config_from_args(args: argparse.Namespace) -> bench.ExperimentConfig:
    o = _merged(args)
    radio_db = {}
    for key, field_name in (
        ("bandwidth_hz", "bandwidth_hz"),
        ("ref_gain_db", "ref_gain_db"),
        ("altitude", "altitude_m"),
        ("noise_dbm", "noise_power_dbm"),
        ("speed", "speed_mps"),
    ):
        if key in o:
            radio_db[field_name] = o[key]
    ga = {name: o["ga_" + name] for name in _GA_FLAGS if "ga_" + name in o}
    sweep = None
    if o.get("command") == "sweep":
        sweep = bench.SweepSpec(
            ms=tuple(o.get("ms") or ()), trials=o.get("trials", 10), base_seed=o.get("seed", 0)
        )
    kwargs = dict(
        scenario_path=o.get("scenario"),
        m=o.get("m"),
        radius_m=o.get("radius", 1000.0),
        seed=o.get("seed", 0),
        radio=radio_from_dict(radio_db),
        tx_power_w=o.get("tx_power", 0.1),
        packet_bits=o.get("packet_bits", 1e6),
        ga=GaParams(**ga),
        sweep=sweep,
        out=o.get("out", "scenario.json" if o.get("command") == "gen" else "results"),
        timing=bool(o.get("timing", False)),
    )
    if o.get("algo"):
        kwargs["algorithms"] = tuple(o["algo"])
    if o.get("objective"):
        kwargs["objectives"] = tuple(o["objective"])
    return bench.ExperimentConfig(**kwargs)


def _print_rows(rows) -> None:
    print(f"{'scenario':<12} {'M':>3} {'algo':<7} {'objective':<8} {'value [s]':>14}  trajectory")
    for r in rows:
        traj = " ".join(map(str, r.trajectory))
        print(f"{r.scenario_id:<12} {r.m:>3} {r.algorithm:<7} {r.objective:<8} {r.objective_value:>14.6f}  {traj}")


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        config = config_from_args(args)
        if args.command == "gen":
            sc = bench.cmd_gen(config, config.out)
            print(f"wrote {config.out}: M={sc.m} radius={config.radius_m} seed={config.seed}")
        elif args.command == "solve":
            rows, paths = bench.cmd_solve(config)
            _print_rows(rows)
            print("wrote " + ", ".join(map(str, paths)))
        elif args.command == "curves":
            rows, paths = bench.cmd_curves(config)
            _print_rows(rows)
            print("wrote " + ", ".join(map(str, paths)))
        elif args.command == "sweep":
            rows, summary, paths = bench.cmd_sweep(config)
            for s in summary:
                print(
                    f"M={s['m']:>3} {s['algorithm']:<7} {s['objective']:<8} "
                    f"mean X1={s['mean_max_age']:.4f}  mean avg={s['mean_avg_age']:.4f}"
                )
            print("wrote " + ", ".join(map(str, paths)))
    except (DomainError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
