"""Experiment harness behind the ``aoitraj`` command.

Everything here is deterministic given the config: scenarios come from
explicit seeds, solves run in a fixed canonical order, and numbers are
written with ``repr`` so reruns produce byte-identical files.  Wall-clock
times are only written when ``timing=True``.

Output files
------------
``results.csv`` / ``sweep_rows.csv`` columns, in order::

    scenario_id, m, algorithm, objective, seed, objective_value,
    max_age, avg_age, trajectory, ages, weighted_partials[, wall_time]

List-valued cells (trajectory, ages, weighted_partials) are ``;``-joined and
indexed by visit position.

``sweep_summary.csv``::

    m, algorithm, objective, trials, mean_max_age, mean_avg_age,
    mean_objective_value

``curves.csv``::

    algorithm, objective, position, node_id, age, weighted_partial

``results.json`` holds the scenario (same schema as scenario files) and
the full list of rows.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import math
import os
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import CapacityError, DomainError
from .exact import MAX_BRUTE_NODES, MAX_DP_NODES, SolveResult, brute_force, dp_solve
from .heuristic import GaParams, ga_solve, greedy_solve
from .metrics import Objective, evaluate
from .netmodel import RadioParams, Scenario, TransitCostMatrix, random_scenario, transit_matrix
from .scenario_io import dumps_scenario, load_scenario, scenario_to_dict

log = logging.getLogger(__name__)

ALGORITHMS = ("dp", "ga", "greedy", "brute")
OBJECTIVES = (Objective.MAX_AOI, Objective.AVE_AOI)
CAPACITY = {"dp": MAX_DP_NODES, "brute": MAX_BRUTE_NODES}
CONSISTENCY_RTOL = 1e-9

ROW_COLUMNS = [
    "scenario_id", "m", "algorithm", "objective", "seed", "objective_value",
    "max_age", "avg_age", "trajectory", "ages", "weighted_partials",
]
SUMMARY_COLUMNS = [
    "m", "algorithm", "objective", "trials", "mean_max_age", "mean_avg_age", "mean_objective_value",
]
CURVE_COLUMNS = ["algorithm", "objective", "position", "node_id", "age", "weighted_partial"]


@dataclass(frozen=True)
class SweepSpec:
    ms: tuple[int, ...]
    trials: int = 10
    base_seed: int = 0

    def __post_init__(self) -> None:
        if not self.ms:
            raise DomainError("sweep needs at least one value of M")
        if self.trials < 1:
            raise DomainError("sweep needs at least one trial per M")
        if min(self.ms) < 1:
            raise DomainError("every M in a sweep must be >= 1")


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything a run depends on.

    The scenario is read from ``scenario_path`` when given, otherwise drawn
    with ``m``, ``radius_m`` and ``seed``.
    """

    scenario_path: str | None = None
    m: int | None = None
    radius_m: float = 1000.0
    seed: int = 0
    radio: RadioParams = field(default_factory=RadioParams)
    tx_power_w: float = 0.1
    packet_bits: float = 1e6
    algorithms: tuple[str, ...] = ("dp", "ga", "greedy")
    objectives: tuple[Objective, ...] = OBJECTIVES
    ga: GaParams = field(default_factory=GaParams)
    sweep: SweepSpec | None = None
    out: str = "results"
    timing: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "objectives", tuple(Objective(o) for o in self.objectives))
        if not self.algorithms:
            raise DomainError("select at least one algorithm")
        if not self.objectives:
            raise DomainError("select at least one objective")
        unknown = set(self.algorithms) - set(ALGORITHMS)
        if unknown:
            raise DomainError(f"unknown algorithms {sorted(unknown)}; choose from {ALGORITHMS}")

    def canonical_algorithms(self) -> list[str]:
        return [a for a in ALGORITHMS if a in self.algorithms]

    def canonical_objectives(self) -> list[Objective]:
        return [o for o in OBJECTIVES if o in self.objectives]

    def check_capacity(self, m: int) -> None:
        for algo in self.canonical_algorithms():
            cap = CAPACITY.get(algo)
            if cap is not None and m > cap:
                raise CapacityError(
                    f"{algo} is limited to M <= {cap} but M = {m}; drop it or use ga instead"
                )

    def scenario(self) -> Scenario:
        if self.scenario_path:
            return load_scenario(self.scenario_path)
        if self.m is None:
            raise DomainError("give either a scenario file or a node count m")
        return random_scenario(
            self.m, self.radius_m, self.radio, self.tx_power_w, self.packet_bits, self.seed
        )


@dataclass(frozen=True)
class ResultRow:
    scenario_id: str
    m: int
    algorithm: str
    objective: str
    trajectory: tuple[int, ...]
    objective_value: float
    ages: tuple[float, ...]
    weighted_partials: tuple[float, ...]
    wall_time: float
    seed: int

    @property
    def max_age(self) -> float:
        return self.ages[0]

    @property
    def avg_age(self) -> float:
        return math.fsum(self.ages) / len(self.ages)


def trial_seed(base_seed: int, m: int, trial: int) -> int:
    """Seed for one sweep trial, mixed from (base_seed, M, trial) by SeedSequence.

    Each trial's seed depends only on its own triple, so adding trials or
    values of M leaves existing ones untouched.
    """
    return int(np.random.SeedSequence([base_seed, m, trial]).generate_state(1, dtype=np.uint32)[0])


def run_algorithm(eta: TransitCostMatrix, algorithm: str, objective: Objective, ga: GaParams) -> SolveResult:
    if algorithm == "dp":
        return dp_solve(eta, objective)
    if algorithm == "ga":
        return ga_solve(eta, objective, ga)
    if algorithm == "greedy":
        return greedy_solve(eta, objective)
    if algorithm == "brute":
        return brute_force(eta, objective)
    raise DomainError(f"unknown algorithm {algorithm!r}")


def make_row(scenario_id: str, eta: TransitCostMatrix, result: SolveResult, seed: int) -> ResultRow:
    """Re-evaluate a solver's trajectory and refuse it if the value disagrees."""
    report = evaluate(result.trajectory, eta)
    check = report.value(result.objective)
    if not math.isclose(check, result.objective_value, rel_tol=CONSISTENCY_RTOL):
        raise RuntimeError(
            f"{result.algorithm} reported {result.objective_value!r} but its trajectory "
            f"evaluates to {check!r} under {result.objective}"
        )
    return ResultRow(
        scenario_id=scenario_id,
        m=eta.m,
        algorithm=result.algorithm,
        objective=str(result.objective),
        trajectory=result.trajectory,
        objective_value=result.objective_value,
        ages=report.ages,
        weighted_partials=report.weighted_partials,
        wall_time=result.wall_time,
        seed=seed,
    )


def solve_scenario(
    scenario: Scenario, config: ExperimentConfig, scenario_id: str, seed: int, ga: GaParams | None = None
) -> list[ResultRow]:
    config.check_capacity(scenario.m)
    eta = transit_matrix(scenario)
    ga = ga or config.ga
    rows = []
    for algo in config.canonical_algorithms():
        for obj in config.canonical_objectives():
            res = run_algorithm(eta, algo, obj, ga)
            log.debug("%s %s %s -> %r", scenario_id, algo, obj, res.objective_value)
            rows.append(make_row(scenario_id, eta, res, seed))
    return rows


# ---------------------------------------------------------------------------
# Serialisation
# ---------------------------------------------------------------------------

def _fmt(x) -> str:
    if isinstance(x, (tuple, list)):
        return ";".join(_fmt(v) for v in x)
    if isinstance(x, float):
        return repr(x)
    return str(x)


def rows_to_csv(rows: Iterable[ResultRow], timing: bool = False) -> str:
    cols = ROW_COLUMNS + (["wall_time"] if timing else [])
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(cols)
    for r in rows:
        w.writerow([_fmt(getattr(r, c)) for c in cols])
    return buf.getvalue()


def row_to_dict(row: ResultRow, timing: bool = False) -> dict:
    d = asdict(row)
    d["trajectory"] = list(row.trajectory)
    d["ages"] = list(row.ages)
    d["weighted_partials"] = list(row.weighted_partials)
    if not timing:
        del d["wall_time"]
    return d


def summarize(rows: Sequence[ResultRow]) -> list[dict]:
    groups: dict[tuple[int, str, str], list[ResultRow]] = {}
    for r in rows:
        groups.setdefault((r.m, r.algorithm, r.objective), []).append(r)
    out = []
    for (m, algo, obj), rs in sorted(
        groups.items(), key=lambda kv: (kv[0][0], ALGORITHMS.index(kv[0][1]), kv[0][2] != "max-aoi")
    ):
        out.append({
            "m": m,
            "algorithm": algo,
            "objective": obj,
            "trials": len(rs),
            "mean_max_age": math.fsum(r.max_age for r in rs) / len(rs),
            "mean_avg_age": math.fsum(r.avg_age for r in rs) / len(rs),
            "mean_objective_value": math.fsum(r.objective_value for r in rs) / len(rs),
        })
    return out


def _table(columns: list[str], records: Iterable[dict]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for rec in records:
        w.writerow([_fmt(rec[c]) for c in columns])
    return buf.getvalue()


def curves_table(rows: Sequence[ResultRow]) -> list[dict]:
    recs = []
    for r in rows:
        for pos, (node, age, part) in enumerate(zip(r.trajectory, r.ages, r.weighted_partials), start=1):
            recs.append({
                "algorithm": r.algorithm, "objective": r.objective, "position": pos,
                "node_id": node, "age": age, "weighted_partial": part,
            })
    return recs


def write_outputs(out_dir: str | os.PathLike, files: dict[str, str]) -> list[Path]:
    """Write every file or none: content is staged to temp names, then renamed."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    staged = []
    try:
        for name, text in files.items():
            tmp = out / f".{name}.tmp"
            tmp.write_text(text)
            staged.append((tmp, out / name))
    except OSError:
        for tmp, _ in staged:
            tmp.unlink(missing_ok=True)
        raise
    for tmp, final in staged:
        os.replace(tmp, final)
    return [final for _, final in staged]


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def _scenario_id(config: ExperimentConfig) -> str:
    if config.scenario_path:
        return Path(config.scenario_path).stem
    return f"m{config.m}-s{config.seed}"


def cmd_solve(config: ExperimentConfig) -> tuple[list[ResultRow], list[Path]]:
    scenario = config.scenario()
    rows = solve_scenario(scenario, config, _scenario_id(config), config.seed)
    doc = {
        "scenario": scenario_to_dict(scenario),
        "results": [row_to_dict(r, config.timing) for r in rows],
    }
    paths = write_outputs(config.out, {
        "results.csv": rows_to_csv(rows, config.timing),
        "results.json": json.dumps(doc, indent=2) + "\n",
    })
    return rows, paths


def cmd_sweep(config: ExperimentConfig) -> tuple[list[ResultRow], list[dict], list[Path]]:
    if config.sweep is None:
        raise DomainError("sweep settings are required")
    sw = config.sweep
    # validate every M before solving anything
    for m in sw.ms:
        config.check_capacity(m)
    rows: list[ResultRow] = []
    for m in sw.ms:
        for trial in range(sw.trials):
            seed = trial_seed(sw.base_seed, m, trial)
            scen = random_scenario(m, config.radius_m, config.radio, config.tx_power_w, config.packet_bits, seed)
            rows.extend(solve_scenario(scen, config, f"m{m}-t{trial}", seed, replace(config.ga, seed=seed)))
    summary = summarize(rows)
    paths = write_outputs(config.out, {
        "sweep_rows.csv": rows_to_csv(rows, config.timing),
        "sweep_summary.csv": _table(SUMMARY_COLUMNS, summary),
    })
    return rows, summary, paths


def cmd_curves(config: ExperimentConfig) -> tuple[list[ResultRow], list[Path]]:
    scenario = config.scenario()
    rows = solve_scenario(scenario, config, _scenario_id(config), config.seed)
    paths = write_outputs(config.out, {"curves.csv": _table(CURVE_COLUMNS, curves_table(rows))})
    return rows, paths


def cmd_gen(config: ExperimentConfig, path: str | os.PathLike) -> Scenario:
    """Draw a scenario from the generator settings and write it as JSON."""
    if config.m is None:
        raise DomainError("gen needs a node count m")
    scenario = random_scenario(
        config.m, config.radius_m, config.radio, config.tx_power_w, config.packet_bits, config.seed
    )
    text = dumps_scenario(scenario)
    path = Path(path)
    if path.parent != Path(""):
        path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)
    return scenario
