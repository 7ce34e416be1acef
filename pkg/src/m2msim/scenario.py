"""Monte-Carlo sweeps over cell configurations.

Every run draws one snapshot and one set of link gains and evaluates all
algorithms on that shared instance, so per-run comparisons are paired.
The random stream of run ``r`` at sweep point ``p`` is seeded from
``(base_seed, p, r)`` and does not depend on which other runs execute.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from m2msim.algorithms import STANDARD_ALGORITHMS, AlgorithmConfig, RouteAssignment, timed_run
from m2msim.config import SimConfig
from m2msim.graph import compute_quota, sample_links
from m2msim.topology import CellSnapshot, generate_snapshot

SCENARIO_IDS = ("s1", "s2", "s3", "s4")

CSV_HEADER = (
    "scenario",
    "point",
    "param_name",
    "param_value",
    "algorithm",
    "mean_rate_bps",
    "std_rate_bps",
    "mean_rate_matched_bps",
    "unmatched",
    "exec_ms",
    "runs",
    "seed",
)


@dataclass(frozen=True)
class SweepPoint:
    n_sources: int
    n_relays: int
    requested_bw: float
    param_name: str
    param_value: float


@dataclass(frozen=True)
class ScenarioSpec:
    id: str
    points: tuple[SweepPoint, ...]
    runs: int = 200
    algorithms: tuple[AlgorithmConfig, ...] = STANDARD_ALGORITHMS
    base_seed: int = 0
    config: SimConfig = field(default_factory=SimConfig)

    def validate(self) -> None:
        if not self.points:
            raise ValueError("scenario has no sweep points")
        if self.runs < 1:
            raise ValueError("runs must be >= 1")
        if self.base_seed < 0:
            raise ValueError("seed must be >= 0")
        if not self.algorithms:
            raise ValueError("no algorithms selected")
        names = {spec.name for spec in self.config.m2m_interfaces}
        for algo in self.algorithms:
            missing = set(algo.interfaces) - names
            if missing:
                raise ValueError(f"{algo.name}: unknown interfaces {sorted(missing)}")
        for p in self.points:
            if p.n_sources < 0 or p.n_relays < 0:
                raise ValueError(f"negative machine count in {p}")
            if not p.requested_bw > 0:
                raise ValueError(f"requested bandwidth must be positive in {p}")


def _sweep(max_sources: int, step: int) -> list[int]:
    if step < 1:
        raise ValueError("step must be >= 1")
    values = list(range(0, max_sources + 1, step))
    if values[-1] != max_sources:
        values.append(max_sources)
    return values


def builtin_points(scenario_id: str, cfg: SimConfig) -> tuple[SweepPoint, ...]:
    rbw = cfg.requested_bw
    sid = scenario_id.lower()
    if sid == "s1":
        return tuple(
            SweepPoint(ns, cfg.s1_n_machines - ns, rbw, "n_sources", ns)
            for ns in _sweep(cfg.max_sources, cfg.step)
        )
    if sid == "s2":
        return tuple(
            SweepPoint(ns, cfg.s2_n_relays, rbw, "n_sources", ns)
            for ns in _sweep(cfg.max_sources, cfg.step)
        )
    if sid == "s3":
        return tuple(
            SweepPoint(cfg.s3_n_sources, nr, rbw, "n_relays", nr)
            for nr in _sweep(cfg.max_sources, cfg.step)
        )
    if sid == "s4":
        return tuple(
            SweepPoint(cfg.s4_n_sources, cfg.s4_n_relays, khz * 1e3, "requested_bw_hz", khz * 1e3)
            for khz in cfg.s4_requested_bw_khz
        )
    if sid == "custom":
        return tuple(
            SweepPoint(ns, nr, bw, "point", i) for i, (ns, nr, bw) in enumerate(cfg.custom_points)
        )
    raise ValueError(f"unknown scenario {scenario_id!r}")


def builtin_scenario(
    scenario_id: str,
    cfg: SimConfig | None = None,
    runs: int | None = None,
    seed: int | None = None,
    algorithms: Sequence[AlgorithmConfig] | None = None,
) -> ScenarioSpec:
    cfg = cfg or SimConfig()
    return ScenarioSpec(
        scenario_id.lower(),
        builtin_points(scenario_id, cfg),
        cfg.runs if runs is None else runs,
        tuple(algorithms) if algorithms else STANDARD_ALGORITHMS,
        cfg.seed if seed is None else seed,
        cfg,
    )


def unmatched_expectation(n_sources: int, quota: int) -> int:
    if n_sources < 0 or quota < 0:
        raise ValueError("counts must be >= 0")
    return max(0, n_sources - quota)


@dataclass(frozen=True)
class RunRecord:
    point: int
    run: int
    algorithm: str
    n_sources: int
    quota: int
    total_rate: float
    matched: int
    exec_ms: float

    @property
    def unmatched(self) -> int:
        return self.n_sources - self.matched

    @property
    def mean_rate(self) -> float:
        return self.total_rate / self.n_sources if self.n_sources else 0.0

    @property
    def mean_rate_matched(self) -> float:
        return self.total_rate / self.matched if self.matched else 0.0


@dataclass(frozen=True)
class ReportRow:
    point: int
    sweep: SweepPoint
    algorithm: str
    mean_rate: float
    std_rate: float
    mean_rate_matched: float
    unmatched: float
    exec_ms: float
    runs: int


@dataclass
class ScenarioReport:
    spec: ScenarioSpec
    records: list[RunRecord]
    rows: list[ReportRow] = field(default_factory=list)

    def row(self, point: int, algorithm: str) -> ReportRow:
        for r in self.rows:
            if r.point == point and r.algorithm == algorithm:
                return r
        raise KeyError((point, algorithm))

    def to_csv(self, timing: bool = False) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for r in self.rows:
            writer.writerow(
                [
                    self.spec.id,
                    r.point,
                    r.sweep.param_name,
                    _num(r.sweep.param_value),
                    r.algorithm,
                    f"{r.mean_rate:.3f}",
                    f"{r.std_rate:.3f}",
                    f"{r.mean_rate_matched:.3f}",
                    _num(r.unmatched),
                    f"{r.exec_ms:.3f}" if timing else "",
                    r.runs,
                    self.spec.base_seed,
                ]
            )
        return buf.getvalue()


def _num(x: float) -> str:
    return str(int(x)) if float(x).is_integer() else repr(float(x))


Observer = Callable[[int, int, CellSnapshot, str, RouteAssignment], None]


def run_point(spec: ScenarioSpec, index: int, observer: Observer | None = None) -> list[RunRecord]:
    cfg = spec.config
    point = spec.points[index]
    records = []
    for run in range(spec.runs):
        rng = np.random.default_rng(np.random.SeedSequence([spec.base_seed, index, run]))
        snapshot = generate_snapshot(
            point.n_sources,
            point.n_relays,
            rng,
            width=cfg.width,
            height=cfg.height,
            requested_bw=point.requested_bw,
            m2m_interfaces=cfg.m2m_interfaces,
            m2b_interface=cfg.lte,
        )
        links = sample_links(snapshot, cfg.fading, rng)
        quota = compute_quota(cfg.lte, point.requested_bw, n_sources=point.n_sources)
        for algo in spec.algorithms:
            result, ms = timed_run(algo, snapshot, links, cfg.fading)
            if observer is not None:
                observer(index, run, snapshot, algo.name, result)
            records.append(
                RunRecord(index, run, algo.name, point.n_sources, quota, result.total_rate, result.matched, ms)
            )
    return records


def aggregate(spec: ScenarioSpec, records: Sequence[RunRecord]) -> list[ReportRow]:
    grouped: dict[tuple[int, str], list[RunRecord]] = {}
    for rec in records:
        grouped.setdefault((rec.point, rec.algorithm), []).append(rec)
    rows = []
    for index, point in enumerate(spec.points):
        for algo in spec.algorithms:
            recs = sorted(grouped[(index, algo.name)], key=lambda r: r.run)
            means = np.array([r.mean_rate for r in recs])
            rows.append(
                ReportRow(
                    index,
                    point,
                    algo.name,
                    math.fsum(means) / len(recs),
                    float(np.std(means)),
                    math.fsum(r.mean_rate_matched for r in recs) / len(recs),
                    sum(r.unmatched for r in recs) / len(recs),
                    math.fsum(r.exec_ms for r in recs) / len(recs),
                    len(recs),
                )
            )
    return rows


def run_scenario(
    spec: ScenarioSpec,
    observer: Observer | None = None,
    progress: Callable[[int, SweepPoint], None] | None = None,
) -> ScenarioReport:
    """Run every sweep point of ``spec`` and aggregate per point and algorithm.

    ``observer`` sees each decoded route assignment as it is produced;
    ``progress`` is called before each sweep point starts.
    """
    spec.validate()
    records: list[RunRecord] = []
    for index, point in enumerate(spec.points):
        if progress is not None:
            progress(index, point)
        records.extend(run_point(spec, index, observer))
    return ScenarioReport(spec, records, aggregate(spec, records))
