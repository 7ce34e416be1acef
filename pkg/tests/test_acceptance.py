"""End-to-end acceptance checks, one test per criterion.

Scenario runs use 20 runs per point and seed 1. Each test records a
PASS/FAIL line that the terminal summary repeats after the run.
"""

import filecmp
import subprocess
import sys
import time

import numpy as np
import pytest

from m2msim.algorithms import STANDARD_ALGORITHMS, RouteKind
from m2msim.channel import LTE, FadingParams, sample_link
from m2msim.config import SimConfig, apply_overrides
from m2msim.graph import AssignmentGraph, compute_quota
from m2msim.kap import brute_force_kap, hungarian_min, solve_kap
from m2msim.scenario import builtin_scenario, run_scenario

RUNS = 20
SEED = 1


class Observed:
    """Scenario report plus every decoded route assignment."""

    def __init__(self, scenario_id, cfg=None):
        self.routes = {}
        spec = builtin_scenario(scenario_id, cfg, runs=RUNS, seed=SEED)
        start = time.perf_counter()
        self.report = run_scenario(spec, observer=self._see)
        self.seconds = time.perf_counter() - start

    def _see(self, point, run, snapshot, algorithm, result):
        self.routes[(point, run, algorithm)] = result

    @property
    def points(self):
        return self.report.spec.points


@pytest.fixture(scope="module")
def s1():
    return Observed("s1")


@pytest.fixture(scope="module")
def s2():
    return Observed("s2")


@pytest.fixture(scope="module")
def s3():
    return Observed("s3")


@pytest.fixture(scope="module")
def s4():
    return Observed("s4")


def random_dorsa_instance(rng):
    """Graph-shaped instance with N_s <= 6 and N_r * N_t + Q_BS <= 6."""
    n_s = int(rng.integers(0, 7))
    quota = int(rng.integers(0, min(n_s, 6) + 1))
    n_t = int(rng.integers(1, 4))
    n_r = int(rng.integers(0, (6 - quota) // n_t + 1))
    relay = rng.uniform(0.0, 1e6, size=(n_s, n_r * n_t))
    # a share of zero-rate edges, as out-of-range hops produce
    relay[rng.random(relay.shape) < 0.3] = 0.0
    direct = np.repeat(rng.uniform(0.0, 1e6, size=(n_s, 1)), quota, axis=1)
    return AssignmentGraph(np.hstack([relay, direct]), quota, n_r, n_t)


class TestAcceptance:
    def test_1_oracle_equivalence(self, acceptance):
        rng = np.random.default_rng(2024)
        start = time.perf_counter()
        worst = 0.0
        for _ in range(1000):
            g = random_dorsa_instance(rng)
            fast = solve_kap(g.weights, g.quota).total_real_weight
            slow = brute_force_kap(g.weights, g.quota).total_real_weight
            worst = max(worst, abs(fast - slow))
        seconds = time.perf_counter() - start
        ok = acceptance(1, worst <= 1e-6 and seconds < 30.0, f"1000 instances, max |diff| {worst:.2e}, {seconds:.1f} s")
        assert ok

    def test_2_quota(self, acceptance):
        quota = compute_quota(LTE, 200e3, 128, 120)
        assert acceptance(2, quota == 100, f"compute_quota(LTE, 200 kHz) = {quota}")

    def test_3_unmatched_curves(self, acceptance, s1, s2, s3, s4):
        bad = []
        for name, obs in (("s1", s1), ("s2", s2)):
            for rec in obs.report.records:
                if rec.unmatched != max(0, rec.n_sources - 100):
                    bad.append((name, rec.point, rec.algorithm, rec.unmatched))
        bad += [("s3", r.point, r.algorithm, r.unmatched) for r in s3.report.records if r.unmatched != 20]
        for rec in s4.report.records:
            bw = s4.points[rec.point].requested_bw
            expected = 120 - min(int(20e6 // bw), 128, 120)
            if rec.unmatched != expected:
                bad.append(("s4", rec.point, rec.algorithm, rec.unmatched))
        tail = {
            s4.points[r.point].requested_bw: r.unmatched
            for r in s4.report.records
            if s4.points[r.point].requested_bw >= 15e6
        }
        ok = acceptance(3, not bad and tail == {15e6: 119, 20e6: 119}, f"{len(bad)} mismatches, s4 tail {tail}")
        assert ok

    def test_4_dominance(self, acceptance, s1):
        names = [a.name for a in STANDARD_ALGORITHMS]
        ifaces = {a.name: set(a.interfaces) for a in STANDARD_ALGORITHMS}
        violations = 0
        for p in range(len(s1.points)):
            for run in range(RUNS):
                rate = {n: s1.routes[(p, run, n)].total_rate for n in names}
                for a in names:
                    for b in names:
                        if ifaces[b] <= ifaces[a] and rate[a] < rate[b]:
                            violations += 1
                if rate["DORSA_W-B-Z"] != max(rate.values()):
                    violations += 1
        ok = acceptance(4, violations == 0, f"{violations} violations over {len(s1.points) * RUNS} paired runs")
        assert ok

    def test_5_mean_ordering(self, acceptance, s1, s3):
        chain = ["DiTOSA", "SORSA_Z", "SORSA_B", "DORSA_B-Z", "SORSA_W"]
        broken = []
        for i, p in enumerate(s3.points):
            if p.n_relays < 40:
                continue
            means = [s3.report.row(i, a).mean_rate for a in chain]
            if not all(x < y for x, y in zip(means, means[1:])):
                broken.append(p.n_relays)
        i100 = [p.n_sources for p in s1.points].index(100)
        gain = s1.report.row(i100, "DORSA_W-B-Z").mean_rate / s1.report.row(i100, "DiTOSA").mean_rate
        seconds = s1.seconds + s3.seconds
        ok = acceptance(
            5,
            not broken and gain >= 1.01 and seconds < 300.0,
            f"chain broken at N_r {broken}, S1 N_s=100 gain {gain:.4f}, {seconds:.0f} s",
        )
        assert ok

    def test_6_usability_ladder(self, acceptance, s4):
        allowed = {400e3: {"wifi", "bluetooth"}, 2e6: {"wifi"}}
        used = {bw: set() for bw in allowed}
        for (p, _, _), result in s4.routes.items():
            bw = s4.points[p].requested_bw
            if bw in used:
                used[bw] |= {r.interface for r in result.routes if r.kind is RouteKind.TWO_HOP}
        over = Observed("custom", apply_overrides(SimConfig(), {"custom.points": "120:120:25e6 120:120:40e6"}))
        served = sum(r.matched for r in over.report.records)
        ok = all(used[bw] <= allowed[bw] for bw in allowed) and served == 0
        listed = {bw: sorted(names) for bw, names in used.items()}
        assert acceptance(6, ok, f"two-hop interfaces {listed}, served above 20 MHz: {served}")

    def test_7_complexity(self, acceptance):
        rng = np.random.default_rng(0)
        hungarian_min(rng.uniform(size=(10, 10)))  # compile outside the timing

        def timed(n):
            samples = []
            for _ in range(7 if n <= 100 else 3):
                c = rng.uniform(0.0, 1e6, size=(n, n))
                start = time.perf_counter()
                hungarian_min(c)
                samples.append(time.perf_counter() - start)
            return float(np.median(samples))

        sizes = (50, 100, 200, 400)
        t = {n: timed(n) for n in sizes}
        c = t[50] / 50**3
        ratios = {n: t[n] / (c * n**3) for n in sizes}
        ok = all(r <= 3.0 for r in ratios.values())
        assert acceptance(7, ok, "t(n) / (c n^3): " + ", ".join(f"{n}: {r:.2f}" for n, r in ratios.items()))

    def test_8_determinism(self, acceptance, tmp_path):
        outputs = []
        for name in ("a.csv", "b.csv"):
            out = tmp_path / name
            cmd = [sys.executable, "-m", "m2msim", "scenario", "s1", "--runs", "5", "--seed", "1", "-o", str(out)]
            subprocess.run(cmd, check=True)
            outputs.append(out)
        same = filecmp.cmp(outputs[0], outputs[1], shallow=False)
        assert acceptance(8, same, f"two CLI runs byte-identical: {same} ({outputs[0].stat().st_size} bytes)")

    def test_9_channel_statistics(self, acceptance):
        params = FadingParams()
        rng = np.random.default_rng(9)
        shadow = np.array([sample_link(80.0, params, rng).shadowing_db for _ in range(100_000)])
        mean, std = float(shadow.mean()), float(shadow.std())
        ok = abs(mean) <= 0.1 and abs(std - 8.0) <= 0.2
        assert acceptance(9, ok, f"shadowing mean {mean:+.4f} dB, std {std:.4f} dB over 1e5 links")
