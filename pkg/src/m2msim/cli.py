"""Command line front end.

    m2msim scenario s1 --runs 20 --seed 42 -o s1.csv
    m2msim solve --matrix instance.txt
    m2msim solve --snapshot cell.txt --algorithm DORSA_W-B-Z --seed 3
    m2msim oracle-check --instances 1000 --max-size 6 --seed 7
    m2msim gen --sources 60 --relays 60 --seed 1 -o cell.txt
    m2msim --dump-config > defaults.cfg

The seed comes from ``--seed``, else the ``M2MSIM_SEED`` environment
variable, else ``sim.seed`` of the configuration.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

import numpy as np

from m2msim.algorithms import AlgorithmConfig, RouteKind, decode_assignment, resolve_algorithms, run_algorithm
from m2msim.config import ConfigError, SimConfig, apply_overrides, dump_config, load_config, parse_config_text
from m2msim.graph import AssignmentGraph, sample_links
from m2msim.kap import BRUTE_FORCE_LIMIT, MatrixFormatError, brute_force_kap, format_matrix, read_matrix, solve_kap
from m2msim.scenario import SCENARIO_IDS, ScenarioSpec, builtin_points, run_scenario
from m2msim.topology import SnapshotFormatError, format_snapshot, generate_snapshot, read_snapshot

log = logging.getLogger("m2msim")

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2


class CliError(Exception):
    def __init__(self, message: str, code: int = EXIT_USAGE):
        super().__init__(message)
        self.code = code


def _resolve_seed(flag: int | None, cfg: SimConfig) -> int:
    if flag is not None:
        seed = flag
    elif os.environ.get("M2MSIM_SEED", "").strip():
        try:
            seed = int(os.environ["M2MSIM_SEED"])
        except ValueError:
            raise CliError(f"M2MSIM_SEED is not an integer: {os.environ['M2MSIM_SEED']!r}") from None
    else:
        seed = cfg.seed
    if seed < 0:
        raise CliError("seed must be >= 0")
    return seed


def _load_config(args) -> SimConfig:
    try:
        cfg = load_config(args.config) if args.config else SimConfig()
        sets = {}
        for item in getattr(args, "set", None) or []:
            key, sep, value = item.partition("=")
            if not sep:
                raise ConfigError(f"--set expects key=value, got {item!r}")
            sets[key.strip()] = value.strip()
        return apply_overrides(cfg, sets) if sets else cfg
    except OSError as exc:
        raise CliError(f"cannot read config: {exc}") from None
    except ConfigError as exc:
        raise CliError(f"invalid config: {exc}") from None


def _open_output(path: str | None):
    if path is None or path == "-":
        return None
    try:
        return open(path, "w", newline="\n", encoding="utf-8")
    except OSError as exc:
        raise CliError(f"cannot write {path}: {exc}", EXIT_FAIL) from None


def cmd_scenario(args) -> int:
    cfg = _load_config(args)
    if args.scenario.lower() in SCENARIO_IDS:
        scenario_id = args.scenario.lower()
    else:
        path = Path(args.scenario)
        if not path.is_file():
            raise CliError(f"unknown scenario {args.scenario!r}; use one of {', '.join(SCENARIO_IDS)} or a spec file")
        try:
            cfg = apply_overrides(cfg, parse_config_text(path.read_text()))
        except ConfigError as exc:
            raise CliError(f"invalid scenario file: {exc}") from None
        if not cfg.custom_points:
            raise CliError("scenario file must define custom.points")
        scenario_id = "custom"
    overrides = {}
    if args.step is not None:
        overrides["sim.step"] = str(args.step)
    if args.runs is not None:
        overrides["sim.runs"] = str(args.runs)
    try:
        cfg = apply_overrides(cfg, overrides)
        algorithms = resolve_algorithms(args.algorithms.split(",") if args.algorithms else None)
        spec = ScenarioSpec(
            scenario_id,
            builtin_points(scenario_id, cfg),
            cfg.runs,
            algorithms,
            _resolve_seed(args.seed, cfg),
            cfg,
        )
        spec.validate()
    except (ConfigError, ValueError) as exc:
        raise CliError(f"invalid scenario: {exc}") from None

    out = _open_output(args.output)
    try:
        report = run_scenario(
            spec, progress=lambda i, p: log.info("point %d/%d: %s", i + 1, len(spec.points), p)
        )
        text = report.to_csv(timing=args.timing)
        if out is None:
            sys.stdout.write(text)
        else:
            out.write(text)
    finally:
        if out is not None:
            out.close()
    return EXIT_OK


def _print_matrix_solution(weights, k, args) -> None:
    matching = solve_kap(weights, k)
    if args.relays is not None or args.interfaces is not None:
        n_r = args.relays or 0
        n_t = args.interfaces or 0
        try:
            graph = AssignmentGraph(weights, k, n_r, n_t)
        except ValueError as exc:
            raise CliError(f"matrix does not fit the relay layout: {exc}") from None
        _print_routes(decode_assignment(matching, graph))
        return
    for i in range(weights.shape[0]):
        j = matching.assignment.get(i)
        if j is None:
            print(f"source {i} -> unmatched")
        else:
            print(f"source {i} -> col {j}, rate {float(weights[i, j])!r}")
    print(f"total {matching.total_real_weight!r}")


def _print_routes(result) -> None:
    for r in result.routes:
        if r.kind is RouteKind.DIRECT:
            print(f"source {r.source} -> direct, rate {r.rate!r}")
        elif r.kind is RouteKind.TWO_HOP:
            print(f"source {r.source} -> relay {r.relay} via {r.interface}, rate {r.rate!r}")
        else:
            print(f"source {r.source} -> unmatched")
    print(f"total {result.total_rate!r}")


def cmd_solve(args) -> int:
    cfg = _load_config(args)
    if args.matrix:
        try:
            weights, k = read_matrix(args.matrix)
        except OSError as exc:
            raise CliError(f"cannot read {args.matrix}: {exc}") from None
        except MatrixFormatError as exc:
            raise CliError(f"{args.matrix}: {exc}") from None
        _print_matrix_solution(weights, k, args)
        return EXIT_OK

    try:
        snapshot = read_snapshot(args.snapshot, m2m_interfaces=cfg.m2m_interfaces, m2b_interface=cfg.lte)
    except OSError as exc:
        raise CliError(f"cannot read {args.snapshot}: {exc}") from None
    except SnapshotFormatError as exc:
        raise CliError(f"{args.snapshot}: {exc}") from None
    try:
        algo = AlgorithmConfig.from_name(args.algorithm)
    except ValueError as exc:
        raise CliError(str(exc)) from None
    rng = np.random.default_rng(_resolve_seed(args.seed, cfg))
    try:
        links = sample_links(snapshot, cfg.fading, rng)
    except ValueError as exc:
        raise CliError(f"{args.snapshot}: {exc}") from None
    _print_routes(run_algorithm(algo, snapshot, links, cfg.fading))
    return EXIT_OK


def _random_instance(rng: np.random.Generator, max_size: int) -> tuple[np.ndarray, int]:
    n = int(rng.integers(0, max_size + 1))
    m = int(rng.integers(0, max_size + 1))
    k = int(rng.integers(0, min(n, m) + 1))
    weights = np.round(rng.uniform(0.0, 100.0, size=(n, m)), 3)
    return weights, k


def check_instance(weights, k, tol: float = 1e-6) -> str | None:
    """Compare solver and oracle on one instance; return a failure message or None."""
    fast = solve_kap(weights, k)
    slow = brute_force_kap(weights, k)
    if abs(fast.total_real_weight - slow.total_real_weight) > tol:
        return f"solver {fast.total_real_weight!r} != oracle {slow.total_real_weight!r}"
    if fast.cardinality > k:
        return f"solver used {fast.cardinality} edges with k={k}"
    expected = fast.total_real_weight + fast.n_padding_edges * fast.a_value
    if abs(fast.padded_total - expected) > tol * max(1.0, abs(expected)):
        return f"padded total {fast.padded_total!r} != real + n_A * A = {expected!r}"
    return None


def cmd_oracle_check(args) -> int:
    if args.max_size > BRUTE_FORCE_LIMIT or args.max_size < 0:
        raise CliError(f"--max-size must be in [0, {BRUTE_FORCE_LIMIT}]")
    if args.replay:
        try:
            weights, k = read_matrix(args.replay)
        except (OSError, MatrixFormatError) as exc:
            raise CliError(f"cannot replay {args.replay}: {exc}") from None
        if max(weights.shape) > BRUTE_FORCE_LIMIT:
            raise CliError(f"replay instance exceeds {BRUTE_FORCE_LIMIT} rows or columns")
        failure = check_instance(weights, k)
        print(f"replay {args.replay}: {'FAIL ' + failure if failure else 'ok'}")
        return EXIT_FAIL if failure else EXIT_OK

    cfg = _load_config(args)
    rng = np.random.default_rng(_resolve_seed(args.seed, cfg))
    for index in range(args.instances):
        weights, k = _random_instance(rng, args.max_size)
        failure = check_instance(weights, k)
        if failure:
            path = Path(args.fail_dir) / f"oracle_failure_{index}.txt"
            path.write_text(format_matrix(weights, k))
            print(f"instance {index} FAIL: {failure}; saved to {path}")
            return EXIT_FAIL
    print(f"{args.instances} instances ok (max size {args.max_size})")
    return EXIT_OK


def cmd_gen(args) -> int:
    cfg = _load_config(args)
    n_relays = args.relays if args.relays is not None else cfg.n_machines - args.sources
    if args.sources < 0 or n_relays < 0:
        raise CliError("machine counts must be >= 0")
    rng = np.random.default_rng(_resolve_seed(args.seed, cfg))
    rbw = args.rbw if args.rbw is not None else cfg.requested_bw
    if not rbw > 0:
        raise CliError("--rbw must be positive")
    snapshot = generate_snapshot(args.sources, n_relays, rng, width=cfg.width, height=cfg.height, requested_bw=rbw)
    text = format_snapshot(snapshot)
    out = _open_output(args.output)
    if out is None:
        sys.stdout.write(text)
    else:
        with out:
            out.write(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="m2msim", description=__doc__.split("\n\n")[0])
    parser.add_argument("--dump-config", action="store_true", help="print every configuration key with its default")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command")

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key = value configuration file")
    common.add_argument("--set", action="append", metavar="KEY=VALUE", help="override one configuration key")
    common.add_argument("--seed", type=int)

    p = sub.add_parser("scenario", parents=[common], help="run a Monte-Carlo sweep and write CSV")
    p.add_argument("scenario", help="s1, s2, s3, s4 or a custom scenario file")
    p.add_argument("--runs", type=int)
    p.add_argument("--step", type=int, help="sweep step for s1-s3 (default 10)")
    p.add_argument("--algorithms", help="comma separated names, e.g. DiTOSA,DORSA_W-B-Z")
    p.add_argument("-o", "--output")
    p.add_argument("--timing", action="store_true", help="fill exec_ms (makes output run-dependent)")
    p.set_defaults(func=cmd_scenario)

    p = sub.add_parser("solve", parents=[common], help="solve one instance and print routes")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--matrix", help="weight matrix file")
    src.add_argument("--snapshot", help="snapshot file")
    p.add_argument("--algorithm", default="DORSA_W-B-Z")
    p.add_argument("--relays", type=int, help="decode matrix columns as relay x interface pairs")
    p.add_argument("--interfaces", type=int)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("oracle-check", parents=[common], help="compare the solver to brute force")
    p.add_argument("--instances", type=int, default=1000)
    p.add_argument("--max-size", type=int, default=6)
    p.add_argument("--replay", help="re-run one saved instance")
    p.add_argument("--fail-dir", default=".")
    p.set_defaults(func=cmd_oracle_check)

    p = sub.add_parser("gen", parents=[common], help="write a random snapshot file")
    p.add_argument("--sources", type=int, default=60)
    p.add_argument("--relays", type=int)
    p.add_argument("--rbw", type=float, help="requested bandwidth in Hz")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_gen)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    if args.dump_config:
        sys.stdout.write(dump_config())
        return EXIT_OK
    if args.command is None:
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except CliError as exc:
        print(f"m2msim: error: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
