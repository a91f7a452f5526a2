"command line api"

import argparse
import logging
import sys
from pathlib import Path
from typing import Any, Callable
import numpy as np
from yaml import YAMLError
from jsonschema import ValidationError
from stringstab import __version__
from stringstab.transforms.datatypes import StopWatch, FieldError
from stringstab.transforms.functions import json_to_string, string_to_sha256_hash, to_plain
from stringstab.apis.ratfun_api_v1_types import NumericError, ConfigError
from stringstab.apis.ratfun_api_v1 import lap
from stringstab.apis.chain_api_v1_types import BlockLink, SensorLink
from stringstab.apis.chain_api_v1 import build_link
from stringstab.apis.analysis_api_v1_types import FrequencyGrid
from stringstab.apis.analysis_api_v1 import (
    hinf,
    bode_csi_check,
    headway_min,
    gain_vs_n_sweep,
    cancellation_audit,
    def1_gain,
    trace_peak,
    jury2_check,
    mount_gain_extrema,
)
from stringstab.apis.simkit_api_v1 import simulate_chain, trace_l2_norms, empirical_gain
from stringstab.apis.config_api_v1_types import RunConfig
from stringstab.apis.config_api_v1 import parse_config, config_hash, with_overrides
from stringstab.apis.report_api_v1 import write_csv, write_report, report_text, trace_to_frame, gain_report_frame
from stringstab.apis.demos_api_v1 import run_demo

API_VERSION = 1
API_NAME = "CLI"

EXIT_OK = 0
EXIT_OUTPUT = 1
EXIT_CONFIG = 2
EXIT_NUMERIC = 3


def build_parser() -> argparse.ArgumentParser:
    """argument parser with one subcommand per operation"""
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="scenario yaml file")
    common.add_argument("--out", type=Path, default=Path("."), help="output directory")
    common.add_argument("--grid-min", type=float, help="lowest frequency in rad/s")
    common.add_argument("--grid-max", type=float, help="highest frequency in rad/s")
    common.add_argument("--points-per-decade", type=int)
    common.add_argument("--seed", type=int)
    common.add_argument("--json", action="store_true", help="write reports as json instead of yaml")
    verbosity = common.add_mutually_exclusive_group()
    verbosity.add_argument("-v", "--verbose", action="store_true")
    verbosity.add_argument("-q", "--quiet", action="store_true")

    parser = argparse.ArgumentParser(prog="stringstab", description="string stability analysis of vehicle chains")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    commands = parser.add_subparsers(dest="command", required=True)
    commands.add_parser("analyze", parents=[common], help="gains, headway and audit of a scenario")
    commands.add_parser("headway", parents=[common], help="minimum time headway from K or Kbar")
    commands.add_parser("sweep-n", parents=[common], help="gain versus chain length csv")
    commands.add_parser("bode", parents=[common], help="complementary sensitivity integral of K/s^2")
    simulate = commands.add_parser("simulate", parents=[common], help="time domain simulation")
    simulate.add_argument("--N", type=int, dest="n_followers", help="followers, defaults to the first of Ns")
    demo = commands.add_parser("demo-theorem", parents=[common], help="packaged demonstration")
    demo.add_argument("n", type=int, choices=[1, 2, 3, 4, 5])
    return parser


def _load(args: argparse.Namespace) -> tuple[RunConfig, str]:
    if args.config is None:
        raise ConfigError(f"{args.command} needs --config")
    try:
        text = args.config.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read {args.config}: {exc}") from exc
    config = parse_config(text)
    config = with_overrides(config, args.grid_min, args.grid_max, args.points_per_decade, args.seed)
    return config, config_hash(config)


def _emit(args: argparse.Namespace, name: str, data: Any) -> None:
    suffix = "json" if args.json else "yaml"
    write_report(args.out / f"{name}.{suffix}", data, args.json)
    print(report_text(data, args.json), end="")


def _headway(config: RunConfig) -> list:
    sc = config.scenario
    try:
        return headway_min(K=sc.K, Kbar=config.Kbar, grid=config.grid)
    except NumericError as exc:
        logging.warning(f"headway criterion not applicable: {exc}")
        return []


def cmd_analyze(args: argparse.Namespace) -> int:
    """gain sweep, headway, stability, audit and the variant specific verdict"""
    config, digest = _load(args)
    sc = config.scenario
    link = build_link(sc)
    report = gain_vs_n_sweep(sc, list(config.Ns), config.grid)
    data: dict[str, Any] = {
        "kind": sc.kind,
        "h": sc.h,
        "stable": link.stable,
        "headway": _headway(config) if sc.kind == "headway" else [],
        "gains": report,
        "warnings": cancellation_audit(sc, config.grid),
        "config_sha256": digest,
    }
    match link:
        case BlockLink():
            data["trace_peak"] = trace_peak(link, config.grid)
            omegas = config.grid.omegas()
            data["jury_failures"] = int(
                np.sum(~jury2_check(link.trace.freqresp(omegas, True), link.det.freqresp(omegas, True)))
            )
        case SensorLink():
            low, high = mount_gain_extrema(link, config.grid)
            data["mount_gain"] = {"inf": low, "sup": high, "rigid": link.rigid}
        case _:
            data["hinf_T"] = hinf(link.T, config.grid)
    write_csv(args.out / "gain_vs_n.csv", gain_report_frame(report), digest)
    _emit(args, "analyze", data)
    return EXIT_OK


def cmd_headway(args: argparse.Namespace) -> int:
    """minimum headway by every applicable criterion"""
    config, digest = _load(args)
    results = headway_min(K=config.scenario.K, Kbar=config.Kbar, grid=config.grid)
    _emit(args, "headway", {"headway": results, "config_sha256": digest})
    return EXIT_OK


def cmd_sweep_n(args: argparse.Namespace) -> int:
    """gain versus N csv and report"""
    config, digest = _load(args)
    report = gain_vs_n_sweep(config.scenario, list(config.Ns), config.grid)
    write_csv(args.out / "gain_vs_n.csv", gain_report_frame(report), digest)
    _emit(args, "sweep_n", {"gains": report, "config_sha256": digest})
    return EXIT_OK


def cmd_bode(args: argparse.Namespace) -> int:
    """integral of ln|T|/w^2 for the loop K/s^2"""
    config, digest = _load(args)
    R = config.scenario.K / (lap() * lap())
    report = bode_csi_check(R)
    _emit(args, "bode", {"bode": report, "hinf_T": hinf(R.feedback(), config.grid), "config_sha256": digest})
    return EXIT_OK


def cmd_simulate(args: argparse.Namespace) -> int:
    """trace csv and a norm summary against the frequency domain gain"""
    config, digest = _load(args)
    N = args.n_followers or config.Ns[0]
    sim = config.sim
    trace = simulate_chain(
        config.scenario, N, list(config.disturbances), sim.dt, sim.horizon, sim.w_spread, sim.seed
    )
    norms = trace_l2_norms(trace)
    write_csv(args.out / "trace.csv", trace_to_frame(trace), digest)
    summary = {
        "N": N,
        "e_total": norms.e_total,
        "d_total": norms.d_total,
        "empirical_gain": empirical_gain(trace),
        "def1_gain": def1_gain(config.scenario, N, config.grid),
        "config_sha256": digest,
    }
    _emit(args, "simulate", summary)
    return EXIT_OK


def cmd_demo_theorem(args: argparse.Namespace) -> int:
    """runs demo n, writes its csv and prints the verdict line"""
    grid: FrequencyGrid | None = None
    if args.config is not None:
        config, _ = _load(args)
        grid = config.grid
    elif any(value is not None for value in (args.grid_min, args.grid_max, args.points_per_decade)):
        default = FrequencyGrid()
        grid = FrequencyGrid(
            args.grid_min or default.omega_min,
            args.grid_max or default.omega_max,
            args.points_per_decade or default.points_per_decade,
            default.refinement_depth,
        )
    digest = string_to_sha256_hash(
        json_to_string({"demo": args.n, "seed": args.seed, "grid": to_plain(grid)}, True)
    )
    result = run_demo(args.n, grid, args.seed)
    write_csv(args.out / f"demo_theorem{args.n}.csv", result.frame, digest)
    print(f"{'PASS' if result.passed else 'FAIL'} theorem {args.n}: {result.summary}")
    return EXIT_OK


COMMANDS: dict[str, Callable[[argparse.Namespace], int]] = {
    "analyze": cmd_analyze,
    "headway": cmd_headway,
    "sweep-n": cmd_sweep_n,
    "bode": cmd_bode,
    "simulate": cmd_simulate,
    "demo-theorem": cmd_demo_theorem,
}


def main(argv: list[str] | None = None) -> int:
    """
    entry point, returns the exit code: 0 success, 1 output failure, 2 config error, 3 numeric failure
    >>> main(["headway"])
    2
    """
    args = build_parser().parse_args(argv)
    level = logging.DEBUG if args.verbose else logging.WARNING if args.quiet else logging.INFO
    logging.basicConfig(level=level, format="%(levelname)s %(message)s")
    watch = StopWatch()
    try:
        code = COMMANDS[args.command](args)
    except (ConfigError, FieldError, ValidationError, YAMLError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"output error: {exc}", file=sys.stderr)
        return EXIT_OUTPUT
    except NumericError as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    logging.info(f"{args.command} finished in {watch():.3f} s")
    return code
