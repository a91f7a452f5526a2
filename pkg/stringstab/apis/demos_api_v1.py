"packaged demonstrations and seeded scenario families"

import inspect
import logging
from typing import Callable
import numpy as np
import pandas as pd
from stringstab.apis.ratfun_api_v1_types import RationalTF, ConfigError
from stringstab.apis.ratfun_api_v1 import tf, dc_gain
from stringstab.apis.chain_api_v1_types import ChainScenario, CaccComm, GeneralComm, SensorMounts, BlockLink, SensorLink
from stringstab.apis.chain_api_v1 import build_link, chain_freq_matrices
from stringstab.apis.analysis_api_v1_types import FrequencyGrid
from stringstab.apis.analysis_api_v1 import (
    refine_sup,
    low_frequency_gain,
    headway_min_b,
    gain_vs_n_sweep,
    largest_singular_values,
    thm2_bound,
    trace_peak,
    jury2_check,
    jury2_margin,
    mount_gain_extrema,
    cancellation_audit,
)
from stringstab.apis.demos_api_v1_types import DemoResult

API_VERSION = 1
API_NAME = "DEMOS"

DEMO_SEED = 2024
DEMO_COUNT = 20
MAX_DRAWS = 1000
PROPERTY_TOL = 1e-6


def random_pd(rng: np.random.Generator) -> RationalTF:
    """b s + a with b in [0.5, 3] and a in [0.5, 5], stabilizing at h = 0"""
    b, a = rng.uniform(0.5, 3.0), rng.uniform(0.5, 5.0)
    return tf([a, b])


def random_lowpass(rng: np.random.Generator, gain: tuple[float, float] = (0.2, 1.5)) -> RationalTF:
    """stable first order filter k/(tau s + 1)"""
    return tf([rng.uniform(*gain)], [1.0, rng.uniform(0.1, 2.0)])


def random_cacc(rng: np.random.Generator) -> ChainScenario:
    """PD with a biproper minimum phase command filter (beta s + 1)/(tau s + 1), h = 0"""
    B = tf([1.0, rng.uniform(0.1, 1.0)], [1.0, rng.uniform(0.1, 1.0)])
    return ChainScenario(0.0, random_pd(rng), CaccComm(B, random_lowpass(rng), random_lowpass(rng, (0.8, 1.0))))


def random_general(rng: np.random.Generator) -> ChainScenario:
    """PD with first order F, G, H and channel W, h = 0"""
    F, G, H = random_lowpass(rng), random_lowpass(rng), random_lowpass(rng)
    return ChainScenario(0.0, random_pd(rng), GeneralComm(F, G, H, random_lowpass(rng, (0.8, 1.0))))


def random_mounts(rng: np.random.Generator) -> ChainScenario:
    """PD with spring-damper mounts c s + k on both sensor parts, h = 0"""
    Kr = tf([rng.uniform(5.0, 50.0), rng.uniform(0.5, 5.0)])
    Kf = tf([rng.uniform(5.0, 50.0), rng.uniform(0.5, 5.0)])
    return ChainScenario(0.0, random_pd(rng), sensors=SensorMounts(Kr, Kf))


def draw_scenarios(
    family: Callable[[np.random.Generator], ChainScenario],
    count: int = DEMO_COUNT,
    seed: int = DEMO_SEED,
    grid: FrequencyGrid = FrequencyGrid(),
) -> list[ChainScenario]:
    """
    the first count draws of a family with a stable closed loop and a clean cancellation audit

    >>> len(draw_scenarios(random_cacc, 3, seed=1, grid=FrequencyGrid(1e-2, 1e2, 8, 0)))
    3
    """
    rng = np.random.default_rng(seed)
    kept: list[ChainScenario] = []
    for _ in range(MAX_DRAWS):
        if len(kept) == count:
            break
        sc = family(rng)
        if build_link(sc).stable and not cancellation_audit(sc, grid):
            kept.append(sc)
    if len(kept) < count:
        logging.warning(f"only {len(kept)} of {count} draws were stable and passed the audit")
    return kept


def demo_theorem1(Ns: tuple[int, ...] = (16, 64, 256), eps: float = 1e-3) -> DemoResult:
    """PD K = s + 4 with h = 1: the low frequency gain grows like sqrt(N)/K(0)"""
    sc = ChainScenario(1.0, tf([4.0, 1.0]))
    expected = 1.0 / abs(dc_gain(sc.K))
    gains = [low_frequency_gain(sc, N, eps) for N in Ns]
    frame = pd.DataFrame({
        "N": list(Ns),
        "def1_gain": gains,
        "def1_per_sqrtN": [g / np.sqrt(N) for g, N in zip(gains, Ns)],
        "expected_per_sqrtN": expected,
    })
    passed = bool(np.all(np.abs(frame["def1_per_sqrtN"] / expected - 1.0) <= 0.1))
    return DemoResult(1, passed, frame, f"low frequency gain per sqrt(N) against 1/K(0) = {expected:.6g}")


def demo_theorem2(Ns: tuple[int, ...] = (8, 16, 32, 64, 128), grid: FrequencyGrid = FrequencyGrid()) -> DemoResult:
    """PID (s^2 + 2 s + 1)/s with 10% more than the minimum headway: flat def1 gain and a dominating bound"""
    K = tf([1.0, 2.0, 1.0], [0.0, 1.0])
    h = 1.1 * headway_min_b(K, grid).h_min
    sc = ChainScenario(h, K)
    report = gain_vs_n_sweep(sc, list(Ns), grid)
    gains = np.array([report.per_N[N].def1_gain for N in Ns])
    spread = float((gains.max() - gains.min()) / gains.min())
    omegas = grid.omegas()[:: max(1, len(grid.omegas()) // 100)]
    sigma = largest_singular_values(chain_freq_matrices(build_link(sc), 32, omegas))
    bounds = np.array([thm2_bound(sc, 32, omega) for omega in omegas])
    dominated = bool(np.all(bounds >= sigma * (1 - 1e-9)))
    frame = pd.DataFrame({
        "N": list(Ns),
        "def1_gain": gains,
        "def2_gain": [report.per_N[N].def2_gain for N in Ns],
        "peak_omega": [report.per_N[N].peak_omega for N in Ns],
        "h": h,
    })
    passed = spread < 0.05 and dominated
    return DemoResult(2, passed, frame, f"h={h:.6g}, def1 spread {spread:.3%}, bound dominates at N=32: {dominated}")


CACC_HEADWAY = ChainScenario(
    1.0, tf([4.0, 1.0]), CaccComm(tf([1.0, 0.5], [1.0, 0.2]), tf([0.2]), tf([1.0], [1.0, 0.1]))
)


def cacc_headway_growth(
    sc: ChainScenario = CACC_HEADWAY, Ns: tuple[int, ...] = (16, 64, 256), eps: float = 1e-3
) -> tuple[pd.DataFrame, float]:
    """
    CACC with h > 0 and a bounded K(0): the low frequency gain grows like sqrt(N) times
    |1 - H(0) W(0)/B(0)|/|K(0)|, the leader disturbance share on the mode with eigenvalue 1

    returns:
        - frame with one row per N, expected gain per sqrt(N)
    """
    comm = sc.comm
    assert isinstance(comm, CaccComm)
    expected = abs(1.0 - dc_gain(comm.H) * dc_gain(comm.W) / dc_gain(comm.B)) / abs(dc_gain(sc.K))
    gains = [low_frequency_gain(sc, N, eps) for N in Ns]
    frame = pd.DataFrame({
        "N": list(Ns),
        "def1_gain": gains,
        "def1_per_sqrtN": [g / np.sqrt(N) for g, N in zip(gains, Ns)],
        "expected_per_sqrtN": expected,
    })
    return frame, expected


def demo_theorem3(count: int = DEMO_COUNT, seed: int = DEMO_SEED, grid: FrequencyGrid = FrequencyGrid()) -> DemoResult:
    """
    CACC at h = 0: the nonzero eigenvalue, the trace, exceeds 1 somewhere for every clean draw.
    CACC at h = 1 with K = s + 4: the low frequency gain still grows like sqrt(N).
    """
    rows = []
    for index, sc in enumerate(draw_scenarios(random_cacc, count, seed, grid)):
        link = build_link(sc)
        assert isinstance(link, BlockLink)
        peak = trace_peak(link, grid)
        comm = sc.comm
        assert isinstance(comm, CaccComm)
        rows.append({
            "part": "trace",
            "scenario": index,
            "trace_peak": peak.peak,
            "omega_star": peak.omega_star,
            "HW0": dc_gain(comm.H) * dc_gain(comm.W),
            "B0": dc_gain(comm.B),
            "exceeds_one": peak.peak > 1.0 + PROPERTY_TOL,
        })
    traces = pd.DataFrame(rows)
    growth, expected = cacc_headway_growth()
    growth.insert(0, "part", "headway")
    exceeding = int(traces["exceeds_one"].sum()) if rows else 0
    grows = bool(np.all(np.abs(growth["def1_per_sqrtN"] / expected - 1.0) <= 0.1))
    passed = len(rows) == count and exceeding == count and grows
    frame = pd.concat([traces, growth], ignore_index=True)
    summary = (
        f"{exceeding} of {len(rows)} CACC draws have |trace| > 1 at h = 0; "
        f"at h = 1 the gain per sqrt(N) tracks {expected:.6g}: {grows}"
    )
    return DemoResult(3, passed, frame, summary)


def demo_theorem4(count: int = DEMO_COUNT, seed: int = DEMO_SEED, grid: FrequencyGrid = FrequencyGrid()) -> DemoResult:
    """general scalar communication at h = 0: the unit disk test fails somewhere for every clean draw"""
    frames, failing = [], 0
    omegas = grid.omegas()
    scenarios = draw_scenarios(random_general, count, seed, grid)
    for index, sc in enumerate(scenarios):
        link = build_link(sc)
        assert isinstance(link, BlockLink)
        trace, det = link.trace, link.det
        worst_margin, worst_omega = refine_sup(
            lambda w, trace=trace, det=det: jury2_margin(trace.freqresp(w, True), det.freqresp(w, True)), grid
        )
        sampled = np.append(omegas, worst_omega)
        traces, dets = trace.freqresp(sampled, True), det.freqresp(sampled, True)
        ok = jury2_check(traces, dets)
        failing += int(not np.all(ok))
        frames.append(pd.DataFrame({
            "scenario": index,
            "omega": sampled,
            "trace_abs": np.abs(traces),
            "det_abs": np.abs(dets),
            "jury_ok": ok,
            "refined": np.arange(len(sampled)) == len(omegas),
        }))
        logging.debug(f"scenario {index}: worst jury margin {worst_margin:.3g} at omega={worst_omega:.4g}")
    frame = pd.concat(frames, ignore_index=True) if frames else pd.DataFrame()
    passed = len(scenarios) == count and failing == count
    return DemoResult(4, passed, frame, f"{failing} of {len(scenarios)} general draws fail the unit disk test")


def demo_theorem5(count: int = DEMO_COUNT, seed: int = DEMO_SEED, grid: FrequencyGrid = FrequencyGrid()) -> DemoResult:
    """sensor mounts at h = 0: attenuation at some frequency forces amplification at another"""
    rows = []
    for index, sc in enumerate(draw_scenarios(random_mounts, count, seed, grid)):
        link = build_link(sc)
        assert isinstance(link, SensorLink)
        low, high = mount_gain_extrema(link, grid)
        attenuates = low < 1.0 - PROPERTY_TOL
        rows.append({
            "scenario": index,
            "inf_gain": low,
            "sup_gain": high,
            "rigid": link.rigid,
            "holds": (not attenuates) or high > 1.0 + PROPERTY_TOL,
        })
    frame = pd.DataFrame(rows)
    passed = bool(len(rows) == count and frame["holds"].all())
    summary = f"{int(frame['holds'].sum())} of {len(rows)} mount draws satisfy inf < 1 => sup > 1"
    return DemoResult(5, passed, frame, summary)


DEMOS: dict[int, Callable[..., DemoResult]] = {
    1: demo_theorem1,
    2: demo_theorem2,
    3: demo_theorem3,
    4: demo_theorem4,
    5: demo_theorem5,
}


def run_demo(n: int, grid: FrequencyGrid | None = None, seed: int | None = None) -> DemoResult:
    """
    dispatches to the demo of the given number, passing only the options it was given

    raises:
        - ValueError for an unknown demo number
        - ConfigError for a grid or seed option the demo does not use

    >>> try: run_demo(1, seed=3)
    ... except ConfigError as exc: str(exc)
    'demo 1 takes no seed option'
    """
    if n not in DEMOS:
        raise ValueError(f"demo number must be one of {sorted(DEMOS)}, got {n}")
    demo = DEMOS[n]
    options = {name: value for name, value in (("grid", grid), ("seed", seed)) if value is not None}
    accepted = inspect.signature(demo).parameters
    for name in options:
        if name not in accepted:
            raise ConfigError(f"demo {n} takes no {name} option")
    return demo(**options)
