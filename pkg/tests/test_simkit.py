import logging
import numpy as np
import pytest
from stringstab.apis.ratfun_api_v1_types import ConfigError
from stringstab.apis.ratfun_api_v1 import tf
from stringstab.apis.chain_api_v1_types import ChainScenario
from stringstab.apis.chain_api_v1 import chain_freq_matrix
from stringstab.apis.analysis_api_v1_types import FrequencyGrid
from stringstab.apis.analysis_api_v1 import def1_gain, gain_vs_n_sweep, headway_min_b
from stringstab.apis.simkit_api_v1_types import DisturbanceSpec, StepTooLargeError, ImproperTFError
from stringstab.apis.simkit_api_v1 import (
    realize,
    rk4_step,
    make_disturbance,
    disturbance_matrix,
    perturb_tf,
    simulate_chain,
    empirical_gain,
    principal_sine_disturbances,
    _ChainModel,
)
from stringstab.apis.demos_api_v1 import random_cacc, random_mounts, draw_scenarios

PD = tf([4, 1])
PID = tf([1.0, 2.0, 1.0], [0.0, 1.0])
GRID = FrequencyGrid(1e-4, 1e2, 32, 3)


def _stable_scenarios() -> list[ChainScenario]:
    rng = np.random.default_rng(19)
    return [
        ChainScenario(0.0, PD),
        ChainScenario(1.0, PD),
        ChainScenario(1.1 * headway_min_b(PID, GRID).h_min, PID),
        random_cacc(rng),
        random_mounts(rng),
    ]


def _simulate(sc: ChainScenario, N: int, disturbances: list[DisturbanceSpec], horizon: float, dt: float = 0.01):
    try:
        return simulate_chain(sc, N, disturbances, dt, horizon, w_spread=0.0)
    except StepTooLargeError as exc:
        return simulate_chain(sc, N, disturbances, exc.suggested_dt, horizon, w_spread=0.0)


def test_realization_matches_transfer_function():
    omegas = np.logspace(-2, 2, 9)
    for transfer in (tf([1], [1, 1]), tf([1, 3, 2], [2, 3, 1]), tf([1, 2], [1, 3, 3, 1]), PD, PID):
        assert np.allclose(realize(transfer).freqresp(omegas), transfer.freqresp(omegas))


def test_realization_rejects_excess_derivatives():
    with pytest.raises(ImproperTFError):
        realize(tf([1, 0, 1]))


def test_rk4_step_is_fourth_order():
    A, B = np.array([[-2.0]]), np.array([[1.0]])
    exact = np.exp(-2.0 * 0.1)
    for dt, tol in ((0.1, 1e-5), (0.01, 1e-9)):
        X = np.array([1.0])
        for _ in range(int(round(0.1 / dt))):
            X = rk4_step(A, B, X, np.zeros(1), np.zeros(1), dt)
        assert X[0] == pytest.approx(exact, abs=tol)


def test_disturbances():
    dt, horizon = 0.01, 20.0
    impulse = make_disturbance(DisturbanceSpec("impulse", start=1.0), dt, horizon)
    assert np.count_nonzero(impulse) == 1 and impulse[100] == pytest.approx(100.0)
    sine = make_disturbance(DisturbanceSpec("sine", omega0=2.0, start=5.0, duration=5.0), dt, horizon)
    assert np.all(sine[:499] == 0.0) and np.all(sine[1002:] == 0.0)
    noise = make_disturbance(DisturbanceSpec("lowpass_noise", cutoff=2.0, amplitude=0.5, seed=3), dt, horizon)
    assert np.sqrt(np.mean(noise**2)) == pytest.approx(0.5)
    assert abs(np.mean(noise)) < 1e-9
    d = disturbance_matrix([DisturbanceSpec("lowpass_noise", target="all", cutoff=2.0)], 2, dt, horizon)
    assert not np.allclose(d[:, 0], d[:, 1])


def test_file_disturbance(tmp_path):
    path = tmp_path / "push.csv"
    path.write_text("# measured push\nt,value\n0,0\n1,2\n2,0\n", encoding="utf-8")
    d = make_disturbance(DisturbanceSpec("file", path=str(path)), 0.5, 4.0)
    assert d.tolist() == [0.0, 1.0, 2.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0]


def test_perturbation_is_seeded():
    W = tf([1], [1, 0.5])
    first = perturb_tf(W, 0.1, np.random.default_rng(4))
    again = perturb_tf(W, 0.1, np.random.default_rng(4))
    assert first == again and first != W
    assert perturb_tf(W, 0.0, np.random.default_rng(4)) == W


def test_interconnection_matches_chain_matrix():
    N = 3
    for sc in _stable_scenarios():
        model = _ChainModel(sc, N, None if sc.comm is None else sc.comm.W)
        A, B, C, D = model.matrices()
        rows = [model.names.index(f"e_{i}") for i in range(1, N + 1)]
        for omega in (0.05, 0.7, 3.0):
            response = C[rows] @ np.linalg.solve(1j * omega * np.eye(model.size) - A, B) + D[rows]
            expected = chain_freq_matrix(sc, N, omega).entries
            assert np.allclose(response, expected, rtol=1e-8, atol=1e-10)


def test_simulation_starts_at_rest_without_disturbances():
    trace = simulate_chain(ChainScenario(1.0, PD), 3, [], dt=0.01, horizon=2.0)
    assert all(np.all(series == 0.0) for series in trace.signals.values())
    assert trace.t[-1] == pytest.approx(2.0)


def test_step_too_large_suggests_a_step():
    stiff = ChainScenario(0.0, tf([400.0, 40.0]))
    with pytest.raises(StepTooLargeError) as info:
        simulate_chain(stiff, 2, [], dt=0.1, horizon=1.0)
    assert 0 < info.value.suggested_dt < 0.1


def test_empirical_gain_stays_below_def1():
    N = 4
    noise = [DisturbanceSpec("lowpass_noise", target="all", cutoff=1.0, seed=8)]
    for sc in _stable_scenarios():
        trace = _simulate(sc, N, noise, horizon=50.0)
        assert empirical_gain(trace) <= 1.05 * def1_gain(sc, N, GRID)


def test_sine_at_peak_recovers_def1():
    N = 3
    for sc in (ChainScenario(0.0, PD), ChainScenario(0.3, PD)):
        gain = gain_vs_n_sweep(sc, [N], GRID).per_N[N]
        omega = gain.peak_omega
        period = 2 * np.pi / omega
        horizon = 80.0
        trace = _simulate(sc, N, principal_sine_disturbances(sc, N, omega), horizon)
        t_start = horizon - period * np.floor(40.0 / period)
        assert empirical_gain(trace, t_start) == pytest.approx(gain.def1_gain, rel=0.1)


def test_downstream_disturbance_leaves_upstream_untouched():
    N, k = 4, 2
    base = [DisturbanceSpec("impulse", target=0), DisturbanceSpec("sine", target=1, omega0=0.7, duration=5.0)]
    extra = DisturbanceSpec("sine", target=k, omega0=1.3, amplitude=2.0)
    for sc in (ChainScenario(1.0, PD), draw_scenarios(random_cacc, 1, seed=3, grid=GRID)[0]):
        quiet = _simulate(sc, N, base, horizon=10.0)
        pushed = _simulate(sc, N, base + [extra], horizon=10.0)
        upstream = [name for name in quiet.signals if int(name.split("_")[1]) < k]
        assert upstream
        for name in upstream:
            assert np.array_equal(quiet.signals[name], pushed.signals[name]), name
        assert not np.array_equal(quiet.signals[f"e_{k}"], pushed.signals[f"e_{k}"])


def _steady_sine_gain(sc: ChainScenario, N: int, disturbances: list[DisturbanceSpec], omega: float) -> float:
    period = 2 * np.pi / omega
    settle = 60.0 + 4.0 * N * max(1.0, sc.h)
    window = period * np.ceil(60.0 / period)
    trace = _simulate(sc, N, disturbances, horizon=settle + window, dt=0.02)
    return empirical_gain(trace, settle)


def test_slow_leader_disturbance_energy_grows_linearly_in_n():
    sc = ChainScenario(1.0, PD)
    omega = 0.02
    leader = [DisturbanceSpec("sine", target=0, omega0=omega)]
    per_vehicle = [_steady_sine_gain(sc, N, leader, omega) ** 2 / N for N in (8, 16, 32)]
    assert per_vehicle == pytest.approx([1 / 16] * 3, rel=0.15)


def test_pid_with_headway_keeps_the_gain_flat_in_n():
    K = tf([1.0, 2.0, 1.0], [0.0, 1.0])
    sc = ChainScenario(1.1 * headway_min_b(K, GRID).h_min, K)
    Ns = [8, 16, 32]
    report = gain_vs_n_sweep(sc, Ns, GRID)
    gains = []
    for N in Ns:
        omega = report.per_N[N].peak_omega
        gains.append(_steady_sine_gain(sc, N, principal_sine_disturbances(sc, N, omega), omega))
    assert max(gains) < 1.1 * min(gains)


def test_noise_horizon_extension_is_capped(caplog):
    noise = [DisturbanceSpec("lowpass_noise", target=0, cutoff=1e-2)]
    with caplog.at_level(logging.WARNING):
        trace = simulate_chain(ChainScenario(1.0, PD), 2, noise, dt=0.01, horizon=10.0, max_steps=3000)
    assert trace.t[-1] == pytest.approx(30.0)
    assert any("capped" in record.getMessage() for record in caplog.records)


def test_horizon_beyond_step_limit_is_rejected():
    with pytest.raises(ConfigError, match="needs more than 3000 steps"):
        simulate_chain(ChainScenario(1.0, PD), 2, [], dt=0.01, horizon=100.0, max_steps=3000)
