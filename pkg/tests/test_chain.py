import numpy as np
import pytest
from stringstab.apis.ratfun_api_v1 import tf
from stringstab.apis.chain_api_v1_types import (
    ChainScenario,
    CaccComm,
    GeneralComm,
    SensorMounts,
    ScenarioError,
    InvalidFilterError,
    InvalidMountError,
    UnstableError,
)
from stringstab.apis.chain_api_v1 import (
    build_link,
    build_headway_link,
    build_sensor_link,
    chain_freq_matrix,
    chain_freq_matrices,
    chain_oracle,
    check_scenario,
)
from stringstab.apis.demos_api_v1 import random_pd, random_cacc, random_general, random_mounts

PD = tf([4, 1])


def _headway(rng: np.random.Generator) -> ChainScenario:
    return ChainScenario(rng.uniform(0.5, 2.0), random_pd(rng))


def test_matrix_matches_direct_recursion():
    rng = np.random.default_rng(11)
    families = [_headway, random_cacc, random_general, random_mounts]
    omegas = np.logspace(-2, 2, 20)
    for index in range(20):
        sc = families[index % len(families)](rng)
        N = int(rng.integers(1, 9))
        for omega in omegas:
            G = chain_freq_matrix(sc, N, omega).entries
            oracle = chain_oracle(sc, N, omega)
            assert G.shape == (N, N + 1)
            assert np.max(np.abs(G - oracle)) <= 1e-10 * max(1.0, float(np.max(np.abs(oracle))))


def test_single_follower_closed_form():
    sc = ChainScenario(1.0, PD)
    omega = 0.7
    s = 1j * omega
    delta = s * s + (1 + s) * (4 + s)
    G = chain_freq_matrix(sc, 1, omega).entries
    assert np.allclose(G, [[1 / delta, -(1 + s) / delta]])


def test_leader_column_is_geometric():
    sc = ChainScenario(0.5, PD)
    G = chain_freq_matrix(sc, 6, 0.3).entries
    ratios = G[1:, 0] / G[:-1, 0]
    assert np.allclose(ratios, ratios[0])


def test_cacc_map_is_singular():
    rng = np.random.default_rng(3)
    for _ in range(5):
        link = build_link(random_cacc(rng))
        assert link.det.is_zero()
        assert abs(link.trace.freqresp(0.0)[0]) == pytest.approx(1.0, abs=1e-12)
        omegas = np.logspace(-2, 2, 7)
        T = np.array([[link.T11.freqresp(omegas), link.T12.freqresp(omegas)],
                      [link.T21.freqresp(omegas), link.T22.freqresp(omegas)]])
        assert np.allclose(np.linalg.det(np.moveaxis(T, -1, 0)), 0.0, atol=1e-10)


def test_cacc_without_feedforward_reduces_to_headway():
    comm = CaccComm(tf([1, 0.5], [1, 0.2]), tf([0]), tf([1], [1, 0.1]))
    omegas = np.logspace(-2, 2, 9)
    with_comm = chain_freq_matrices(build_link(ChainScenario(0.8, PD, comm)), 5, omegas)
    plain = chain_freq_matrices(build_link(ChainScenario(0.8, PD)), 5, omegas)
    assert np.allclose(with_comm, plain, atol=1e-12)


def test_general_without_channel_reduces_to_headway():
    lowpass = tf([1], [1, 1])
    comm = GeneralComm(lowpass, lowpass, lowpass, tf([0]))
    omegas = np.logspace(-2, 2, 9)
    with_comm = chain_freq_matrices(build_link(ChainScenario(0.0, PD, comm)), 4, omegas)
    plain = chain_freq_matrices(build_link(ChainScenario(0.0, PD)), 4, omegas)
    assert np.allclose(with_comm, plain, atol=1e-12)


def test_stiff_mounts_approach_identity_sensors():
    stiff = tf([1e7, 1e4])
    link = build_sensor_link(PD, stiff, stiff)
    assert link.rigid
    omegas = np.logspace(-1, 1, 9)
    assert np.allclose(link.A.freqresp(omegas), build_headway_link(PD, 0.0).T.freqresp(omegas), atol=1e-3)


def test_scenario_rules():
    lowpass = tf([1], [1, 1])
    with pytest.raises(ScenarioError):
        check_scenario(ChainScenario(-0.1, PD))
    with pytest.raises(ScenarioError, match="K\\(0\\) != 0"):
        check_scenario(ChainScenario(1.0, tf([0, 1])))
    with pytest.raises(ScenarioError):
        check_scenario(ChainScenario(0.5, PD, GeneralComm(lowpass, lowpass, lowpass, lowpass)))
    with pytest.raises(ScenarioError):
        check_scenario(ChainScenario(0.0, PD, CaccComm(lowpass, lowpass, lowpass), SensorMounts(PD, PD)))
    with pytest.raises(ScenarioError):
        check_scenario(ChainScenario(0.0, PD, CaccComm(lowpass, lowpass, tf([1], [-1, 1]))))
    with pytest.raises(InvalidFilterError):
        check_scenario(ChainScenario(0.0, PD, CaccComm(tf([0, 1], [1, 1]), lowpass, lowpass)))
    with pytest.raises(InvalidMountError):
        check_scenario(ChainScenario(0.0, PD, sensors=SensorMounts(tf([0, 1]), PD)))


def test_unstable_loop_warns_or_raises():
    assert not build_link(ChainScenario(0.0, tf([4]))).stable
    with pytest.raises(UnstableError):
        build_link(ChainScenario(0.0, tf([4])), strict=True)
