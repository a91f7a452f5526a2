import numpy as np
import pytest
from stringstab.apis.ratfun_api_v1 import tf
from stringstab.apis.chain_api_v1_types import ChainScenario, CaccComm
from stringstab.apis.chain_api_v1 import build_link, chain_freq_matrices
from stringstab.apis.analysis_api_v1_types import FrequencyGrid, PreconditionError, UnstableError
from stringstab.apis.analysis_api_v1 import (
    hinf,
    bode_csi_check,
    headway_min,
    headway_min_a,
    headway_min_b,
    largest_singular_values,
    low_frequency_gain,
    def1_gain,
    def2_gain,
    thm2_bound,
    gain_vs_n_sweep,
    cancellation_audit,
    trace_peak,
)
from stringstab.apis.demos_api_v1 import random_pd, DEMO_SEED

PD = tf([4, 1])
COARSE = FrequencyGrid(1e-3, 1e2, 24, 2)


def test_headway_closed_form_for_pd():
    result = headway_min_b(PD)
    assert result.h_min == pytest.approx(np.sqrt(0.5), abs=1e-3)


def test_headway_criteria_report_their_method():
    grid = FrequencyGrid(1e-3, 1e3, 64, 3)
    K = tf([1.0, 2.0, 1.0], [0.0, 1.0])
    from_k = headway_min_b(K, grid)
    from_kbar = headway_min_a(tf([1.0, 2.0, 1.0]), grid)
    assert from_k.method == "criterion_b"
    assert from_k.h_min > 0
    results = headway_min(K=PD, Kbar=tf([4, 1]), grid=grid)
    assert [result.method for result in results] == ["pd_shortcut", "criterion_a"]
    assert from_kbar.method == "criterion_a"


def test_bode_integral_without_rhp_zeros():
    report = bode_csi_check(tf([1, 2], [0, 0, 1]))
    assert abs(report.integral_value) < 1e-3
    assert report.rhp_zero_sum == 0.0


def test_bode_integral_with_rhp_zero():
    R = tf([1, 2]) * tf([1, -0.1], [0, 0, 1])
    report = bode_csi_check(R)
    assert report.rhp_zero_sum == pytest.approx(0.1 * np.pi)
    assert report.integral_value == pytest.approx(0.1 * np.pi, rel=0.01)
    assert [round(q.real, 9) for q in report.q_list.roots] == [10.0]


def test_bode_preconditions():
    with pytest.raises(PreconditionError):
        bode_csi_check(tf([1, 2], [0, 1]))
    with pytest.raises(UnstableError):
        bode_csi_check(tf([-1, 1], [0, 0, 1]))


def test_basic_setting_amplifies_somewhere():
    rng = np.random.default_rng(DEMO_SEED)
    for _ in range(20):
        link = build_link(ChainScenario(0.0, random_pd(rng)))
        assert link.stable
        assert hinf(link.T).peak > 1 + 1e-6


def test_headway_threshold_is_sharp():
    h_min = headway_min_b(PD).h_min
    above = build_link(ChainScenario(1.01 * h_min, PD)).T
    assert hinf(above).peak <= 1.0 + 1e-12
    assert np.all(np.abs(above.freqresp(np.logspace(-2, 4, 600))) < 1.0)
    below = build_link(ChainScenario(0.99 * h_min, PD)).T
    assert np.any(np.abs(below.freqresp(np.logspace(-3, 1, 400))) > 1.0)


def test_low_frequency_gain_grows_like_sqrt_n():
    sc = ChainScenario(1.0, PD)
    for N in (16, 64, 256):
        assert low_frequency_gain(sc, N) / np.sqrt(N) == pytest.approx(0.25, rel=0.1)


def test_singular_values_match_svd():
    rng = np.random.default_rng(5)
    for N in (1, 2, 3, 7):
        G = rng.standard_normal((4, N, N + 1)) + 1j * rng.standard_normal((4, N, N + 1))
        expected = np.linalg.svd(G, compute_uv=False)[:, 0]
        assert np.allclose(largest_singular_values(G), expected, rtol=1e-9)


def test_singular_values_flag_nan_and_overflow():
    G = np.ones((2, 3, 4), dtype=complex)
    G[0, 1, 1] = np.nan
    G[1, 2, 0] = np.inf
    sigma = largest_singular_values(G)
    assert np.isnan(sigma[0]) and np.isinf(sigma[1])


def test_def2_never_exceeds_def1():
    sc = ChainScenario(1.0, PD)
    for N in (1, 4, 12):
        assert def2_gain(sc, N, COARSE) <= def1_gain(sc, N, COARSE) * (1 + 1e-9)


def test_bound_dominates_largest_singular_value():
    K = tf([1.0, 2.0, 1.0], [0.0, 1.0])
    sc = ChainScenario(1.1 * headway_min_b(K, COARSE).h_min, K)
    omegas = np.logspace(-3, 2, 40)
    sigma = largest_singular_values(chain_freq_matrices(build_link(sc), 32, omegas))
    bounds = np.array([thm2_bound(sc, 32, omega) for omega in omegas])
    assert np.all(bounds >= sigma * (1 - 1e-9))


def test_bound_needs_contractive_link():
    with pytest.raises(PreconditionError):
        thm2_bound(ChainScenario(0.0, PD), 8, 2.0)


def test_sweep_classifies_bounded_growth():
    K = tf([1.0, 2.0, 1.0], [0.0, 1.0])
    sc = ChainScenario(1.1 * headway_min_b(K, COARSE).h_min, K)
    report = gain_vs_n_sweep(sc, [16, 32], COARSE)
    assert report.stable
    assert report.growth_class == "bounded"
    assert sorted(report.per_N) == [16, 32]
    with pytest.raises(ValueError):
        gain_vs_n_sweep(ChainScenario(1.0, PD), [16, 8], COARSE)


def test_unstable_loop_has_infinite_gain():
    assert def1_gain(ChainScenario(0.0, tf([4])), 4, COARSE) == np.inf


def test_audit_reports_cancellations():
    lowpass = tf([1], [1, 1])
    sc = ChainScenario(0.0, PD, CaccComm(tf([1, 1], [1, 1]), lowpass, tf([1], [1, 2])))
    warnings = cancellation_audit(sc, COARSE)
    assert any(warning.startswith("B has numerator and denominator roots in common") for warning in warnings)


def test_sweep_classifies_sqrt_n_growth():
    report = gain_vs_n_sweep(ChainScenario(1.0, PD), [32, 64, 128], COARSE)
    assert report.growth_class == "sqrtN"
    assert report.c_estimate == pytest.approx(0.25, rel=0.15)
    assert report.per_N[128].peak_omega < 0.1


def test_sweep_classifies_geometric_growth_as_other():
    sc = ChainScenario(0.0, PD, CaccComm(tf([1.0]), tf([1.5]), tf([1.0])))
    link = build_link(sc)
    assert link.stable
    assert trace_peak(link, COARSE).peak > 1.4
    report = gain_vs_n_sweep(sc, [8, 16], COARSE)
    assert report.growth_class == "other"
    assert report.per_N[16].def1_gain > 10 * report.per_N[8].def1_gain
