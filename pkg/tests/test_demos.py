import numpy as np
import pytest
from stringstab.apis.ratfun_api_v1_types import ConfigError
from stringstab.apis.analysis_api_v1_types import FrequencyGrid
from stringstab.apis.demos_api_v1 import (
    run_demo,
    cacc_headway_growth,
    draw_scenarios,
    random_cacc,
    random_general,
    random_mounts,
    DEMO_COUNT,
    DEMO_SEED,
)

GRID = FrequencyGrid(1e-3, 1e3, 32, 3)


def test_draws_are_reproducible():
    first = draw_scenarios(random_general, 5, seed=DEMO_SEED, grid=GRID)
    assert first == draw_scenarios(random_general, 5, seed=DEMO_SEED, grid=GRID)
    assert first != draw_scenarios(random_general, 5, seed=DEMO_SEED + 1, grid=GRID)


def test_low_frequency_gain_per_sqrt_n():
    result = run_demo(1)
    assert result.passed, result.summary
    assert np.allclose(result.frame["expected_per_sqrtN"], 0.25)


def test_pid_gain_is_flat_in_n():
    result = run_demo(2, GRID)
    assert result.passed, result.summary
    assert result.frame["N"].tolist() == [8, 16, 32, 64, 128]


def test_cacc_trace_exceeds_one():
    result = run_demo(3, GRID)
    assert result.passed, result.summary
    assert (result.frame["part"] == "trace").sum() == DEMO_COUNT
    assert result.frame.loc[result.frame["part"] == "headway", "N"].tolist() == [16, 64, 256]


def test_cacc_with_headway_grows_like_sqrt_n():
    frame, expected = cacc_headway_growth()
    assert expected == pytest.approx(0.2)
    ratios = frame["def1_per_sqrtN"] / expected
    assert ((ratios - 1.0).abs() <= 0.1).all()
    assert frame["def1_gain"].is_monotonic_increasing


def test_general_communication_fails_unit_disk_test():
    result = run_demo(4, GRID)
    assert result.passed, result.summary
    assert result.frame["refined"].sum() == DEMO_COUNT


def test_mount_attenuation_forces_amplification():
    result = run_demo(5, GRID)
    assert result.passed, result.summary
    assert (result.frame["sup_gain"] >= result.frame["inf_gain"]).all()


def test_families_draw_their_kind():
    rng = np.random.default_rng(0)
    assert random_cacc(rng).kind == "cacc"
    assert random_general(rng).kind == "general"
    assert random_mounts(rng).kind == "mounts"


def test_demo_rejects_options_it_does_not_use():
    with pytest.raises(ConfigError, match="demo 1 takes no grid option"):
        run_demo(1, GRID)
    with pytest.raises(ConfigError, match="demo 2 takes no seed option"):
        run_demo(2, GRID, seed=1)
    with pytest.raises(ValueError):
        run_demo(6)
