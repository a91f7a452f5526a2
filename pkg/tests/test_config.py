import pytest
from yaml import YAMLError
from stringstab.apis.chain_api_v1_types import CaccComm, InvalidFilterError, ScenarioError
from stringstab.apis.config_api_v1_types import ConfigValidationError
from stringstab.apis.config_api_v1 import parse_config, serialize_config, config_hash, with_overrides

CACC = """
h: 0.5
K: {num: [4, 1]}
comm:
  type: cacc
  B: {num: [1, 0.5], den: [1, 0.2]}
  H: {num: [0.8]}
  W: {num: [1], den: [1, 0.1]}
Ns: [32, 8, 16, 8]
sim: {dt: 0.005, horizon: 30, w_spread: 0.05, seed: 3}
disturbances:
  - {kind: impulse, target: 0}
  - {kind: lowpass_noise, target: all, cutoff: 0.5}
"""


def test_parse_full_scenario():
    config = parse_config(CACC)
    assert config.scenario.kind == "cacc"
    assert isinstance(config.scenario.comm, CaccComm)
    assert config.Ns == (8, 16, 32)
    assert config.sim.seed == 3
    assert [spec.kind for spec in config.disturbances] == ["impulse", "lowpass_noise"]
    assert config.disturbances[1].target == "all"


def test_serialized_config_parses_back():
    config = parse_config(CACC)
    assert parse_config(serialize_config(config)) == config


def test_hash_ignores_layout_and_defaults():
    compact = parse_config("K: {num: [4, 1]}")
    explicit = parse_config("h: 0\nK: {num: [4.0, 1.0], den: [1]}\nNs: [8, 16, 32, 64]\n")
    assert config_hash(compact) == config_hash(explicit)
    assert config_hash(compact) != config_hash(with_overrides(compact, seed=1))


def test_schema_violations_are_listed():
    with pytest.raises(ConfigValidationError) as info:
        parse_config("K: {num: [4, 1]}\nh: -1\ncomm: {type: cacc}\n")
    assert any(message.startswith("h:") for message in info.value.messages)
    assert any(message.startswith("comm:") for message in info.value.messages)


def test_modelling_rules_are_enforced():
    with pytest.raises(ScenarioError, match="K\\(0\\) != 0"):
        parse_config("K: {num: [0, 1]}")
    with pytest.raises(ScenarioError):
        parse_config(
            "h: 1\nK: {num: [4, 1]}\ncomm: {type: general, F: {num: [1]}, G: {num: [1]}, H: {num: [1]}, W: {num: [1]}}"
        )
    with pytest.raises(InvalidFilterError):
        parse_config("K: {num: [4, 1]}\ncomm: {type: cacc, B: {num: [0, 1], den: [1, 1]}, H: {num: [1]}, W: {num: [1]}}")


def test_malformed_yaml():
    with pytest.raises(YAMLError):
        parse_config("K: [4, 1")
