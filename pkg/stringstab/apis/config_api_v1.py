"scenario config api"

import logging
from typing import Any, Mapping
from yaml import safe_load
from jsonschema import Draft7Validator
from stringstab.transforms.functions import json_to_string, string_to_sha256_hash
from stringstab.transforms.datatypes import RecordSchema, FieldError
from stringstab.apis.ratfun_api_v1_types import RationalTF, NumericError, MAX_DEGREE
from stringstab.apis.chain_api_v1_types import ChainScenario, CaccComm, GeneralComm, SensorMounts
from stringstab.apis.chain_api_v1 import check_scenario
from stringstab.apis.analysis_api_v1_types import FrequencyGrid
from stringstab.apis.simkit_api_v1_types import DisturbanceSpec
from stringstab.apis.config_api_v1_types import RunConfig, SimSettings, ConfigValidationError

API_VERSION = 1
API_NAME = "CONFIG"

_COEFFS = {"type": "array", "items": {"type": "number"}, "minItems": 1, "maxItems": MAX_DEGREE + 1}
_TF = {
    "type": "object",
    "properties": {"num": _COEFFS, "den": _COEFFS},
    "required": ["num"],
    "additionalProperties": False,
}
_POSITIVE = {"type": "number", "exclusiveMinimum": 0}

SCENARIO_SCHEMA: dict[str, Any] = {
    "$schema": "http://json-schema.org/draft-07/schema#",
    "type": "object",
    "required": ["K"],
    "additionalProperties": False,
    "properties": {
        "h": {"type": "number", "minimum": 0},
        "K": _TF,
        "Kbar": _TF,
        "comm": {
            "type": "object",
            "required": ["type"],
            "additionalProperties": False,
            "properties": {
                "type": {"enum": ["none", "cacc", "general"]},
                "B": _TF, "H": _TF, "W": _TF, "F": _TF, "G": _TF,
            },
            "allOf": [
                {"if": {"properties": {"type": {"const": "cacc"}}}, "then": {"required": ["B", "H", "W"]}},
                {"if": {"properties": {"type": {"const": "general"}}}, "then": {"required": ["F", "G", "H", "W"]}},
            ],
        },
        "sensors": {
            "type": "object",
            "required": ["type"],
            "additionalProperties": False,
            "properties": {"type": {"enum": ["identity", "mounts"]}, "Kr": _TF, "Kf": _TF},
            "if": {"properties": {"type": {"const": "mounts"}}},
            "then": {"required": ["Kr", "Kf"]},
        },
        "grid": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "min": _POSITIVE,
                "max": _POSITIVE,
                "points_per_decade": {"type": "integer", "minimum": 1},
                "refinement_depth": {"type": "integer", "minimum": 0},
            },
        },
        "Ns": {"type": "array", "items": {"type": "integer", "minimum": 1}, "minItems": 1},
        "sim": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "dt": _POSITIVE,
                "horizon": _POSITIVE,
                "w_spread": {"type": "number", "minimum": 0, "maximum": 0.5},
                "seed": {"type": "integer", "minimum": 0},
            },
        },
        "disturbances": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["kind"],
                "additionalProperties": False,
                "properties": {
                    "kind": {"enum": ["impulse", "sine", "lowpass_noise", "file"]},
                    "target": {"oneOf": [{"type": "integer", "minimum": 0}, {"const": "all"}]},
                    "duration": {"type": ["number", "null"], "exclusiveMinimum": 0},
                    "start": {"type": "number", "minimum": 0},
                    "omega0": {"type": "number", "minimum": 0},
                    "amplitude": {"type": "number"},
                    "phase": {"type": "number"},
                    "cutoff": _POSITIVE,
                    "seed": {"type": "integer", "minimum": 0},
                    "path": {"type": ["string", "null"]},
                },
                "if": {"properties": {"kind": {"const": "file"}}},
                "then": {"required": ["path"], "properties": {"path": {"type": "string"}}},
            },
        },
    },
}


def _tf_from_mapping(mapping: Mapping) -> RationalTF:
    try:
        return RationalTF.from_coeffs(mapping["num"], mapping.get("den", [1.0]))
    except NumericError as exc:
        raise ValueError(str(exc)) from exc


_TRANSFORMS = {
    "mapping -> tf": _tf_from_mapping,
    "list -> disturbances": lambda items: tuple(DisturbanceSpec(**item) for item in items),
}

_RUN_FIELDS = """
fields:
  - src: h
    transform: number -> float
    replace_undefined_with: 0.0
  - src: K
    transform: mapping -> tf
  - src: Kbar
    transform: mapping -> tf
    allow_undefined: true
  - src: comm.type
    dst: comm_type
    replace_undefined_with: none
  - src: comm.B
    dst: B
    transform: mapping -> tf
    allow_undefined: true
  - src: comm.H
    dst: H
    transform: mapping -> tf
    allow_undefined: true
  - src: comm.W
    dst: W
    transform: mapping -> tf
    allow_undefined: true
  - src: comm.F
    dst: F
    transform: mapping -> tf
    allow_undefined: true
  - src: comm.G
    dst: G
    transform: mapping -> tf
    allow_undefined: true
  - src: sensors.type
    dst: sensors_type
    replace_undefined_with: identity
  - src: sensors.Kr
    dst: Kr
    transform: mapping -> tf
    allow_undefined: true
  - src: sensors.Kf
    dst: Kf
    transform: mapping -> tf
    allow_undefined: true
  - src: grid.min
    dst: omega_min
    transform: number -> float
    replace_undefined_with: 0.0001
  - src: grid.max
    dst: omega_max
    transform: number -> float
    replace_undefined_with: 10000.0
  - src: grid.points_per_decade
    dst: points_per_decade
    replace_undefined_with: 64
  - src: grid.refinement_depth
    dst: refinement_depth
    replace_undefined_with: 3
  - src: Ns
    transform: list -> ints
    replace_undefined_with: [8, 16, 32, 64]
  - src: sim.dt
    dst: dt
    transform: number -> float
    replace_undefined_with: 0.001
  - src: sim.horizon
    dst: horizon
    transform: number -> float
    replace_undefined_with: 200.0
  - src: sim.w_spread
    dst: w_spread
    transform: number -> float
    replace_undefined_with: 0.1
  - src: sim.seed
    dst: seed
    replace_undefined_with: 0
  - src: disturbances
    transform: list -> disturbances
    replace_undefined_with: []
    transform_replacements: true
"""

_RUN_SCHEMA = RecordSchema.from_yaml(_RUN_FIELDS, _TRANSFORMS)


def validate_config(data: Any) -> None:
    """
    Checks a config document against SCENARIO_SCHEMA.

    raises:
        - ConfigValidationError listing every violation with its field path

    >>> validate_config({"K": {"num": [4, 1]}, "h": 1})
    >>> try: validate_config({"K": {"num": [4, 1]}, "h": -1, "sim": {"dt": "fast"}})
    ... except ConfigValidationError as exc: exc.messages
    ['h: -1 is less than the minimum of 0', "sim.dt: 'fast' is not of type 'number'"]
    """
    validator = Draft7Validator(SCENARIO_SCHEMA)
    errors = sorted(validator.iter_errors(data), key=lambda error: [str(p) for p in error.absolute_path])
    if errors:
        messages = [f"{'.'.join(str(p) for p in error.absolute_path) or '<root>'}: {error.message}" for error in errors]
        raise ConfigValidationError(messages)


def parse_config(source: str | Mapping) -> RunConfig:
    """
    Parses a yaml document (or an already loaded mapping) into a validated RunConfig.

    raises:
        - ConfigValidationError for schema violations
        - ScenarioError, InvalidFilterError, InvalidMountError for modelling rule violations
        - yaml.YAMLError for malformed yaml

    >>> cfg = parse_config("h: 1\\nK: {num: [4, 1]}\\nNs: [4, 8]")
    >>> cfg.scenario.h, cfg.scenario.K.num.coeffs, cfg.Ns, cfg.sim.dt
    (1.0, (4.0, 1.0), (4, 8), 0.001)
    """
    data = safe_load(source) if isinstance(source, str) else dict(source)
    if not isinstance(data, dict):
        raise ConfigValidationError(["<root>: config must be a mapping"])
    validate_config(data)
    try:
        record = _RUN_SCHEMA(data)
    except FieldError as exc:
        raise ConfigValidationError([str(exc)]) from exc
    comm: CaccComm | GeneralComm | None = None
    match record["comm_type"]:
        case "cacc":
            comm = CaccComm(record["B"], record["H"], record["W"])
        case "general":
            comm = GeneralComm(record["F"], record["G"], record["H"], record["W"])
    sensors = SensorMounts(record["Kr"], record["Kf"]) if record["sensors_type"] == "mounts" else None
    scenario = ChainScenario(record["h"], record["K"], comm, sensors)
    check_scenario(scenario)
    grid = FrequencyGrid(
        record["omega_min"], record["omega_max"], record["points_per_decade"], record["refinement_depth"]
    )
    grid.omegas()
    config = RunConfig(
        scenario=scenario,
        grid=grid,
        Ns=tuple(sorted(set(record["Ns"]))),
        sim=SimSettings(record["dt"], record["horizon"], record["w_spread"], record["seed"]),
        disturbances=record["disturbances"],
        Kbar=record["Kbar"],
    )
    logging.debug(f"parsed {scenario.kind} scenario with h={scenario.h}")
    return config


def _tf_to_mapping(tf: RationalTF) -> dict[str, list[float]]:
    return {"num": list(tf.num.coeffs), "den": list(tf.den.coeffs)}


def serialize_config(config: RunConfig) -> dict[str, Any]:
    """
    Normalized config document with every default filled in, parse_config accepts it back.

    >>> serialize_config(parse_config("K: {num: [4, 1]}"))["comm"]
    {'type': 'none'}
    """
    sc = config.scenario
    data: dict[str, Any] = {"h": sc.h, "K": _tf_to_mapping(sc.K)}
    if config.Kbar is not None:
        data["Kbar"] = _tf_to_mapping(config.Kbar)
    match sc.comm:
        case CaccComm() | GeneralComm():
            data["comm"] = {"type": sc.kind} | {name: _tf_to_mapping(tf) for name, tf in sc.comm._asdict().items()}
        case _:
            data["comm"] = {"type": "none"}
    if sc.sensors is None:
        data["sensors"] = {"type": "identity"}
    else:
        data["sensors"] = {"type": "mounts"} | {name: _tf_to_mapping(tf) for name, tf in sc.sensors._asdict().items()}
    data["grid"] = {
        "min": config.grid.omega_min,
        "max": config.grid.omega_max,
        "points_per_decade": config.grid.points_per_decade,
        "refinement_depth": config.grid.refinement_depth,
    }
    data["Ns"] = list(config.Ns)
    data["sim"] = config.sim._asdict()
    data["disturbances"] = [spec._asdict() for spec in config.disturbances]
    return data


def config_hash(config: RunConfig) -> str:
    """sha256 of the canonical json of the normalized config"""
    return string_to_sha256_hash(json_to_string(serialize_config(config), sort_keys=True))


def with_overrides(
    config: RunConfig,
    grid_min: float | None = None,
    grid_max: float | None = None,
    points_per_decade: int | None = None,
    seed: int | None = None,
) -> RunConfig:
    """
    replaces grid and seed settings given on the command line
    >>> with_overrides(parse_config("K: {num: [4, 1]}"), grid_max=10.0).grid.omega_max
    10.0
    """
    grid = config.grid._replace(
        omega_min=config.grid.omega_min if grid_min is None else grid_min,
        omega_max=config.grid.omega_max if grid_max is None else grid_max,
        points_per_decade=config.grid.points_per_decade if points_per_decade is None else points_per_decade,
    )
    grid.omegas()
    sim = config.sim if seed is None else config.sim._replace(seed=seed)
    return config._replace(grid=grid, sim=sim)
