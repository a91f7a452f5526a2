"Datatypes used by config api"

from typing import NamedTuple
from stringstab.apis.ratfun_api_v1_types import RationalTF, ConfigError
from stringstab.apis.chain_api_v1_types import ChainScenario
from stringstab.apis.analysis_api_v1_types import FrequencyGrid
from stringstab.apis.simkit_api_v1_types import DisturbanceSpec


DEFAULT_NS = (8, 16, 32, 64)


class ConfigValidationError(ConfigError):
    """Config document rejected by the schema, one message per offending field"""
    def __init__(self, messages: list[str]) -> None:
        super().__init__("invalid config:\n  " + "\n  ".join(messages))
        self.messages = messages


class SimSettings(NamedTuple):
    """Simulation settings of a run"""
    dt: float = 1e-3
    """Fixed step in seconds"""
    horizon: float = 200.0
    """Simulated time in seconds"""
    w_spread: float = 0.1
    """Relative coefficient perturbation of the communication channel"""
    seed: int = 0
    """Seed of the channel perturbation"""


class RunConfig(NamedTuple):
    """One scenario with the parameters of every command"""
    scenario: ChainScenario
    grid: FrequencyGrid = FrequencyGrid()
    Ns: tuple[int, ...] = DEFAULT_NS
    sim: SimSettings = SimSettings()
    disturbances: tuple[DisturbanceSpec, ...] = ()
    Kbar: RationalTF | None = None
    """Loop gain for the headway criterion on K(s)(1 + h s)"""
