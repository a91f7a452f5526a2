"Datatypes used by analysis api"

from typing import NamedTuple, Literal
import numpy as np
from stringstab.apis.ratfun_api_v1_types import RootSet, ConfigError
from stringstab.apis.chain_api_v1_types import PreconditionError, UnstableError  # pylint: disable=unused-import


GrowthClass = Literal["bounded", "sqrtN", "other"]
HeadwayMethod = Literal["criterion_a", "criterion_b", "pd_shortcut"]


class FrequencyGrid(NamedTuple):
    """Logarithmic frequency grid with local refinement around maxima"""
    omega_min: float = 1e-4
    """Lowest frequency in rad/s"""
    omega_max: float = 1e4
    """Highest frequency in rad/s"""
    points_per_decade: int = 64
    refinement_depth: int = 3
    """Number of zoom passes around the largest local maxima"""

    def omegas(self) -> np.ndarray:
        """
        the base grid, raising ConfigError for an invalid range
        >>> FrequencyGrid(1.0, 100.0, 2, 0).omegas().round(6).tolist()
        [1.0, 3.162278, 10.0, 31.622777, 100.0]
        """
        if not 0 < self.omega_min < self.omega_max or not np.isfinite(self.omega_max):
            raise ConfigError(f"frequency grid needs 0 < omega_min < omega_max, got {self.omega_min}, {self.omega_max}")
        if self.points_per_decade < 1 or self.refinement_depth < 0:
            raise ConfigError("frequency grid needs points_per_decade >= 1 and refinement_depth >= 0")
        decades = np.log10(self.omega_max / self.omega_min)
        count = int(np.ceil(decades * self.points_per_decade)) + 1
        return np.logspace(np.log10(self.omega_min), np.log10(self.omega_max), count)


class HInfPeak(NamedTuple):
    """Largest gain over frequency"""
    peak: float
    omega_star: float
    """Frequency of the peak, 0 for the DC limit and inf for the high frequency limit"""


class BodeIntegralReport(NamedTuple):
    """Numeric value of the complementary sensitivity integral against its zero sum"""
    integral_value: float
    """Integral of ln|T(j w)|/w^2 over (0, inf)"""
    rhp_zero_sum: float
    """pi times the sum of 1/q over right half plane zeros q of the loop"""
    residual: float
    """integral_value - rhp_zero_sum"""
    q_list: RootSet
    """Right half plane zeros of the loop"""


class HeadwayResult(NamedTuple):
    """Minimum time headway for |T(j w)| <= 1"""
    h_min: float
    """Seconds"""
    argmax_omega: float
    """Frequency attaining the supremum, 0 for the DC limit"""
    method: HeadwayMethod


class NGain(NamedTuple):
    """String stability gains of one chain length"""
    def1_gain: float
    """Sup over frequency of the largest singular value of the chain matrix"""
    def2_gain: float
    """Sup over frequency of the largest single-disturbance entry"""
    peak_omega: float
    """Frequency of the def1 peak"""


class GainReport(NamedTuple):
    """Gain versus chain length with a growth classification"""
    per_N: dict[int, NGain]
    growth_class: GrowthClass
    c_estimate: float
    """Estimated string stability constant, or the per sqrt(N) slope for sqrtN growth"""
    stable: bool
    """Closed loop stability of the link"""
