"Datatypes used by chain api"

from typing import NamedTuple, Literal
import numpy as np
from stringstab.apis.ratfun_api_v1_types import RationalTF, ConfigError, NumericError


class ScenarioError(ConfigError):
    """Scenario violates a modelling rule"""


class InvalidFilterError(ConfigError):
    """CACC command filter B with B(0) = 0"""


class InvalidMountError(ConfigError):
    """Sensor mount stiffness with zero DC gain"""


class PreconditionError(NumericError):
    """Analysis called on a loop outside its assumptions"""


class UnstableError(PreconditionError):
    """Closed loop is not stable"""


class CaccComm(NamedTuple):
    """Cooperative adaptive cruise control: v_i = (K e_i + H r_i)/B, r_i = W v_{i-1}"""
    B: RationalTF
    """Command filter"""
    H: RationalTF
    """Feedforward on the received signal"""
    W: RationalTF
    """Communication channel"""


class GeneralComm(NamedTuple):
    """Scalar communication: u_i = K e_i + H r_i, v_i = F e_i + G r_i, r_i = W v_{i-1}"""
    F: RationalTF
    """Error to transmitted signal"""
    G: RationalTF
    """Received to transmitted signal"""
    H: RationalTF
    """Feedforward on the received signal"""
    W: RationalTF
    """Communication channel"""


class SensorMounts(NamedTuple):
    """Compliant sensor parts on the rear and front of each vehicle"""
    Kr: RationalTF
    """Rear mount stiffness, M_r = Kr/(s^2 + Kr)"""
    Kf: RationalTF
    """Front mount stiffness, M_f = Kf/(s^2 + Kf)"""


class ChainScenario(NamedTuple):
    """One homogeneous vehicle chain: headway, controller, communication and sensors"""
    h: float
    """Time headway in seconds"""
    K: RationalTF
    """Controller acting on the measured spacing error"""
    comm: CaccComm | GeneralComm | None = None
    """Communication variant, None without communication"""
    sensors: SensorMounts | None = None
    """Sensor variant, None for identity (rigid) sensors"""

    @property
    def kind(self) -> Literal["headway", "cacc", "general", "mounts"]:
        """which link model describes the scenario"""
        if isinstance(self.comm, CaccComm):
            return "cacc"
        if isinstance(self.comm, GeneralComm):
            return "general"
        if self.sensors is not None:
            return "mounts"
        return "headway"


class ScalarLink(NamedTuple):
    """
    Headway link e_{i+1} = T e_i + L (d_i - (1 + h s) d_{i+1})
    with Delta = s^2 + (1 + h s) K
    """
    T: RationalTF
    """K/Delta"""
    L: RationalTF
    """1/Delta"""
    P: RationalTF
    """(s^2 + h s K)/Delta^2"""
    Q: RationalTF
    """s^2/Delta^2, equal to P at h = 0"""
    Lh: RationalTF
    """(1 + h s)/Delta"""
    h: float
    """Headway"""
    stable: bool
    """Delta has all roots in the open left half plane"""


class BlockLink(NamedTuple):
    """Two-state link z_{i+1} = T z_i + inject (d_i - c d_{i+1}), e_i the first component of z_i"""
    T11: RationalTF
    T12: RationalTF
    T21: RationalTF
    T22: RationalTF
    inject: tuple[RationalTF, RationalTF]
    """Disturbance injection column, also the leader response z_1/d_0"""
    trace: RationalTF
    det: RationalTF
    c: RationalTF
    """Weight of the own disturbance, 1 + h s"""
    kind: Literal["cacc", "general"]
    stable: bool


class SensorLink(NamedTuple):
    """Mount link e_{i+1} = A e_i + (d_i - d_{i+1})/D with e_1 = lead d_0 - d_1/D"""
    A: RationalTF
    """Error propagation M_r (1/M_f) T'"""
    M_r: RationalTF
    M_f: RationalTF
    Tprime: RationalTF
    """K'/(s^2 + K') with K' = M_f K"""
    inject: RationalTF
    """1/D, the follower disturbance injection"""
    lead: RationalTF
    """Leader disturbance to first error"""
    rigid: bool
    """Mounts stiff enough to act as identity sensors"""
    stable: bool


LinkMaps = ScalarLink | BlockLink | SensorLink


class ChainFreqMatrix(NamedTuple):
    """Disturbance (d_0..d_N) to error (e_1..e_N) gains at one frequency"""
    omega: float
    """Frequency in rad/s"""
    entries: np.ndarray
    """Complex N x (N+1) matrix"""
