"Datatypes used by simkit api"

from typing import NamedTuple, Literal
import numpy as np
from stringstab.apis.ratfun_api_v1_types import NumericError


DisturbanceKind = Literal["impulse", "sine", "lowpass_noise", "file"]


class ImproperTFError(NumericError):
    """Transfer function with more derivative action than the simulator can realize"""


class StepTooLargeError(NumericError):
    """Fixed step above the stability bound of the fastest closed-loop pole"""
    def __init__(self, dt: float, suggested_dt: float) -> None:
        super().__init__(f"dt={dt:.3g} s is too large for the fastest pole, use dt <= {suggested_dt:.3g} s")
        self.suggested_dt = suggested_dt


class StateSpace(NamedTuple):
    """
    Controllable canonical realization y = C x + D u + D1 du/dt, dx/dt = A x + B u.
    D1 carries one derivative tap for controllers with relative degree -1.
    """
    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    D: float
    D1: float = 0.0

    @property
    def order(self) -> int:
        """number of states"""
        return len(self.B)

    def freqresp(self, omegas: np.ndarray | float) -> np.ndarray:
        """
        C (j w I - A)^-1 B + D + j w D1
        >>> ss = StateSpace(np.array([[-1.0]]), np.array([1.0]), np.array([1.0]), 0.0)
        >>> ss.freqresp(np.array([0.0])).tolist()
        [(1+0j)]
        """
        omegas = np.atleast_1d(np.asarray(omegas, dtype=float))
        identity = np.eye(self.order)
        values = []
        for omega in omegas:
            dynamic = self.C @ np.linalg.solve(1j * omega * identity - self.A, self.B) if self.order else 0.0
            values.append(dynamic + self.D + 1j * omega * self.D1)
        return np.array(values, dtype=complex)


class DisturbanceSpec(NamedTuple):
    """One disturbance signal d_i acting on the acceleration of a vehicle"""
    kind: DisturbanceKind
    target: int | Literal["all"] = 0
    """Vehicle index, 0 is the leader, or all vehicles"""
    duration: float | None = None
    """Seconds the signal is active from start, None for the whole horizon"""
    start: float = 0.0
    omega0: float = 1.0
    """Sine frequency in rad/s"""
    amplitude: float = 1.0
    """Sine amplitude, or RMS value of lowpass noise"""
    phase: float = 0.0
    cutoff: float = 1e-2
    """Lowpass noise bandwidth in rad/s"""
    seed: int = 0
    path: str | None = None
    """CSV file with columns t, value for kind file"""


class SimTrace(NamedTuple):
    """Sampled signals of one chain simulation"""
    dt: float
    horizon: float
    t: np.ndarray
    signals: dict[str, np.ndarray]
    """x_i, u_i, d_i for i = 0..N, e_i for i = 1..N, r_i and v_i with communication"""
    N: int


class NormSummary(NamedTuple):
    """Time-integrated L2 norms of a trace"""
    per_signal: dict[str, float]
    e_total: float
    """(L2, l2) norm over the errors e_1..e_N"""
    d_total: float
    """(L2, l2) norm over the disturbances d_0..d_N"""
