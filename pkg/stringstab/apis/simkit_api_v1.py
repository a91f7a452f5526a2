"time domain simulation api"

import logging
from dataclasses import dataclass, field
import numpy as np
import numpy.polynomial.polynomial as npp
import pandas as pd
from scipy import integrate
from stringstab.apis.ratfun_api_v1_types import Polynomial, RationalTF, ConfigError
from stringstab.apis.ratfun_api_v1 import is_hurwitz
from stringstab.apis.chain_api_v1_types import ChainScenario, CaccComm, GeneralComm
from stringstab.apis.chain_api_v1 import build_link
from stringstab.apis.analysis_api_v1 import principal_input
from stringstab.apis.simkit_api_v1_types import (
    StateSpace,
    DisturbanceSpec,
    SimTrace,
    NormSummary,
    ImproperTFError,
    StepTooLargeError,
)

API_VERSION = 1
API_NAME = "SIMKIT"

DEFAULT_DT = 1e-3
DEFAULT_HORIZON = 200.0
UNSTABLE_HORIZON = 20.0
NOISE_HORIZON_FACTOR = 50.0
MAX_STEPS = 2_000_000
STEP_FACTOR = 0.1
W_SPREAD = 0.1


def realize(tf: RationalTF, input_differentiated: bool = False) -> StateSpace:
    """
    Controllable canonical realization. A relative degree -1 part becomes the derivative
    tap D1, which the simulator feeds with derivatives it knows from the vehicle states.

    params:
        - tf: transfer function with relative degree >= -1
        - input_differentiated: the input has no known derivative, so D1 must vanish

    raises:
        - ImproperTFError for relative degree < -1, or -1 on an input without a known derivative

    >>> ss = realize(RationalTF.from_coeffs([1], [1, 1]))
    >>> ss.A.tolist(), ss.B.tolist(), ss.C.tolist(), ss.D
    ([[-1.0]], [1.0], [1.0], 0.0)
    >>> pd_ss = realize(RationalTF.from_coeffs([4, 1]))
    >>> pd_ss.order, pd_ss.D, pd_ss.D1
    (0, 4.0, 1.0)
    >>> try: realize(RationalTF.from_coeffs([1, 0, 1], [0, 1]), input_differentiated=True)
    ... except ImproperTFError: "improper"
    'improper'
    """
    quotient, remainder = npp.polydiv(tf.num.as_array(), tf.den.as_array())
    quotient = Polynomial(quotient)
    if quotient.degree >= 2:
        raise ImproperTFError(f"relative degree {tf.den.degree - tf.num.degree} cannot be realized")
    d1 = quotient.coeffs[1] if quotient.degree == 1 else 0.0
    if d1 != 0.0 and input_differentiated:
        raise ImproperTFError("relative degree -1 on an input without a known derivative")
    n = tf.den.degree
    den_desc = tf.den.as_array()[::-1]
    A = np.zeros((n, n))
    if n:
        A[0, :] = -den_desc[1:]
        A[1:, :-1] = np.eye(n - 1)
    B = np.zeros(n)
    if n:
        B[0] = 1.0
    C = np.zeros(n)
    for i, coeff in enumerate(np.atleast_1d(remainder)[:n]):
        C[n - 1 - i] = coeff
    return StateSpace(A, B, C, float(quotient.coeffs[0]), float(d1))


def _samples(dt: float, horizon: float) -> np.ndarray:
    if not 0 < dt < horizon:
        raise ConfigError(f"simulation needs 0 < dt < horizon, got dt={dt}, horizon={horizon}")
    return np.arange(int(round(horizon / dt)) + 1) * dt


def make_disturbance(spec: DisturbanceSpec, dt: float, horizon: float) -> np.ndarray:
    """
    Samples one disturbance on the simulation time grid.
    An impulse has unit area under the first-order hold, lowpass noise is white noise
    cut off above spec.cutoff in the discrete Fourier domain, zero mean, scaled to the RMS amplitude.

    >>> d = make_disturbance(DisturbanceSpec("impulse"), 0.01, 1.0)
    >>> int(np.count_nonzero(d)), round(float(integrate.trapezoid(d, dx=0.01)), 12)
    (1, 1.0)
    >>> d = make_disturbance(DisturbanceSpec("sine", omega0=1.0), 0.01, 100.0)
    >>> round(float(np.sqrt(integrate.trapezoid(d**2, dx=0.01))), 1)
    7.1
    """
    t = _samples(dt, horizon)
    end = horizon if spec.duration is None else spec.start + spec.duration
    active = (t >= spec.start - 1e-12) & (t <= end + 1e-12)
    match spec.kind:
        case "impulse":
            signal = np.zeros_like(t)
            k = int(round(spec.start / dt))
            signal[k] = (2.0 if k == 0 else 1.0) / dt
            return signal
        case "sine":
            return np.where(active, spec.amplitude * np.sin(spec.omega0 * t + spec.phase), 0.0)
        case "lowpass_noise":
            rng = np.random.default_rng(spec.seed)
            spectrum = np.fft.rfft(rng.standard_normal(len(t)))
            omegas = 2 * np.pi * np.fft.rfftfreq(len(t), dt)
            spectrum[(omegas > spec.cutoff) | (omegas == 0.0)] = 0.0
            signal = np.fft.irfft(spectrum, len(t))
            rms = float(np.sqrt(np.mean(signal**2)))
            if rms == 0.0:
                logging.warning(f"no frequency bin below cutoff {spec.cutoff} rad/s, noise is zero")
                return signal
            return signal * spec.amplitude / rms
        case "file":
            if spec.path is None:
                raise ConfigError("disturbance of kind file needs a path")
            try:
                series = pd.read_csv(spec.path, comment="#")
            except OSError as exc:
                raise ConfigError(f"cannot read disturbance file {spec.path}: {exc}") from exc
            return np.interp(t, series["t"].to_numpy(float), series["value"].to_numpy(float), left=0.0, right=0.0)
    raise ConfigError(f"unknown disturbance kind {spec.kind}")


def disturbance_matrix(specs: list[DisturbanceSpec], N: int, dt: float, horizon: float) -> np.ndarray:
    """
    sum of all disturbances per vehicle, shape (samples, N + 1);
    noise aimed at all vehicles draws an independent seed per vehicle
    """
    t = _samples(dt, horizon)
    d = np.zeros((len(t), N + 1))
    for spec in specs:
        if spec.target == "all":
            for i in range(N + 1):
                own = spec._replace(seed=spec.seed + i) if spec.kind == "lowpass_noise" else spec
                d[:, i] += make_disturbance(own, dt, horizon)
        elif isinstance(spec.target, int) and 0 <= spec.target <= N:
            d[:, spec.target] += make_disturbance(spec, dt, horizon)
        else:
            raise ConfigError(f"disturbance target {spec.target} outside vehicles 0..{N}")
    return d


def perturb_tf(tf: RationalTF, spread: float, rng: np.random.Generator, attempts: int = 20) -> RationalTF:
    """
    tf with every coefficient scaled by an independent factor in [1 - spread, 1 + spread],
    redrawn until the denominator stays stable
    """
    if spread <= 0:
        return tf
    for _ in range(attempts):
        num = tf.num.as_array() * (1 + rng.uniform(-spread, spread, len(tf.num.coeffs)))
        den = tf.den.as_array() * (1 + rng.uniform(-spread, spread, len(tf.den.coeffs)))
        candidate = RationalTF(Polynomial(num), Polynomial(den))
        if is_hurwitz(candidate.den):
            return candidate
    logging.warning("no stable perturbation of W found, simulating the nominal channel")
    return tf


@dataclass
class _Block:
    """one realized transfer function with its slice of the global state"""
    ss: StateSpace
    offset: int

    @property
    def states(self) -> slice:
        return slice(self.offset, self.offset + self.ss.order)

    def output(self, X: np.ndarray, value: float, derivative: float = 0.0) -> float:
        return float(self.ss.C @ X[self.states]) + self.ss.D * value + self.ss.D1 * derivative

    def update(self, X: np.ndarray, Xdot: np.ndarray, value: float) -> None:
        Xdot[self.states] = self.ss.A @ X[self.states] + self.ss.B * value


@dataclass
class _Vehicle:
    x: int
    vel: int
    blocks: dict[str, _Block] = field(default_factory=dict)
    # mount part position and velocity indices, rear then front
    mounts: tuple[int, int, int, int] | None = None


class _ChainModel:
    """
    Interconnection of the per-vehicle blocks, evaluated leader to tail in a single pass.
    The model is linear, forward() is evaluated on unit vectors to build the global matrices.
    """

    def __init__(self, sc: ChainScenario, N: int, W: RationalTF | None) -> None:
        self.sc, self.N, self.size = sc, N, 0
        self.vehicles: list[_Vehicle] = []
        for i in range(N + 1):
            vehicle = _Vehicle(self._allocate(1), self._allocate(1))
            if sc.sensors is not None:
                rear, front = self._allocate(2), self._allocate(2)
                vehicle.mounts = (rear, rear + 1, front, front + 1)
                vehicle.blocks["Kr"] = self._block(realize(sc.sensors.Kr))
                vehicle.blocks["Kf"] = self._block(realize(sc.sensors.Kf))
            if i > 0:
                vehicle.blocks["K"] = self._block(realize(sc.K))
                match sc.comm:
                    case CaccComm(B=B, H=H):
                        vehicle.blocks["W"] = self._block(realize(W, True))  # type: ignore
                        vehicle.blocks["H"] = self._block(realize(H, True))
                        vehicle.blocks["Binv"] = self._block(realize(B.reciprocal(), True))
                    case GeneralComm(F=F, G=G, H=H):
                        vehicle.blocks["W"] = self._block(realize(W, True))  # type: ignore
                        vehicle.blocks["H"] = self._block(realize(H, True))
                        vehicle.blocks["F"] = self._block(realize(F, True))
                        vehicle.blocks["G"] = self._block(realize(G, True))
            self.vehicles.append(vehicle)
        families = ["x", "e", "u", "d"] + (["r", "v"] if sc.comm is not None else [])
        self.names = [f"{name}_{i}" for name in families for i in range(N + 1) if not (name == "e" and i == 0)]

    def _allocate(self, count: int) -> int:
        offset, self.size = self.size, self.size + count
        return offset

    def _block(self, ss: StateSpace) -> _Block:
        return _Block(ss, self._allocate(ss.order))

    def _mount(self, vehicle: _Vehicle, X: np.ndarray, Xdot: np.ndarray) -> None:
        position, velocity = X[vehicle.x], X[vehicle.vel]
        rear_p, rear_q, front_p, front_q = vehicle.mounts  # type: ignore
        for p, q, name in ((rear_p, rear_q, "Kr"), (front_p, front_q, "Kf")):
            block = vehicle.blocks[name]
            Xdot[p] = X[q]
            Xdot[q] = block.output(X, position - X[p], velocity - X[q])
            block.update(X, Xdot, position - X[p])

    def forward(self, X: np.ndarray, d: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """state derivative and sampled outputs for state X and disturbances d"""
        h = self.sc.h
        Xdot = np.zeros(self.size)
        out: dict[str, float] = {}
        v_prev = 0.0
        for i, vehicle in enumerate(self.vehicles):
            blocks = vehicle.blocks
            if vehicle.mounts is not None:
                self._mount(vehicle, X, Xdot)
            u, r, v = 0.0, 0.0, 0.0
            if i > 0:
                ahead = self.vehicles[i - 1]
                e = X[ahead.x] - X[vehicle.x] - h * X[vehicle.vel]
                if vehicle.mounts is not None:
                    measured = X[ahead.mounts[0]] - X[vehicle.mounts[2]]  # type: ignore
                    known_rate = X[ahead.mounts[1]] - X[vehicle.mounts[3]]  # type: ignore
                else:
                    measured, known_rate = e, X[ahead.vel] - X[vehicle.vel]
                feedforward = 0.0
                if self.sc.comm is not None:
                    r = blocks["W"].output(X, v_prev)
                    blocks["W"].update(X, Xdot, v_prev)
                    feedforward = blocks["H"].output(X, r)
                    blocks["H"].update(X, Xdot, r)
                K = blocks["K"]
                # e' has derivative known_rate - h (u + d), solved for u
                u = (
                    float(K.ss.C @ X[K.states]) + K.ss.D * measured + K.ss.D1 * (known_rate - h * d[i]) + feedforward
                ) / (1.0 + h * K.ss.D1)
                K.update(X, Xdot, measured)
                if isinstance(self.sc.comm, CaccComm):
                    v = blocks["Binv"].output(X, u)
                    blocks["Binv"].update(X, Xdot, u)
                elif isinstance(self.sc.comm, GeneralComm):
                    v = blocks["F"].output(X, measured) + blocks["G"].output(X, r)
                    blocks["F"].update(X, Xdot, measured)
                    blocks["G"].update(X, Xdot, r)
                out[f"e_{i}"] = e
            Xdot[vehicle.x] = X[vehicle.vel]
            Xdot[vehicle.vel] = u + d[i]
            out[f"x_{i}"], out[f"u_{i}"], out[f"d_{i}"] = X[vehicle.x], u, d[i]
            out[f"r_{i}"], out[f"v_{i}"] = r, v
            v_prev = v
        return Xdot, np.array([out[name] for name in self.names])

    def matrices(self) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        """A, B, C, D of the interconnection with input d and output the named signals"""
        n, m = self.size, self.N + 1
        A, C = np.zeros((n, n)), np.zeros((len(self.names), n))
        B, D = np.zeros((n, m)), np.zeros((len(self.names), m))
        for k in range(n):
            A[:, k], C[:, k] = self.forward(np.eye(n)[k], np.zeros(m))
        for j in range(m):
            B[:, j], D[:, j] = self.forward(np.zeros(n), np.eye(m)[j])
        return A, B, C, D


def rk4_step(A: np.ndarray, B: np.ndarray, X: np.ndarray, d0: np.ndarray, d1: np.ndarray, dt: float) -> np.ndarray:
    """
    one classical Runge-Kutta step of dX/dt = A X + B d with d linear between d0 and d1,
    works column-wise on matrices
    """
    mid = 0.5 * (d0 + d1)
    k1 = A @ X + B @ d0
    k2 = A @ (X + 0.5 * dt * k1) + B @ mid
    k3 = A @ (X + 0.5 * dt * k2) + B @ mid
    k4 = A @ (X + dt * k3) + B @ d1
    return X + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)


def simulate_chain(
    sc: ChainScenario,
    N: int,
    disturbances: list[DisturbanceSpec],
    dt: float = DEFAULT_DT,
    horizon: float = DEFAULT_HORIZON,
    w_spread: float = W_SPREAD,
    seed: int = 0,
    max_steps: int = MAX_STEPS,
) -> SimTrace:
    """
    Fixed-step fourth order simulation of an N-follower chain from rest.
    The closed loop is linear, so the Runge-Kutta step is applied once to identity matrices
    to obtain the transition and first-order-hold input matrices, then iterated.
    The communication channel W is drawn from a coefficient-perturbed family seeded by seed.
    Lowpass noise extends the horizon to NOISE_HORIZON_FACTOR over the lowest cutoff, at most to max_steps steps.

    raises:
        - StepTooLargeError when dt exceeds STEP_FACTOR over the fastest pole modulus
        - ImproperTFError for communication filters with derivative action
        - ConfigError when horizon/dt exceeds max_steps

    >>> from stringstab.apis.ratfun_api_v1 import tf
    >>> trace = simulate_chain(ChainScenario(1.0, tf([4, 1])), 2, [], dt=0.01, horizon=1.0)
    >>> sorted(trace.signals)[:3], float(np.max(np.abs(trace.signals["e_2"])))
    (['d_0', 'd_1', 'd_2'], 0.0)
    """
    link = build_link(sc)
    if not link.stable:
        logging.warning(f"closed loop is unstable, horizon capped at {UNSTABLE_HORIZON} s")
        horizon = min(horizon, UNSTABLE_HORIZON)
    if dt > 0 and horizon / dt > max_steps:
        raise ConfigError(f"horizon {horizon} s at dt={dt} s needs more than {max_steps} steps")
    cutoffs = [spec.cutoff for spec in disturbances if spec.kind == "lowpass_noise"]
    if cutoffs and horizon < NOISE_HORIZON_FACTOR / min(cutoffs):
        wanted = NOISE_HORIZON_FACTOR / min(cutoffs)
        horizon = min(wanted, max_steps * dt)
        if horizon < wanted:
            logging.warning(f"lowpass noise horizon {wanted:.6g} s capped at {horizon:.6g} s by max_steps")
        else:
            logging.info(f"horizon extended to {horizon:.6g} s for lowpass noise")
    W = None
    if sc.comm is not None:
        W = perturb_tf(sc.comm.W, w_spread, np.random.default_rng(seed))
    model = _ChainModel(sc, N, W)
    A, B, C, D = model.matrices()
    fastest = float(np.max(np.abs(np.linalg.eigvals(A)))) if model.size else 0.0
    if fastest > 0 and dt > STEP_FACTOR / fastest:
        raise StepTooLargeError(dt, STEP_FACTOR / fastest)
    t = _samples(dt, horizon)
    d = disturbance_matrix(disturbances, N, dt, horizon)
    n, m = model.size, N + 1
    Phi = rk4_step(A, B, np.eye(n), np.zeros((m, n)), np.zeros((m, n)), dt)
    Gamma0 = rk4_step(A, B, np.zeros((n, m)), np.eye(m), np.zeros((m, m)), dt)
    Gamma1 = rk4_step(A, B, np.zeros((n, m)), np.zeros((m, m)), np.eye(m), dt)
    U = d[:-1] @ Gamma0.T + d[1:] @ Gamma1.T
    outputs = np.empty((len(t), len(model.names)))
    X = np.zeros(n)
    for k in range(len(t)):
        outputs[k] = C @ X
        if k < len(U):
            X = Phi @ X + U[k]
    outputs += d @ D.T
    logging.info(f"simulated N={N} with {n} states over {len(t)} samples")
    return SimTrace(dt, float(t[-1]), t, {name: outputs[:, j] for j, name in enumerate(model.names)}, N)


def trace_l2_norms(trace: SimTrace, t_start: float = 0.0) -> NormSummary:
    """
    Trapezoidal L2 norms from t_start on, with the (L2, l2) sums over errors and disturbances.

    >>> t = np.linspace(0, 4, 401)
    >>> trace = SimTrace(0.01, 4.0, t, {"e_1": np.full(401, 3.0), "e_2": np.full(401, 3.0), "d_0": np.ones(401)}, 2)
    >>> norms = trace_l2_norms(trace)
    >>> round(norms.per_signal["e_1"], 9), round(norms.e_total / norms.per_signal["e_1"], 6), norms.d_total
    (6.0, 1.414214, 2.0)
    """
    window = trace.t >= t_start - 1e-12
    per_signal = {
        name: float(np.sqrt(integrate.trapezoid(series[window] ** 2, trace.t[window])))
        for name, series in trace.signals.items()
    }
    e_total = np.sqrt(sum(per_signal.get(f"e_{i}", 0.0) ** 2 for i in range(1, trace.N + 1)))
    d_total = np.sqrt(sum(per_signal.get(f"d_{i}", 0.0) ** 2 for i in range(trace.N + 1)))
    return NormSummary(per_signal, float(e_total), float(d_total))


def empirical_gain(trace: SimTrace, t_start: float = 0.0) -> float:
    """e_total/d_total, 0 without disturbance energy"""
    norms = trace_l2_norms(trace, t_start)
    return norms.e_total / norms.d_total if norms.d_total > 0 else 0.0


def principal_sine_disturbances(
    sc: ChainScenario, N: int, omega: float, amplitude: float = 1.0
) -> list[DisturbanceSpec]:
    """
    sines at omega on every vehicle along the disturbance direction with the largest gain,
    whose steady state recovers the largest singular value at omega
    """
    _, direction = principal_input(sc, N, omega)
    return [
        DisturbanceSpec("sine", target=i, omega0=omega, amplitude=amplitude * abs(c), phase=float(np.angle(c)))
        for i, c in enumerate(direction)
    ]
