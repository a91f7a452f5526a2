"vehicle chain api"

import logging
import numpy as np
from stringstab.apis.ratfun_api_v1_types import Polynomial, RationalTF
from stringstab.apis.ratfun_api_v1 import is_hurwitz, dc_gain, tf_eval
from stringstab.apis.chain_api_v1_types import (
    ChainScenario,
    CaccComm,
    GeneralComm,
    SensorMounts,
    ScalarLink,
    BlockLink,
    SensorLink,
    LinkMaps,
    ChainFreqMatrix,
    ScenarioError,
    InvalidFilterError,
    InvalidMountError,
    UnstableError,
)

API_VERSION = 1
API_NAME = "CHAIN"

RIGID_GAIN = 1e6
_CANCEL_TOL = 1e-10
_ZERO_TOL = 1e-12

_S2 = Polynomial([0.0, 0.0, 1.0])


def _nonzero_at_origin(tf: RationalTF) -> bool:
    return abs(tf.num.coeffs[0]) > _ZERO_TOL * max(abs(c) for c in tf.num.coeffs)


def _cancel(a: Polynomial, b: Polynomial) -> Polynomial:
    """a - b with rounding noise removed, for numerators that vanish identically in exact arithmetic"""
    scale = max(np.max(np.abs(a.as_array())), np.max(np.abs(b.as_array())))
    diff = (a - b).as_array()
    diff[np.abs(diff) <= _CANCEL_TOL * scale] = 0.0
    return Polynomial(diff)


def _unstable(what: str, strict: bool) -> None:
    if strict:
        raise UnstableError(f"{what} closed loop is not stable")
    logging.warning(f"{what} closed loop is not stable, results describe an unstable chain")


def check_scenario(sc: ChainScenario) -> None:
    """
    Validates the modelling rules of a scenario.

    raises:
        - ScenarioError for negative headway, K(0) = 0, unstable or unbounded filters,
          mixed communication and sensor mounts, or h > 0 with general communication or mounts
        - InvalidFilterError for a CACC filter with B(0) = 0
        - InvalidMountError for mount stiffness with zero DC gain

    >>> from stringstab.apis.ratfun_api_v1 import tf
    >>> check_scenario(ChainScenario(1.0, tf([4, 1])))
    >>> try: check_scenario(ChainScenario(0.0, tf([0, 1])))
    ... except ScenarioError as exc: str(exc)
    'K(0) != 0 is required (no pole cancellation at the origin)'
    """
    if not np.isfinite(sc.h) or sc.h < 0:
        raise ScenarioError(f"headway h must be >= 0, got {sc.h}")
    if not _nonzero_at_origin(sc.K):
        raise ScenarioError("K(0) != 0 is required (no pole cancellation at the origin)")
    if sc.comm is not None and sc.sensors is not None:
        raise ScenarioError("communication and sensor mounts cannot be combined in one scenario")
    if isinstance(sc.comm, GeneralComm) and sc.h > 0:
        raise ScenarioError("general communication is modelled for h = 0 only")
    if sc.sensors is not None and sc.h > 0:
        raise ScenarioError("sensor mounts are modelled for h = 0 only")
    if sc.comm is not None:
        for name, filt in sc.comm._asdict().items():
            if not is_hurwitz(filt.den):
                raise ScenarioError(f"communication filter {name} must be stable")
            if name != "H" and filt.den.degree < filt.num.degree:
                raise ScenarioError(f"communication filter {name} must be proper (bounded on the imaginary axis)")
    if isinstance(sc.comm, CaccComm) and not _nonzero_at_origin(sc.comm.B):
        raise InvalidFilterError("CACC filter needs B(0) != 0")
    if sc.sensors is not None:
        for name, stiffness in sc.sensors._asdict().items():
            if not _nonzero_at_origin(stiffness):
                raise InvalidMountError(f"mount stiffness {name} needs {name}(0) != 0")


def build_headway_link(K: RationalTF, h: float, strict: bool = False) -> ScalarLink:
    """
    Link maps of the headway controller, T = K/Delta, L = 1/Delta with Delta = s^2 + (1 + h s) K.

    params:
        - K: controller
        - h: headway in seconds
        - strict: raise UnstableError instead of warning for an unstable loop

    >>> from stringstab.apis.ratfun_api_v1 import tf
    >>> link = build_headway_link(tf([4, 1]), 1.0)
    >>> [round(c / link.T.den.coeffs[-1] * 2, 12) for c in link.T.den.coeffs]
    [4.0, 5.0, 2.0]
    >>> build_headway_link(tf([4]), 0.0).stable
    False
    """
    nK, dK = K.num, K.den
    hs1 = Polynomial([1.0, h])
    delta = _S2 * dK + hs1 * nK
    link = ScalarLink(
        T=RationalTF(nK, delta),
        L=RationalTF(dK, delta),
        P=RationalTF((_S2 * dK + Polynomial([0.0, h]) * nK) * dK, delta * delta),
        Q=RationalTF(_S2 * dK * dK, delta * delta),
        Lh=RationalTF(hs1 * dK, delta),
        h=h,
        stable=is_hurwitz(delta),
    )
    if not link.stable:
        _unstable("headway", strict)
    return link


def build_cacc_link(
    K: RationalTF, B: RationalTF, H: RationalTF, W: RationalTF, h: float, strict: bool = False
) -> BlockLink:
    """
    Two-state CACC link on z_i = [e_i; v_{i-1} - (1 + h s) v_i].
    The map is singular for every s, its nonzero eigenvalue is the trace
    (K + (HW/B) s^2)/(s^2 + (1 + h s) K).

    raises:
        - InvalidFilterError for B(0) = 0

    >>> from stringstab.apis.ratfun_api_v1 import tf
    >>> link = build_cacc_link(tf([2, 1]), tf([1, 0.5], [1, 0.2]), tf([0.8]), tf([1], [1, 0.1]), 0.5)
    >>> link.det.is_zero()
    True
    >>> round(abs(link.trace.freqresp(0.0)[0]), 12)
    1.0
    """
    if not _nonzero_at_origin(B):
        raise InvalidFilterError("CACC filter needs B(0) != 0")
    nK, dK = K.num, K.den
    nB, dB = B.num, B.den
    nH, dH = H.num, H.den
    nW, dW = W.num, W.den
    hs1 = Polynomial([1.0, h])
    delta = _S2 * dK + hs1 * nK
    den = dH * dW * nB * delta
    n11 = nK * dH * dW * nB
    n12 = nH * nW * dK * nB
    n21 = nK * dB * _S2 * dH * dW
    n22 = nH * nW * dB * _S2 * dK
    link = BlockLink(
        T11=RationalTF(nK, delta),
        T12=RationalTF(nH * nW * dK, dH * dW * delta),
        T21=RationalTF(nK * dB * _S2, nB * delta),
        T22=RationalTF(nH * nW * dB * _S2 * dK, dH * dW * nB * delta),
        inject=(RationalTF(dK, delta), RationalTF(-(hs1 * nK * dB), nB * delta)),
        trace=RationalTF(n11 + n22, den),
        det=RationalTF(_cancel(n11 * n22, n12 * n21), den * den),
        c=RationalTF(hs1),
        kind="cacc",
        stable=is_hurwitz(delta) and is_hurwitz(nB),
    )
    if not link.stable:
        _unstable("CACC", strict)
    return link


def build_general_link(
    K: RationalTF, F: RationalTF, G: RationalTF, H: RationalTF, W: RationalTF, strict: bool = False
) -> BlockLink:
    """
    Two-state link with scalar communication at h = 0 on z_i = [e_i; v_{i-1}]:
    T = [(K - HWF)/(s^2 + K), HW(1 - GW)/(s^2 + K); F, GW], det = (GK - HF) W/(s^2 + K).

    >>> from stringstab.apis.ratfun_api_v1 import tf
    >>> zero = tf([0])
    >>> link = build_general_link(tf([1, 1]), zero, zero, zero, tf([1], [1, 1]))
    >>> link.T21.is_zero(), link.T22.is_zero(), link.det.is_zero()
    (True, True, True)
    """
    nK, dK = K.num, K.den
    nF, dF = F.num, F.den
    nG, dG = G.num, G.den
    nH, dH = H.num, H.den
    nW, dW = W.num, W.den
    delta = _S2 * dK + nK
    den = dH * dW * dF * delta * dG * dW
    n11 = (nK * dH * dW * dF - nH * nW * nF * dK) * dG * dW
    n22 = nG * nW * dH * dW * dF * delta
    link = BlockLink(
        T11=RationalTF(nK * dH * dW * dF - nH * nW * nF * dK, dH * dW * dF * delta),
        T12=RationalTF(nH * nW * (dG * dW - nG * nW) * dK, dH * dW * dG * dW * delta),
        T21=F,
        T22=RationalTF(nG * nW, dG * dW),
        inject=(RationalTF(dK, delta), RationalTF(Polynomial([0.0]))),
        trace=RationalTF(n11 + n22, den),
        det=RationalTF((nG * nK * dH * dF - nH * nF * dG * dK) * nW, dG * dH * dF * dW * delta),
        c=RationalTF(Polynomial([1.0])),
        kind="general",
        stable=is_hurwitz(delta),
    )
    if not link.stable:
        _unstable("general communication", strict)
    return link


def build_sensor_link(K: RationalTF, Kr: RationalTF, Kf: RationalTF, strict: bool = False) -> SensorLink:
    """
    Error propagation with compliant sensor mounts at h = 0,
    A = M_r (1/M_f) T' with T' = M_f K/(s^2 + M_f K).

    raises:
        - InvalidMountError for Kr(0) = 0 or Kf(0) = 0

    >>> from stringstab.apis.ratfun_api_v1 import tf
    >>> link = build_sensor_link(tf([4, 1]), tf([50, 5]), tf([50, 5]))
    >>> link.A == link.Tprime
    True
    >>> round(abs(link.A.freqresp(0.0)[0]), 12)
    1.0
    """
    for name, stiffness in (("Kr", Kr), ("Kf", Kf)):
        if not _nonzero_at_origin(stiffness):
            raise InvalidMountError(f"mount stiffness {name} needs {name}(0) != 0")
    nK, dK = K.num, K.den
    nr, dr = Kr.num, Kr.den
    nf, df = Kf.num, Kf.den
    mr = _S2 * dr + nr
    mf = _S2 * df + nf
    closed = _S2 * mf * dK + nf * nK
    rigid = min(abs(dc_gain(Kr)), abs(dc_gain(Kf))) >= RIGID_GAIN
    if rigid:
        logging.info("sensor mounts are effectively rigid, A approaches K/(s^2 + K)")
    if nr == nf and dr == df:
        a_num, a_den = nf * nK, closed
    else:
        a_num, a_den = nK * nr * mf, mr * closed
    link = SensorLink(
        A=RationalTF(a_num, a_den),
        M_r=RationalTF(nr, mr),
        M_f=RationalTF(nf, mf),
        Tprime=RationalTF(nf * nK, closed),
        inject=RationalTF(mf * dK, closed),
        lead=RationalTF(dK * mf * mr + nK * (nf * dr - nr * df), mr * closed),
        rigid=rigid,
        stable=is_hurwitz(closed) and is_hurwitz(mr) and is_hurwitz(mf) and (nf.degree == 0 or is_hurwitz(nf)),
    )
    if not link.stable:
        _unstable("sensor mount", strict)
    return link


def build_link(sc: ChainScenario, strict: bool = False) -> LinkMaps:
    """validates the scenario and builds the link maps of its kind"""
    check_scenario(sc)
    match sc.comm, sc.sensors:
        case CaccComm(B=B, H=H, W=W), None:
            return build_cacc_link(sc.K, B, H, W, sc.h, strict)
        case GeneralComm(F=F, G=G, H=H, W=W), None:
            return build_general_link(sc.K, F, G, H, W, strict)
        case None, SensorMounts(Kr=Kr, Kf=Kf):
            return build_sensor_link(sc.K, Kr, Kf, strict)
        case _:
            return build_headway_link(sc.K, sc.h, strict)


def closed_loop_stable(sc: ChainScenario) -> bool:
    """stability of every closed-loop map of the scenario"""
    return build_link(sc).stable


def scenario_tfs(sc: ChainScenario) -> dict[str, RationalTF]:
    """every user-supplied transfer function of the scenario by name"""
    tfs = {"K": sc.K}
    if sc.comm is not None:
        tfs.update(sc.comm._asdict())
    if sc.sensors is not None:
        tfs.update(sc.sensors._asdict())
    return tfs


def link_arrays(
    link: LinkMaps, omegas: np.ndarray, nan_poles: bool = False
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """
    Frequency samples of the link recursion z_{i+1} = T z_i + g (d_i - c d_{i+1}), z_1 = lead d_0 - g c d_1.

    returns:
        - T of shape (m, n, n), g and lead of shape (m, n), c of shape (m,), with n = 1 or 2
    """
    omegas = np.atleast_1d(np.asarray(omegas, dtype=float))

    def resp(tf: RationalTF) -> np.ndarray:
        return tf.freqresp(omegas, nan_poles)

    match link:
        case ScalarLink():
            g = resp(link.L)[:, None]
            return resp(link.T)[:, None, None], g, 1.0 + 1j * omegas * link.h, g
        case BlockLink():
            T = np.stack(
                [np.stack([resp(link.T11), resp(link.T12)], -1), np.stack([resp(link.T21), resp(link.T22)], -1)],
                axis=-2,
            )
            g = np.stack([resp(link.inject[0]), resp(link.inject[1])], -1)
            return T, g, resp(link.c), g
        case SensorLink():
            c = np.ones(len(omegas), dtype=complex)
            return resp(link.A)[:, None, None], resp(link.inject)[:, None], c, resp(link.lead)[:, None]
    raise TypeError(f"unknown link type {type(link).__name__}")


def _toeplitz(col0: np.ndarray, f: np.ndarray) -> np.ndarray:
    """G[k, 0] = col0[k], G[k, j] = f[k + 1 - j] below and on the shifted diagonal, else 0"""
    m, N = col0.shape
    G = np.zeros((m, N, N + 1), dtype=complex)
    G[:, :, 0] = col0
    lag = np.arange(N)[:, None] + 1 - np.arange(1, N + 1)[None, :]
    G[:, :, 1:] = np.where(lag >= 0, f[:, np.clip(lag, 0, None)], 0.0)
    return G


def _first_components(T: np.ndarray, v: np.ndarray, N: int) -> np.ndarray:
    """first component of T^n v for n = 0..N-1"""
    out = np.empty((v.shape[0], N), dtype=complex)
    for n in range(N):
        out[:, n] = v[:, 0]
        v = np.einsum("mij,mj->mi", T, v)
    return out


def chain_freq_matrices(link: LinkMaps, N: int, omegas: np.ndarray, nan_poles: bool = False) -> np.ndarray:
    """
    Batched disturbance-to-error matrices of an N-follower chain, shape (m, N, N + 1).
    The headway link uses e = -(1 + h s) L A + L B + Q C with the shift matrix A, the
    leader column B = [1, T, .., T^(N-1)] and the strictly lower Toeplitz C = [T^(i-j-1)];
    the other links use the same Toeplitz structure built from their recursion.
    """
    if N < 1:
        raise ValueError(f"N must be >= 1, got {N}")
    omegas = np.atleast_1d(np.asarray(omegas, dtype=float))
    if isinstance(link, ScalarLink):
        T, L, Q, Lh = (tf.freqresp(omegas, nan_poles) for tf in (link.T, link.L, link.Q, link.Lh))
        with np.errstate(over="ignore", invalid="ignore"):
            powers = np.cumprod(np.concatenate([np.ones((len(omegas), 1)), np.repeat(T[:, None], N - 1, 1)], 1), 1)
            lower = np.concatenate([-Lh[:, None], Q[:, None] * powers[:, : N - 1]], axis=1)
            return _toeplitz(L[:, None] * powers, lower)
    T, g, c, lead = link_arrays(link, omegas, nan_poles)
    with np.errstate(over="ignore", invalid="ignore"):
        y_g = _first_components(T, g, N)
        y_lead = _first_components(T, lead, N)
        f = -c[:, None] * y_g
        f[:, 1:] += y_g[:, :-1]
        return _toeplitz(y_lead, f)


def chain_freq_matrix(sc: ChainScenario, N: int, omega: float) -> ChainFreqMatrix:
    """
    The N x (N+1) map from (d_0..d_N) to (e_1..e_N) at s = j omega.

    raises:
        - NearPoleError when omega hits a closed-loop pole

    >>> from stringstab.apis.ratfun_api_v1 import tf
    >>> G = chain_freq_matrix(ChainScenario(0.0, tf([1, 1])), 1, 0.0).entries
    >>> G.real.round(12).tolist()
    [[1.0, -1.0]]
    """
    link = build_link(sc)
    return ChainFreqMatrix(float(omega), chain_freq_matrices(link, N, np.array([omega]))[0])


def chain_oracle(sc: ChainScenario, N: int, omega: float) -> np.ndarray:
    """
    Direct recursion of the link dynamics with a unit disturbance at each index in turn,
    an independent reference for chain_freq_matrix.
    """
    link = build_link(sc)
    if isinstance(link, ScalarLink):
        T = np.array([[tf_eval(link.T, omega)]])
        g = np.array([tf_eval(link.L, omega)])
        c, lead = 1.0 + 1j * omega * link.h, g
    elif isinstance(link, BlockLink):
        T = np.array([[tf_eval(link.T11, omega), tf_eval(link.T12, omega)],
                      [tf_eval(link.T21, omega), tf_eval(link.T22, omega)]])
        g = np.array([tf_eval(link.inject[0], omega), tf_eval(link.inject[1], omega)])
        c, lead = tf_eval(link.c, omega), g
    else:
        T = np.array([[tf_eval(link.A, omega)]])
        g = np.array([tf_eval(link.inject, omega)])
        c, lead = 1.0, np.array([tf_eval(link.lead, omega)])
    G = np.zeros((N, N + 1), dtype=complex)
    for j in range(N + 1):
        d = np.zeros(N + 1)
        d[j] = 1.0
        z = lead * d[0] - g * c * d[1]
        G[0, j] = z[0]
        for i in range(1, N):
            z = T @ z + g * (d[i] - c * d[i + 1])
            G[i, j] = z[0]
    return G
