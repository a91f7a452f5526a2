"string stability analysis api"

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Callable
import numpy as np
from scipy import integrate
from stringstab.transforms.functions import batch_it, log_decades
from stringstab.apis.ratfun_api_v1_types import Polynomial, RationalTF, RootSet, ROOT_EPS
from stringstab.apis.ratfun_api_v1 import poly_roots, is_hurwitz, shared_roots, dc_gain, hf_gain, tf_eval
from stringstab.apis.chain_api_v1_types import (
    ChainScenario,
    CaccComm,
    GeneralComm,
    ScalarLink,
    BlockLink,
    SensorLink,
    LinkMaps,
)
from stringstab.apis.chain_api_v1 import build_link, chain_freq_matrices, chain_freq_matrix, scenario_tfs
from stringstab.apis.analysis_api_v1_types import (
    FrequencyGrid,
    HInfPeak,
    BodeIntegralReport,
    HeadwayResult,
    NGain,
    GainReport,
    GrowthClass,
    PreconditionError,
    UnstableError,
)

API_VERSION = 1
API_NAME = "ANALYSIS"

ZOOM_POINTS = 9
ZOOM_PEAKS = 3
POWER_ITERATIONS = 200
POWER_TOL = 1e-12
LOW_FREQUENCY_EPS = 1e-3
BODE_SERIES_OMEGA = 1e-3
AUDIT_TOL = 1e-6
# complex entries per frequency batch of chain matrices
_BATCH_ENTRIES = 2**22


def refine_sup(fun: Callable[[np.ndarray], np.ndarray], grid: FrequencyGrid) -> tuple[float, float]:
    """
    Sup of a vectorized real function over the grid, zooming into the largest local maxima
    with ZOOM_POINTS log-spaced points per pass. nan samples are ignored.

    returns:
        - (sup, argmax), (nan, nan) when every sample is nan

    >>> peak, w = refine_sup(lambda w: -(np.log10(w) - 0.3) ** 2, FrequencyGrid(1e-2, 1e2, 8, 4))
    >>> round(w, 2), peak > -1e-4
    (2.0, True)
    """
    omegas = grid.omegas()
    values = np.asarray(fun(omegas), dtype=float)
    for _ in range(grid.refinement_depth):
        if np.all(np.isnan(values)):
            break
        filled = np.where(np.isnan(values), -np.inf, values)
        padded = np.concatenate([[-np.inf], filled, [-np.inf]])
        local = np.flatnonzero((filled >= padded[:-2]) & (filled >= padded[2:]) & np.isfinite(filled))
        if len(local) == 0:
            local = np.array([int(np.argmax(filled))])
        best = local[np.argsort(filled[local])[::-1][:ZOOM_PEAKS]]
        zoom = np.concatenate([
            np.logspace(
                np.log10(omegas[max(i - 1, 0)]), np.log10(omegas[min(i + 1, len(omegas) - 1)]), ZOOM_POINTS
            )
            for i in best
        ])
        omegas = np.concatenate([omegas, zoom])
        values = np.concatenate([values, np.asarray(fun(zoom), dtype=float)])
        omegas, index = np.unique(omegas, return_index=True)
        values = values[index]
    if np.all(np.isnan(values)):
        return float("nan"), float("nan")
    i = int(np.nanargmax(values))
    return float(values[i]), float(omegas[i])


def hinf(tf: RationalTF, grid: FrequencyGrid = FrequencyGrid()) -> HInfPeak:
    """
    H-infinity norm estimate over the refined grid, including the DC and
    high frequency limits.

    raises:
        - NearPoleError with the offending frequency

    >>> from stringstab.apis.ratfun_api_v1 import tf
    >>> hinf(tf([4, 1], [4, 5, 2]))
    HInfPeak(peak=1.0, omega_star=0.0)
    >>> hinf(tf([0.5]))
    HInfPeak(peak=0.5, omega_star=0.0)
    >>> hinf(tf([1, 1], [1, 1, 1])).peak > 1
    True
    """
    peak, omega_star = refine_sup(lambda w: np.abs(tf.freqresp(w)), grid)
    low, high = abs(dc_gain(tf)), hf_gain(tf)
    if low >= peak:
        peak, omega_star = low, 0.0
    if high > peak:
        peak, omega_star = high, float("inf")
    return HInfPeak(float(peak), float(omega_star))


def bode_csi_check(R: RationalTF) -> BodeIntegralReport:
    """
    Evaluates the integral of ln|T(j w)|/w^2 over (0, inf) for T = R/(1 + R) and compares it with
    pi times the sum of 1/q over the right half plane zeros q of R.
    ln|T| comes from the power spectra |num|^2 and |den|^2 in x = w^2, which keeps the integrand
    accurate near w = 0 where it is replaced by its second order series. Beyond the last decade the
    tail is integrated in closed form from the high frequency asymptote.

    params:
        - R: loop with at least a double pole at s = 0

    raises:
        - PreconditionError when R lacks the double pole at the origin
        - UnstableError when T is not stable

    >>> from stringstab.apis.ratfun_api_v1 import tf
    >>> report = bode_csi_check(tf([1, 2], [0, 0, 1]))
    >>> abs(report.integral_value) < 1e-3, report.rhp_zero_sum
    (True, 0.0)
    """
    if R.den.origin_order() - R.num.origin_order() < 2:
        raise PreconditionError("loop needs a double pole at s = 0")
    T = R.feedback()
    if not is_hurwitz(T.den):
        raise UnstableError("closed loop R/(1 + R) is not stable")
    num_ps, den_ps = T.num.power_spectrum(), T.den.power_spectrum()
    excess = (num_ps - den_ps).as_array()
    excess[0] = 0.0
    excess_ps = Polynomial(excess)

    def log_gain(omega: float) -> float:
        x = omega * omega
        return 0.5 * float(np.log1p(excess_ps(x) / den_ps(x)))

    low = 0.5 * excess_ps.coeffs[1] / den_ps.coeffs[0] * BODE_SERIES_OMEGA if excess_ps.degree >= 1 else 0.0
    poles_zeros = [abs(r) for p in (T.num, T.den) if p.degree >= 1 for r in poly_roots(p).roots]
    upper = 1e3 * max([1.0] + poles_zeros)
    middle = 0.0
    for lo, hi in log_decades(BODE_SERIES_OMEGA, upper):
        value, _ = integrate.quad(lambda u: log_gain(np.exp(u)) * np.exp(-u), np.log(lo), np.log(hi), limit=200)
        middle += value
    relative_degree = T.den.degree - T.num.degree
    c_inf = abs(T.num.lead / T.den.lead)
    tail = np.log(c_inf) / upper - relative_degree * (np.log(upper) + 1.0) / upper
    integral_value = float(low + middle + tail)
    rhp = poly_roots(R.num).rhp if R.num.degree >= 1 else ()
    zero_sum = float(np.pi * sum((1.0 / q).real for q in rhp))
    logging.debug(f"bode integral {integral_value:.6g} against zero sum {zero_sum:.6g}")
    return BodeIntegralReport(integral_value, zero_sum, integral_value - zero_sum, RootSet(tuple(rhp), ROOT_EPS))


def headway_min_a(Kbar: RationalTF, grid: FrequencyGrid = FrequencyGrid()) -> HeadwayResult:
    """
    Minimum headway from the loop Rbar = Kbar/s^2, the sup over w of
    sqrt(max(0, (|Tbar(j w)|^2 - 1)/w^2)) with Tbar = Rbar/(1 + Rbar), its w -> 0 limit included.

    raises:
        - UnstableError when Tbar is not stable

    >>> from stringstab.apis.ratfun_api_v1 import tf
    >>> result = headway_min_a(tf([1, 2]))
    >>> round(result.h_min, 6), result.argmax_omega, result.method
    (1.414214, 0.0, 'criterion_a')
    """
    Tbar = (Kbar / RationalTF(Polynomial([0.0, 0.0, 1.0]))).feedback()
    if not is_hurwitz(Tbar.den):
        raise UnstableError("closed loop with Kbar/s^2 is not stable")
    num_ps, den_ps = Tbar.num.power_spectrum(), Tbar.den.power_spectrum()
    excess = (num_ps - den_ps).as_array()
    # |Tbar(0)| = 1, so the excess vanishes at x = 0 and divides by x exactly
    slope = Polynomial(excess[1:]) if len(excess) > 1 else Polynomial([0.0])

    def bound(omega: np.ndarray) -> np.ndarray:
        x = omega * omega
        return np.sqrt(np.maximum(0.0, slope(x) / den_ps(x)))

    h_min, omega_star = refine_sup(bound, grid)
    dc_value = float(np.sqrt(max(0.0, slope.coeffs[0] / den_ps.coeffs[0])))
    if dc_value >= h_min:
        h_min, omega_star = dc_value, 0.0
    return HeadwayResult(float(h_min), float(omega_star), "criterion_a")


def headway_min_b(K: RationalTF, grid: FrequencyGrid = FrequencyGrid()) -> HeadwayResult:
    """
    Minimum headway directly from K, the sup over admissible w of
    sqrt(K_R (2 - w^2 K_R)) + w K_J with 1/K(j w) = K_R + j K_J.
    A PD controller b s + a with a > 2 b^2 takes the closed form sqrt(2/a).

    raises:
        - NearPoleError when K has a zero on the sampled axis

    >>> from stringstab.apis.ratfun_api_v1 import tf
    >>> headway_min_b(tf([4, 1]))
    HeadwayResult(h_min=0.7071067811865476, argmax_omega=0.0, method='pd_shortcut')
    >>> result = headway_min_b(tf([1, 1]))
    >>> round(result.h_min, 6), result.method
    (1.414214, 'criterion_b')
    """
    if K.den.degree == 0 and K.num.degree <= 1:
        a = K.num.coeffs[0] / K.den.coeffs[0]
        b = K.num.coeffs[1] / K.den.coeffs[0] if K.num.degree == 1 else 0.0
        if a > 2 * b * b:
            return HeadwayResult(float(np.sqrt(2.0 / a)), 0.0, "pd_shortcut")
    inverse = RationalTF(K.den, K.num)

    def bound(omega: np.ndarray) -> np.ndarray:
        k_inv = inverse.freqresp(omega)
        k_r, k_j = k_inv.real, k_inv.imag
        radicand = k_r * (2.0 - omega * omega * k_r)
        return np.where(radicand > 0, np.sqrt(np.maximum(radicand, 0.0)) + omega * k_j, np.nan)

    h_min, omega_star = refine_sup(bound, grid)
    k0 = dc_gain(K)
    dc_value = 0.0 if np.isinf(k0) or k0 <= 0 else float(np.sqrt(2.0 / k0))
    if np.isnan(h_min) or dc_value >= h_min:
        h_min, omega_star = dc_value, 0.0
    return HeadwayResult(max(0.0, float(h_min)), float(omega_star), "criterion_b")


def headway_min(
    K: RationalTF | None = None, Kbar: RationalTF | None = None, grid: FrequencyGrid = FrequencyGrid()
) -> list[HeadwayResult]:
    """every applicable criterion, K through criterion b (or the PD closed form), Kbar through criterion a"""
    if K is None and Kbar is None:
        raise ValueError("headway needs K or Kbar")
    results = []
    if K is not None:
        results.append(headway_min_b(K, grid))
    if Kbar is not None:
        results.append(headway_min_a(Kbar, grid))
    return results


def largest_singular_values(G: np.ndarray) -> np.ndarray:
    """
    Largest singular value of each matrix in a batch of shape (m, N, N + 1).
    N = 1 takes the row norm and N = 2 the closed form eigenvalue of G G*. Larger N use power
    iteration on G* G from the all-ones vector, falling back to the SVD where it does not converge.
    Matrices with nan entries give nan, overflowed ones inf.

    >>> G = np.array([[[3.0, 0.0, 0.0], [0.0, 4.0, 0.0]]], dtype=complex)
    >>> largest_singular_values(G).tolist()
    [4.0]
    >>> G = np.array([[[1, 0, 0, 0], [0, 2, 0, 0], [0, 0, 1, 0.5]]], dtype=complex)
    >>> round(float(largest_singular_values(G)[0]), 12)
    2.0
    """
    m, N, _ = G.shape
    bad = ~np.all(np.isfinite(G), axis=(1, 2))
    has_nan = np.any(np.isnan(G), axis=(1, 2))
    G = np.where(np.isfinite(G), G, 0.0)
    if N == 1:
        sigma = np.linalg.norm(G[:, 0, :], axis=1)
    elif N == 2:
        M = np.einsum("mik,mjk->mij", G, G.conj())
        a, d, b = M[:, 0, 0].real, M[:, 1, 1].real, M[:, 0, 1]
        sigma = np.sqrt((a + d) / 2 + np.sqrt(((a - d) / 2) ** 2 + np.abs(b) ** 2))
    else:
        sigma = _power_iteration(G)
    sigma = np.where(bad, np.inf, sigma)
    return np.where(has_nan, np.nan, sigma)


def _power_iteration(G: np.ndarray) -> np.ndarray:
    m, _, n = G.shape
    x = np.ones((m, n), dtype=complex) / np.sqrt(n)
    estimate = np.zeros(m)
    converged = np.zeros(m, dtype=bool)
    for _ in range(POWER_ITERATIONS):
        w = np.einsum("mji,mj->mi", G.conj(), np.einsum("mij,mj->mi", G, x))
        updated = np.linalg.norm(w, axis=1)
        converged = np.abs(updated - estimate) <= POWER_TOL * updated
        estimate = updated
        x = w / np.where(updated > 0, updated, 1.0)[:, None]
        if np.all(converged):
            break
    sigma = np.sqrt(estimate)
    for i in np.flatnonzero(~converged):
        sigma[i] = np.linalg.norm(G[i], 2)
    return sigma


def _gain_samples(link: LinkMaps, N: int, omegas: np.ndarray, entrywise: bool) -> np.ndarray:
    """largest singular value, or largest entry modulus, of the chain matrix per frequency"""
    chunk = max(1, _BATCH_ENTRIES // (N * (N + 1)))
    parts = []
    for batch in batch_it(omegas, chunk):
        G = chain_freq_matrices(link, N, np.array(batch), nan_poles=True)
        if entrywise:
            with np.errstate(invalid="ignore"):
                nan_rows = np.any(np.isnan(G), axis=(1, 2))
                parts.append(np.where(nan_rows, np.nan, np.max(np.abs(np.nan_to_num(G, nan=0.0)), axis=(1, 2))))
        else:
            parts.append(largest_singular_values(G))
    values = np.concatenate(parts)
    skipped = int(np.sum(np.isnan(values)))
    if skipped:
        logging.warning(f"skipped {skipped} frequencies within tolerance of a closed-loop pole")
    return values


def _def2_scalar(link: ScalarLink, N: int, omegas: np.ndarray) -> np.ndarray:
    """largest entry of the headway chain matrix, max(|L| |T|^k, |(1 + h s) L|, |Q| |T|^k) over the band"""
    T, L, Q, Lh = (np.abs(tf.freqresp(omegas, nan_poles=True)) for tf in (link.T, link.L, link.Q, link.Lh))
    with np.errstate(over="ignore"):
        growth = np.maximum(1.0, T)
        lower = Q * growth ** max(N - 2, 0) if N >= 2 else np.zeros_like(Q)
        return np.maximum(np.maximum(L * growth ** (N - 1), Lh), lower)


def _chain_peak(sc: ChainScenario, N: int, grid: FrequencyGrid, entrywise: bool) -> tuple[float, float]:
    if N < 1:
        raise ValueError(f"N must be >= 1, got {N}")
    link = build_link(sc)
    if not link.stable:
        logging.warning(f"closed loop is unstable, gain for N={N} reported as inf")
        return float("inf"), float("nan")
    if entrywise and isinstance(link, ScalarLink):
        return refine_sup(lambda w: _def2_scalar(link, N, w), grid)
    return refine_sup(lambda w: _gain_samples(link, N, w, entrywise), grid)


def def1_gain(sc: ChainScenario, N: int, grid: FrequencyGrid = FrequencyGrid()) -> float:
    """
    All-vehicle string stability gain: sup over the grid of the largest singular value of the
    N x (N+1) disturbance to error matrix. inf for an unstable loop.

    >>> from stringstab.apis.ratfun_api_v1 import tf
    >>> round(def1_gain(ChainScenario(0.0, tf([1, 1])), 1), 4)
    1.633
    """
    return _chain_peak(sc, N, grid, entrywise=False)[0]


def def2_gain(sc: ChainScenario, N: int, grid: FrequencyGrid = FrequencyGrid()) -> float:
    """
    Single-disturbance string stability gain: sup over the grid and every matrix entry of |G_ki(j w)|.

    >>> from stringstab.apis.ratfun_api_v1 import tf
    >>> def2_gain(ChainScenario(1.0, tf([4, 1])), 32) <= def1_gain(ChainScenario(1.0, tf([4, 1])), 32)
    True
    """
    return _chain_peak(sc, N, grid, entrywise=True)[0]


def low_frequency_gain(sc: ChainScenario, N: int, eps: float = LOW_FREQUENCY_EPS) -> float:
    """
    def1 gain restricted to w in (0, eps], the response to disturbances concentrated at low frequencies

    >>> from stringstab.apis.ratfun_api_v1 import tf
    >>> round(low_frequency_gain(ChainScenario(1.0, tf([4, 1])), 16) / 4, 2)
    0.26
    """
    return def1_gain(sc, N, FrequencyGrid(eps * 1e-4, eps, 64, 3))


def principal_input(sc: ChainScenario, N: int, omega: float) -> tuple[float, np.ndarray]:
    """
    largest singular value at omega and the unit disturbance direction (d_0..d_N) attaining it
    >>> from stringstab.apis.ratfun_api_v1 import tf
    >>> sigma, direction = principal_input(ChainScenario(0.0, tf([1, 1])), 1, 0.0)
    >>> round(sigma, 6), np.abs(direction).round(6).tolist()
    (1.414214, [0.707107, 0.707107])
    """
    G = chain_freq_matrix(sc, N, omega).entries
    _, sigma, vh = np.linalg.svd(G)
    return float(sigma[0]), vh[0].conj()


def thm2_bound(sc: ChainScenario, N: int, omega: float) -> float:
    """
    Triangle inequality bound on the largest singular value of the headway chain matrix,
    |(1 + h s) L| + |L| ||B|| + |Q| ||C||, where ||B||^2 sums |T|^(2k) over k < N and
    ||C||^2 is bounded by the smaller of the Gershgorin row sum bound of |C|^T |C| and the
    squared Frobenius norm.

    raises:
        - PreconditionError for a non-headway link or |T(j omega)| > 1

    >>> from stringstab.apis.ratfun_api_v1 import tf
    >>> round(thm2_bound(ChainScenario(0.0, tf([1, 1])), 1, 0.0), 12)
    2.0
    """
    link = build_link(sc)
    if not isinstance(link, ScalarLink):
        raise PreconditionError("the triangle inequality bound applies to the headway link only")
    t = abs(tf_eval(link.T, omega))
    if t > 1 + 1e-12:
        raise PreconditionError(f"|T(j omega)| = {t:.6g} > 1 at omega={omega:.6g}")
    t = min(t, 1.0)
    b_norm = float(np.sqrt(np.sum(t ** (2 * np.arange(N)))))
    lag = np.arange(N)[:, None] - np.arange(N)[None, :]
    c_abs = np.where(lag >= 1, t ** np.clip(lag - 1, 0, None), 0.0)
    gershgorin = float(np.max((c_abs.T @ c_abs).sum(axis=1)))
    frobenius = float(np.sum(c_abs**2))
    L, Q, Lh = (abs(tf_eval(tf, omega)) for tf in (link.L, link.Q, link.Lh))
    return Lh + L * b_norm + Q * float(np.sqrt(min(gershgorin, frobenius)))


def jury2_check(trace: complex | np.ndarray, det: complex | np.ndarray) -> bool | np.ndarray:
    """
    Unit disk test for the eigenvalues of a 2x2 map,
    |det| <= 1 and |trace - det conj(trace)| <= 1 - |det|^2. Vectorized over arrays.

    >>> jury2_check(0.5, 0.0), jury2_check(1.2, 0.0), jury2_check(0.0, 1.5)
    (True, False, False)
    >>> jury2_check(np.array([0.5, 1.2]), np.zeros(2)).tolist()
    [True, False]
    """
    ok = jury2_margin(trace, det) <= 1e-12
    return bool(ok) if np.ndim(ok) == 0 else ok


def jury2_margin(trace: complex | np.ndarray, det: complex | np.ndarray) -> float | np.ndarray:
    """
    largest violation of the two unit disk conditions, positive when the test fails
    >>> round(jury2_margin(1.2, 0.0), 12)
    0.2
    """
    trace, det = np.asarray(trace, dtype=complex), np.asarray(det, dtype=complex)
    size = np.abs(det)
    margin = np.maximum(size - 1.0, np.abs(trace - det * np.conj(trace)) - (1.0 - size**2))
    return float(margin) if margin.ndim == 0 else margin


def trace_peak(link: BlockLink, grid: FrequencyGrid = FrequencyGrid()) -> HInfPeak:
    """largest |trace T(j w)| of a two-state link, the growth rate of its nonzero eigenmode"""
    return hinf(link.trace, grid)


def mount_gain_extrema(link: SensorLink, grid: FrequencyGrid = FrequencyGrid()) -> tuple[float, float]:
    """
    (inf, sup) of |A(j w)| over the refined grid
    >>> from stringstab.apis.ratfun_api_v1 import tf
    >>> from stringstab.apis.chain_api_v1 import build_sensor_link
    >>> low, high = mount_gain_extrema(build_sensor_link(tf([2, 3]), tf([20, 2]), tf([30, 3])))
    >>> low < 1 <= high
    True
    """
    neg_low, _ = refine_sup(lambda w: -np.abs(link.A.freqresp(w, nan_poles=True)), grid)
    return -neg_low, hinf(link.A, grid).peak


def _growth(per_n: dict[int, NGain]) -> tuple[GrowthClass, float]:
    Ns = sorted(per_n)
    last = per_n[Ns[-1]].def1_gain
    if len(Ns) < 2:
        return "other", last
    small, large = Ns[-2], Ns[-1]
    with np.errstate(invalid="ignore", divide="ignore"):
        ratio = last / per_n[small].def1_gain
    if 0.95 <= ratio <= 1.05:
        return "bounded", max(gain.def1_gain for gain in per_n.values())
    expected = np.sqrt(large / small)
    if 0.9 * expected <= ratio <= 1.1 * expected:
        return "sqrtN", last / np.sqrt(large)
    return "other", last


def gain_vs_n_sweep(
    sc: ChainScenario, Ns: list[int], grid: FrequencyGrid = FrequencyGrid(), workers: int | None = None
) -> GainReport:
    """
    def1 and def2 gains for every chain length, computed concurrently,
    and the growth class of the last pair of lengths.

    raises:
        - ValueError when Ns is empty or not ascending
    """
    if not Ns or any(b <= a for a, b in zip(Ns, Ns[1:])):
        raise ValueError(f"Ns must be non-empty and strictly ascending, got {Ns}")
    stable = build_link(sc).stable

    def measure(N: int) -> NGain:
        gain, omega = _chain_peak(sc, N, grid, entrywise=False)
        logging.info(f"N={N}: def1 gain {gain:.6g} at omega={omega:.6g}")
        return NGain(gain, def2_gain(sc, N, grid), omega)

    with ThreadPoolExecutor(max_workers=workers) as executor:
        per_n = dict(zip(Ns, executor.map(measure, Ns)))
    growth_class, c_estimate = _growth(per_n)
    return GainReport(per_n, growth_class, float(c_estimate), stable)


def cancellation_audit(sc: ChainScenario, grid: FrequencyGrid = FrequencyGrid(), tol: float = AUDIT_TOL) -> list[str]:
    """
    Warnings for the perfect cancellations the modelling rules forbid:
    HW(0) = B(0) for CACC, GW = 1 on the grid for general communication,
    and numerator/denominator roots shared within tol in any transfer function.

    >>> from stringstab.apis.ratfun_api_v1 import tf
    >>> cancellation_audit(ChainScenario(0.0, tf([4, 1])))
    []
    >>> B = tf([1, 0.5], [1, 0.2])
    >>> cancellation_audit(ChainScenario(0.0, tf([4, 1]), CaccComm(B, B, tf([1]))))
    ['HW(0) = B(0) within 1e-06']
    """
    warnings = []
    match sc.comm:
        case CaccComm(B=B, H=H, W=W):
            h0, w0, b0 = dc_gain(H), dc_gain(W), dc_gain(B)
            if all(np.isfinite([h0, w0, b0])) and abs(h0 * w0 - b0) < tol:
                warnings.append(f"HW(0) = B(0) within {tol}")
        case GeneralComm(G=G, W=W):
            gw = G.freqresp(grid.omegas(), nan_poles=True) * W.freqresp(grid.omegas(), nan_poles=True)
            if np.nanmax(np.abs(gw - 1.0)) < tol:
                warnings.append(f"GW = 1 on the grid within {tol}")
    for name, tf in scenario_tfs(sc).items():
        common = shared_roots(tf, tol)
        if common:
            warnings.append(f"{name} has numerator and denominator roots in common: {[complex(r) for r in common]}")
    for warning in warnings:
        logging.warning(f"cancellation audit: {warning}")
    return warnings
