"rational transfer function api"

import logging
from typing import Literal
import numpy as np
import numpy.polynomial.polynomial as npp
from stringstab.apis.ratfun_api_v1_types import (
    Polynomial,
    RationalTF,
    RootSet,
    TFProps,
    DegreeError,
    SingularTFError,
    NearPoleError,
    MAX_DEGREE,
    ROOT_EPS,
)

API_VERSION = 1
API_NAME = "RATFUN"

_RESIDUAL_TOL = 1e-9
SHARED_ROOT_TOL = 1e-6

Combine = Literal["add", "sub", "neg", "mul", "div", "scale", "feedback"]


def poly_eval(p: Polynomial, s: complex) -> complex:
    """
    Horner evaluation of p at s

    >>> poly_eval(Polynomial([3, 2, 1]), 1j)
    (2+2j)
    >>> poly_eval(Polynomial([1]), 5 - 1j)
    (1+0j)
    >>> poly_eval(Polynomial([0, 1]), 3 + 4j)
    (3+4j)
    """
    value = 0j
    for coeff in reversed(p.coeffs):
        value = value * s + coeff
    return complex(value)


def poly_roots(p: Polynomial) -> RootSet:
    """
    All complex roots of p with multiplicity, from the eigenvalues of the companion matrix
    of the monic polynomial.

    params:
        - p: polynomial of degree 1..MAX_DEGREE

    returns:
        - RootSet sorted by real then imaginary part

    raises:
        - DegreeError for constant polynomials or degree above MAX_DEGREE

    >>> [round(r.real, 9) for r in poly_roots(Polynomial([-1, 0, 1])).roots]
    [-1.0, 1.0]
    >>> [complex(round(r.real, 4), round(r.imag, 4)) for r in poly_roots(Polynomial([1, 1, 1])).roots]
    [(-0.5-0.866j), (-0.5+0.866j)]
    >>> try: poly_roots(Polynomial([2]))
    ... except DegreeError: "constant"
    'constant'
    """
    if p.degree < 1:
        raise DegreeError("root finding needs degree >= 1")
    if p.degree > MAX_DEGREE:
        raise DegreeError(f"degree {p.degree} above {MAX_DEGREE} is not supported")
    monic = p.as_array() / p.lead
    roots = np.linalg.eigvals(npp.polycompanion(monic)) if p.degree > 1 else np.array([-monic[0]])
    roots = np.where(np.abs(roots.imag) <= 1e-14 * np.maximum(np.abs(roots), 1.0), roots.real + 0j, roots)
    roots = roots[np.lexsort((roots.imag, roots.real))]
    rebuilt = npp.polyfromroots(roots).real
    residual = np.max(np.abs(rebuilt - monic)) / np.max(np.abs(monic))
    if residual > _RESIDUAL_TOL:
        logging.warning(f"root reconstruction residual {residual:.3g} for degree {p.degree}")
    return RootSet(tuple(complex(r) for r in roots), ROOT_EPS)


def is_hurwitz(p: Polynomial, margin: float = ROOT_EPS) -> bool:
    """
    true iff every root of p has real part < -margin

    >>> is_hurwitz(Polynomial([1, 1]))
    True
    >>> is_hurwitz(Polynomial([-1, 1]))
    False
    >>> is_hurwitz(Polynomial([4, 0, 1]))
    False
    >>> is_hurwitz(Polynomial([3]))
    True
    """
    if p.is_zero():
        return False
    if p.degree == 0:
        return True
    return all(r.real < -margin for r in poly_roots(p).roots)


def shared_roots(tf: RationalTF, tol: float = SHARED_ROOT_TOL) -> list[complex]:
    """
    roots of the numerator matching a root of the denominator within tol (relative),
    reported but never cancelled

    >>> shared_roots(RationalTF.from_coeffs([1, 1], [1, 1]))
    [(-1+0j)]
    >>> shared_roots(RationalTF.from_coeffs([4, 1], [0, 0, 1]))
    []
    """
    if tf.num.degree < 1 or tf.den.degree < 1:
        return []
    zeros, poles = poly_roots(tf.num).roots, poly_roots(tf.den).roots
    shared = []
    for zero in zeros:
        if any(abs(zero - pole) <= tol * max(1.0, abs(pole)) for pole in poles):
            shared.append(zero)
    return shared


def tf_combine(op: Combine, a: RationalTF, b: RationalTF | float | None = None) -> RationalTF:
    """
    Exact coefficient arithmetic on transfer functions, without pole-zero cancellation.
    Shared roots in the result are logged.

    params:
        - op: add, sub, neg (no b), mul, div, scale (b a number) or feedback (a/(1 + a*b), b defaults to 1)
        - a, b: operands

    raises:
        - SingularTFError when the resulting denominator vanishes identically

    >>> K = RationalTF.from_coeffs([4, 1])
    >>> tf_combine("feedback", tf_combine("div", K, RationalTF.from_coeffs([0, 0, 1])))
    RationalTF(num=Polynomial(coeffs=(4.0, 1.0)), den=Polynomial(coeffs=(4.0, 1.0, 1.0)))
    >>> tf_combine("mul", RationalTF.from_coeffs([1], [1, 1]), RationalTF.from_coeffs([1, 1])).num.coeffs
    (1.0, 1.0)
    >>> tf_combine("add", RationalTF.from_coeffs([1], [0, 1]), RationalTF.from_coeffs([1], [0, 1]))
    RationalTF(num=Polynomial(coeffs=(2.0,)), den=Polynomial(coeffs=(0.0, 1.0)))
    """
    match op:
        case "add":
            result = a + _operand(b)
        case "sub":
            result = a - _operand(b)
        case "neg":
            result = -a
        case "mul":
            result = a * _operand(b)
        case "div":
            result = a / _operand(b)
        case "scale":
            if not isinstance(b, (int, float)):
                raise TypeError("scale needs a real factor")
            result = a * float(b)
        case "feedback":
            result = a.feedback(1.0 if b is None else b)
        case _:
            raise ValueError(f"unknown operation {op}")
    common = shared_roots(result) if max(result.num.degree, result.den.degree) <= MAX_DEGREE else []
    if common:
        logging.info(f"{op} result keeps shared roots {[complex(round(r.real, 9), round(r.imag, 9)) for r in common]}")
    return result


def _operand(b: RationalTF | float | None) -> RationalTF | float:
    if b is None:
        raise TypeError("binary operation needs a second operand")
    return b


def tf_eval(tf: RationalTF, omega: float) -> complex:
    """
    num(j omega)/den(j omega)

    raises:
        - NearPoleError when |den(j omega)| is below tolerance

    >>> tf_eval(RationalTF.from_coeffs([4, 1], [4, 5, 2]), 0.0)
    (1+0j)
    >>> tf_eval(RationalTF.from_coeffs([1], [0, 0, 1]), 1.0).real
    -1.0
    >>> abs(tf_eval(RationalTF.from_coeffs([1], [1, 1, 1]), 1.0) - (-1j)) < 1e-12
    True
    >>> try: tf_eval(RationalTF.from_coeffs([1], [0, 0, 1]), 0.0)
    ... except NearPoleError as exc: exc.omega
    0.0
    """
    return complex(tf.freqresp(np.array([omega]))[0])


def dc_gain(tf: RationalTF) -> float:
    """
    value at s = 0, as a limit when num and den share roots at the origin,
    +-inf for a pole at the origin

    >>> dc_gain(RationalTF.from_coeffs([1, 2, 1], [0, 1]))
    inf
    >>> dc_gain(RationalTF.from_coeffs([0, 3], [0, 1, 1]))
    3.0
    """
    if tf.num.is_zero():
        return 0.0
    zeros_at_origin = tf.num.origin_order()
    poles_at_origin = tf.den.origin_order()
    if poles_at_origin > zeros_at_origin:
        return float(np.copysign(np.inf, tf.num.coeffs[zeros_at_origin] / tf.den.coeffs[poles_at_origin]))
    if zeros_at_origin > poles_at_origin:
        return 0.0
    return tf.num.coeffs[zeros_at_origin] / tf.den.coeffs[poles_at_origin]


def hf_gain(tf: RationalTF) -> float:
    """
    limit of |tf(j omega)| for omega -> infinity
    >>> hf_gain(RationalTF.from_coeffs([4, 1], [4, 5, 2]))
    0.0
    >>> hf_gain(RationalTF.from_coeffs([1, 3], [2, 1]))
    3.0
    """
    relative_degree = tf.den.degree - tf.num.degree
    if tf.num.is_zero() or relative_degree > 0:
        return 0.0
    if relative_degree < 0:
        return float(np.inf)
    return abs(tf.num.lead / tf.den.lead)


def tf_props(tf: RationalTF) -> TFProps:
    """
    dc gain, relative degree, stability and right half plane zeros

    >>> tf_props(RationalTF.from_coeffs([1, 2, 1], [0, 1])).dc_gain
    inf
    >>> p = tf_props(RationalTF.from_coeffs([4, 1]))
    >>> p.dc_gain, p.relative_degree, p.stable
    (4.0, -1, True)
    >>> R = tf_combine("mul", RationalTF.from_coeffs([1, 2]), RationalTF.from_coeffs([1, -0.1], [0, 0, 1]))
    >>> [round(z.real, 9) for z in tf_props(R).rhp_zeros.roots]
    [10.0]
    """
    rhp = RootSet(poly_roots(tf.num).rhp if tf.num.degree >= 1 else (), ROOT_EPS)
    return TFProps(
        dc_gain=dc_gain(tf),
        relative_degree=tf.den.degree - tf.num.degree,
        stable=is_hurwitz(tf.den),
        rhp_zeros=rhp,
    )


def tf(num: list[float] | tuple[float, ...], den: list[float] | tuple[float, ...] = (1.0,)) -> RationalTF:
    """shorthand for RationalTF.from_coeffs with ascending coefficients"""
    return RationalTF.from_coeffs(num, den)


def lap() -> RationalTF:
    """the Laplace variable s as a transfer function"""
    return RationalTF(Polynomial.s())
