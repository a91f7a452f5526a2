"Datatypes used by ratfun api"

from dataclasses import dataclass
from typing import TYPE_CHECKING, NamedTuple, Sequence
import numpy as np
import numpy.polynomial.polynomial as npp

if TYPE_CHECKING:
    from typing import Self


MAX_DEGREE = 20
ROOT_EPS = 1e-8
POLE_TOL = 1e-12


class NumericError(Exception):
    """Numeric failure during analysis or simulation"""


class ConfigError(Exception):
    """Invalid configuration or scenario"""


class DegreeError(NumericError):
    """Polynomial degree outside the supported range"""


class SingularTFError(NumericError):
    """Rational function with an identically zero denominator"""


class NearPoleError(NumericError):
    """Evaluation too close to a pole"""
    def __init__(self, omega: float) -> None:
        super().__init__(f"evaluation within tolerance of a pole at omega={omega:.6g} rad/s")
        self.omega = omega


@dataclass(frozen=True)
class Polynomial:
    """
    Real polynomial in the Laplace variable s, coefficients in ascending degree.
    Trailing zeros are trimmed, the zero polynomial is (0.0,).

    >>> Polynomial([3, 2, 1, 0, 0])
    Polynomial(coeffs=(3.0, 2.0, 1.0))
    >>> Polynomial([]).is_zero()
    True
    >>> (Polynomial([1, 1]) * Polynomial([-1, 1])).coeffs
    (-1.0, 0.0, 1.0)
    """
    coeffs: tuple[float, ...]

    def __init__(self, coeffs: Sequence[float] | np.ndarray) -> None:
        values = [float(c) for c in np.asarray(coeffs, dtype=float).ravel()]
        if not all(np.isfinite(values)):
            raise ValueError(f"polynomial coefficients must be finite, got {values}")
        while len(values) > 1 and values[-1] == 0.0:
            values.pop()
        object.__setattr__(self, "coeffs", tuple(values) if values else (0.0,))

    @classmethod
    def s(cls) -> "Self":
        """the Laplace variable itself"""
        return cls([0.0, 1.0])

    @property
    def degree(self) -> int:
        """len(coeffs) - 1, zero polynomial has degree 0"""
        return len(self.coeffs) - 1

    @property
    def lead(self) -> float:
        """leading coefficient"""
        return self.coeffs[-1]

    def is_zero(self) -> bool:
        """true for the zero polynomial"""
        return self.coeffs == (0.0,)

    def as_array(self) -> np.ndarray:
        """ascending coefficients as a float array"""
        return np.array(self.coeffs, dtype=float)

    def __call__(self, s: complex | np.ndarray) -> complex | np.ndarray:
        """Horner evaluation, vectorized over s"""
        return npp.polyval(s, self.as_array())

    def __add__(self, other: "Polynomial | float") -> "Polynomial":
        other = _as_polynomial(other)
        return Polynomial(npp.polyadd(self.as_array(), other.as_array()))

    __radd__ = __add__

    def __sub__(self, other: "Polynomial | float") -> "Polynomial":
        other = _as_polynomial(other)
        return Polynomial(npp.polysub(self.as_array(), other.as_array()))

    def __rsub__(self, other: "Polynomial | float") -> "Polynomial":
        return _as_polynomial(other) - self

    def __mul__(self, other: "Polynomial | float") -> "Polynomial":
        other = _as_polynomial(other)
        return Polynomial(npp.polymul(self.as_array(), other.as_array()))

    __rmul__ = __mul__

    def __neg__(self) -> "Polynomial":
        return Polynomial(-self.as_array())

    def __pow__(self, n: int) -> "Polynomial":
        return Polynomial(npp.polypow(self.as_array(), n))

    def mirror(self) -> "Polynomial":
        """p(-s)"""
        signs = np.where(np.arange(len(self.coeffs)) % 2 == 0, 1.0, -1.0)
        return Polynomial(self.as_array() * signs)

    def derivative(self) -> "Polynomial":
        """dp/ds"""
        return Polynomial(npp.polyder(self.as_array()))

    def trim(self, rel_tol: float) -> "Polynomial":
        """
        zeroes coefficients below rel_tol times the largest one,
        used on numerators that should cancel exactly
        >>> Polynomial([1e-18, 2.0, 1e-17]).trim(1e-12).coeffs
        (0.0, 2.0)
        """
        arr = self.as_array()
        scale = np.max(np.abs(arr))
        arr[np.abs(arr) <= rel_tol * scale] = 0.0
        return Polynomial(arr)

    def origin_order(self, rel_tol: float = 0.0) -> int:
        """
        number of roots at s = 0, i.e. leading zero coefficients
        >>> Polynomial([0, 0, 1, 1]).origin_order()
        2
        """
        if self.is_zero():
            return 0
        arr = np.abs(self.as_array())
        scale = np.max(arr)
        count = 0
        while arr[count] <= rel_tol * scale:
            count += 1
        return count

    def power_spectrum(self) -> "Polynomial":
        """
        coefficients in x = omega^2 of |p(j omega)|^2, built from p(s) p(-s)
        >>> Polynomial([1, 1]).power_spectrum().coeffs
        (1.0, 1.0)
        """
        even = (self * self.mirror()).as_array()[::2]
        signs = np.where(np.arange(len(even)) % 2 == 0, 1.0, -1.0)
        return Polynomial(even * signs)


def _as_polynomial(value: "Polynomial | float") -> Polynomial:
    if isinstance(value, Polynomial):
        return value
    return Polynomial([float(value)])


class RootSet(NamedTuple):
    """Roots of a polynomial with their half-plane classification"""
    roots: tuple[complex, ...]
    """All roots, repeated according to multiplicity, sorted by real then imaginary part"""
    eps: float = ROOT_EPS
    """Classification margin for the imaginary axis"""

    @property
    def lhp(self) -> tuple[complex, ...]:
        """roots with real part below -eps"""
        return tuple(r for r in self.roots if r.real < -self.eps)

    @property
    def rhp(self) -> tuple[complex, ...]:
        """roots with real part above eps"""
        return tuple(r for r in self.roots if r.real > self.eps)

    @property
    def boundary(self) -> tuple[complex, ...]:
        """roots within eps of the imaginary axis"""
        return tuple(r for r in self.roots if abs(r.real) <= self.eps)

    def labels(self) -> list[str]:
        """
        LHP / RHP / boundary per root
        >>> RootSet((-1+0j, 0j, 2+0j)).labels()
        ['LHP', 'boundary', 'RHP']
        """
        return ["LHP" if r.real < -self.eps else "RHP" if r.real > self.eps else "boundary" for r in self.roots]

    def multiplicities(self, tol: float = 1e-6) -> list[tuple[complex, int]]:
        """
        groups roots closer than tol into (root, multiplicity) pairs
        >>> RootSet((-1+0j, -1+0j, 3+0j)).multiplicities()
        [((-1+0j), 2), ((3+0j), 1)]
        """
        groups: list[list[complex]] = []
        for root in self.roots:
            for group in groups:
                if abs(group[0] - root) <= tol * max(1.0, abs(root)):
                    group.append(root)
                    break
            else:
                groups.append([root])
        return [(complex(np.mean(group)), len(group)) for group in groups]


class TFProps(NamedTuple):
    """Summary properties of a rational transfer function"""
    dc_gain: float
    """Value at s = 0, +-inf for a pole at the origin (integral action)"""
    relative_degree: int
    """Denominator degree minus numerator degree"""
    stable: bool
    """All poles strictly in the open left half plane"""
    rhp_zeros: RootSet
    """Zeros with positive real part"""


@dataclass(frozen=True)
class RationalTF:
    """
    Real rational function num(s)/den(s), stored with a monic denominator.
    Common roots of num and den are never cancelled.

    >>> RationalTF(Polynomial([4, 1]), Polynomial([4, 5, 2]))
    RationalTF(num=Polynomial(coeffs=(2.0, 0.5)), den=Polynomial(coeffs=(2.0, 2.5, 1.0)))
    >>> try: RationalTF(Polynomial([1]), Polynomial([0]))
    ... except SingularTFError: "singular"
    'singular'
    """
    num: Polynomial
    den: Polynomial

    def __init__(self, num: Polynomial, den: Polynomial | None = None) -> None:
        den = den if den is not None else Polynomial([1.0])
        if den.is_zero():
            raise SingularTFError("denominator is identically zero")
        lead = den.lead
        object.__setattr__(self, "num", Polynomial(num.as_array() / lead))
        object.__setattr__(self, "den", Polynomial(den.as_array() / lead))

    @classmethod
    def from_coeffs(cls, num: Sequence[float], den: Sequence[float] = (1.0,)) -> "Self":
        """
        builds from ascending coefficient lists, rejecting degrees above MAX_DEGREE
        >>> RationalTF.from_coeffs([1, 2, 1], [0, 1]).num.coeffs
        (1.0, 2.0, 1.0)
        """
        tf = cls(Polynomial(num), Polynomial(den))
        if max(tf.num.degree, tf.den.degree) > MAX_DEGREE:
            raise DegreeError(f"degree above {MAX_DEGREE} is not supported")
        return tf

    @classmethod
    def constant(cls, value: float) -> "Self":
        """constant transfer function"""
        return cls(Polynomial([value]))

    def is_zero(self) -> bool:
        """true for the zero function"""
        return self.num.is_zero()

    def __add__(self, other: "RationalTF | float") -> "RationalTF":
        other = _as_tf(other)
        if self.den == other.den:
            return RationalTF(self.num + other.num, self.den)
        return RationalTF(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self) -> "RationalTF":
        return RationalTF(-self.num, self.den)

    def __sub__(self, other: "RationalTF | float") -> "RationalTF":
        return self + (-_as_tf(other))

    def __rsub__(self, other: "RationalTF | float") -> "RationalTF":
        return _as_tf(other) - self

    def __mul__(self, other: "RationalTF | float") -> "RationalTF":
        other = _as_tf(other)
        return RationalTF(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other: "RationalTF | float") -> "RationalTF":
        other = _as_tf(other)
        if other.num.is_zero():
            raise SingularTFError("division by the zero function")
        return RationalTF(self.num * other.den, self.den * other.num)

    def __rtruediv__(self, other: "RationalTF | float") -> "RationalTF":
        return _as_tf(other) / self

    def reciprocal(self) -> "RationalTF":
        """1/tf"""
        return RationalTF.constant(1.0) / self

    def feedback(self, other: "RationalTF | float" = 1.0) -> "RationalTF":
        """
        negative feedback self/(1 + self*other)
        >>> RationalTF.from_coeffs([4, 1], [0, 0, 1]).feedback().den.coeffs
        (4.0, 1.0, 1.0)
        """
        other = _as_tf(other)
        den = self.den * other.den + self.num * other.num
        if den.is_zero():
            raise SingularTFError("feedback loop with 1 + L identically zero")
        return RationalTF(self.num * other.den, den)

    def freqresp(self, omegas: np.ndarray | float, nan_poles: bool = False) -> np.ndarray:
        """
        num(j w)/den(j w) for an array of frequencies.
        Near a pole raises NearPoleError, or yields nan when nan_poles is set.

        >>> RationalTF.from_coeffs([1], [0, 0, 1]).freqresp(np.array([1.0, 2.0])).real
        array([-1.  , -0.25])
        """
        omegas = np.atleast_1d(np.asarray(omegas, dtype=float))
        s = 1j * omegas
        num = npp.polyval(s, self.num.as_array())
        den = npp.polyval(s, self.den.as_array())
        scale = npp.polyval(np.abs(s), np.abs(self.den.as_array()))
        near = np.abs(den) <= POLE_TOL * np.maximum(scale, 1.0)
        if np.any(near):
            if not nan_poles:
                raise NearPoleError(float(omegas[np.argmax(near)]))
            den = np.where(near, np.nan, den)
        return num / den


def _as_tf(value: "RationalTF | float") -> RationalTF:
    if isinstance(value, RationalTF):
        return value
    return RationalTF.constant(float(value))
