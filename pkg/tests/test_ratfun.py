import logging
import numpy as np
import pytest
from stringstab.apis import ratfun_api_v1
from stringstab.apis.ratfun_api_v1_types import Polynomial, RationalTF, DegreeError, NearPoleError, SingularTFError
from stringstab.apis.ratfun_api_v1 import (
    poly_roots,
    is_hurwitz,
    tf_combine,
    tf_eval,
    dc_gain,
    hf_gain,
    tf_props,
    shared_roots,
    tf,
    lap,
)


def test_roots_rebuild_the_polynomial():
    rng = np.random.default_rng(7)
    for degree in (1, 3, 6, 12):
        p = Polynomial(rng.uniform(-2, 2, degree + 1))
        rebuilt = np.poly1d(np.poly(poly_roots(p).roots)).coeffs[::-1].real * p.lead
        assert np.allclose(rebuilt, p.coeffs, atol=1e-8 * max(np.abs(p.coeffs)))


def test_roots_reject_large_degree():
    with pytest.raises(DegreeError):
        poly_roots(Polynomial(np.ones(22)))


def test_hurwitz_on_known_polynomials():
    assert is_hurwitz(Polynomial([4, 5, 1]))
    assert not is_hurwitz(Polynomial([1, 0, 1]))
    assert not is_hurwitz(Polynomial([0, 1, 1]))
    assert not is_hurwitz(Polynomial([1, -1, 1]))


def test_feedback_keeps_shared_roots():
    loop = tf([1, 1], [1, 1]) * tf([1], [0, 1])
    closed = tf_combine("feedback", loop)
    assert closed.den.degree == 2
    assert shared_roots(closed)


def test_arithmetic_matches_pointwise_evaluation():
    a, b = tf([1, 2], [3, 1, 1]), tf([2, 0, 1], [1, 1])
    omegas = np.array([0.1, 1.0, 7.0])
    for op, expected in [
        ("add", a.freqresp(omegas) + b.freqresp(omegas)),
        ("sub", a.freqresp(omegas) - b.freqresp(omegas)),
        ("mul", a.freqresp(omegas) * b.freqresp(omegas)),
        ("div", a.freqresp(omegas) / b.freqresp(omegas)),
        ("feedback", a.freqresp(omegas) / (1 + a.freqresp(omegas))),
    ]:
        assert np.allclose(tf_combine(op, a, b if op != "feedback" else None).freqresp(omegas), expected)


def test_division_by_zero_function():
    with pytest.raises(SingularTFError):
        tf([1]) / tf([0])


def test_eval_near_pole():
    with pytest.raises(NearPoleError) as info:
        tf_eval(tf([1], [1, 0, 1]), 1.0)
    assert info.value.omega == 1.0
    values = tf([1], [1, 0, 1]).freqresp(np.array([0.5, 1.0]), nan_poles=True)
    assert np.isfinite(values[0]) and np.isnan(values[1])


def test_gains_and_props():
    K = tf([4, 1])
    T = K / (lap() * lap() + K)
    assert dc_gain(T) == pytest.approx(1.0)
    assert hf_gain(T) == 0.0
    assert dc_gain(tf([1], [0, 1])) == np.inf
    props = tf_props(tf([1, -0.1], [1, 1]))
    assert props.stable and props.relative_degree == 0
    assert [round(z.real, 9) for z in props.rhp_zeros.roots] == [10.0]


def test_monic_denominator():
    R = RationalTF(Polynomial([2, 4]), Polynomial([2, 2]))
    assert R.den.lead == 1.0
    assert R.num.coeffs == (1.0, 2.0)


def test_inaccurate_roots_are_reported(monkeypatch, caplog):
    monkeypatch.setattr(ratfun_api_v1, "_RESIDUAL_TOL", -1.0)
    with caplog.at_level(logging.INFO):
        poly_roots(Polynomial([6, 11, 6, 1]))
    assert any(
        record.levelno == logging.WARNING and "root reconstruction residual" in record.getMessage()
        for record in caplog.records
    )
