import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from kappamech import kappa_core as kc
from kappamech.errors import DomainError

kappas = st.floats(min_value=0.0, max_value=3.0, allow_nan=False)
reals = st.floats(min_value=-6.0, max_value=6.0, allow_nan=False)
positives = st.floats(min_value=1e-3, max_value=50.0, allow_nan=False)


def test_kexp_known_values():
    assert kc.kexp(0.0, 0.7) == 1.0
    assert kc.kexp(1.0, 1.0) == pytest.approx(1 + math.sqrt(2), rel=1e-14)
    assert kc.kexp(0.7, 1e-6) == pytest.approx(math.exp(0.7), rel=1e-10)


def test_klog_known_values():
    assert kc.klog(1.0, 0.3) == 0.0
    assert kc.klog(2.0, 1.0) == pytest.approx(0.75, rel=1e-15)


def test_kadd_against_extended_precision():
    mp.mp.dps = 40
    ref = 3 * mp.sqrt(17) + 4 * mp.sqrt(10)
    assert kc.kadd(3.0, 4.0, 1.0) == pytest.approx(float(ref), rel=1e-15)
    assert kc.kadd(2.5, 0.0, 0.9) == 2.5


def test_deform_against_extended_precision():
    mp.mp.dps = 40
    assert kc.deform(1.0, 1.0) == pytest.approx(float(mp.asinh(1)), rel=1e-15)
    assert kc.deform(0.0, 2.0) == 0.0


@pytest.mark.parametrize("kappa", [0.0, 0.3, 1.0, 2.0])
def test_product_rule_of_klog(kappa):
    lhs = kc.klog(6.0, kappa)
    rhs = kc.kadd(kc.klog(2.0, kappa), kc.klog(3.0, kappa), kappa)
    assert lhs == pytest.approx(rhs, rel=1e-12)


def test_small_kappa_continuity():
    u = np.linspace(-20, 20, 401)
    assert np.all(np.abs(kc.kexp(u, 1e-8) - np.exp(u)) <= 1e-8 * (1 + np.exp(u)))


def test_series_branch_matches_extended_precision():
    mp.mp.dps = 50
    for k, u in [(1e-6, 3.0), (3e-5, -2.0), (1e-9, 0.5)]:
        assert kc.deform(u, k) == pytest.approx(float(mp.asinh(k * u) / k), rel=1e-15)
        assert kc.klog(u * u, k) == pytest.approx(float(mp.sinh(k * mp.log(u * u)) / k), rel=1e-14)


def test_large_argument_does_not_overflow():
    assert np.isfinite(kc.deform(1e300, 10.0))
    assert kc.deform(1e300, 10.0) == pytest.approx(math.log(2e301) / 10.0, rel=1e-14)


def test_klog_rejects_nonpositive():
    with pytest.raises(DomainError):
        kc.klog(0.0, 1.0)
    with pytest.raises(DomainError):
        kc.klog(np.array([1.0, -2.0]), 1.0)


def test_nonfinite_rejected():
    with pytest.raises(DomainError):
        kc.kexp(float("nan"), 1.0)


@settings(max_examples=300, deadline=None)
@given(reals, kappas)
def test_roundtrips(x, k):
    assert kc.klog(kc.kexp(x, k), k) == pytest.approx(x, rel=1e-12, abs=1e-13)
    assert kc.restore(kc.deform(x, k), k) == pytest.approx(x, rel=1e-13, abs=1e-14)


@settings(max_examples=300, deadline=None)
@given(reals, reals, kappas)
def test_group_law(a, b, k):
    assert kc.kexp(kc.kadd(a, b, k), k) == pytest.approx(kc.kexp(a, k) * kc.kexp(b, k), rel=1e-12)
    assert kc.kexp(kc.ksub(a, b, k), k) == pytest.approx(kc.kexp(a, k) / kc.kexp(b, k), rel=1e-12)


@settings(max_examples=300, deadline=None)
@given(reals, positives, kappas)
def test_even_in_kappa(a, u, k):
    assert kc.kexp(a, k) == kc.kexp(a, -k)
    assert kc.klog(u, k) == kc.klog(u, -k)
    assert kc.deform(a, k) == kc.deform(a, -k)
    assert kc.restore(a, k) == kc.restore(a, -k)
    assert kc.kadd(a, u, k) == kc.kadd(a, u, -k)


def _kexp_jet(k):
    def f(u):
        e = kc.kexp(u, k)
        g = math.hypot(1.0, k * u)
        d1 = e / g
        d2 = e / g ** 2 - e * k * k * u / g ** 3
        return e, d1, d2
    return f


@pytest.mark.parametrize("k", [0.5, 1.0])
@pytest.mark.parametrize("u", [-2.0, 0.0, 3.0])
def test_kexp_is_eigenfunction_of_kderiv(u, k):
    f = _kexp_jet(k)
    assert kc.kderiv(f, u, k) == pytest.approx(kc.kexp(u, k), rel=1e-10)
    assert kc.kderiv2(f, u, k) == pytest.approx(kc.kexp(u, k), rel=1e-10)


@pytest.mark.parametrize("k", [0.5, 1.0])
@pytest.mark.parametrize("u", [0.2, 1.0, 7.0])
def test_dual_derivative_of_klog(u, k):
    def f(v):
        return kc.klog(v, k), math.cosh(k * math.log(v)) / v
    assert kc.kderiv_dual(f, u, k) == pytest.approx(1.0 / u, rel=1e-10)


def test_kderiv_of_identity_and_constant():
    ident = lambda u: (u, 1.0, 0.0)  # noqa: E731
    const = lambda u: (4.0, 0.0, 0.0)  # noqa: E731
    assert kc.kderiv(ident, 2.0, 0.5) == pytest.approx(math.sqrt(2.0))
    assert kc.kderiv2(const, 2.0, 0.5) == 0.0


def test_free_particle_has_zero_dual_acceleration():
    k, v0 = 0.8, 1.3

    def x(t):  # ln_k[exp(v0 t)] = sinh(k v0 t)/k and its derivatives
        return (math.sinh(k * v0 * t) / k, v0 * math.cosh(k * v0 * t), k * v0 ** 2 * math.sinh(k * v0 * t))

    for t in (0.0, 0.4, 2.0):
        assert abs(kc.kderiv2_dual(x, t, k)) < 1e-12


@pytest.mark.parametrize("k", [0.3, 1.2])
def test_derivatives_match_finite_differences(k):
    g = lambda u: np.sin(u) + u ** 2  # noqa: E731
    jet = lambda u: (g(u), math.cos(u) + 2 * u, -math.sin(u) + 2)  # noqa: E731
    u, h = 0.7, 1e-5
    fd = (g(u + h) - g(u - h)) / (2 * h)
    assert kc.kderiv(jet, u, k) == pytest.approx(math.hypot(1, k * u) * fd, rel=1e-6)
    assert kc.kderiv_dual(jet, u, k) == pytest.approx(fd / math.hypot(1, k * g(u)), rel=1e-6)


def test_deformed_number_and_parameter():
    p = kc.DeformationParameter(-0.5)
    assert p.magnitude == 0.5
    assert p.scaled(2.0) == 1.0
    d = kc.DeformedNumber.from_plain(1.5, 0.5)
    assert d.restore() == pytest.approx(1.5, rel=1e-15)
    assert kc.kexp(1.0, p) == kc.kexp(1.0, 0.5)


def test_array_kappa_broadcasts():
    k = np.array([0.0, 0.5, 1.0])
    np.testing.assert_allclose(kc.kexp(1.0, k), [kc.kexp(1.0, float(v)) for v in k], rtol=0, atol=0)
