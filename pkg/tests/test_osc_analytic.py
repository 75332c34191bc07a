import math

import mpmath as mp
import numpy as np
import pytest
from scipy.special import lpmv

from kappamech import osc_analytic as oa
from kappamech.classical_sim import wkb_levels
from kappamech.errors import ConfigurationError, DomainError


def _exact_level(nu, n):
    """E_n = W - kappa^2 (nu - n)^2 / 2 in extended precision (w0 = 1)."""
    mp.mp.dps = 30
    nu = mp.mpf(nu)
    k2 = 1 / mp.sqrt(nu * (nu + 1))
    return float(1 / (2 * k2) - k2 * (nu - n) ** 2 / 2)


def test_undeformed_spectrum():
    spec = oa.OscillatorSpec(0.0, 2.0)
    with pytest.raises(DomainError):
        oa.spectrum(spec, -1)
    np.testing.assert_allclose(oa.spectrum(spec, 4), 2.0 * (np.arange(5) + 0.5), rtol=1e-15)


def test_ground_level_at_nu_four():
    spec = oa.OscillatorSpec.from_kappa_a0(20 ** -0.25)
    assert spec.nu == pytest.approx(4.0, rel=1e-13)
    E0 = oa.spectrum(spec, 0)[0]
    assert E0 == pytest.approx(_exact_level(4, 0), rel=1e-12)
    assert E0 == pytest.approx(0.4472139, rel=1e-6)


@pytest.mark.parametrize("nu", [4, 5, 10, 37])
def test_two_level_forms_agree(nu):
    spec = oa.OscillatorSpec.from_nu(nu)
    n = nu - 1
    a, b = oa.spectrum(spec, n), oa.spectrum_from_depth(spec, n)
    np.testing.assert_allclose(a, b, rtol=1e-11)
    np.testing.assert_allclose(a, [_exact_level(nu, j) for j in range(nu)], rtol=1e-11)


def test_depth_offset_equals_well_depth():
    spec = oa.OscillatorSpec.from_nu(5)
    assert spec.epsilon_shift(1.0) == pytest.approx(1.0 - spec.W_kappa, rel=1e-14)


@pytest.mark.parametrize("ka", [0.05, 0.3, 0.6])
def test_wkb_gap_identity(ka):
    spec = oa.OscillatorSpec.from_kappa_a0(ka)
    n = min(3, spec.n_bound - 1)
    E = oa.spectrum(spec, n)
    gap = np.array([oa.wkb_gap(spec, j) for j in range(n + 1)])
    diff = E - wkb_levels(spec.omega0, spec.kappa, n)
    assert np.max(np.abs(diff - gap)) <= 16 * np.finfo(float).eps * np.max(np.abs(E))


def test_unbound_level_errors():
    spec = oa.OscillatorSpec.from_nu(4)
    with pytest.raises(DomainError, match="4 bound states"):
        oa.spectrum(spec, 4)
    with pytest.raises(DomainError):
        oa.moments(spec, 5)


def test_non_integer_nu_is_unsupported_for_states():
    spec = oa.OscillatorSpec.from_nu(4.5)
    with pytest.raises(ConfigurationError):
        oa.eigenfunction(spec, 0, 0.0)


@pytest.mark.parametrize("nu,mu", [(4, 4), (5, 2), (10, 3), (12, 1)])
def test_legendre_matches_scipy(nu, mu):
    u = np.linspace(-0.99, 0.99, 37)
    p, pm1 = oa.associated_legendre(nu, mu, u)
    np.testing.assert_allclose(p, lpmv(mu, nu, u), rtol=1e-11, atol=1e-12)
    if nu - 1 >= mu:
        np.testing.assert_allclose(pm1, lpmv(mu, nu - 1, u), rtol=1e-11, atol=1e-12)


@pytest.mark.parametrize("n", range(5))
def test_node_count(n):
    spec = oa.OscillatorSpec.from_nu(5)
    x = np.linspace(-30, 30, 60001)
    psi = oa.eigenfunction(spec, n, x)
    big = np.abs(psi) > 1e-10 * np.abs(psi).max()
    s = np.sign(psi[big])
    assert int(np.sum(s[1:] != s[:-1])) == n


@pytest.mark.parametrize("n", [0, 1, 2])
def test_hermite_limit(n):
    spec = oa.OscillatorSpec.from_nu(10)
    x = np.linspace(-4, 4, 161)
    h = oa.eigenfunction(oa.OscillatorSpec(0.0), n, x)
    assert np.max(np.abs(oa.eigenfunction(spec, n, x) - h)) <= 3e-2


def test_hermite_deviation_shrinks_with_nu():
    x = np.linspace(-4, 4, 161)
    h = oa.eigenfunction(oa.OscillatorSpec(0.0), 0, x)
    dev = [np.max(np.abs(oa.eigenfunction(oa.OscillatorSpec.from_nu(nu), 0, x) - h)) for nu in (10, 40, 160)]
    assert dev[0] > dev[1] > dev[2]
    assert dev[2] < 3e-3


def test_orthonormality():
    spec = oa.OscillatorSpec.from_nu(5)
    xk = np.linspace(-60, 60, 120001)
    lam = np.array([oa.deformed_eigenfunction(spec, n, xk) for n in range(5)])
    G = np.trapezoid(lam[:, None, :] * lam[None, :, :], xk, axis=-1)
    assert np.max(np.abs(G - np.eye(5))) <= 1e-8


def test_derivative_against_finite_difference():
    spec = oa.OscillatorSpec.from_nu(6)
    x = np.linspace(-5, 5, 21)
    h = 1e-5
    fd = (oa.eigenfunction(spec, 2, x + h) - oa.eigenfunction(spec, 2, x - h)) / (2 * h)
    np.testing.assert_allclose(oa.eigenfunction_derivative(spec, 2, x), fd, rtol=1e-6, atol=1e-9)


def test_ground_moments_against_mpmath():
    spec = oa.OscillatorSpec.from_nu(4)
    mp.mp.dps = 20
    k = mp.mpf(spec.kappa)
    # psi_0 ~ s^(-1/2) (1-u^2)^2 with u = kx/s, i.e. psi_0 ~ s^(-9/2)
    psi = lambda x: (1 + (k * x) ** 2) ** mp.mpf(-2.25)  # noqa: E731
    norm = mp.quad(lambda x: psi(x) ** 2, [-mp.inf, 0, mp.inf])
    x2 = mp.quad(lambda x: x * x * psi(x) ** 2, [-mp.inf, 0, mp.inf]) / norm
    p2 = mp.quad(lambda x: mp.diff(psi, x) ** 2, [-mp.inf, 0, mp.inf]) / norm
    m = oa.moments(spec, 0)
    assert m.mean_x2 == pytest.approx(float(x2), rel=1e-6)
    assert m.mean_p2 == pytest.approx(float(p2), rel=1e-6)


@pytest.mark.parametrize("nu,n", [(4, 0), (4, 2), (5, 1), (10, 6)])
def test_closed_forms_against_quadrature(nu, n):
    spec = oa.OscillatorSpec.from_nu(nu)
    m, q = oa.moments(spec, n), oa.moments_by_quadrature(spec, n)
    assert abs(q.mean_x) < 1e-10
    assert m.mean_x2 == pytest.approx(q.mean_x2, rel=1e-6)
    assert m.mean_p2 == pytest.approx(q.mean_p2, rel=1e-6)


@pytest.mark.parametrize("nu", [4, 7, 25])
def test_two_moment_forms_agree(nu):
    spec = oa.OscillatorSpec.from_nu(nu)
    for n in range(nu - 1):
        a, b = oa.moments(spec, n), oa.moments_alternate(spec, n)
        assert a.mean_x2 == pytest.approx(b.mean_x2, rel=1e-12)
        assert a.mean_p2 == pytest.approx(b.mean_p2, rel=1e-12)


def test_top_level_position_spread_diverges():
    spec = oa.OscillatorSpec.from_nu(4)
    assert math.isinf(oa.moments(spec, 3).mean_x2)
    assert math.isinf(oa.moments_alternate(spec, 3).mean_x2)


@pytest.mark.parametrize("n", [0, 1, 3])
def test_small_deformation_recovers_oscillator_moments(n):
    spec = oa.OscillatorSpec.from_kappa_a0(1e-3)
    m = oa.moments(spec, n)
    assert m.mean_x2 == pytest.approx(n + 0.5, rel=1e-5)
    assert m.mean_p2 == pytest.approx(n + 0.5, rel=1e-5)
    z = oa.energy_split(oa.OscillatorSpec(0.0), n)
    assert z.T_exp == pytest.approx(z.E / 2) and z.V_exp == pytest.approx(z.E / 2)


def test_classical_limit():
    spec = oa.OscillatorSpec.from_nu(200)
    m = oa.moments(spec, 150)
    cm, vs = oa.classical_limit(spec, 150)
    split = oa.energy_split(spec, 150)
    assert m.mean_x2 == pytest.approx(cm.mean_x2, rel=1e-3)
    assert m.mean_p2 == pytest.approx(cm.mean_p2, rel=1e-3)
    assert split.T_exp == pytest.approx(vs.T_bar, rel=1e-3)


@pytest.mark.parametrize("nu,n", [(4, 0), (5, 2), (10, 4)])
def test_energy_split_against_quadrature(nu, n):
    spec = oa.OscillatorSpec.from_nu(nu)
    split = oa.energy_split(spec, n)
    assert split.V_exp == pytest.approx(oa.potential_by_quadrature(spec, n), rel=1e-6)
    assert split.T_exp == pytest.approx(oa.kinetic_by_quadrature(spec, n), rel=1e-6)
    assert split.T_exp + split.V_exp == pytest.approx(split.E, rel=1e-13)


def test_uncertainty_scan_is_even_and_flags_unbound_rows():
    ka = np.array([-0.8, -0.5, -0.1, 0.0, 0.1, 0.5, 0.8])
    rows = oa.uncertainty_scan(ka, [0, 1, 2])
    table = {(r["kappa_a0"], r["n"]): r for r in rows}
    for a in ka[ka > 0]:
        for n in (0, 1, 2):
            l, r = table[(-a, n)], table[(a, n)]
            assert l["flagged"] == r["flagged"]
            if not r["flagged"]:
                assert l["product"] == r["product"]
    assert table[(0.8, 2)]["flagged"] and math.isnan(table[(0.8, 2)]["product"])
    for n in (0, 1, 2):
        assert table[(0.0, n)]["product"] == pytest.approx(n + 0.5, rel=1e-14)


def test_uncertainty_grows_with_deformation_and_respects_bound():
    ka = np.linspace(0.0, 0.7, 15)
    rows = [r for r in oa.uncertainty_scan(ka, [0]) if not r["flagged"]]
    prod = np.array([r["product"] for r in rows])
    assert np.all(np.diff(prod) > 0)
    assert np.all(prod >= 0.5 - 1e-14)
    lo = oa.moments(oa.OscillatorSpec.from_kappa_a0(110 ** -0.25), 0).product_xp
    hi = oa.moments(oa.OscillatorSpec.from_kappa_a0(20 ** -0.25), 0).product_xp
    assert 0.5 < lo < hi
