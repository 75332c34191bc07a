import math

import numpy as np
import pytest
from scipy.integrate import quad

from kappamech.classical_sim import (
    classical_density,
    classical_moments,
    free_particle_position,
    integrate,
    oscillator_orbit_params,
    time_average_moments,
    virial_split,
    wkb_action,
    wkb_levels,
)
from kappamech.errors import ConfigurationError, DomainError
from kappamech.pdm_model import Free, InfiniteWell, MassProfile, MLOscillator, PhaseState


def test_free_particle_follows_kappa_logarithm_of_exponential():
    v0, k = 1.5, 0.4
    T = 5.0 / (v0 * k)
    tr = integrate(MassProfile(k), Free(), PhaseState(0.0, v0), T / 4000, T)
    ref = np.array([math.sinh(k * v0 * t) / k for t in tr.t])  # ln_k[exp(v0 t)]
    np.testing.assert_allclose(tr.x[1:], ref[1:], rtol=1e-8)
    np.testing.assert_allclose(free_particle_position(tr.t, v0, k), ref, rtol=1e-13)


def test_oscillator_orbit_matches_closed_form():
    orbit = oscillator_orbit_params(1.0, 1.0, A0=0.5)
    P = 2 * math.pi / orbit.Omega_kappa
    tr = integrate(MassProfile(1.0), MLOscillator(), PhaseState(orbit.A_kappa, 0.0), P / 1000, 10 * P)
    ref = orbit.A_kappa * np.cos(orbit.Omega_kappa * tr.t)
    assert np.max(np.abs(tr.x - ref)) <= 1e-6 * orbit.A_kappa
    assert tr.energy_drift <= 1e-8


def test_undeformed_oscillator():
    tr = integrate(MassProfile(0.0), MLOscillator(), PhaseState(0.8, 0.0), 2 * math.pi / 1000, 4 * math.pi)
    assert np.max(np.abs(tr.x - 0.8 * np.cos(tr.t))) <= 1e-8 * 0.8


def test_orbit_parameters():
    o = oscillator_orbit_params(1.0, 0.0, A0=2.0)
    assert (o.A_kappa, o.Omega_kappa, o.bounded) == (2.0, 1.0, True)
    o = oscillator_orbit_params(1.0, 1.0, A0=0.5)
    assert o.A_kappa == pytest.approx(0.5 / math.sqrt(0.75))
    assert o.Omega_kappa == pytest.approx(math.sqrt(0.75))
    assert oscillator_orbit_params(1.0, 1.0, A0=1.1).regime == "unbounded"
    assert oscillator_orbit_params(1.0, 1.0, A0=1.0).regime == "separatrix"
    with pytest.raises(ValueError):
        oscillator_orbit_params(1.0, 1.0)


@pytest.mark.parametrize("kA0", [0.0, 0.5, 0.9])
def test_bounded_orbits_close(kA0):
    k = 1.0
    orbit = oscillator_orbit_params(1.0, k, A0=max(kA0, 0.3))
    P = 2 * math.pi / orbit.Omega_kappa
    tr = integrate(MassProfile(k if kA0 else 0.0), MLOscillator(), PhaseState(0.0, orbit.A0), P / 2000, P)
    A = orbit.A_kappa if kA0 else orbit.A0
    assert np.max(np.abs(tr.x)) == pytest.approx(A, rel=1e-6)


def test_unbounded_orbit_escapes():
    tr = integrate(MassProfile(1.0), MLOscillator(), PhaseState(0.0, 1.1), 0.01, 500.0)
    assert tr.status == "escaped" or np.max(np.abs(tr.x)) > 1e6


def test_time_reversal():
    s0 = PhaseState(0.3, 0.4)
    fwd = integrate(MassProfile(0.8), MLOscillator(), s0, 1e-3, 5.0)
    back = integrate(MassProfile(0.8), MLOscillator(), PhaseState(fwd.x[-1], fwd.p[-1], fwd.t[-1]), -1e-3, 5.0)
    assert back.x[-1] == pytest.approx(0.3, abs=1e-9)
    assert back.p[-1] == pytest.approx(0.4, abs=1e-9)


def test_well_reflection_keeps_particle_inside_and_conserves_energy():
    tr = integrate(MassProfile(3.0), InfiniteWell(1.0), PhaseState(0.2, 2.0), 1e-3, 10.0)
    assert np.all((tr.x >= 0) & (tr.x <= 1.0))
    assert tr.energy_drift <= 1e-12
    with pytest.raises(DomainError):
        integrate(MassProfile(1.0), InfiniteWell(1.0), PhaseState(2.0, 1.0), 1e-3, 1.0)


def test_integrator_validation():
    with pytest.raises(ConfigurationError):
        integrate(MassProfile(1.0), Free(), PhaseState(0, 1), 0.0, 1.0)
    with pytest.raises(ConfigurationError):
        integrate(MassProfile(1.0), Free(), PhaseState(0, 1), 0.1, 1.0, order=3)


def test_well_density():
    np.testing.assert_allclose(classical_density(InfiniteWell(2.0), np.linspace(0, 2, 5), 0.0), 0.5)
    val, _ = quad(lambda x: classical_density(InfiniteWell(1.0), x, 3.0), 0, 1, epsabs=1e-14)
    assert val == pytest.approx(1.0, abs=1e-10)


def test_oscillator_density_at_origin():
    o = oscillator_orbit_params(1.0, 1.0, A0=0.5)
    assert classical_density(o, 0.0) == pytest.approx(1 / (math.pi * o.A_kappa))


def test_well_moments_limit_and_quadrature():
    c = classical_moments(InfiniteWell(1.0), 0.0, 2.0)
    assert (c.mean_x, c.mean_x2, c.mean_p2) == pytest.approx((0.5, 1 / 3, 4.0))
    k, E = 3.0, 1.7
    c = classical_moments(InfiniteWell(1.0), k, E)
    rho = lambda x: classical_density(InfiniteWell(1.0), x, k)  # noqa: E731
    mx = quad(lambda x: x * rho(x), 0, 1, epsabs=0, epsrel=1e-13)[0]
    mx2 = quad(lambda x: x * x * rho(x), 0, 1, epsabs=0, epsrel=1e-13)[0]
    # p^2 = 2 m(x) E on the free interior
    mp2 = quad(lambda x: 2 * E / (1 + k * k * x * x) * rho(x), 0, 1, epsabs=0, epsrel=1e-13)[0]
    assert c.mean_x == pytest.approx(mx, rel=1e-8)
    assert c.mean_x2 == pytest.approx(mx2, rel=1e-8)
    assert c.mean_p2 == pytest.approx(mp2, rel=1e-8)
    assert c.mean_p == 0.0


def test_oscillator_moments_against_trajectory_average():
    A0 = 0.5
    o = oscillator_orbit_params(1.0, 1.0, A0=A0)
    c = classical_moments(MLOscillator(), 1.0, o.E)
    assert c.mean_x2 == pytest.approx(A0 ** 2 / 1.5, rel=1e-12)
    P = 2 * math.pi / o.Omega_kappa
    tr = integrate(MassProfile(1.0), MLOscillator(), PhaseState(o.A_kappa, 0.0), P / 1000, 20 * P)
    avg = time_average_moments(tr)
    assert avg.mean_x2 == pytest.approx(c.mean_x2, rel=1e-4)
    assert avg.mean_p2 == pytest.approx(c.mean_p2, rel=1e-4)


def test_wkb_levels():
    np.testing.assert_allclose(wkb_levels(1.0, 0.0, 3), [0.5, 1.5, 2.5, 3.5])
    k = 20 ** -0.25
    assert wkb_levels(1.0, k, 0)[0] == pytest.approx(0.4720492, abs=5e-8)


@pytest.mark.parametrize("n", [0, 1, 3])
def test_wkb_action_quantisation(n):
    k = 30 ** -0.25
    E = wkb_levels(1.0, k, n)[-1]
    # (1/2pi) closed-loop action = 2 x the half-orbit integral / 2pi
    assert 2 * wkb_action(E, 1.0, k) == pytest.approx(n + 0.5, rel=1e-6)


def test_virial_split():
    v = virial_split(1.3, 1.0, 0.0)
    assert v.T_bar == v.V_bar == pytest.approx(0.5 * 1.3 ** 2 / 2)
    v = virial_split(0.5, 1.0, 1.0)
    assert v.V_bar / v.T_bar == pytest.approx(1 / math.sqrt(0.75), rel=1e-12)
    with pytest.raises(DomainError):
        virial_split(1.2, 1.0, 1.0)


def test_virial_from_long_trajectory():
    o = oscillator_orbit_params(1.0, 1.0, A0=0.5)
    P = 2 * math.pi / o.Omega_kappa
    tr = integrate(MassProfile(1.0), MLOscillator(), PhaseState(o.A_kappa, 0.0), P / 200, 200 * P)
    g = 1 + tr.x ** 2
    T = np.trapezoid(g * tr.p ** 2 / 2, tr.t) / (tr.t[-1] - tr.t[0])
    V = np.trapezoid(tr.x ** 2 / (2 * g), tr.t) / (tr.t[-1] - tr.t[0])
    v = virial_split(0.5, 1.0, 1.0)
    assert T == pytest.approx(v.T_bar, rel=1e-4)
    assert V == pytest.approx(v.V_bar, rel=1e-4)


def test_trajectory_columns():
    tr = integrate(MassProfile(0.5), Free(), PhaseState(0.0, 1.0), 0.1, 1.0, stride=2)
    cols = tr.columns()
    assert list(cols) == ["t", "x", "p", "x_kappa", "Pi_kappa", "H"]
    assert len(tr.samples) == len(tr.t)


def test_unbounded_orbit_reports_observed_momentum_range():
    kappa, A0 = 1.0, 1.1
    tr = integrate(MassProfile(kappa), MLOscillator(1.0), PhaseState(0.0, A0), 1e-3, 5.0)
    lo, hi = tr.pi_kappa_range
    a = np.abs(tr.Pi_kappa)
    assert (lo, hi) == (a.min(), a.max())
    # Pi_kappa starts at m0 w0 A0 and the potential only slows it down
    assert hi == pytest.approx(A0, rel=1e-12)
    assert lo < hi
