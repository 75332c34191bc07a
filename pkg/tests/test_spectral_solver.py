import math

import numpy as np
import pytest

from kappamech import osc_analytic as oa
from kappamech import well_analytic as wa
from kappamech.errors import ConfigurationError, ConvergenceError
from kappamech.pdm_model import InfiniteWell, MLOscillator
from kappamech.spectral_solver import (
    GridSpec,
    continuity_residual,
    count_bound_states,
    count_nodes,
    crank_nicolson_step,
    poschl_teller_grid,
    richardson,
    solve_deformed_frame,
    solve_original_frame,
    solve_richardson,
)

WELL = InfiniteWell(1.0)


def box_levels(L_kappa, n_max):
    n = np.arange(1, n_max + 1)
    return (n * math.pi) ** 2 / (2 * L_kappa ** 2)


def test_deformed_box_at_4000_points():
    spec = wa.WellSpec(1.0, 1.0)
    sols = solve_deformed_frame(WELL, 1.0, GridSpec("x_kappa", 0.0, spec.L_kappa, 4000), 5)
    e = np.array([s.energy for s in sols])
    np.testing.assert_allclose(e, box_levels(spec.L_kappa, 5), rtol=1e-6)


def test_deformed_box_with_richardson():
    spec = wa.WellSpec(1.0, 1.0)
    e = solve_richardson(solve_deformed_frame, WELL, 1.0, GridSpec("x_kappa", 0.0, spec.L_kappa, 2000), 5)
    np.testing.assert_allclose(e, box_levels(spec.L_kappa, 5), rtol=1e-8)


def test_well_levels_indexed_from_one_with_sturm_nodes():
    sols = solve_deformed_frame(WELL, 0.5, GridSpec("x_kappa", 0.0, 0.9, 800), 4)
    assert [s.n for s in sols] == [1, 2, 3, 4]
    assert [count_nodes(s.psi) for s in sols] == [0, 1, 2, 3]


def test_frames_agree_for_the_well():
    ed = solve_richardson(solve_deformed_frame, WELL, 1.0, GridSpec("x_kappa", 0, math.asinh(1.0), 1001), 5)
    eo = solve_richardson(solve_original_frame, WELL, 1.0, GridSpec("x", 0, 1, 1001), 5)
    np.testing.assert_allclose(eo, ed, rtol=1e-6)


def test_original_frame_reduces_to_standard_at_zero_kappa():
    sols = solve_original_frame(WELL, 0.0, GridSpec("x", 0, 1, 501), 1)
    h = 1.0 / 500
    eps0 = math.pi ** 2 / 2
    assert abs(sols[0].energy - eps0) < eps0 * (math.pi * h) ** 2  # O(h^2)


def test_convergence_order():
    spec = wa.WellSpec(1.0, 3.0)
    exact = wa.energy(spec, 3)
    errs = []
    for n in (201, 401, 801):
        e = solve_original_frame(WELL, 3.0, GridSpec("x", 0, 1, n), 3)[-1].energy
        errs.append(abs(e - exact))
    orders = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
    assert np.all(orders >= 1.9)


def test_richardson_formula():
    assert richardson(1.0 + 4.0, 1.0 + 1.0) == pytest.approx(1.0)


@pytest.mark.parametrize("frame", ["x_kappa", "x"])
def test_orthonormality(frame):
    if frame == "x_kappa":
        grid = GridSpec("x_kappa", 0.0, math.asinh(3.0) / 3.0, 600)
        sols = solve_deformed_frame(WELL, 3.0, grid, 6)
    else:
        grid = GridSpec("x", 0.0, 1.0, 600)
        sols = solve_original_frame(WELL, 3.0, grid, 6)
    psi = np.array([s.psi for s in sols])
    gram = psi @ psi.T * grid.h
    assert np.max(np.abs(gram - np.eye(6))) <= 1e-8


def test_poschl_teller_nu4_levels():
    spec = oa.OscillatorSpec.from_nu(4)
    grid = poschl_teller_grid(spec.kappa, 0.01, 4)
    assert count_bound_states(MLOscillator(), spec.kappa, grid) == 4
    e = solve_richardson(solve_deformed_frame, MLOscillator(), spec.kappa, grid, 4)
    assert e[0] == pytest.approx(oa.spectrum(spec, 0)[0], rel=1e-6)
    with pytest.raises(ConvergenceError):
        solve_deformed_frame(MLOscillator(), spec.kappa, grid, 5)


def test_harmonic_limit_in_deformed_frame():
    grid = GridSpec("x_kappa", -12.0, 12.0, 2401)
    e = solve_richardson(solve_deformed_frame, MLOscillator(), 0.0, grid, 6)
    np.testing.assert_allclose(e, np.arange(6) + 0.5, rtol=1e-5)


def test_original_frame_ml_oscillator_nu5():
    spec = oa.OscillatorSpec.from_nu(5)
    grid = GridSpec("x", -4000.0, 4000.0, 200_001)
    e = solve_richardson(solve_original_frame, MLOscillator(), spec.kappa, grid, 5)
    np.testing.assert_allclose(e, oa.spectrum(spec, 4), rtol=1e-6)


def test_to_x_frame_normalisation():
    grid = GridSpec("x_kappa", 0.0, math.asinh(2.0) / 2.0, 800)
    sol = solve_deformed_frame(WELL, 2.0, grid, 2)[1]
    x, psi = sol.to_x_frame()
    assert np.trapezoid(psi ** 2, x) == pytest.approx(1.0, rel=1e-4)


def test_grid_and_frame_validation():
    with pytest.raises(ConfigurationError):
        solve_original_frame(WELL, 1.0, GridSpec("x_kappa", 0, 1, 100), 2)
    with pytest.raises(ConfigurationError):
        GridSpec("x", 0, 1, 8)
    with pytest.raises(ConvergenceError) as info:
        solve_deformed_frame(WELL, 0.0, GridSpec("x_kappa", 0, 1, 40), 10)
    assert info.value.residual < 10


def test_stationary_state_has_small_continuity_residual():
    grid = GridSpec("x", 0.0, 1.0, 801)
    sol = solve_original_frame(WELL, 1.0, grid, 2)[1]
    psi = sol.psi * np.exp(-0.3j)
    res = continuity_residual(psi, grid.nodes, 1.0)
    assert res.max_abs() <= grid.h ** 2


def _packet(x, k0=5.0):
    return np.exp(-((x - 0.5) ** 2) / 0.005 + 1j * k0 * x)


def test_packet_continuity_residual_is_second_order():
    # refine h and dt together (dt ~ h^2): the residual must fall like h^2
    out = []
    for n, dt in ((1001, 4e-5), (2001, 1e-5), (4001, 2.5e-6)):
        x = np.linspace(0.0, 1.0, n)
        psi0 = _packet(x)
        psi0 /= np.sqrt(np.trapezoid(np.abs(psi0) ** 2, x))
        psi1 = crank_nicolson_step(psi0, x, 1.0, WELL, dt)
        res = continuity_residual(psi0, x, 1.0, psi1, dt)
        drho = np.max(np.abs(np.abs(psi1) ** 2 - np.abs(psi0) ** 2)) / dt
        out.append(res.max_abs() / drho)
    ratios = np.array(out[:-1]) / np.array(out[1:])
    assert np.all(ratios > 3.5)
    assert out[-1] < 1e-4


def test_zero_kappa_currents_coincide():
    x = np.linspace(-1.0, 1.0, 1001)
    psi = np.exp(2j * x) + 0.5 * np.exp(-3j * x)
    res = continuity_residual(psi, x, 0.0)
    np.testing.assert_allclose(res.deformed, res.standard, atol=1e-12)
