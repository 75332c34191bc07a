"""
Finite-difference eigensolver for the deformed Schroedinger problem.

Two independent discretisations are provided:

* deformed frame -- constant-mass equation in x_kappa with U(x_kappa);
* original frame -- the first-derivative form in x,
  ``-(1+k^2x^2)/2 Phi'' - k^2 x/2 Phi' + V Phi = E Phi``, written in the
  conservative form ``-1/2 s (s Phi')'`` (``s = sqrt(1+k^2x^2)``) and made
  symmetric by the similarity transform with the d_kappa x weight.

Both reduce to symmetric tridiagonal problems solved with LAPACK's
bisection/inverse-iteration for the lowest levels only.
"""
from dataclasses import dataclass

import numpy as np
from scipy import sparse
from scipy.linalg import eigh_tridiagonal, eigvalsh_tridiagonal
from scipy.sparse.linalg import splu

from .errors import ConfigurationError, ConvergenceError
from .kappa_core import deform, restore
from .pdm_model import InfiniteWell, MLOscillator, deformed_potential, ml_well_depth, potential_value, MassProfile

__all__ = [
    "GridSpec",
    "EigenSolution",
    "solve_deformed_frame",
    "solve_original_frame",
    "original_frame_hamiltonian",
    "richardson",
    "solve_richardson",
    "poschl_teller_grid",
    "count_nodes",
    "count_bound_states",
    "ContinuityResidual",
    "continuity_residual",
    "crank_nicolson_step",
]

MIN_POINTS = 16
# absolute bisection tolerance; the LAPACK default eps*|T| is far too loose
# for the original-frame matrices whose entries grow like x^2/h^2
_BISECTION_TOL = 1e-14


@dataclass(frozen=True)
class GridSpec:
    """Uniform Dirichlet grid; ``frame`` is ``"x"`` or ``"x_kappa"``."""

    frame: str
    lo: float
    hi: float
    n_points: int
    boundary: str = "dirichlet"

    def __post_init__(self):
        if self.frame not in ("x", "x_kappa"):
            raise ConfigurationError(f"unknown frame {self.frame!r}")
        if not self.lo < self.hi:
            raise ConfigurationError("grid needs lo < hi")
        if self.n_points < MIN_POINTS:
            raise ConfigurationError(f"grid needs at least {MIN_POINTS} points")
        if self.boundary != "dirichlet":
            raise ConfigurationError("only Dirichlet boundaries are supported")

    @property
    def h(self):
        return (self.hi - self.lo) / (self.n_points - 1)

    @property
    def nodes(self):
        return np.linspace(self.lo, self.hi, self.n_points)

    def refined(self):
        """Same interval with half the spacing."""
        return GridSpec(self.frame, self.lo, self.hi, 2 * self.n_points - 1, self.boundary)


@dataclass
class EigenSolution:
    """One eigenpair sampled on the full grid (boundary zeros included).

    ``norm_convention`` is ``"d_kappa_x"`` when ``psi`` is Phi (equivalently
    Lambda(x_kappa)) normalised under the deformed measure, and ``"dx"`` when
    ``psi`` is the standard wavefunction Psi normalised under dx.
    """

    n: int
    energy: float
    grid: np.ndarray
    psi: np.ndarray
    norm_convention: str
    frame: str
    kappa: float

    def to_x_frame(self):
        """Return ``(x, Psi(x))`` with Psi = (1+k^2x^2)^(-1/4) Phi."""
        if self.frame == "x":
            return self.grid, self.psi
        x = restore(self.grid, self.kappa)
        return x, (1.0 + (self.kappa * x) ** 2) ** -0.25 * self.psi


def count_nodes(psi, rel_floor=1e-6):
    """Interior sign changes, ignoring samples below ``rel_floor * max|psi|``."""
    psi = np.asarray(psi)
    keep = np.abs(psi) > rel_floor * np.max(np.abs(psi))
    signs = np.sign(psi[keep])
    return int(np.count_nonzero(signs[1:] != signs[:-1]))


def _fix_sign(v):
    first = np.flatnonzero(np.abs(v) > 1e-3 * np.max(np.abs(v)))[0]
    return v if v[first] > 0 else -v


def _lowest(diag, off, n_levels):
    if n_levels > diag.size:
        raise ConfigurationError("more levels requested than grid unknowns")
    w, v = eigh_tridiagonal(
        diag, off, select="i", select_range=(0, n_levels - 1), lapack_driver="stebz",
        tol=_BISECTION_TOL,
    )
    return w, v


def _threshold(potential, kappa):
    """Energy above which states are not bound (inf for confining cases)."""
    if isinstance(potential, MLOscillator) and kappa != 0:
        return ml_well_depth(potential.omega0, kappa)
    return np.inf


def _index_base(potential):
    return 1 if isinstance(potential, InfiniteWell) else 0


def _check_resolved(energies, interior, n_levels, potential, kappa, grid):
    thr = _threshold(potential, kappa)
    # at least 8 interior points per node of the highest requested level
    resolved = min(n_levels, max(1, interior // 8))
    bound = int(np.count_nonzero(energies < thr))
    usable = min(resolved, bound)
    if usable < n_levels:
        raise ConvergenceError(
            f"requested {n_levels} levels but only {usable} grid-resolved bound "
            f"states converged on {grid}",
            residual=usable,
        )


def _package(w, v, grid, nodes, potential, kappa, norm, check_nodes):
    h = grid.h
    out = []
    base = _index_base(potential)
    for i in range(w.size):
        psi = np.zeros(grid.n_points)
        vec = _fix_sign(v[:, i])
        psi[1:-1] = vec / np.sqrt(np.sum(vec * vec) * h)
        if check_nodes and count_nodes(psi) != i:
            raise ConvergenceError(
                f"level {i} has {count_nodes(psi)} nodes (Sturm count violated)"
            )
        out.append(EigenSolution(i + base, float(w[i]), nodes, psi, norm, grid.frame, kappa))
    return out


def solve_deformed_frame(potential, kappa, grid, n_levels, check_nodes=True):
    """Eigenpairs of -1/2 d^2/dx_kappa^2 + U(x_kappa) (hbar = m0 = 1).

    Returns ``n_levels`` :class:`EigenSolution` objects sorted by energy with
    ``psi`` = Lambda(x_kappa), normalised under d x_kappa.
    """
    if grid.frame != "x_kappa":
        raise ConfigurationError("solve_deformed_frame needs an x_kappa grid")
    kappa = abs(kappa)
    nodes = grid.nodes
    h = grid.h
    u = np.asarray(deformed_potential(potential, nodes[1:-1], kappa), dtype=float)
    diag = 1.0 / h ** 2 + u
    off = np.full(diag.size - 1, -0.5 / h ** 2)
    w, v = _lowest(diag, off, n_levels)
    _check_resolved(w, diag.size, n_levels, potential, kappa, grid)
    return _package(w, v, grid, nodes, potential, kappa, "d_kappa_x", check_nodes)


def original_frame_hamiltonian(potential, kappa, x):
    """Symmetric tridiagonal form ``(diag, off)`` of the original-frame operator.

    With ``S = diag(s)`` the conservative operator is ``S K`` where
    ``K = 1/2 D^T diag(s_mid) D``; ``S^(1/2) K S^(1/2)`` is similar to it and
    acts on Psi = s^(-1/2) Phi.
    """
    x = np.asarray(x, dtype=float)
    h = x[1] - x[0]
    k2 = kappa * kappa
    s = np.sqrt(1.0 + k2 * x[1:-1] ** 2)
    s_mid = np.sqrt(1.0 + k2 * (0.5 * (x[1:] + x[:-1])) ** 2)
    v = np.asarray(potential_value(potential, MassProfile(kappa), x[1:-1]), dtype=float)
    diag = 0.5 * s * (s_mid[:-1] + s_mid[1:]) / h ** 2 + v
    off = -0.5 * np.sqrt(s[:-1] * s[1:]) * s_mid[1:-1] / h ** 2
    return diag, off


def solve_original_frame(potential, kappa, grid, n_levels, check_nodes=True):
    """Eigenpairs of the first-derivative form in x.

    ``psi`` is the standard wavefunction Psi(x) normalised under dx.
    """
    if grid.frame != "x":
        raise ConfigurationError("solve_original_frame needs an x grid")
    kappa = abs(kappa)
    nodes = grid.nodes
    diag, off = original_frame_hamiltonian(potential, kappa, nodes)
    w, v = _lowest(diag, off, n_levels)
    _check_resolved(w, diag.size, n_levels, potential, kappa, grid)
    return _package(w, v, grid, nodes, potential, kappa, "dx", check_nodes)


def count_bound_states(potential, kappa, grid):
    """Number of discrete levels strictly below the continuum threshold.

    Box truncation only pushes continuum levels up, so the count is not
    inflated by the finite grid. Confining potentials have no threshold and
    raise :class:`ConfigurationError`.
    """
    kappa = abs(kappa)
    thr = _threshold(potential, kappa)
    if not np.isfinite(thr):
        raise ConfigurationError("potential has no continuum threshold")
    if grid.frame == "x_kappa":
        u = np.asarray(deformed_potential(potential, grid.nodes[1:-1], kappa), dtype=float)
        diag = 1.0 / grid.h ** 2 + u
        off = np.full(diag.size - 1, -0.5 / grid.h ** 2)
    else:
        diag, off = original_frame_hamiltonian(potential, kappa, grid.nodes)
    w = eigvalsh_tridiagonal(diag, off, select="v", select_range=(-np.inf, thr),
                             lapack_driver="stebz", tol=_BISECTION_TOL)
    return int(w.size)


def richardson(coarse, fine, order=2):
    """Two-grid Richardson extrapolation for an O(h^order) quantity."""
    r = 2.0 ** order
    return (r * np.asarray(fine) - np.asarray(coarse)) / (r - 1.0)


def solve_richardson(solver, potential, kappa, grid, n_levels):
    """Energies on ``grid`` and its refinement, extrapolated to h -> 0."""
    e1 = np.array([s.energy for s in solver(potential, kappa, grid, n_levels)])
    e2 = np.array([s.energy for s in solver(potential, kappa, grid.refined(), n_levels)])
    return richardson(e1, e2)


def poschl_teller_grid(kappa, h, n_levels, tol=1e-9, potential=None):
    """Symmetric x_kappa grid for the sech^2 well with spacing close to ``h``.

    Starts at |x_kappa| <= 12/kappa and doubles the half-width until the
    highest requested level moves by less than ``tol`` (relative).
    """
    potential = potential or MLOscillator()
    half = 12.0 / abs(kappa)
    previous = None
    for _ in range(8):
        n = int(np.ceil(2 * half / h)) + 1
        n += (n + 1) % 2  # odd count keeps x_kappa = 0 on the grid
        grid = GridSpec("x_kappa", -half, half, n)
        e = solve_deformed_frame(potential, kappa, grid, n_levels, check_nodes=False)[-1].energy
        if previous is not None and abs(e - previous) <= tol * abs(e):
            return grid
        previous = e
        half *= 2.0
    raise ConvergenceError("Poeschl-Teller truncation did not settle", residual=abs(e - previous))


@dataclass
class ContinuityResidual:
    x: np.ndarray
    standard: np.ndarray
    deformed: np.ndarray

    def max_abs(self):
        return max(np.max(np.abs(self.standard)), np.max(np.abs(self.deformed)))


def _currents(psi, x, kappa):
    s = np.sqrt(1.0 + (kappa * x) ** 2)
    dpsi = np.gradient(psi, x)
    # J = Re{Psi* (1/i) d/dx (Psi/m)} = Im(Psi* Psi') / m for real m
    j_std = np.imag(np.conj(psi) * dpsi) * s ** 2
    phi = np.sqrt(s) * psi
    dphi = np.gradient(phi, x)
    j_def = s * np.imag(np.conj(phi) * dphi)
    return np.abs(psi) ** 2, j_std, np.abs(phi) ** 2, j_def, s


def continuity_residual(psi_a, x, kappa, psi_b=None, dt=None, x_b=None):
    """Pointwise residuals of both continuity equations.

    ``d rho/dt + dJ/dx`` (standard, Psi) and ``d varrho/dt + D_kappa calJ``
    (deformed, Phi = (1+k^2x^2)^(1/4) Psi). With ``psi_b`` and ``dt`` the time
    derivative is the forward difference between the two snapshots and the
    currents are taken at the mid time; without them the state is treated as
    stationary. Values are returned on interior grid points.
    """
    x = np.asarray(x, dtype=float)
    if x_b is not None and (np.shape(x_b) != x.shape or not np.allclose(x_b, x)):
        raise ConfigurationError("continuity_residual needs both states on one grid")
    psi_a = np.asarray(psi_a, dtype=complex)
    if psi_a.shape != x.shape:
        raise ConfigurationError("state and grid sizes differ")
    rho_a, j_a, vr_a, jd_a, s = _currents(psi_a, x, kappa)
    if psi_b is None:
        drho = np.zeros_like(rho_a)
        dvr = np.zeros_like(rho_a)
        j, jd = j_a, jd_a
    else:
        psi_b = np.asarray(psi_b, dtype=complex)
        if psi_b.shape != x.shape:
            raise ConfigurationError("continuity_residual needs both states on one grid")
        if not dt or dt <= 0:
            raise ConfigurationError("dt must be positive")
        rho_b, j_b, vr_b, jd_b, _ = _currents(psi_b, x, kappa)
        drho = (rho_b - rho_a) / dt
        dvr = (vr_b - vr_a) / dt
        j, jd = 0.5 * (j_a + j_b), 0.5 * (jd_a + jd_b)
    std = drho + np.gradient(j, x)
    dfm = dvr + s * np.gradient(jd, x)
    return ContinuityResidual(x[1:-1], std[1:-1], dfm[1:-1])


def crank_nicolson_step(psi, x, kappa, potential, dt):
    """Advance Psi by one Crank-Nicolson step of the original-frame Hamiltonian."""
    x = np.asarray(x, dtype=float)
    diag, off = original_frame_hamiltonian(potential, kappa, x)
    H = sparse.diags([off, diag, off], [-1, 0, 1], format="csc")
    eye = sparse.identity(diag.size, format="csc")
    lhs = splu((eye + 0.5j * dt * H).tocsc())
    rhs = (eye - 0.5j * dt * H) @ np.asarray(psi, dtype=complex)[1:-1]
    out = np.zeros(x.size, dtype=complex)
    out[1:-1] = lhs.solve(rhs)
    return out
