"""
Position-dependent-mass model: mass profile, potentials, Hamiltonians, the
point canonical transformation (PCT) to the deformed frame, and the von Roos
kinetic operator on a grid.

Units are dimensionless: hbar = 1. ``m0`` is kept as a field so the classical
layer can vary it, but the quantum layer assumes ``m0 = 1``.
"""
from dataclasses import dataclass, field

import numpy as np
from scipy import sparse
from scipy.interpolate import PchipInterpolator

from .errors import ConfigurationError, DomainError
from .kappa_core import deform, restore

__all__ = [
    "MassProfile",
    "InfiniteWell",
    "MLOscillator",
    "Free",
    "Tabulated",
    "OrderingPair",
    "PhaseState",
    "DeformedPhaseState",
    "mass_at",
    "hamiltonian_value",
    "deformed_hamiltonian_value",
    "pct_forward",
    "pct_inverse",
    "poisson_bracket",
    "deformed_potential",
    "potential_value",
    "kinetic_matrix_vonroos",
]


@dataclass(frozen=True)
class MassProfile:
    """m(x) = m0 / (1 + kappa^2 x^2)."""

    kappa: float = 0.0
    m0: float = 1.0

    def __post_init__(self):
        if not self.m0 > 0:
            raise DomainError("m0 must be positive")
        if not np.isfinite(self.kappa):
            raise DomainError("kappa must be finite")

    def __call__(self, x):
        return mass_at(self, x)

    def gradient(self, x):
        k2 = self.kappa ** 2
        x = np.asarray(x, dtype=float)
        return -2.0 * self.m0 * k2 * x / (1.0 + k2 * x * x) ** 2


@dataclass(frozen=True)
class InfiniteWell:
    """Hard walls at x = 0 and x = L, V = 0 inside."""

    L: float = 1.0

    def __post_init__(self):
        if not self.L > 0:
            raise DomainError("well width L must be positive")


@dataclass(frozen=True)
class MLOscillator:
    """Mathews-Lakshmanan potential m(x) omega0^2 x^2 / 2."""

    omega0: float = 1.0

    def __post_init__(self):
        if not self.omega0 > 0:
            raise DomainError("omega0 must be positive")


@dataclass(frozen=True)
class Free:
    pass


@dataclass(frozen=True)
class Tabulated:
    """Potential sampled at strictly increasing abscissae (monotone cubic)."""

    x: tuple
    v: tuple
    _interp: object = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        v = np.asarray(self.v, dtype=float)
        if x.ndim != 1 or x.shape != v.shape or x.size < 2:
            raise DomainError("tabulated potential needs matching 1-D samples")
        if np.any(np.diff(x) <= 0):
            raise DomainError("tabulated abscissae must be strictly increasing")
        object.__setattr__(self, "_interp", PchipInterpolator(x, v, extrapolate=False))

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if np.any((x < self.x[0]) | (x > self.x[-1])):
            raise DomainError("x outside tabulated range")
        return self._interp(x)


@dataclass(frozen=True)
class OrderingPair:
    """von Roos ordering parameters (alpha, beta)."""

    alpha: float = 0.25
    beta: float = 0.25


@dataclass(frozen=True)
class PhaseState:
    x: float
    p: float
    t: float = 0.0


@dataclass(frozen=True)
class DeformedPhaseState:
    x_kappa: float
    Pi_kappa: float
    t: float = 0.0


def mass_at(profile, x):
    x = np.asarray(x, dtype=float)
    m = profile.m0 / (1.0 + profile.kappa ** 2 * x * x)
    return m.item() if m.ndim == 0 else m


def potential_value(potential, profile, x):
    """V(x) for ``potential`` with the mass profile ``profile``."""
    x = np.asarray(x, dtype=float)
    if isinstance(potential, InfiniteWell):
        if np.any((x < 0) | (x > potential.L)):
            raise DomainError("x outside the infinite well [0, L]")
        v = np.zeros_like(x)
    elif isinstance(potential, MLOscillator):
        v = 0.5 * mass_at(profile, x) * potential.omega0 ** 2 * x * x
    elif isinstance(potential, Free):
        v = np.zeros_like(x)
    elif isinstance(potential, Tabulated):
        v = potential(x)
    else:
        raise TypeError(f"unknown potential {potential!r}")
    v = np.asarray(v, dtype=float)
    return v.item() if v.ndim == 0 else v


def hamiltonian_value(profile, potential, s):
    """Classical energy p^2/2m(x) + V(x) of the phase state ``s``."""
    kinetic = s.p ** 2 / (2.0 * mass_at(profile, s.x))
    return kinetic + potential_value(potential, profile, s.x)


def deformed_hamiltonian_value(profile, potential, d):
    """Pi^2/2m0 + U(x_kappa) for a :class:`DeformedPhaseState`."""
    return d.Pi_kappa ** 2 / (2.0 * profile.m0) + deformed_potential(
        potential, d.x_kappa, profile.kappa, m0=profile.m0
    )


def pct_forward(s, kappa):
    """(x, p) -> (x_kappa, Pi_kappa) = (arcsinh(k x)/k, sqrt(1+k^2x^2) p)."""
    return DeformedPhaseState(
        x_kappa=deform(s.x, kappa),
        Pi_kappa=float(np.hypot(1.0, kappa * s.x) * s.p),
        t=s.t,
    )


def pct_inverse(d, kappa):
    x = restore(d.x_kappa, kappa)
    return PhaseState(x=x, p=float(d.Pi_kappa / np.hypot(1.0, kappa * x)), t=d.t)


def poisson_bracket(s, kappa, h=1e-6):
    """{x_kappa, Pi_kappa} in the (x, p) chart, by central differences."""

    def fwd(x, p):
        d = pct_forward(PhaseState(x, p), kappa)
        return d.x_kappa, d.Pi_kappa

    hx = h * max(1.0, abs(s.x))
    hp = h * max(1.0, abs(s.p))
    xp, Pp = fwd(s.x + hx, s.p)
    xm, Pm = fwd(s.x - hx, s.p)
    dX_dx, dP_dx = (xp - xm) / (2 * hx), (Pp - Pm) / (2 * hx)
    xp, Pp = fwd(s.x, s.p + hp)
    xm, Pm = fwd(s.x, s.p - hp)
    dX_dp, dP_dp = (xp - xm) / (2 * hp), (Pp - Pm) / (2 * hp)
    return dX_dx * dP_dp - dX_dp * dP_dx


def ml_well_depth(omega0, kappa, m0=1.0):
    """W_kappa = m0 omega0^2 / (2 kappa^2); infinite for kappa = 0."""
    if kappa == 0:
        return np.inf
    return m0 * omega0 ** 2 / (2.0 * kappa ** 2)


def deformed_potential(potential, x_kappa, kappa, m0=1.0):
    """U(x_kappa) = V(x(x_kappa)), the potential seen in the deformed frame."""
    xk = np.asarray(x_kappa, dtype=float)
    k = abs(kappa)
    if isinstance(potential, MLOscillator):
        if k == 0:
            u = 0.5 * m0 * potential.omega0 ** 2 * xk * xk
        else:
            u = ml_well_depth(potential.omega0, k, m0) * np.tanh(k * xk) ** 2
    elif isinstance(potential, InfiniteWell):
        l_k = deform(potential.L, k)
        if np.any((xk < 0) | (xk > l_k * (1 + 1e-12))):
            raise DomainError("x_kappa outside the deformed box [0, L_kappa]")
        u = np.zeros_like(xk)
    elif isinstance(potential, Free):
        u = np.zeros_like(xk)
    else:
        u = potential_value(potential, MassProfile(k, m0), restore(xk, k))
    u = np.asarray(u, dtype=float)
    return u.item() if u.ndim == 0 else u


def kinetic_matrix_vonroos(profile, ordering, x):
    """
    Discretised von Roos kinetic operator on a uniform grid with Dirichlet ends.

    T = 1/4 { m^-a p m^(-1+a+b) p m^-b + m^-b p m^(-1+a+b) p m^-a },  p = -i d/dx.

    ``p c p`` is discretised as ``D^T diag(c_mid) D`` with ``D`` the forward
    difference from nodes to cell midpoints, so ``A = M^-a D^T C D M^-b`` and
    the second term is exactly ``A^T``; T = (A + A^T)/4 is symmetric.

    Parameters
    ----------
    profile : MassProfile
    ordering : OrderingPair
    x : array_like
        Uniform grid including both boundary points.

    Returns
    -------
    scipy.sparse.csr_matrix
        Operator on the ``len(x) - 2`` interior samples (hbar = 1).
    """
    x = np.asarray(x, dtype=float)
    if x.size < 16:
        raise ConfigurationError("von Roos grid needs at least 16 points")
    h = np.diff(x)
    if not np.allclose(h, h[0], rtol=1e-9, atol=0):
        raise ConfigurationError("grid must be uniform")
    h = h[0]
    a, b = ordering.alpha, ordering.beta
    m_nodes = mass_at(profile, x[1:-1])
    m_mid = mass_at(profile, 0.5 * (x[1:] + x[:-1]))
    n = x.size - 2
    # D: (n+1) x n, maps interior nodes to the n+1 midpoints
    D = sparse.diags([np.ones(n), -np.ones(n)], [0, -1], shape=(n + 1, n)) / h
    C = sparse.diags(m_mid ** (-1.0 + a + b))
    A = sparse.diags(m_nodes ** (-a)) @ D.T @ C @ D @ sparse.diags(m_nodes ** (-b))
    return ((A + A.T) * 0.25).tocsr()
