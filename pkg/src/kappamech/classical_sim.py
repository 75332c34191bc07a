"""
Classical dynamics of the PDM particle.

Trajectories are integrated in the deformed canonical pair (x_kappa, Pi_kappa)
where the mass is constant and the Hamiltonian separates, using symmetric
compositions of the leapfrog map (orders 2, 4, 6). Closed-form orbit data,
classical densities and moments, WKB levels and the virial split live here too.
"""
from dataclasses import dataclass
import math

import numpy as np
from scipy.integrate import quad

from .errors import ConfigurationError, DomainError
from .kappa_core import deform, restore
from .pdm_model import (
    DeformedPhaseState,
    Free,
    InfiniteWell,
    MLOscillator,
    PhaseState,
    Tabulated,
    deformed_potential,
    ml_well_depth,
    pct_forward,
)

__all__ = [
    "Trajectory",
    "ClassicalMoments",
    "OrbitParams",
    "VirialSplit",
    "integrate",
    "oscillator_orbit_params",
    "classical_density",
    "classical_moments",
    "time_average_moments",
    "wkb_levels",
    "wkb_action",
    "virial_split",
    "free_particle_position",
]

# |kappa x_kappa| beyond which sinh overflows the mapping back to x
_ESCAPE = 600.0


@dataclass
class Trajectory:
    """Sampled orbit in both charts.

    ``status`` is ``"ok"`` or ``"escaped"`` (the orbit left the representable
    region and integration stopped early).
    """

    t: np.ndarray
    x: np.ndarray
    p: np.ndarray
    x_kappa: np.ndarray
    Pi_kappa: np.ndarray
    H: np.ndarray
    energy_drift: float
    coordinate_frame: str = "deformed"
    status: str = "ok"

    @property
    def samples(self):
        return [PhaseState(float(x), float(p), float(t)) for t, x, p in zip(self.t, self.x, self.p)]

    @property
    def deformed_samples(self):
        return [
            DeformedPhaseState(float(a), float(b), float(t))
            for t, a, b in zip(self.t, self.x_kappa, self.Pi_kappa)
        ]

    @property
    def pi_kappa_range(self):
        """Observed (min, max) of |Pi_kappa| along the sampled orbit."""
        a = np.abs(self.Pi_kappa)
        return float(a.min()), float(a.max())

    def columns(self):
        return {
            "t": self.t,
            "x": self.x,
            "p": self.p,
            "x_kappa": self.x_kappa,
            "Pi_kappa": self.Pi_kappa,
            "H": self.H,
        }


@dataclass(frozen=True)
class ClassicalMoments:
    mean_x: float
    mean_x2: float
    mean_p: float
    mean_p2: float
    source: str

    def __post_init__(self):
        tol = 1e-12 * max(1.0, abs(self.mean_x2), abs(self.mean_p2))
        if self.mean_x2 - self.mean_x ** 2 < -tol or self.mean_p2 - self.mean_p ** 2 < -tol:
            raise ValueError("second moments below squared first moments")


@dataclass(frozen=True)
class OrbitParams:
    A0: float
    A_kappa: float
    Omega_kappa: float
    W_kappa: float
    E: float
    regime: str  # "bounded", "unbounded" or "separatrix"

    @property
    def bounded(self):
        return self.regime == "bounded"


@dataclass(frozen=True)
class VirialSplit:
    T_bar: float
    V_bar: float
    E: float


# --- integrator -----------------------------------------------------------

def _yoshida(order):
    if order == 2:
        return [1.0]
    if order not in (4, 6):
        raise ConfigurationError("integrator order must be 2, 4 or 6")
    inner = _yoshida(order - 2)
    p = order - 1
    w1 = 1.0 / (2.0 - 2.0 ** (1.0 / p))
    w0 = 1.0 - 2.0 * w1
    return [w1 * c for c in inner] + [w0 * c for c in inner] + [w1 * c for c in inner]


def _deformed_force(potential, kappa, m0):
    """-dU/dx_kappa as a function of x_kappa."""
    k = abs(kappa)
    if isinstance(potential, MLOscillator):
        w0 = potential.omega0
        if k == 0:
            return lambda xk: -m0 * w0 ** 2 * xk
        W = ml_well_depth(w0, k, m0)

        def force(xk):
            th = math.tanh(k * xk)
            return -2.0 * W * k * th * (1.0 - th * th)

        return force
    if isinstance(potential, (Free, InfiniteWell)):
        return lambda xk: 0.0
    if isinstance(potential, Tabulated):
        dv = potential._interp.derivative()

        def force(xk):
            x = restore(xk, k)
            return -float(dv(x)) * math.hypot(1.0, k * x)

        return force
    raise TypeError(f"unsupported potential {potential!r}")


def _reflect(xk, pk, l_k):
    """Fold free motion back into the deformed box [0, l_k] (exact walls)."""
    span = 2.0 * l_k
    y = math.fmod(xk, span)
    if y < 0:
        y += span
    if y > l_k:
        return span - y, -pk
    return y, pk


def integrate(profile, potential, s0, dt, T, order=6, stride=1):
    """Integrate the deformed Newton law from ``s0`` for a time ``T``.

    Parameters
    ----------
    profile : MassProfile
    potential : MLOscillator, InfiniteWell, Free or Tabulated
    s0 : PhaseState
    dt : float
        Fixed step. Negative steps integrate backward in time.
    T : float
        Duration (positive); the sign of ``dt`` sets the direction.
    order : int
        2 is plain leapfrog; 4 and 6 are Yoshida triple-jump compositions.
    stride : int
        Keep every ``stride``-th step.
    """
    if dt == 0 or T <= 0:
        raise ConfigurationError("need dt != 0 and T > 0")
    k = abs(profile.kappa)
    m0 = profile.m0
    coeffs = _yoshida(order)
    force = _deformed_force(potential, k, m0)
    wall = deform(potential.L, k) if isinstance(potential, InfiniteWell) else None
    if wall is not None and not 0 <= s0.x <= potential.L:
        raise DomainError("initial position outside the well")

    d0 = pct_forward(s0, k)
    xk, pk = d0.x_kappa, d0.Pi_kappa
    n_steps = int(round(T / abs(dt)))
    ts, xks, pks = [s0.t], [xk], [pk]
    status = "ok"
    t = s0.t
    for i in range(1, n_steps + 1):
        for c in coeffs:
            h = c * dt
            pk += 0.5 * h * force(xk)
            xk += h * pk / m0
            if wall is not None:
                xk, pk = _reflect(xk, pk, wall)
            pk += 0.5 * h * force(xk)
        t = s0.t + i * dt
        if k * abs(xk) > _ESCAPE:
            status = "escaped"
            ts.append(t), xks.append(xk), pks.append(pk)
            break
        if i % stride == 0 or i == n_steps:
            ts.append(t), xks.append(xk), pks.append(pk)

    xks = np.array(xks)
    pks = np.array(pks)
    x = np.asarray(restore(xks, k), dtype=float)
    p = pks / np.hypot(1.0, k * x)
    H = pks ** 2 / (2.0 * m0) + np.asarray(deformed_potential(potential, xks, k, m0=m0), dtype=float)
    scale = abs(H[0]) if H[0] != 0 else 1.0
    drift = float(np.max(np.abs(H - H[0])) / scale)
    return Trajectory(np.array(ts), x, p, xks, pks, H, drift, "deformed", status)


def free_particle_position(t, v0, kappa):
    """x(t) = ln_kappa[exp(v0 t)] = sinh(kappa v0 t)/kappa for x(0)=0, v(0)=v0."""
    return restore(v0 * np.asarray(t, dtype=float), kappa)


# --- oscillator orbit -----------------------------------------------------

def oscillator_orbit_params(omega0, kappa, A0=None, E=None, m0=1.0):
    """Amplitude, frequency and regime of the Mathews-Lakshmanan orbit.

    Give either the undeformed amplitude ``A0`` or the energy ``E``
    (``A0^2 = 2E/(m0 omega0^2)``).
    """
    if (A0 is None) == (E is None):
        raise ValueError("give exactly one of A0 or E")
    if E is not None:
        if E < 0:
            raise DomainError("energy must be non-negative")
        A0 = math.sqrt(2.0 * E / (m0 * omega0 ** 2))
    A0 = abs(A0)
    E = 0.5 * m0 * omega0 ** 2 * A0 ** 2
    q = (kappa * A0) ** 2
    W = ml_well_depth(omega0, kappa, m0)
    if q < 1.0:
        c = math.sqrt(1.0 - q)
        return OrbitParams(A0, A0 / c, omega0 * c, W, E, "bounded")
    regime = "separatrix" if q == 1.0 else "unbounded"
    return OrbitParams(A0, math.inf, math.nan, W, E, regime)


# --- densities and moments --------------------------------------------------

def classical_density(system, x, kappa=0.0):
    """Classical position density for a well or a bounded oscillator orbit.

    ``system`` is an :class:`InfiniteWell` or an :class:`OrbitParams`.
    """
    x = np.asarray(x, dtype=float)
    if isinstance(system, InfiniteWell):
        L = system.L
        k = abs(kappa)
        norm = 1.0 / L if k == 0 else k / math.asinh(k * L)
        rho = np.where((x >= 0) & (x <= L), norm / np.hypot(1.0, k * x), 0.0)
    elif isinstance(system, OrbitParams):
        if not system.bounded:
            raise DomainError("no classical density for an unbounded orbit")
        A = system.A_kappa
        if np.any(np.abs(x) >= A):
            raise DomainError("oscillator density is singular at and beyond |x| = A_kappa")
        rho = 1.0 / (math.pi * np.sqrt(A * A - x * x))
    else:
        raise TypeError(f"unsupported system {system!r}")
    return rho.item() if rho.ndim == 0 else rho


def classical_moments(system, kappa, E, m0=1.0):
    """Closed-form classical moments for ``InfiniteWell`` or ``MLOscillator``."""
    k = abs(kappa)
    if isinstance(system, InfiniteWell):
        L = system.L
        if k == 0:
            return ClassicalMoments(L / 2, L * L / 3, 0.0, 2 * m0 * E, "closed_form")
        kl = k * L
        root = math.hypot(1.0, kl)
        lg = math.log(kl + root)
        mx = L * (root - 1.0) / (kl * lg)
        mx2 = L * L / (2 * kl * kl) * (kl * root / lg - 1.0)
        mp2 = 2 * m0 * E * kl / (root * lg)
        return ClassicalMoments(mx, mx2, 0.0, mp2, "closed_form")
    if isinstance(system, MLOscillator):
        w0 = system.omega0
        q = 2 * E * k * k / (m0 * w0 ** 2)
        if q >= 1.0:
            raise DomainError("no bounded ensemble for kappa^2 A0^2 >= 1")
        mx2 = E / (m0 * w0 ** 2 * (1.0 - q))
        mp2 = m0 * E * math.sqrt(1.0 - q)
        return ClassicalMoments(0.0, mx2, 0.0, mp2, "closed_form")
    raise TypeError(f"unsupported system {system!r}")


def time_average_moments(traj):
    """Trapezoid time averages of x, x^2, p, p^2 along a trajectory."""
    t = traj.t
    span = t[-1] - t[0]

    def avg(f):
        return float(np.trapezoid(f, t) / span)

    return ClassicalMoments(avg(traj.x), avg(traj.x ** 2), avg(traj.p), avg(traj.p ** 2), "time_average")


# --- WKB ----------------------------------------------------------------------

def wkb_levels(omega0, kappa, n_max, m0=1.0, hbar=1.0):
    """E_n = hbar w0 (n+1/2) - hbar^2 k^2 (n+1/2)^2 / 2m0 for n = 0..n_max."""
    if n_max < 0:
        raise DomainError("n_max must be >= 0")
    n = np.arange(n_max + 1) + 0.5
    return hbar * omega0 * n - hbar ** 2 * kappa ** 2 * n * n / (2 * m0)


def wkb_action(E, omega0, kappa, m0=1.0):
    """(1/2pi) times the integral of p(x) from -A_kappa to A_kappa.

    Evaluated by quadrature with x = A_kappa sin(theta), which removes the
    square-root behaviour at the turning points.
    """
    orbit = oscillator_orbit_params(omega0, kappa, E=E, m0=m0)
    if not orbit.bounded:
        raise DomainError("action integral needs a bounded orbit")
    A = orbit.A_kappa
    k2 = kappa * kappa

    def integrand(theta):
        x = A * math.sin(theta)
        g = 1.0 + k2 * x * x
        v = 0.5 * m0 * omega0 ** 2 * x * x / g
        p = math.sqrt(max(2.0 * m0 * (E - v) / g, 0.0))
        return p * A * math.cos(theta)

    val, _ = quad(integrand, -math.pi / 2, math.pi / 2, epsabs=0, epsrel=1e-13, limit=200)
    return val / (2 * math.pi)


def virial_split(A0, omega0, kappa, m0=1.0):
    """Classical mean kinetic and potential energies of a bounded orbit."""
    orbit = oscillator_orbit_params(omega0, kappa, A0=A0, m0=m0)
    if not orbit.bounded:
        raise DomainError("virial split needs kappa^2 A0^2 < 1")
    E = orbit.E
    if kappa == 0:
        return VirialSplit(E / 2, E / 2, E)
    r = math.sqrt(1.0 + (kappa * orbit.A_kappa) ** 2)
    T = orbit.W_kappa / r * (1.0 - 1.0 / r)
    V = E - T
    c = math.sqrt(1.0 - (kappa * A0) ** 2)
    if not math.isclose(V, T / c, rel_tol=1e-10):
        raise ArithmeticError("virial relation V = T/sqrt(1-k^2A0^2) violated")
    return VirialSplit(T, V, E)
