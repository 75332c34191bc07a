"""
Closed-form solution of the PDM particle in the infinite well [0, L].

Conventions: hbar = m0 = 1, levels indexed from n = 1. The deformed box has
length ``L_kappa = arcsinh(kappa L)/kappa`` and every eigenstate is a plain
sine in x_kappa.
"""
from dataclasses import dataclass
import math
import warnings

import numpy as np
from scipy.integrate import IntegrationWarning, quad

from ._quad import composite_nodes
from .errors import ConvergenceError, DomainError
from .kappa_core import deform
from .observables import MomentSet

__all__ = [
    "WellSpec",
    "eigenfunction",
    "modified_eigenfunction",
    "eigenfunction_derivative",
    "energy",
    "position_density",
    "momentum_amplitude",
    "momentum_density",
    "sech_tanh_integral",
    "moments",
    "moments_by_quadrature",
    "pseudo_momentum_moments",
    "position_skewness",
]

QUAD_TOL = 1e-10
QUAD_LIMIT = 2 ** 10
# Taylor branch radius around the removable poles of g_n and gamma_n
_POLE_RADIUS = 1e-3


@dataclass(frozen=True)
class WellSpec:
    L: float = 1.0
    kappa: float = 0.0

    def __post_init__(self):
        if not self.L > 0:
            raise DomainError("L must be positive")
        object.__setattr__(self, "kappa", abs(float(self.kappa)))

    @property
    def L_kappa(self):
        return deform(self.L, self.kappa)

    @property
    def epsilon0(self):
        return math.pi ** 2 / (2.0 * self.L ** 2)

    @property
    def lambda_kappa(self):
        return self.kappa * self.L_kappa

    @property
    def C_kappa(self):
        return math.sqrt(2.0 / self.L_kappa)

    def k_n(self, n):
        return n * math.pi / self.L_kappa


def _check_n(n):
    if int(n) != n or n < 1:
        raise DomainError("well levels are indexed n = 1, 2, ...")
    return int(n)


def modified_eigenfunction(spec, n, x):
    """phi_n(x) = C_kappa sin[k_n arcsinh(kappa x)/kappa], zero outside [0, L]."""
    n = _check_n(n)
    x = np.asarray(x, dtype=float)
    inside = (x >= 0) & (x <= spec.L)
    val = spec.C_kappa * np.sin(spec.k_n(n) * np.asarray(deform(x, spec.kappa)))
    out = np.where(inside, val, 0.0)
    return out.item() if out.ndim == 0 else out


def eigenfunction(spec, n, x):
    """psi_n(x) = (1+kappa^2x^2)^(-1/4) phi_n(x), normalised under dx."""
    x = np.asarray(x, dtype=float)
    out = (1.0 + (spec.kappa * x) ** 2) ** -0.25 * modified_eigenfunction(spec, n, x)
    return out.item() if np.ndim(out) == 0 else out


def eigenfunction_derivative(spec, n, x):
    """d psi_n / dx inside the well."""
    n = _check_n(n)
    x = np.asarray(x, dtype=float)
    k = spec.kappa
    s = np.hypot(1.0, k * x)
    arg = spec.k_n(n) * np.asarray(deform(x, k))
    return spec.C_kappa * (
        -0.5 * k * k * x * s ** -2.5 * np.sin(arg) + spec.k_n(n) * s ** -1.5 * np.cos(arg)
    )


def energy(spec, n):
    """E_n = eps0 [kappa L / arcsinh(kappa L)]^2 n^2."""
    n = _check_n(n)
    return spec.epsilon0 * (spec.L / spec.L_kappa) ** 2 * n * n


def position_density(spec, n, x):
    x = np.asarray(x, dtype=float)
    out = np.asarray(eigenfunction(spec, n, x)) ** 2
    return out.item() if out.ndim == 0 else out


def momentum_amplitude(spec, n, k):
    """g_n(k), the kappa-Fourier amplitude of psi_n.

    ``n sqrt(Lk/2) [1 + (-1)^(n+1) exp(-i k Lk)] / [(n pi)^2 - (k Lk)^2]``.
    The phase uses the deformed length Lk, and the denominator's sign makes
    g_n equal to the inverse kappa-Fourier transform of psi_n.
    """
    n = _check_n(n)
    k = np.asarray(k, dtype=float)
    a = spec.L_kappa
    t0 = n * math.pi
    t = k * a
    cn = -1.0 if n % 2 else 1.0  # (-1)^n
    pref = n * math.sqrt(a / 2.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        direct = pref * (1.0 - cn * np.exp(-1j * t)) / (t0 * t0 - t * t)
    # near t = +-n pi write t = c + d with c = +-n pi; then
    # g = pref * (1 - e^{-id}) / (-d (2c + d)) and (1 - e^{-id})/d is a series
    out = np.array(direct, dtype=complex)
    for c in (t0, -t0):
        d = t - c
        near = np.abs(d) < _POLE_RADIUS
        if np.any(near):
            dn = d[near] if d.ndim else d
            ser = 1j + dn / 2 - 1j * dn ** 2 / 6 - dn ** 3 / 24 + 1j * dn ** 4 / 120
            val = pref * ser / (-(2 * c + dn))
            if out.ndim:
                out[near] = val
            else:
                out = np.asarray(val, dtype=complex)
    return out.item() if out.ndim == 0 else out


def momentum_density(spec, n, k):
    """gamma_n(k) = n^2 Lk [1 - cos(n pi) cos(k Lk)] / [(k Lk)^2 - (n pi)^2]^2."""
    n = _check_n(n)
    k = np.asarray(k, dtype=float)
    a = spec.L_kappa
    t0 = n * math.pi
    t = k * a
    cn = -1.0 if n % 2 else 1.0
    with np.errstate(divide="ignore", invalid="ignore"):
        out = n * n * a * (1.0 - cn * np.cos(t)) / (t * t - t0 * t0) ** 2
    out = np.array(out, dtype=float)
    for c in (t0, -t0):
        d = t - c
        near = np.abs(d) < _POLE_RADIUS
        if np.any(near):
            dn = d[near] if d.ndim else d
            # (1 - cos d)/d^2 to fourth order
            ser = 0.5 - dn ** 2 / 24 + dn ** 4 / 720
            val = n * n * a * ser / (2 * c + dn) ** 2
            if out.ndim:
                out[near] = val
            else:
                out = np.asarray(val, dtype=float)
    return out.item() if out.ndim == 0 else out


def _quad_checked(f, lo, hi, **kw):
    with warnings.catch_warnings():
        warnings.simplefilter("error", IntegrationWarning)
        try:
            val, err = quad(f, lo, hi, epsabs=QUAD_TOL, epsrel=QUAD_TOL, limit=QUAD_LIMIT, **kw)
        except IntegrationWarning as exc:
            raise ConvergenceError(f"quadrature did not converge: {exc}") from None
    if err > 10 * QUAD_TOL * max(1.0, abs(val)):
        raise ConvergenceError("quadrature did not reach tolerance", residual=err)
    return val


def sech_tanh_integral(spec, n, j, l, z=1.0):
    """I_{j,l}(z) = 2 int_0^z sech^{2j}(lam u) tanh^{2l}(lam u) sin^2(n pi u) du.

    Split as ``int f - int f cos(2 n pi u)``; the oscillatory part uses
    QUADPACK's Fourier-weighted rule so large n costs nothing extra.
    """
    n = _check_n(n)
    lam = spec.lambda_kappa

    def f(u):
        c = math.cosh(lam * u)
        return c ** (-2 * j) * math.tanh(lam * u) ** (2 * l)

    smooth = _quad_checked(f, 0.0, z)
    osc = _quad_checked(f, 0.0, z, weight="cos", wvar=2 * n * math.pi)
    return smooth - osc


def _sinhc_minus_one(y):
    """sinh(y)/y - 1 without cancellation."""
    if abs(y) < 1e-2:
        y2 = y * y
        return y2 / 6 + y2 * y2 / 120 + y2 ** 3 / 5040 + y2 ** 4 / 362880
    return math.sinh(y) / y - 1.0


def _mean_x(spec, n):
    k, L = spec.kappa, spec.L
    if k == 0:
        return L / 2
    A = math.asinh(k * L)
    b2 = (2 * math.pi * n) ** 2
    # cosh(A) - 1 = 2 sinh^2(A/2) keeps the small-kappa limit exact
    return 2 * math.sinh(A / 2) ** 2 / k * b2 / (A * (A * A + b2))


def _mean_x2(spec, n):
    k, L = spec.kappa, spec.L
    pn2 = (math.pi * n) ** 2
    if k == 0:
        return L * L / 3 - L * L / (2 * pn2)
    A = math.asinh(k * L)
    lk = A / k
    first = _sinhc_minus_one(2 * A) / (2 * k * k)
    second = math.sinh(2 * A) / (2 * A) * lk * lk / (2 * (A * A + pn2))
    return first - second


def _mean_p2(spec, n, form):
    kn2 = spec.k_n(n) ** 2
    if spec.kappa == 0:
        return kn2
    k2 = spec.kappa ** 2

    def I(j, l):
        return sech_tanh_integral(spec, n, j, l)

    if form == "reference":
        return kn2 * I(1, 0) + k2 * (0.5 * I(1, 0) - 1.25 * I(1, 1) - I(3, 0) + 5 * I(3, 1))
    if form == "corrected":
        return kn2 * I(1, 0) + k2 * (-0.5 * I(2, 0) + 1.25 * I(1, 1))
    raise ValueError(f"unknown form {form!r}")


def moments(spec, n, form="reference"):
    """Expectation values for level ``n``.

    ``form="reference"`` evaluates <p^2> from the reference combination of the
    I_{j,l} integrals; ``form="corrected"`` uses
    ``k_n^2 I_10 + kappa^2 (-I_20/2 + 5 I_11/4)``, obtained by integrating
    |psi_n'|^2 by parts, which agrees with direct quadrature.
    """
    n = _check_n(n)
    source = "closed_form" if form == "reference" else "closed_form_corrected"
    return MomentSet(
        mean_x=_mean_x(spec, n),
        mean_x2=_mean_x2(spec, n),
        mean_p=0.0,
        mean_p2=_mean_p2(spec, n, form),
        source=source,
        mean_k2=spec.k_n(n) ** 2,
    )


def moments_by_quadrature(spec, n, order=16):
    """Direct quadrature of rho_n x^l and |psi_n'|^2 on [0, L]."""
    n = _check_n(n)
    x, w = composite_nodes(0.0, spec.L, panels=8 * n + 64, order=order)
    rho = position_density(spec, n, x)
    dpsi = eigenfunction_derivative(spec, n, x)
    return MomentSet(
        mean_x=float(np.sum(w * rho * x)),
        mean_x2=float(np.sum(w * rho * x * x)),
        mean_p=0.0,
        mean_p2=float(np.sum(w * dpsi * dpsi)),
        source="quadrature",
        mean_k2=spec.k_n(n) ** 2,
    )


def pseudo_momentum_moments(spec, n):
    """<Pi_kappa> = 0 and <Pi_kappa^2> = (n pi hbar / L_kappa)^2."""
    n = _check_n(n)
    return {"mean": 0.0, "mean_sq": spec.k_n(n) ** 2}


def position_skewness(spec, n):
    """Standardised third central moment of rho_n."""
    n = _check_n(n)
    x, w = composite_nodes(0.0, spec.L, panels=8 * n + 64)
    rho = position_density(spec, n, x)
    mu = np.sum(w * rho * x)
    var = np.sum(w * rho * (x - mu) ** 2)
    return float(np.sum(w * rho * (x - mu) ** 3) / var ** 1.5)
