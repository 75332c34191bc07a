"""
Quantum Mathews-Lakshmanan oscillator via the Poeschl-Teller mapping.

Units hbar = m0 = 1; ``omega0`` may differ from 1 so ``a0^2 = 1/omega0``.
In x_kappa the problem is the sech^2 well of depth W_kappa with
``nu(nu+1) = 1/(kappa a0)^4``; bound levels satisfy ``0 <= n < nu``.
"""
from dataclasses import dataclass
import math

import numpy as np
from scipy.special import gammaln

from ._quad import composite_nodes
from .classical_sim import classical_moments, virial_split
from .errors import ConfigurationError, DomainError
from .kappa_core import restore
from .observables import MomentSet
from .pdm_model import MLOscillator

__all__ = [
    "OscillatorSpec",
    "LegendreEvaluator",
    "associated_legendre",
    "spectrum",
    "spectrum_from_depth",
    "wkb_gap",
    "eigenfunction",
    "eigenfunction_derivative",
    "deformed_eigenfunction",
    "moments",
    "moments_alternate",
    "moments_by_quadrature",
    "energy_split",
    "potential_by_quadrature",
    "kinetic_by_quadrature",
    "uncertainty_scan",
    "classical_limit",
]


@dataclass(frozen=True)
class OscillatorSpec:
    kappa: float = 0.0
    omega0: float = 1.0

    def __post_init__(self):
        if not self.omega0 > 0:
            raise DomainError("omega0 must be positive")
        object.__setattr__(self, "kappa", abs(float(self.kappa)))

    @classmethod
    def from_nu(cls, nu, omega0=1.0):
        """Spec whose Poeschl-Teller index is ``nu`` (kappa a0 = [nu(nu+1)]^(-1/4))."""
        if nu <= 0:
            raise DomainError("nu must be positive")
        a0 = 1.0 / math.sqrt(omega0)
        return cls((nu * (nu + 1.0)) ** -0.25 / a0, omega0)

    @classmethod
    def from_kappa_a0(cls, kappa_a0, omega0=1.0):
        return cls(abs(kappa_a0) * math.sqrt(omega0), omega0)

    @property
    def a0(self):
        return 1.0 / math.sqrt(self.omega0)

    @property
    def kappa_a0(self):
        return self.kappa * self.a0

    @property
    def nu(self):
        q = self.kappa_a0 ** 4
        if q == 0:
            return math.inf
        # nu = (-1 + sqrt(1 + 4/q)) / 2 written without cancellation
        return 2.0 / (q * (1.0 + math.sqrt(1.0 + 4.0 / q)))

    @property
    def z(self):
        return 2.0 * self.nu + 1.0

    @property
    def W_kappa(self):
        return math.inf if self.kappa == 0 else self.omega0 ** 2 / (2 * self.kappa ** 2)

    @property
    def omega_kappa(self):
        return self.omega0 * math.sqrt(1.0 + self.kappa ** 4 / (4 * self.omega0 ** 2))

    @property
    def n_bound(self):
        nu = self.nu
        return math.inf if math.isinf(nu) else int(math.ceil(nu - 1e-12))

    def mu(self, n):
        return self.nu - n

    def epsilon_shift(self, E):
        """Poeschl-Teller energy eps = E - hbar w0/(2 kappa^2 a0^2) (= E - W_kappa)."""
        return E - self.omega0 / (2 * self.kappa ** 2 * self.a0 ** 2)

    def integer_nu(self):
        nu = self.nu
        r = round(nu)
        if math.isinf(nu) or abs(nu - r) > 1e-9 * max(1.0, nu):
            raise ConfigurationError(
                f"eigenfunctions need integer nu; got nu = {nu!r}"
            )
        return int(r)


def _check_level(spec, n):
    if int(n) != n or n < 0:
        raise DomainError("oscillator levels are indexed n = 0, 1, ...")
    if n >= spec.nu:
        raise DomainError(
            f"n = {n} is not bound: only {spec.n_bound} bound states (n < nu = {spec.nu:.6g})"
        )
    return int(n)


# --- associated Legendre ------------------------------------------------------

def associated_legendre(nu, mu, u, sqrt_one_minus_u2=None, scale_log=0.0):
    """P_nu^mu(u) for integers nu >= mu >= 0, Condon-Shortley phase included.

    Built by upward recurrence in degree from
    ``P_mu^mu = (-1)^mu (2mu-1)!! (1-u^2)^(mu/2)``. Pass
    ``sqrt_one_minus_u2`` when it is known in closed form (sech, 1/s) to avoid
    cancellation near |u| = 1. ``scale_log`` is added to the log of the
    starting value, so callers can fold a normalisation in before it
    overflows. Returns ``(P_nu^mu, P_{nu-1}^mu)``.
    """
    u = np.asarray(u, dtype=float)
    if sqrt_one_minus_u2 is None:
        uc = np.clip(u, -1.0 + 1e-12, 1.0 - 1e-12)
        sq = np.sqrt(1.0 - uc * uc)
    else:
        sq = np.asarray(sqrt_one_minus_u2, dtype=float)
    if not (0 <= mu <= nu):
        raise DomainError("need integer 0 <= mu <= nu")
    log_dfact = gammaln(2 * mu + 1) - mu * math.log(2.0) - gammaln(mu + 1)
    with np.errstate(divide="ignore"):
        logp = scale_log + log_dfact + mu * np.log(sq)
    p_prev = np.zeros_like(u)
    p = ((-1.0) ** mu) * np.exp(logp)
    for l in range(mu, nu):
        p_next = ((2 * l + 1) * u * p - (l + mu) * p_prev) / (l - mu + 1)
        p_prev, p = p, p_next
    return p, p_prev


@dataclass(frozen=True)
class LegendreEvaluator:
    nu: int
    mu: int

    def __call__(self, u, sqrt_one_minus_u2=None):
        return associated_legendre(self.nu, self.mu, u, sqrt_one_minus_u2)[0]


# --- spectrum -------------------------------------------------------------------

def spectrum(spec, n_max):
    """E_n = w_k (n+1/2) - k^2 (n+1/2)^2 / 2 - k^2/8 for n = 0..n_max."""
    if n_max < 0:
        raise DomainError("n_max must be >= 0")
    _check_level(spec, n_max)
    n = np.arange(n_max + 1) + 0.5
    k2 = spec.kappa ** 2
    return spec.omega_kappa * n - 0.5 * k2 * n * n - k2 / 8.0


def spectrum_from_depth(spec, n_max):
    """Same levels written as W_kappa - kappa^2 (nu - n)^2 / 2."""
    _check_level(spec, n_max)
    n = np.arange(n_max + 1)
    return spec.W_kappa - 0.5 * spec.kappa ** 2 * (spec.nu - n) ** 2


def wkb_gap(spec, n):
    """hbar (w_k - w0)(n+1/2) - hbar^2 kappa^2 / 8m0."""
    return (spec.omega_kappa - spec.omega0) * (n + 0.5) - spec.kappa ** 2 / 8.0


# --- eigenfunctions ---------------------------------------------------------

def _norm_log(spec, nu, n):
    mu = nu - n
    return 0.5 * (math.log(spec.kappa * mu) + gammaln(n + 1) - gammaln(2 * nu - n + 1))


def _harmonic(spec, n, x):
    from numpy.polynomial.hermite import hermval

    w = spec.omega0
    c = np.zeros(n + 1)
    c[n] = 1.0
    y = math.sqrt(w) * x
    lognorm = 0.25 * math.log(w / math.pi) - 0.5 * (n * math.log(2.0) + gammaln(n + 1))
    return math.exp(lognorm) * hermval(y, c) * np.exp(-0.5 * y * y)


def eigenfunction(spec, n, x):
    """psi_n(x), normalised under dx; requires integer nu (or kappa = 0)."""
    x = np.asarray(x, dtype=float)
    if spec.kappa == 0:
        out = _harmonic(spec, int(n), x)
        return out.item() if out.ndim == 0 else out
    n = _check_level(spec, n)
    nu = spec.integer_nu()
    k = spec.kappa
    s = np.hypot(1.0, k * x)
    p, _ = associated_legendre(nu, nu - n, k * x / s, 1.0 / s, scale_log=_norm_log(spec, nu, n))
    out = p / np.sqrt(s)
    return out.item() if out.ndim == 0 else out


def deformed_eigenfunction(spec, n, x_kappa):
    """Lambda_n(x_kappa) = C P_nu^mu(tanh(kappa x_kappa)), normalised under dx_kappa."""
    n = _check_level(spec, n)
    nu = spec.integer_nu()
    t = spec.kappa * np.asarray(x_kappa, dtype=float)
    p, _ = associated_legendre(nu, nu - n, np.tanh(t), 1.0 / np.cosh(t), scale_log=_norm_log(spec, nu, n))
    return p


def eigenfunction_derivative(spec, n, x):
    """d psi_n/dx from (1-u^2) P' = (nu+mu) P_{nu-1}^mu - nu u P_nu^mu."""
    n = _check_level(spec, n)
    nu = spec.integer_nu()
    mu = nu - n
    k = spec.kappa
    x = np.asarray(x, dtype=float)
    s = np.hypot(1.0, k * x)
    u = k * x / s
    p, pm1 = associated_legendre(nu, mu, u, 1.0 / s, scale_log=_norm_log(spec, nu, n))
    return -0.5 * k * k * x * s ** -2.5 * p + k * s ** -1.5 * ((nu + mu) * pm1 - nu * u * p)


# --- moments -----------------------------------------------------------------

def _harmonic_moments(spec, n):
    return MomentSet(0.0, (n + 0.5) / spec.omega0, 0.0, spec.omega0 * (n + 0.5), "closed_form")


def moments(spec, n):
    """<x>, <x^2>, <p>, <p^2> from the energy forms.

    <x^2> = (E_n + k^2/2) / (w0^2 (1 - 2 E_n k^2/w0^2 - k^4/w0^2)) and
    <p^2> = (E_n - k^2/4)(z^2 - (2n+1) z)/(z^2 - 4). <x^2> is infinite for
    the top level n = nu - 1, where the denominator vanishes.
    """
    n = _check_level(spec, n)
    if spec.kappa == 0:
        return _harmonic_moments(spec, n)
    k2, w0, z = spec.kappa ** 2, spec.omega0, spec.z
    E = float(spectrum(spec, n)[-1])
    den = w0 ** 2 * (1.0 - 2.0 * E * k2 / w0 ** 2 - k2 * k2 / w0 ** 2)
    x2 = (E + 0.5 * k2) / den if den > 1e-12 * (E + 0.5 * k2) else math.inf
    p2 = (E - 0.25 * k2) * (z * z - (2 * n + 1) * z) / (z * z - 4.0)
    return MomentSet(0.0, x2, 0.0, p2, "closed_form")


def moments_alternate(spec, n):
    """The explicit (n, kappa a0, w_k/w0) forms of <x^2> and <p^2>."""
    n = _check_level(spec, n)
    if spec.kappa == 0:
        return _harmonic_moments(spec, n)
    ka2 = spec.kappa_a0 ** 2
    r = spec.omega_kappa / spec.omega0
    z = spec.z
    bracket = r * (n + 0.5) - 0.5 * ka2 * (n * n + n - 0.5)
    den = 1.0 - 2.0 * ka2 * bracket
    x2 = spec.a0 ** 2 * bracket / den if den > 1e-12 * bracket else math.inf
    p2 = spec.omega0 * (r * (n + 0.5) - 0.5 * ka2 * (n * n + n + 1)) * (z * z - (2 * n + 1) * z) / (z * z - 4.0)
    return MomentSet(0.0, x2, 0.0, p2, "closed_form")


def _xk_nodes(spec, n, panels, order):
    nu = spec.integer_nu()
    mu = nu - n
    # |Lambda|^2 decays like exp(-2 mu kappa |x_kappa|)
    half = 40.0 / (mu * spec.kappa)
    return composite_nodes(-half, half, panels, order)


def moments_by_quadrature(spec, n, panels=800, order=16):
    """Direct quadrature in x_kappa: <x^2> = int x(x_k)^2 Lambda^2 dx_k and
    <p^2> = int |psi'(x)|^2 dx with dx = s dx_kappa."""
    n = _check_level(spec, n)
    xk, w = _xk_nodes(spec, n, panels, order)
    lam = deformed_eigenfunction(spec, n, xk)
    x = np.asarray(restore(xk, spec.kappa), dtype=float)
    s = np.hypot(1.0, spec.kappa * x)
    dpsi = eigenfunction_derivative(spec, n, x)
    mu = spec.integer_nu() - n
    x2 = float(np.sum(w * x * x * lam * lam)) if mu > 1 else math.inf
    return MomentSet(
        mean_x=float(np.sum(w * x * lam * lam)),
        mean_x2=x2,
        mean_p=0.0,
        mean_p2=float(np.sum(w * s * dpsi * dpsi)),
        source="quadrature",
    )


def potential_by_quadrature(spec, n, panels=800, order=16):
    """<V> = int Lambda^2 W tanh^2(kappa x_kappa) dx_kappa."""
    n = _check_level(spec, n)
    xk, w = _xk_nodes(spec, n, panels, order)
    lam = deformed_eigenfunction(spec, n, xk)
    return float(np.sum(w * lam * lam * spec.W_kappa * np.tanh(spec.kappa * xk) ** 2))


def kinetic_by_quadrature(spec, n, panels=800, order=16):
    """<T> = (1/2) int (dLambda/dx_kappa)^2 dx_kappa, with
    dLambda/dx_kappa = C kappa [(nu+mu) P_{nu-1}^mu - nu u P_nu^mu], u = tanh."""
    n = _check_level(spec, n)
    nu = spec.integer_nu()
    mu = nu - n
    xk, w = _xk_nodes(spec, n, panels, order)
    t = spec.kappa * xk
    u = np.tanh(t)
    p, pm1 = associated_legendre(nu, mu, u, 1.0 / np.cosh(t), scale_log=_norm_log(spec, nu, n))
    d = spec.kappa * ((nu + mu) * pm1 - nu * u * p)
    return 0.5 * float(np.sum(w * d * d))


@dataclass(frozen=True)
class EnergySplit:
    T_exp: float
    V_exp: float
    a_n_kappa: float
    E: float


def energy_split(spec, n):
    """Quantum amplitude a_{n,kappa} and the split E_n = <T> + <V>."""
    n = _check_level(spec, n)
    E = float(spectrum(spec, n)[-1])
    if spec.kappa == 0:
        return EnergySplit(E / 2, E / 2, spec.a0 * math.sqrt(2 * n + 1), E)
    ka2 = spec.kappa_a0 ** 2
    r = spec.omega_kappa / spec.omega0
    br = r * (2 * n + 1) - ka2 * (n * n + n + 0.5)
    a = spec.a0 * math.sqrt(br / (1.0 - ka2 * br))
    g = math.sqrt(1.0 + (spec.kappa * a) ** 2)
    T = spec.W_kappa / g * (spec.omega0 / spec.omega_kappa - 1.0 / g)
    return EnergySplit(T, E - T, a, E)


def classical_limit(spec, n):
    """Classical moments and virial split at the matched energy E = E_n."""
    E = float(spectrum(spec, n)[-1])
    cm = classical_moments(MLOscillator(spec.omega0), spec.kappa, E)
    A0 = math.sqrt(2 * E) / spec.omega0
    vs = virial_split(A0, spec.omega0, spec.kappa)
    return cm, vs


def uncertainty_scan(kappa_a0_values, n_values, omega0=1.0):
    """Rows (kappa_a0, n, dx, dp, dx*dp, flagged) over a kappa a0 grid.

    A row is flagged (and its spreads left as nan) when fewer than n + 2
    bound states exist, since <x^2> diverges for n >= nu - 1.
    """
    rows = []
    for ka in kappa_a0_values:
        spec = OscillatorSpec.from_kappa_a0(ka, omega0)
        for n in n_values:
            if spec.nu <= n + 1:
                rows.append(
                    dict(kappa_a0=float(ka), n=int(n), delta_x=math.nan, delta_p=math.nan,
                         product=math.nan, flagged=True)
                )
                continue
            m = moments(spec, n)
            rows.append(
                dict(kappa_a0=float(ka), n=int(n), delta_x=m.delta_x, delta_p=m.delta_p,
                     product=m.product_xp, flagged=False)
            )
    return rows
