"""
kappa-deformed Fourier analysis: eigenfunctions of the pseudo-momentum,
the deformed transform pair, and the deformed sine series on the well.

Transform integrals are evaluated in the deformed variable x_kappa, where the
d_kappa x measure is flat, with fixed composite Gauss-Legendre rules so that
results are reproducible bit for bit.
"""
from dataclasses import dataclass, field
import math

import numpy as np

from ._quad import composite_nodes
from .errors import ConvergenceError, DomainError
from .kappa_core import deform, restore

__all__ = [
    "PLANE_WAVE_C",
    "SpectrumFunction",
    "SeriesApproximation",
    "plane_wave",
    "pseudo_momentum_apply",
    "forward_transform",
    "inverse_transform",
    "sine_series",
    "unit_partial_sum",
    "unit_series_error",
]

PLANE_WAVE_C = 1.0 / math.sqrt(2.0 * math.pi)


@dataclass(frozen=True)
class SpectrumFunction:
    """Wave-vector distribution g(k) with the k-interval it lives on."""

    g: object
    k_max: float = 40.0 * math.pi

    def __call__(self, k):
        return self.g(k)


def plane_wave(k, kappa, x, C=PLANE_WAVE_C):
    """psi_k(x) = C (1+kappa^2x^2)^(-1/4) exp[i k arcsinh(kappa x)/kappa]."""
    x = np.asarray(x, dtype=float)
    out = C * (1.0 + (kappa * x) ** 2) ** -0.25 * np.exp(1j * k * np.asarray(deform(x, kappa)))
    return out.item() if out.ndim == 0 else out


def pseudo_momentum_apply(psi, x, kappa):
    """Pi_kappa psi = -i s^(1/2) d/dx (s^(1/2) psi) on a uniform grid.

    Second-order central differences; the two end samples are dropped.
    """
    x = np.asarray(x, dtype=float)
    h = x[1] - x[0]
    r = (1.0 + (kappa * x) ** 2) ** 0.25
    f = r * np.asarray(psi)
    return -1j * r[1:-1] * (f[2:] - f[:-2]) / (2 * h)


def _tail_estimate(g, k_max):
    """Bound on the discarded |g| mass beyond +-k_max from a power-law fit."""
    tail = 0.0
    for sgn in (1.0, -1.0):
        a = abs(g(sgn * k_max))
        b = abs(g(sgn * 0.5 * k_max))
        if a == 0.0:
            continue
        p = math.log(b / a) / math.log(2.0) if b > a else 1.0
        tail += a * k_max / (p - 1.0) if p > 1.0 else math.inf
    return tail


def forward_transform(g, kappa, x, k_max=40.0 * math.pi, panels=None, order=16, tail_tol=1e-2):
    """psi(x) = (1+kappa^2x^2)^(-1/4) int g(k) exp(i k x_kappa) dk over |k| <= k_max.

    Raises :class:`ConvergenceError` when the estimated discarded mass
    of |g| exceeds ``tail_tol``.
    """
    tail = _tail_estimate(g, k_max)
    if tail > tail_tol:
        raise ConvergenceError(f"k-truncation at {k_max} leaves tail ~{tail:.3g}", residual=tail)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    xk = np.asarray(deform(x, kappa), dtype=float)
    if panels is None:
        # ~4 panels per oscillation of the fastest phase k_max |x_kappa|
        panels = max(64, int(4 * k_max * max(1.0, np.max(np.abs(xk))) / math.pi))
    k, w = composite_nodes(-k_max, k_max, panels, order)
    gk = np.asarray(g(k), dtype=complex) * w
    out = np.empty(x.size, dtype=complex)
    for i, xi in enumerate(xk):
        out[i] = np.sum(gk * np.exp(1j * k * xi))
    out *= (1.0 + (kappa * x) ** 2) ** -0.25
    return out if out.size > 1 else out[0]


def inverse_transform(psi, kappa, k, support, panels=256, order=16):
    """g(k) = (1/2 pi) int (1+kappa^2x^2)^(-1/4) psi(x) exp(-i k x_kappa) dx.

    ``support`` is the x-interval outside which psi vanishes (or is
    negligible). The integral is carried out in x_kappa with
    ``dx = (1+kappa^2x^2)^(1/2) dx_kappa``, i.e. as the ordinary transform of
    phi(x_kappa) = (1+kappa^2x^2)^(1/4) psi(x).
    """
    lo, hi = support
    a, b = deform(lo, kappa), deform(hi, kappa)
    xk, w = composite_nodes(a, b, panels, order)
    x = np.asarray(restore(xk, kappa), dtype=float)
    phi = (1.0 + (kappa * x) ** 2) ** 0.25 * np.asarray(psi(x), dtype=complex) * w
    k = np.atleast_1d(np.asarray(k, dtype=float))
    out = np.array([np.sum(phi * np.exp(-1j * kk * xk)) for kk in k]) / (2 * math.pi)
    return out if out.size > 1 else out[0]


@dataclass
class SeriesApproximation:
    """Deformed sine series of f on the well.

    ``coefficients[n-1]`` is c_n; ``R_of_N`` is the mean-square error of the
    partial sum with ``partial_sum_N`` terms under the d_kappa x measure.
    """

    coefficients: np.ndarray
    partial_sum_N: int
    R_of_N: float
    spec: object = field(repr=False)
    norm_sq: float = math.nan  # int f^2 d_kappa x

    def __call__(self, x):
        return self.partial_sum(x)

    def partial_sum(self, x, N=None):
        N = self.partial_sum_N if N is None else N
        u = _u_of_x(self.spec, np.asarray(x, dtype=float))
        n = np.arange(1, N + 1)
        return np.sin(np.pi * np.multiply.outer(u, n)) @ self.coefficients[:N]

    def parseval_residual(self):
        """| int f^2 d_kappa x - (L_kappa/2) sum c_n^2 |."""
        return abs(self.norm_sq - 0.5 * self.spec.L_kappa * np.sum(self.coefficients ** 2))


def _u_of_x(spec, x):
    return np.asarray(deform(x, spec.kappa), dtype=float) / spec.L_kappa


def _x_of_u(spec, u):
    return np.asarray(restore(u * spec.L_kappa, spec.kappa), dtype=float)


def sine_series(spec, f, N, panels=None, order=16):
    """Coefficients c_1..c_N of f in the basis sin[n pi arcsinh(kx)/arcsinh(kL)].

    With u = arcsinh(kappa x)/arcsinh(kappa L) the measure d_kappa x equals
    L_kappa du, so ``c_n = 2 int_0^1 f(x(u)) sin(n pi u) du`` and
    ``R(N) = L_kappa int_0^1 (f - f_N)^2 du``.
    """
    if int(N) != N or N < 1:
        raise DomainError("N must be a positive integer")
    N = int(N)
    if panels is None:
        panels = max(64, 2 * N)
    u, w = composite_nodes(0.0, 1.0, panels, order)
    fu = np.asarray(f(_x_of_u(spec, u)), dtype=float)
    n = np.arange(1, N + 1)
    basis = np.sin(np.pi * np.multiply.outer(n, u))
    c = 2.0 * basis @ (w * fu)
    resid = fu - c @ basis
    R = spec.L_kappa * float(np.sum(w * resid ** 2))
    norm_sq = spec.L_kappa * float(np.sum(w * fu * fu))
    return SeriesApproximation(c, N, R, spec, norm_sq)


def unit_partial_sum(spec, x, N):
    """f_N(x) = 4/pi sum_{l=0}^{N} sin[(2l+1) pi u] / (2l+1), the series of f = 1."""
    u = _u_of_x(spec, np.asarray(x, dtype=float))
    m = 2 * np.arange(N + 1) + 1
    return (4.0 / np.pi) * (np.sin(np.pi * np.multiply.outer(u, m)) @ (1.0 / m))


def unit_series_error(spec, N, panels=None, order=16):
    """R(N) = int_0^L [1 - f_N(x)]^2 d_kappa x by direct quadrature in u."""
    if N < 0:
        raise DomainError("N must be >= 0")
    if panels is None:
        panels = max(128, 8 * N)
    u, w = composite_nodes(0.0, 1.0, panels, order)
    x = _x_of_u(spec, u)
    resid = 1.0 - unit_partial_sum(spec, x, N)
    return spec.L_kappa * float(np.sum(w * resid * resid))
