"""
kappamech: quantum and classical mechanics of a particle whose mass varies
as m(x) = m0 / (1 + kappa^2 x^2), built on the kappa-deformed algebra.

Submodules
----------
kappa_core       kappa-exponential, logarithm, addition and derivatives
pdm_model        mass profile, potentials, canonical map, von Roos kinetic operator
classical_sim    symplectic trajectories, classical moments, WKB, virial split
spectral_solver  finite-difference eigenproblems in both coordinate frames
well_analytic    closed-form infinite well
osc_analytic     closed-form Mathews-Lakshmanan oscillator
kappa_fourier    deformed plane waves, transforms and sine series
crosscheck       analytic-versus-oracle comparison suites
cli              command-line front end
"""
__version__ = "0.1.0"

from .errors import ConfigurationError, ConvergenceError, DomainError  # noqa: E402

__all__ = ["__version__", "ConfigurationError", "ConvergenceError", "DomainError"]
