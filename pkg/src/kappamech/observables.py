"""Containers for expectation values shared by the analytic modules."""
from dataclasses import dataclass
import math


@dataclass(frozen=True)
class MomentSet:
    """First and second moments of x and p with their spreads.

    ``source`` records how the numbers were produced: ``"closed_form"``
    (reference expressions), ``"closed_form_corrected"`` or ``"quadrature"``.
    """

    mean_x: float
    mean_x2: float
    mean_p: float
    mean_p2: float
    source: str
    mean_k2: float = math.nan

    @property
    def delta_x(self):
        return math.sqrt(max(self.mean_x2 - self.mean_x ** 2, 0.0))

    @property
    def delta_p(self):
        return math.sqrt(max(self.mean_p2 - self.mean_p ** 2, 0.0))

    @property
    def delta_k(self):
        return math.sqrt(self.mean_k2)

    @property
    def product_xp(self):
        return self.delta_x * self.delta_p

    @property
    def product_xk(self):
        return self.delta_x * self.delta_k
