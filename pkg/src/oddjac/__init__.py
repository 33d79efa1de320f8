"""Parity of Jacobians of hyperelliptic curves over Q.

Local deficiency of y^2 = f(x) at every place, the parity verdict that
follows from counting deficient places, the densities of deficient curves,
and the finite group theory behind the square / twice-a-square dichotomy.
"""
from .locsolve import Curve, deficient_at_finite, deficient_at_infinity, has_point_over
from .parity import ParityReport, candidate_primes, deficient_places, parity

__all__ = ["Curve", "ParityReport", "candidate_primes", "deficient_at_finite", "deficient_at_infinity",
           "deficient_places", "has_point_over", "parity"]
__version__ = "0.1.0"
