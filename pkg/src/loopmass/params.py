"""Coulomb-gas parameter dictionary for the dilute O(n) loop model.

The loop fugacity n in [0, 2] fixes the vertex phase chi through
2 cos(6 chi) = n, the Gaussian coupling through g = 1 - 6 chi / pi and
the SLE parameter through kappa = 4 / g.  On the dilute branch used
throughout (kappa in [8/3, 4]) we take

    chi(n) = (-pi/2 + arcsin(n/2)) / 6,

which reproduces kappa(0) = 8/3, kappa(1) = 3, kappa(2) = 4 and the
small-n expansion kappa = 8/3 + 8n/(9 pi) + O(n^2).  All maps are exact
closed forms; there is no iteration anywhere in this module.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import RangeError

__all__ = [
    "ModelParams",
    "KacWeights",
    "params_from_n",
    "kac_weights",
    "twist_dimension",
    "x_general",
    "central_charge",
]


@dataclass(frozen=True)
class ModelParams:
    """Consistent (n, chi, g, kappa) tuple on the dilute branch."""

    n: float
    chi: float
    g: float
    kappa: float


@dataclass(frozen=True)
class KacWeights:
    """Dimensions attached to the twist operator at a given kappa."""

    h2: float
    h3: float
    x_twist: float


def _chi_branch(n: float) -> float:
    return (-math.pi / 2.0 + math.asin(n / 2.0)) / 6.0


def params_from_n(n: float) -> ModelParams:
    """Solve 2 cos(6 chi) = n on the dilute branch and derive g, kappa."""
    if not 0.0 <= n <= 2.0:
        raise RangeError(f"loop fugacity n={n} outside [0, 2]")
    chi = _chi_branch(n)
    # algebraically 1 - 6 chi / pi; this form keeps g exact at n = 0
    g = 1.5 - math.asin(n / 2.0) / math.pi
    return ModelParams(n=n, chi=chi, g=g, kappa=4.0 / g)


def kac_weights(p: ModelParams) -> KacWeights:
    h2 = 3.0 * p.kappa / 16.0 - 0.5
    h3 = p.kappa / 2.0 - 1.0
    return KacWeights(h2=h2, h3=h3, x_twist=2.0 * h2)


def twist_dimension(p: ModelParams) -> float:
    """Scaling dimension of the twist operator, 3 kappa / 8 - 1 = 2 h2."""
    return 3.0 * p.kappa / 8.0 - 1.0


def x_general(n: float, n_prime: float) -> float:
    """Dimension of the operator counting loops with weight n' instead of n.

    Evaluates 36 (chi'^2 - chi^2) / (2 pi^2 g) with chi' on the branch
    continuously connected to chi, i.e. chi'(n') = (-pi/2 + arcsin(n'/2))/6
    extended to n' in [-2, 2].  With this choice x(n, n) = 0 and
    x(n, -n) equals the twist dimension identically.
    """
    if not -2.0 <= n_prime <= 2.0:
        raise RangeError(f"n'={n_prime} outside [-2, 2]")
    p = params_from_n(n)
    chi_p = _chi_branch(n_prime)
    return 36.0 * (chi_p**2 - p.chi**2) / (2.0 * math.pi**2 * p.g)


def central_charge(kappa: float) -> float:
    """Central charge (3 kappa - 8)(6 - kappa) / (2 kappa)."""
    if kappa <= 0.0:
        raise RangeError(f"kappa={kappa} must be positive")
    return (3.0 * kappa - 8.0) * (6.0 - kappa) / (2.0 * kappa)
