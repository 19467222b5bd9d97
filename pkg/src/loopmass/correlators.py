"""Closed-form twist-operator correlators on the sphere and half plane.

The four-point function factorizes over a holomorphic and an
antiholomorphic sector.  Both sectors are carried as independent
variables: ``xi_blocks(u, v, kappa)`` and the two-variable correlator
used by the PDE checks never assume v = conj(u), so the holomorphic
equations can be probed by varying one sector alone.  Physical
evaluation pins v = conj(u), where the construction is real by Schwarz
symmetry; an assertion enforces this.

Powers of u(1-u) in the u-sector use the principal branch and the
v-sector uses the reflected branch (principal branch of the conjugate,
conjugated back), so that conjugate pairs multiply to |u(1-u)|^(2 h3)
even when the cross ratio is negative real.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from .errors import (
    BoundaryContact,
    CoincidentPoints,
    CutError,
    DegenerateKappa,
    GammaPole,
)
from .params import ModelParams, central_charge, kac_weights
from .specfun import CUT_TOL, gamma, hyp2f1

__all__ = [
    "BulkConfig",
    "CrossRatioPair",
    "Normalization",
    "cross_ratio",
    "coeff_B",
    "boundary_coeff_B",
    "xi_blocks",
    "four_point",
    "two_point",
    "ising_four_point",
    "boundary_two_point",
    "ope_eta2_coefficient",
    "ope_inferred_central_charge",
    "two_variable_four_point",
]

_REALITY_TOL = 1e-8


@dataclass(frozen=True)
class BulkConfig:
    """Four marked plane points plus the lattice-spacing scale a."""

    z1: complex
    z2: complex
    z3: complex
    z4: complex
    a: float = 1.0

    def __post_init__(self):
        if self.a <= 0.0:
            raise ValueError(f"lattice spacing a={self.a} must be positive")
        pts = self.points()
        scale = max(abs(p - q) for i, p in enumerate(pts) for q in pts[i + 1 :])
        if scale == 0.0 or any(
            abs(p - q) <= 1e-12 * scale
            for i, p in enumerate(pts)
            for q in pts[i + 1 :]
        ):
            raise CoincidentPoints("marked points must be pairwise distinct")

    def points(self) -> tuple[complex, complex, complex, complex]:
        return (complex(self.z1), complex(self.z2), complex(self.z3), complex(self.z4))

    def min_separation(self) -> float:
        pts = self.points()
        return min(abs(p - q) for i, p in enumerate(pts) for q in pts[i + 1 :])


@dataclass(frozen=True)
class CrossRatioPair:
    """Holomorphic- and antiholomorphic-sector cross ratios."""

    u: complex
    v: complex


@dataclass(frozen=True)
class Normalization:
    """Free amplitude data: A(n) = A + varrho n bulk, A + sigma n boundary."""

    A: float = 1.0
    varrho: float = 0.0
    sigma: float = 0.0

    def __post_init__(self):
        if self.A <= 0.0:
            raise ValueError("normalization A must be positive")

    def bulk_amplitude(self, n: float) -> float:
        return self.A + self.varrho * n

    def boundary_amplitude(self, n: float) -> float:
        return self.A + self.sigma * n


def cross_ratio(z1: complex, z2: complex, z3: complex, z4: complex) -> CrossRatioPair:
    """eta = z12 z34 / (z13 z24) and its antiholomorphic partner conj(eta)."""
    pts = (complex(z1), complex(z2), complex(z3), complex(z4))
    scale = max(abs(p - q) for i, p in enumerate(pts) for q in pts[i + 1 :])
    if scale == 0.0 or any(
        abs(p - q) <= 1e-12 * scale for i, p in enumerate(pts) for q in pts[i + 1 :]
    ):
        raise CoincidentPoints("cross ratio of coincident points")
    z1, z2, z3, z4 = pts
    u = (z1 - z2) * (z3 - z4) / ((z1 - z3) * (z2 - z4))
    return CrossRatioPair(u=u, v=u.conjugate())


def _log_principal(w: complex) -> complex:
    """Principal log, insensitive to the sign of an exactly-zero imag part.

    Real negative arguments always take arg = +pi; otherwise stray -0.0
    imaginary parts (from conjugating axis-aligned configurations) flip
    the branch and break smoothness along real stencil directions.
    """
    if w.imag == 0.0:
        r = w.real
        return complex(math.log(abs(r)), 0.0 if r > 0.0 else math.pi)
    return cmath.log(w)


def _pow_u(w: complex, p: float) -> complex:
    """Principal power (arg in (-pi, pi]), with 0^p = 0 for p > 0."""
    if w == 0:
        return 0.0 + 0.0j
    return cmath.exp(p * _log_principal(w))


def _pow_v(w: complex, p: float) -> complex:
    """Power with arg taken in [-pi, pi): the branch reached from below.

    Paired with the principal branch in the other sector, phases cancel
    for conjugate arguments even on the negative real axis.
    """
    if w == 0:
        return 0.0 + 0.0j
    if w.imag == 0.0 and w.real < 0.0:
        return cmath.exp(p * complex(math.log(-w.real), -math.pi))
    return cmath.exp(p * cmath.log(w))


def coeff_B(kappa: float) -> float:
    """Block coefficient fixed by permutation consistency of the four-point.

    Evaluates the gamma-function ratio
    [G(1-k/4)^2 G(k/4)^2 - G(2-k/2)^2 G(k/2-1)^2] G(3k/4-1)^2
    / [G(k/2)^2 G(k/2-1)^2 G(1-k/4)^2].
    """
    try:
        num = (
            gamma(1.0 - kappa / 4.0) ** 2 * gamma(kappa / 4.0) ** 2
            - gamma(2.0 - kappa / 2.0) ** 2 * gamma(kappa / 2.0 - 1.0) ** 2
        ) * gamma(3.0 * kappa / 4.0 - 1.0) ** 2
        den = (
            gamma(kappa / 2.0) ** 2
            * gamma(kappa / 2.0 - 1.0) ** 2
            * gamma(1.0 - kappa / 4.0) ** 2
        )
    except Exception as exc:
        raise GammaPole(f"gamma pole in B(kappa) at kappa={kappa}") from exc
    return float((num / den).real)


def _rgamma(x: float) -> complex:
    """1/Gamma(x), zero at the poles."""
    if abs(x.imag if isinstance(x, complex) else 0.0) <= 1e-14:
        xr = x.real if isinstance(x, complex) else x
        if xr <= 0.5 and abs(xr - round(xr)) <= 1e-12:
            return 0.0 + 0.0j
    return 1.0 / gamma(x)


def boundary_coeff_B(kappa: float) -> float:
    """Boundary block coefficient that keeps only the second block far away.

    The printed ratio carries removable common factors G(1-k/2) and
    G(1-k/4); they are cancelled here so the formula stays finite on the
    whole dilute branch: -G(2-k/2) G(k/4) / (G(k/2) G(2-3k/4)), with the
    denominator poles handled through the reciprocal (zero, not error).
    """
    try:
        val = -(
            gamma(2.0 - kappa / 2.0)
            * gamma(kappa / 4.0)
            * _rgamma(kappa / 2.0)
            * _rgamma(2.0 - 3.0 * kappa / 4.0)
        )
    except Exception as exc:
        raise GammaPole(f"gamma pole in boundary B(kappa) at kappa={kappa}") from exc
    return float(val.real)


def _block_f1(kappa: float, w) -> complex:
    return hyp2f1(1.0 - kappa / 4.0, 2.0 - 3.0 * kappa / 4.0, 2.0 - kappa / 2.0, w)

def _block_f2(kappa: float, w) -> complex:
    return hyp2f1(kappa / 4.0, 3.0 * kappa / 4.0 - 1.0, kappa / 2.0, w)


def xi_blocks(u: complex, v: complex, kappa: float) -> complex:
    """Two-variable block combination F1(u)F1(v) + B (u(1-u) v(1-v))^h3 F2(u)F2(v).

    For v = conj(u) the result is real and equals the |.|^2 form of the
    physical four-point function.
    """
    u, v = complex(u), complex(v)
    h3 = kappa / 2.0 - 1.0
    B = coeff_B(kappa)
    first = _block_f1(kappa, u) * _block_f1(kappa, v)
    second = (
        B
        * _pow_u(u * (1.0 - u), h3)
        * _pow_v(v * (1.0 - v), h3)
        * _block_f2(kappa, u)
        * _block_f2(kappa, v)
    )
    return first + second


def _xi_physical(u: complex, kappa: float) -> float:
    val = xi_blocks(u, u.conjugate(), kappa)
    if abs(val.imag) > _REALITY_TOL * max(abs(val), 1.0):
        raise ArithmeticError(
            f"block combination lost reality at u={u}: {val}"
        )
    return val.real


def four_point(cfg: BulkConfig, p: ModelParams, norm: Normalization) -> float:
    """|z13 z24 a^2 / (z12 z34 z23 z14)|^(4 h2) A(n) xi(eta, conj eta, kappa)."""
    z1, z2, z3, z4 = cfg.points()
    u = cross_ratio(z1, z2, z3, z4).u
    h2 = kac_weights(p).h2
    pref = abs(
        (z1 - z3) * (z2 - z4) * cfg.a**2 / ((z1 - z2) * (z3 - z4) * (z2 - z3) * (z1 - z4))
    ) ** (4.0 * h2)
    return pref * norm.bulk_amplitude(p.n) * _xi_physical(u, p.kappa)


def two_point(z1: complex, z2: complex, p: ModelParams, a: float = 1.0) -> float:
    """|z12 / a|^(2 - 3/g), the scale-invariant twist two-point function."""
    r = abs(complex(z1) - complex(z2))
    if r == 0.0:
        raise CoincidentPoints("two-point function of coincident points")
    return (r / a) ** (2.0 - 3.0 / p.g)


def ising_four_point(cfg: BulkConfig, norm: Normalization) -> float:
    """Closed form at kappa = 3: (A/2) |...|^(1/4) (|1+sqrt(eta)| + |1-sqrt(eta)|)."""
    z1, z2, z3, z4 = cfg.points()
    u = cross_ratio(z1, z2, z3, z4).u
    if abs(u.imag) <= CUT_TOL and u.real >= 1.0 - CUT_TOL:
        raise CutError(f"cross ratio {u} on the cut [1, inf)")
    root = cmath.sqrt(u)
    pref = abs(
        (z1 - z3) * (z2 - z4) * cfg.a**2 / ((z1 - z2) * (z3 - z4) * (z2 - z3) * (z1 - z4))
    ) ** 0.25
    amplitude = norm.bulk_amplitude(1.0)
    return amplitude / 2.0 * pref * (abs(1.0 + root) + abs(1.0 - root))


def boundary_cross_ratio(z1: complex, z2: complex) -> float:
    """(z1-z2)(z1*-z2*) / ((z1-z1*)(z2-z2*)); real and negative in the UHP."""
    z1, z2 = complex(z1), complex(z2)
    if z1.imag <= 0.0 or z2.imag <= 0.0:
        raise BoundaryContact("points must lie strictly in the upper half plane")
    if abs(z1 - z2) == 0.0:
        raise CoincidentPoints("boundary two-point of coincident points")
    eta = -abs(z1 - z2) ** 2 / (4.0 * z1.imag * z2.imag)
    assert eta < 0.0
    return eta


def boundary_two_point(
    z1: complex, z2: complex, p: ModelParams, norm: Normalization, a: float = 1.0
) -> float:
    """Two-point function of twist operators in the upper half plane.

    Image points on the real axis turn this into the bulk four-point
    problem with a single real negative cross ratio; the block
    combination uses the boundary coefficient that keeps only the second
    block as the points recede from each other.
    """
    z1, z2 = complex(z1), complex(z2)
    eta = boundary_cross_ratio(z1, z2)
    y1, y2 = z1.imag, z2.imag
    mu = 4.0 * y1 * y2 * a**2 / (abs(z1 - z2) ** 2 * abs(z2 - z1.conjugate()) ** 2)
    h2 = kac_weights(p).h2
    h3 = kac_weights(p).h3
    f1 = _block_f1(p.kappa, eta)
    f2 = _block_f2(p.kappa, eta)
    blocks = f1 + boundary_coeff_B(p.kappa) * (-eta * (1.0 - eta)) ** h3 * f2
    val = mu ** (2.0 * h2) * norm.boundary_amplitude(p.n) * blocks
    val = complex(val)
    if abs(val.imag) > _REALITY_TOL * max(abs(val), 1.0):
        raise ArithmeticError(f"boundary correlator lost reality: {val}")
    return val.real


def ope_eta2_coefficient(kappa: float) -> float:
    """Coefficient of eta^2 in the short-distance channel of the first block.

    Equals the eta^2 Taylor coefficient of (1-eta)^(-2 h2) F1(eta); the
    stress-tensor term it contains reproduces the central charge through
    c = 2 h2^2 / coefficient.
    """
    if abs(kappa - 4.0) <= 1e-9:
        raise DegenerateKappa("kappa=4 degenerates the first-block parameters")
    h2 = 3.0 * kappa / 16.0 - 0.5
    a1 = 1.0 - kappa / 4.0
    b1 = 2.0 - 3.0 * kappa / 4.0
    c1 = 2.0 - kappa / 2.0
    return (
        h2 * (2.0 * h2 + 1.0)
        + 2.0 * h2 * a1 * b1 / c1
        + a1 * (a1 + 1.0) * b1 * (b1 + 1.0) / (2.0 * c1 * (c1 + 1.0))
    )


def ope_inferred_central_charge(kappa: float) -> float:
    """Central charge solved from the eta^2 coefficient, c = 2 h2^2 / coeff."""
    h2 = 3.0 * kappa / 16.0 - 0.5
    if h2 == 0.0:
        return 0.0
    return 2.0 * h2**2 / ope_eta2_coefficient(kappa)


# ----------------------------------------------------------------------
# two-variable correlator for the PDE checks
# ----------------------------------------------------------------------

def _sector_prefactor(z, a: float, h2: float) -> complex:
    z1, z2, z3, z4 = z
    log_sum = (
        _log_principal(z1 - z3)
        + _log_principal(z2 - z4)
        + 2.0 * math.log(a)
        - _log_principal(z1 - z2)
        - _log_principal(z3 - z4)
        - _log_principal(z2 - z3)
        - _log_principal(z1 - z4)
    )
    return cmath.exp(2.0 * h2 * log_sum)


def two_variable_four_point(zs, ws, p: ModelParams, norm: Normalization, a: float = 1.0) -> complex:
    """Four-point correlator with independent holomorphic points zs and
    antiholomorphic points ws; physical configurations set ws = conj(zs).
    """
    zs = [complex(z) for z in zs]
    ws = [complex(w) for w in ws]
    h2 = kac_weights(p).h2
    uz = (zs[0] - zs[1]) * (zs[2] - zs[3]) / ((zs[0] - zs[2]) * (zs[1] - zs[3]))
    uw = (ws[0] - ws[1]) * (ws[2] - ws[3]) / ((ws[0] - ws[2]) * (ws[1] - ws[3]))
    blocks = xi_blocks(uz, uw, p.kappa)
    return (
        _sector_prefactor(zs, a, h2)
        * _sector_prefactor(ws, a, h2)
        * norm.bulk_amplitude(p.n)
        * blocks
    )
