"""Werner-measure loop masses of the critical O(n) model at n -> 0.

The three bulk masses attached to a four-point configuration are
functions of the cross ratio eta alone,

    W_{14|23} = -(1/6 pi) ln|1 - eta| + q(eta, conj eta)
    W_{13|24} =  q(eta, conj eta)
    W_{12|34} = -(1/6 pi) ln|eta|     + q(eta, conj eta),

with q built from the eta_3f2 combination and the second conformal
block.  All outputs are independent of the lattice scale and of the
free normalization amplitudes, and invariant under Moebius maps.

The spin-2 extraction measures the stress-tensor content: with a probe
point circling z1, the mass of loops crossing both the (z1, z2) gate
and the (z3, z4) gate is W_{14|23} + W_{13|24}.  Its Fourier-coefficient
projection (1/pi) int dtheta e^{-2 i theta}, scaled by 5 / eps^2 per
gate, reproduces the Ward form of <T phi phi> and, for two shrinking
gates, <T~ T~> = (5/6 pi) / (z1 - z3)^4.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .correlators import (
    BulkConfig,
    Normalization,
    boundary_cross_ratio,
    cross_ratio,
    four_point,
    two_point,
)
from .errors import BoundaryContact, CutError, EpsTooLarge, RangeError, ScaleError
from .params import params_from_n
from .specfun import CUT_TOL, eta_3f2, hyp2f1

__all__ = [
    "SeparationPattern",
    "MassValue",
    "q_fn",
    "q_two",
    "w_bulk",
    "w_from_correlators",
    "two_point_log_mass",
    "w_boundary",
    "spin2_component",
    "ttilde_two_point",
    "boundary_far_field_report",
    "PAIR_12",
    "PAIR_13",
    "PAIR_14",
]

# 2^(1/3) pi / (3 sqrt(3) Gamma(1/6)^2 Gamma(4/3)^2)
Q_BLOCK_COEFF = (
    2.0 ** (1.0 / 3.0)
    * math.pi
    / (3.0 * math.sqrt(3.0) * math.gamma(1.0 / 6.0) ** 2 * math.gamma(4.0 / 3.0) ** 2)
)

# Gamma(2/3)^2 / (6 pi Gamma(4/3))
BOUNDARY_BLOCK_COEFF = math.gamma(2.0 / 3.0) ** 2 / (6.0 * math.pi * math.gamma(4.0 / 3.0))

_SIXPI = 6.0 * math.pi
_REALITY_TOL = 1e-8


@dataclass(frozen=True)
class SeparationPattern:
    """Which marked points a loop encloses.

    Bulk patterns on m marks are identified with their complement (the
    outer face of a finite domain standing in for the point at infinity
    on the sphere); boundary patterns carry no identification.
    """

    enclosed: frozenset
    n_marks: int = 4
    boundary: bool = False

    @staticmethod
    def bulk(enclosed, n_marks: int = 4) -> "SeparationPattern":
        s = frozenset(int(k) for k in enclosed)
        full = frozenset(range(1, n_marks + 1))
        if not s <= full:
            raise ValueError(f"enclosed set {set(s)} not within marks 1..{n_marks}")
        comp = full - s
        canon = min((s, comp), key=lambda t: (len(t), tuple(sorted(t))))
        return SeparationPattern(enclosed=canon, n_marks=n_marks, boundary=False)

    @staticmethod
    def half_plane(enclosed) -> "SeparationPattern":
        s = frozenset(int(k) for k in enclosed)
        if not s <= {1, 2}:
            raise ValueError(f"boundary pattern {set(s)} not within marks {{1, 2}}")
        return SeparationPattern(enclosed=s, n_marks=2, boundary=True)

    def label(self) -> str:
        inside = "".join(str(k) for k in sorted(self.enclosed))
        if self.boundary:
            return f"({inside})" if inside else "()"
        outside = "".join(
            str(k) for k in range(1, self.n_marks + 1) if k not in self.enclosed
        )
        return f"{inside or '-'}|{outside or '-'}"


PAIR_12 = SeparationPattern.bulk({1, 2})
PAIR_13 = SeparationPattern.bulk({1, 3})
PAIR_14 = SeparationPattern.bulk({1, 4})


@dataclass(frozen=True)
class MassValue:
    value: float
    pattern: SeparationPattern


def _check_cut_array(z: np.ndarray):
    bad = (np.abs(z.imag) <= CUT_TOL) & (z.real >= 1.0 - CUT_TOL)
    if np.any(bad):
        raise CutError("cross ratio on the cut [1, inf)")


def q_two(u: complex, v: complex) -> complex:
    """Two-variable form of q; physical calls set v = conj(u)."""
    u, v = complex(u), complex(v)
    cu = _pow_principal(u * (1.0 - u), 1.0 / 3.0)
    cv = _pow_reflected(v * (1.0 - v), 1.0 / 3.0)
    fu = hyp2f1(2.0 / 3.0, 1.0, 4.0 / 3.0, u)
    fv = hyp2f1(2.0 / 3.0, 1.0, 4.0 / 3.0, v)
    return -(eta_3f2(u) + eta_3f2(v)) / (24.0 * math.pi) + Q_BLOCK_COEFF * cu * cv * fu * fv


def _pow_principal(w: complex, p: float) -> complex:
    if w == 0:
        return 0.0 + 0.0j
    return complex(np.exp(p * np.log(complex(w))))


def _pow_reflected(w: complex, p: float) -> complex:
    # arg in [-pi, pi): pairs with the principal branch across sectors
    if w == 0:
        return 0.0 + 0.0j
    w = complex(w)
    if w.imag == 0.0 and w.real < 0.0:
        return complex(np.exp(p * complex(math.log(-w.real), -math.pi)))
    return complex(np.exp(p * np.log(w)))


def q_fn(u, v=None):
    """q(eta, conj eta): the conformally invariant core of the bulk masses.

    Accepts a complex scalar or ndarray.  The result is real for
    conjugate sector arguments; reality is asserted and the real part
    returned.
    """
    if isinstance(u, np.ndarray):
        z = np.asarray(u, dtype=complex)
        _check_cut_array(z)
        f = hyp2f1(2.0 / 3.0, 1.0, 4.0 / 3.0, z)
        e = eta_3f2(z)
        val = -2.0 * e.real / (24.0 * math.pi) + Q_BLOCK_COEFF * np.abs(
            z * (1.0 - z)
        ) ** (2.0 / 3.0) * np.abs(f) ** 2
        return val
    u = complex(u)
    v = u.conjugate() if v is None else complex(v)
    val = q_two(u, v)
    if abs(val.imag) > _REALITY_TOL * max(abs(val), 1.0):
        raise ArithmeticError(f"q lost reality at ({u}, {v}): {val}")
    return float(val.real)


def _mass_from_eta(pattern: SeparationPattern, eta: complex) -> float:
    q = q_fn(eta)
    if pattern == PAIR_14:
        return -math.log(abs(1.0 - eta)) / _SIXPI + q
    if pattern == PAIR_13:
        return q
    if pattern == PAIR_12:
        return -math.log(abs(eta)) / _SIXPI + q
    raise ValueError(f"pattern {pattern.label()} has no finite continuum mass")


def w_bulk(pattern: SeparationPattern, cfg: BulkConfig) -> MassValue:
    """Mass of single loops separating one marked pair from the other."""
    if pattern.boundary or pattern.n_marks != 4 or len(pattern.enclosed) != 2:
        raise ValueError(
            f"w_bulk needs a two-sided bulk pattern, got {pattern.label()}"
        )
    eta = cross_ratio(*cfg.points()).u
    if abs(eta.imag) <= CUT_TOL and eta.real >= 1.0 - CUT_TOL:
        raise CutError(f"cross ratio {eta} on the cut; permute the labels first")
    return MassValue(value=_mass_from_eta(pattern, eta), pattern=pattern)


_COMBO_SIGNS = {
    # pattern -> signs of (C12*C34, C13*C24, C14*C23) in (L +- ...)/(8n)
    frozenset({1, 4}): (-1.0, -1.0, +1.0),
    frozenset({1, 3}): (-1.0, +1.0, -1.0),
    frozenset({1, 2}): (+1.0, -1.0, -1.0),
}


def w_from_correlators(
    pattern: SeparationPattern,
    cfg: BulkConfig,
    n_small: float,
    norm: Normalization = Normalization(),
) -> float:
    """Mass reassembled from partly-connected correlators at small n.

    Builds (L +- C_ij C_kl +- ...)/(8 n) from the four-point and
    two-point functions sharing one normalization; the amplitude and its
    slope cancel exactly, and the result differs from w_bulk by O(n).
    """
    if not 0.0 < n_small <= 1e-3:
        raise RangeError(f"n_small={n_small} outside (0, 1e-3]")
    if pattern.boundary or len(pattern.enclosed) != 2:
        raise ValueError(f"no correlator combination for {pattern.label()}")
    p = params_from_n(n_small)
    z1, z2, z3, z4 = cfg.points()
    amplitude = norm.bulk_amplitude(n_small)
    L = four_point(cfg, p, norm) / amplitude
    c = {
        (i, j): two_point(z, w, p, cfg.a)
        for (i, j), (z, w) in {
            (1, 2): (z1, z2),
            (3, 4): (z3, z4),
            (1, 3): (z1, z3),
            (2, 4): (z2, z4),
            (1, 4): (z1, z4),
            (2, 3): (z2, z3),
        }.items()
    }
    s12, s13, s14 = _COMBO_SIGNS[pattern.enclosed]
    combo = (
        L
        + s12 * c[(1, 2)] * c[(3, 4)]
        + s13 * c[(1, 3)] * c[(2, 4)]
        + s14 * c[(1, 4)] * c[(2, 3)]
    )
    return combo / (8.0 * n_small)


def two_point_log_mass(z1: complex, z2: complex, a: float = 1.0) -> float:
    """(1/3 pi) ln|z12 / a|: weighted count of loops separating the points."""
    r = abs(complex(z1) - complex(z2))
    if r <= a:
        raise ScaleError(f"separation {r} not larger than the lattice scale {a}")
    return math.log(r / a) / (3.0 * math.pi)


BOUNDARY_PATTERN = SeparationPattern.half_plane({1, 2})


def _w_boundary_value(eta: float) -> float:
    # real-branch logarithm: the printed ln(eta(1-eta)) has a negative
    # argument on the whole physical domain eta < 0
    e3 = eta_3f2(eta)
    f = hyp2f1(2.0 / 3.0, 1.0, 4.0 / 3.0, eta)
    return (
        -math.log(abs(eta * (1.0 - eta))) / (12.0 * math.pi)
        - complex(e3).real / (12.0 * math.pi)
        + BOUNDARY_BLOCK_COEFF * (-eta * (1.0 - eta)) ** (1.0 / 3.0) * complex(f).real
    )


def w_boundary(z1: complex, z2: complex) -> MassValue:
    """Mass of loops around both points in the upper half plane."""
    eta = boundary_cross_ratio(z1, z2)
    return MassValue(value=_w_boundary_value(eta), pattern=BOUNDARY_PATTERN)


def boundary_far_field_report(eta_values=None) -> dict:
    """Diagnostic profile of the boundary mass as eta -> -infinity.

    The boundary-condition argument suggests the mass should vanish as
    the points approach the wall; the printed formula instead levels off
    (its two logarithmic pieces cancel).  This report tabulates the
    value, the small-eta reference -(1/12 pi) ln|eta| and the measured
    local slope d(value)/d(ln|eta|) so the far-field behaviour can be
    inspected without altering the formula.
    """
    if eta_values is None:
        eta_values = [-(10.0**k) for k in range(1, 7)]
    etas = sorted(float(e) for e in eta_values)
    if any(e >= 0.0 for e in etas):
        raise BoundaryContact("boundary cross ratios must be negative")
    rows = []
    for e in etas:
        rows.append(
            {
                "eta": e,
                "value": _w_boundary_value(e),
                "log_reference": -math.log(abs(e)) / (12.0 * math.pi),
            }
        )
    slopes = []
    for r0, r1 in zip(rows, rows[1:]):
        dlog = math.log(abs(r0["eta"])) - math.log(abs(r1["eta"]))
        slopes.append((r0["value"] - r1["value"]) / dlog)
    return {
        "rows": rows,
        "far_slope_per_log_eta": slopes[0] if slopes else float("nan"),
        "note": (
            "printed formula levels off at large |eta|; the log terms cancel "
            "and no +/-(1/6 pi) ln|eta| growth survives"
        ),
    }


# ----------------------------------------------------------------------
# stress-tensor extraction
# ----------------------------------------------------------------------

def _gate_mass_array(eta: np.ndarray) -> np.ndarray:
    """Mass of loops crossing both marked gates: W_{14|23} + W_{13|24}."""
    return -np.log(np.abs(1.0 - eta)) / _SIXPI + 2.0 * q_fn(eta)


def _require_small_eps(eps: float, minsep: float):
    if eps <= 0.0:
        raise EpsTooLarge("probe radius must be positive")
    if eps > 0.05 * minsep:
        raise EpsTooLarge(
            f"probe radius {eps} too large for minimal separation {minsep}"
        )


def _spin2_single(z1: complex, z3: complex, z4: complex, eps: float, nodes: int) -> complex:
    theta = 2.0 * math.pi * np.arange(nodes) / nodes
    z2 = z1 + eps * np.exp(1j * theta)
    eta = (z1 - z2) * (z3 - z4) / ((z1 - z3) * (z2 - z4))
    mass = _gate_mass_array(eta)
    # (1/pi) int dtheta e^{-2 i theta} (.), trapezoid on the periodic grid
    proj = np.sum(np.exp(-2j * theta) * mass) * (2.0 * math.pi / nodes) / math.pi
    return 5.0 * proj / eps**2


def _richardson(v1: complex, v2: complex, e1: float, e2: float, power: float) -> complex:
    w1, w2 = e1**power, e2**power
    return (v2 * w1 - v1 * w2) / (w1 - w2)


def spin2_component(
    z1: complex,
    z3: complex,
    z4: complex,
    eps: float,
    eps2: float | None = None,
    nodes: int = 256,
) -> complex:
    """Spin-2 angular Fourier component of the gate mass around z1.

    Probes with z2 = z1 + eps e^{i theta}; with a second radius the two
    values are Richardson-extrapolated in eps^(2/3), the leading
    correction from the non-integer block powers.
    """
    if nodes < 256:
        raise ValueError("angular quadrature needs at least 256 nodes")
    minsep = min(abs(z1 - z3), abs(z1 - z4), abs(z3 - z4))
    _require_small_eps(eps, minsep)
    v1 = _spin2_single(z1, z3, z4, eps, nodes)
    if eps2 is None:
        return v1
    _require_small_eps(eps2, minsep)
    v2 = _spin2_single(z1, z3, z4, eps2, nodes)
    return _richardson(v1, v2, eps, eps2, 2.0 / 3.0)


def _ttilde_single(z1: complex, z3: complex, eps: float, nodes: int) -> complex:
    theta = 2.0 * math.pi * np.arange(nodes) / nodes
    t12, t34 = np.meshgrid(theta, theta, indexing="ij")
    z2 = z1 + eps * np.exp(1j * t12)
    z4 = z3 + eps * np.exp(1j * t34)
    eta = (z1 - z2) * (z3 - z4) / ((z1 - z3) * (z2 - z4))
    mass = _gate_mass_array(eta.ravel()).reshape(eta.shape)
    phase = np.exp(-2j * (t12 + t34))
    proj = np.sum(phase * mass) * (2.0 * math.pi / nodes) ** 2 / math.pi**2
    return 25.0 * proj / eps**4


def ttilde_two_point(
    z1: complex,
    z3: complex,
    eps: float,
    eps2: float | None = None,
    nodes: int = 256,
) -> complex:
    """Two-point function of the spin-2 gate density at z1 and z3.

    Expected to approach (c'(0)/2)/(z1-z3)^4 with c'(0) = 5/(3 pi).
    """
    if nodes < 256:
        raise ValueError("angular quadrature needs at least 256 nodes")
    minsep = abs(complex(z1) - complex(z3))
    _require_small_eps(eps, minsep)
    v1 = _ttilde_single(z1, z3, eps, nodes)
    if eps2 is None:
        return v1
    _require_small_eps(eps2, minsep)
    v2 = _ttilde_single(z1, z3, eps2, nodes)
    return _richardson(v1, v2, eps, eps2, 2.0 / 3.0)
