"""Finite-difference verification of the differential equations.

Holomorphic derivatives are realized literally: the correlators are
carried in their two-variable form (independent holomorphic and
antiholomorphic point sets), and a stencil varies one sector while the
other stays pinned.  Residuals are reported normalized by the largest
individual operator term, so tolerances are scale free, together with
the measured convergence order log2(res(h) / res(h/2)).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from .correlators import (
    BulkConfig,
    Normalization,
    _log_principal,
    boundary_coeff_B,
    two_variable_four_point,
)
from .errors import StepTooLarge
from .mu_mass import PAIR_14, q_two, w_bulk
from .params import ModelParams, kac_weights
from .specfun import hyp2f1

__all__ = [
    "StencilSpec",
    "ResidualReport",
    "bpz_residual",
    "w_subtracted",
    "w_pde_residual",
    "w_real_pde_residual",
    "boundary_bpz_residual",
    "laplacian_w_subtracted",
]

_TINY = 1e-300


@dataclass(frozen=True)
class StencilSpec:
    """Finite-difference step and accuracy order."""

    h: float
    order: int = 2
    direction: str = "holomorphic"

    def __post_init__(self):
        if self.h <= 0.0:
            raise ValueError("stencil step must be positive")
        if self.order not in (2, 4):
            raise ValueError("stencil order must be 2 or 4")

    def validated(self, min_separation: float) -> "StencilSpec":
        if self.h >= 1e-2 * min_separation:
            raise StepTooLarge(
                f"h={self.h} not below 1e-2 x minimal separation {min_separation}"
            )
        return self


@dataclass(frozen=True)
class ResidualReport:
    residual: float
    scale: float
    measured_order: float

    @property
    def normalized(self) -> float:
        return self.residual / max(self.scale, _TINY)


def _d1(f, x, h, order):
    if order == 2:
        return (f(x + h) - f(x - h)) / (2.0 * h)
    return (-f(x + 2 * h) + 8.0 * f(x + h) - 8.0 * f(x - h) + f(x - 2 * h)) / (12.0 * h)


def _d2(f, x, h, order):
    if order == 2:
        return (f(x + h) - 2.0 * f(x) + f(x - h)) / h**2
    return (
        -f(x + 2 * h)
        + 16.0 * f(x + h)
        - 30.0 * f(x)
        + 16.0 * f(x - h)
        - f(x - 2 * h)
    ) / (12.0 * h**2)


def _bpz_terms(G, pts, j, kappa, h2, h, order):
    """Terms of [d^2_j - (kappa/4) sum_{i != j} (h2/(z_ij)^2 - d_i/z_ij)] G."""

    def shifted(i):
        def f(x):
            q = list(pts)
            q[i] = x
            return G(q)

        return f

    G0 = G(list(pts))
    terms = [_d2(shifted(j), pts[j], h, order)]
    for i in range(4):
        if i == j:
            continue
        dz = pts[i] - pts[j]
        terms.append(-(kappa / 4.0) * h2 * G0 / dz**2)
        terms.append((kappa / 4.0) * _d1(shifted(i), pts[i], h, order) / dz)
    return terms


def _residual_report(term_fn, h, order) -> ResidualReport:
    def raw(step):
        terms = term_fn(step)
        return abs(sum(terms)), max(abs(t) for t in terms)

    r1, scale = raw(h)
    r2, scale2 = raw(h / 2.0)
    n1 = r1 / max(scale, _TINY)
    n2 = r2 / max(scale2, _TINY)
    order_meas = math.log2(max(n1, _TINY) / max(n2, _TINY)) if n1 > 0.0 else float(order)
    return ResidualReport(residual=r1, scale=scale, measured_order=order_meas)


def bpz_residual(
    j: int,
    cfg: BulkConfig,
    p: ModelParams,
    spec: StencilSpec,
    sector: str = "holomorphic",
    norm: Normalization = Normalization(),
) -> ResidualReport:
    """Level-two null-state equation applied to the four-point function.

    j is the 1-based label of the doubly-differentiated point.  The
    holomorphic sector varies the z-points with the conjugate sector
    frozen; sector="antiholomorphic" checks the conjugate equation.
    """
    if j not in (1, 2, 3, 4):
        raise ValueError("point label j must be in 1..4")
    spec = spec.validated(cfg.min_separation())
    zs = list(cfg.points())
    ws = [z.conjugate() for z in zs]
    h2 = kac_weights(p).h2

    if sector == "holomorphic":
        base, frozen = zs, ws

        def G(q):
            return two_variable_four_point(q, frozen, p, norm, cfg.a)

    elif sector == "antiholomorphic":
        base, frozen = ws, zs

        def G(q):
            return two_variable_four_point(frozen, q, p, norm, cfg.a)

    else:
        raise ValueError(f"unknown sector {sector!r}")

    def terms(step):
        return _bpz_terms(G, base, j - 1, p.kappa, h2, step, spec.order)

    return _residual_report(terms, spec.h, spec.order)


def _subtraction_chiral(z) -> complex:
    z1, z2, z3, z4 = z
    return (
        -2.0 * _log_principal(z4 - z1)
        + _log_principal(z3 - z4)
        + _log_principal(z2 - z4)
        - _log_principal(z2 - z3)
    )


def w_subtracted(cfg: BulkConfig) -> float:
    """W_{14|23} minus its harmonic log subtraction; real valued."""
    sub = 2.0 * _subtraction_chiral(cfg.points()).real / (24.0 * math.pi)
    return w_bulk(PAIR_14, cfg).value - sub


def _w14_two_variable(zs, ws) -> complex:
    uz = (zs[0] - zs[1]) * (zs[2] - zs[3]) / ((zs[0] - zs[2]) * (zs[1] - zs[3]))
    uw = (ws[0] - ws[1]) * (ws[2] - ws[3]) / ((ws[0] - ws[2]) * (ws[1] - ws[3]))
    logs = _log_principal(1.0 - uz) + _log_principal(1.0 - uw)
    return -logs / (12.0 * math.pi) + q_two(uz, uw)


def w_pde_rhs(z) -> complex:
    """Inhomogeneous side of the holomorphic mass equation."""
    z1, z2, z3, z4 = z
    return (
        1.0 / (z4 - z1) ** 2
        + (1.0 / (z3 - z1)) * (1.0 / (z3 - z4) + 1.0 / (z2 - z3))
        + (1.0 / (z2 - z1)) * (1.0 / (z2 - z4) + 1.0 / (z3 - z2))
        + (1.0 / (z4 - z1)) * (1.0 / (z4 - z3) + 1.0 / (z4 - z2))
    ) / (24.0 * math.pi)


def w_pde_residual(
    cfg: BulkConfig, spec: StencilSpec, sector: str = "holomorphic"
) -> ResidualReport:
    """[(3/2) d^2_{z1} + sum_i d_{zi}/(z_i - z_1)] W_{14|23} against its RHS."""
    spec = spec.validated(cfg.min_separation())
    zs = list(cfg.points())
    ws = [z.conjugate() for z in zs]

    if sector == "holomorphic":
        base, frozen = zs, ws

        def W(q):
            return _w14_two_variable(q, frozen)

    elif sector == "antiholomorphic":
        base, frozen = ws, zs

        def W(q):
            return _w14_two_variable(frozen, q)

    else:
        raise ValueError(f"unknown sector {sector!r}")

    def terms(step):
        def shifted(i):
            def f(x):
                q = list(base)
                q[i] = x
                return W(q)

            return f

        out = [1.5 * _d2(shifted(0), base[0], step, spec.order)]
        for i in (1, 2, 3):
            out.append(_d1(shifted(i), base[i], step, spec.order) / (base[i] - base[0]))
        out.append(-w_pde_rhs(base))
        return out

    return _residual_report(terms, spec.h, spec.order)


def _wtilde_of_points(pts) -> float:
    cfg = BulkConfig(*pts)
    return w_subtracted(cfg)


def _dz_real(f, pts, i, h, order):
    """d/dz_i of a real-valued function via (d_x - i d_y)/2."""

    def fx(x):
        q = list(pts)
        q[i] = complex(x, pts[i].imag)
        return f(q)

    def fy(y):
        q = list(pts)
        q[i] = complex(pts[i].real, y)
        return f(q)

    dx = _d1(fx, pts[i].real, h, order)
    dy = _d1(fy, pts[i].imag, h, order)
    return 0.5 * (dx - 1j * dy)


def laplacian_w_subtracted(cfg: BulkConfig, h: float, order: int = 2) -> float:
    """Five-point (or nine-point) Laplacian of the subtracted mass in z1."""
    pts = list(cfg.points())

    def fx(x):
        q = list(pts)
        q[0] = complex(x, pts[0].imag)
        return _wtilde_of_points(q)

    def fy(y):
        q = list(pts)
        q[0] = complex(pts[0].real, y)
        return _wtilde_of_points(q)

    return _d2(fx, pts[0].real, h, order) + _d2(fy, pts[0].imag, h, order)


def w_real_pde_residual(cfg: BulkConfig, spec: StencilSpec) -> ResidualReport:
    """[3 d^2_{x1} + 2 Re sum_i 2 d_{zi}/(z_i - z_1)] W~ = (3/2) Lap_{z1} W~."""
    spec = spec.validated(cfg.min_separation())
    pts = list(cfg.points())

    def terms(step):
        def fx(x):
            q = list(pts)
            q[0] = complex(x, pts[0].imag)
            return _wtilde_of_points(q)

        out = [3.0 * _d2(fx, pts[0].real, step, spec.order)]
        for i in (1, 2, 3):
            dz = _dz_real(_wtilde_of_points, pts, i, step, spec.order)
            out.append(2.0 * (2.0 * dz / (pts[i] - pts[0])).real)
        lap = laplacian_w_subtracted(cfg, step, spec.order)
        out.append(-1.5 * lap)
        return out

    return _residual_report(terms, spec.h, spec.order)


def _boundary_chiral(w, p: ModelParams, norm: Normalization, a: float) -> complex:
    """Boundary correlator continued to four independent chiral points."""
    w1, w2, w3, w4 = w
    h2 = kac_weights(p).h2
    h3 = kac_weights(p).h3
    eta = (w1 - w2) * (w3 - w4) / ((w1 - w3) * (w2 - w4))
    log_r = (
        _log_principal(w1 - w3)
        + _log_principal(w2 - w4)
        + 2.0 * math.log(a)
        - _log_principal(w1 - w2)
        - _log_principal(w3 - w4)
        - _log_principal(w2 - w3)
        - _log_principal(w1 - w4)
    )
    f1 = hyp2f1(1.0 - p.kappa / 4.0, 2.0 - 3.0 * p.kappa / 4.0, 2.0 - p.kappa / 2.0, eta)
    f2 = hyp2f1(p.kappa / 4.0, 3.0 * p.kappa / 4.0 - 1.0, p.kappa / 2.0, eta)
    blocks = f1 + boundary_coeff_B(p.kappa) * cmath.exp(
        h3 * _log_principal(-eta * (1.0 - eta))
    ) * f2
    return cmath.exp(2.0 * h2 * log_r) * norm.boundary_amplitude(p.n) * blocks


def boundary_bpz_residual(
    z1: complex,
    z2: complex,
    p: ModelParams,
    spec: StencilSpec,
    norm: Normalization = Normalization(),
    a: float = 1.0,
) -> ResidualReport:
    """Bulk null-state system on the half-plane two-point with image points.

    The correlator is continued to four independent chiral arguments
    (z1, z2, z1*, z2*) and the worst of the four point labels is
    reported.
    """
    z1, z2 = complex(z1), complex(z2)
    pts = [z1, z2, z1.conjugate(), z2.conjugate()]
    minsep = min(
        abs(p_ - q_) for i, p_ in enumerate(pts) for q_ in pts[i + 1 :]
    )
    spec = spec.validated(minsep)
    h2 = kac_weights(p).h2

    def G(q):
        return _boundary_chiral(q, p, norm, a)

    worst = None
    for j in range(4):
        def terms(step, j=j):
            return _bpz_terms(G, pts, j, p.kappa, h2, step, spec.order)

        rep = _residual_report(terms, spec.h, spec.order)
        if worst is None or rep.normalized > worst.normalized:
            worst = rep
    return worst
