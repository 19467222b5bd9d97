"""Complex-argument special functions behind the closed-form correlators.

Everything here is evaluated on the principal branch, with the cut taken
along [1, inf) on the real axis.  Arguments on the cut (within 1e-12) are
rejected with :class:`~loopmass.errors.CutError`; callers that need such
configurations are expected to permute their points first.

The Gauss function uses the classic ladder of argument transforms
(power series, Pfaff z -> z/(z-1), the 1-z and 1/z connection formulas)
and falls back to the Euler integral, evaluated with fixed-node
double-exponential quadrature, in the small region of the cut plane where
every transformed argument has modulus near one.  The eta_3f2 combination
eta * 3F2(1,1,4/3; 2,5/3; eta) is summed directly inside |eta| <= 0.7 and
continued elsewhere through its logarithmic-kernel integral
representation; a Lerch-transcendent helper with the same split is kept
alongside as an independent evaluation device.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import CutError, DegenerateC, PoleError

__all__ = ["gamma", "hyp2f1", "lerch_phi_third", "eta_3f2"]

CUT_TOL = 1e-12
SERIES_RADIUS = 0.7
_SERIES_TOL = 2e-16
_SERIES_MAX_TERMS = 4000

# Lanczos rational approximation, g = 7, 9 coefficients.
_LANCZOS_G = 7.0
_LANCZOS_C = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)

_SQRT_2PI = math.sqrt(2.0 * math.pi)


def _near_nonpositive_int(x: complex, tol: float) -> bool:
    re, im = x.real, x.imag
    return abs(im) <= tol and re <= 0.5 and abs(re - round(re)) <= tol


def gamma(z: complex) -> complex:
    """Gamma function for complex argument, principal values.

    Uses the fixed-coefficient Lanczos approximation for Re z >= 0.5 and
    the reflection formula elsewhere.  Raises :class:`PoleError` within
    1e-12 of a non-positive integer.
    """
    z = complex(z)
    if _near_nonpositive_int(z, CUT_TOL):
        raise PoleError(f"gamma pole at z={z}")
    if z.real < 0.5:
        # Gamma(z) Gamma(1-z) = pi / sin(pi z)
        s = _sinpi(z)
        return math.pi / (s * _lanczos(1.0 - z))
    return _lanczos(z)


def _sinpi(z: complex) -> complex:
    # sin(pi z) with argument reduction to keep accuracy for large Re z
    n = math.floor(z.real)
    r = z - n
    s = np.sin(np.pi * complex(r))
    return s if n % 2 == 0 else -s


def _lanczos(z: complex) -> complex:
    zm1 = z - 1.0
    x = _LANCZOS_C[0]
    for i, ci in enumerate(_LANCZOS_C[1:], start=1):
        x += ci / (zm1 + i)
    t = zm1 + _LANCZOS_G + 0.5
    return _SQRT_2PI * t ** (zm1 + 0.5) * np.exp(-t) * x


def _on_cut(z: complex) -> bool:
    return abs(z.imag) <= CUT_TOL and z.real >= 1.0 - CUT_TOL


def _check_off_cut(z: complex) -> complex:
    z = complex(z)
    if _on_cut(z):
        raise CutError(f"argument {z} lies on the cut [1, inf)")
    return z


# ----------------------------------------------------------------------
# double-exponential (tanh-sinh) nodes on (0, 1), fixed once at import
# ----------------------------------------------------------------------

def _tanh_sinh_table(step: float = 1.0 / 64.0):
    # the x-range must run deep enough that the un-summed endpoint tails
    # are negligible even against t^(-2/3) singularities: at |x| = 4.3
    # the nodes reach t ~ 1e-50, leaving a tail ~ 3 t^(1/3) ~ 1e-16
    ks = np.arange(-int(4.3 / step), int(4.3 / step) + 1)
    x = ks * step
    u = 0.5 * math.pi * np.sinh(x)
    t = 1.0 / (1.0 + np.exp(-2.0 * u))
    one_minus_t = 1.0 / (1.0 + np.exp(2.0 * u))
    w = step * 0.25 * math.pi * np.cosh(x) / np.cosh(u) ** 2
    keep = (w > 0.0) & (t > 0.0) & (one_minus_t > 0.0)
    return t[keep], one_minus_t[keep], w[keep]


_TS_T, _TS_1MT, _TS_W = _tanh_sinh_table()
_ARCH_HEIGHT = 0.25


def _quad01(f, z: complex = 0.0j) -> complex:
    """Integrate f(t, 1-t) over (0,1); integrable endpoint singularities OK.

    The contour arches into the half plane away from the singularities
    of 1 - z t, which for z off the cut [1, inf) all lie in Im t <= 0
    when Im z > 0 (and mirrored otherwise); this keeps full accuracy for
    arguments close to the cut.
    """
    sigma = 1.0 if z.imag >= 0.0 else -1.0
    bump = 1j * sigma * _ARCH_HEIGHT * _TS_T * _TS_1MT
    t = _TS_T + bump
    omt = _TS_1MT - bump
    w = _TS_W * (1.0 + 1j * sigma * _ARCH_HEIGHT * (_TS_1MT - _TS_T))
    return complex(np.sum(w * f(t, omt)))


# ----------------------------------------------------------------------
# Gauss hypergeometric function
# ----------------------------------------------------------------------

def _series_2f1(a: float, b: float, c: float, z: complex) -> complex:
    tot = 1.0 + 0.0j
    term = 1.0 + 0.0j
    for k in range(_SERIES_MAX_TERMS):
        term *= (a + k) * (b + k) / ((c + k) * (k + 1.0)) * z
        tot += term
        if abs(term) <= _SERIES_TOL * max(abs(tot), 1e-300):
            return tot
    return tot


def _series_2f1_vec(a: float, b: float, c: float, z: np.ndarray) -> np.ndarray:
    tot = np.ones_like(z)
    term = np.ones_like(z)
    for k in range(_SERIES_MAX_TERMS):
        term = term * ((a + k) * (b + k) / ((c + k) * (k + 1.0))) * z
        tot = tot + term
        if np.max(np.abs(term)) <= _SERIES_TOL * max(np.max(np.abs(tot)), 1e-300):
            break
    return tot


def _is_nonpositive_int(x: float, tol: float = 1e-12) -> bool:
    return x <= tol and abs(x - round(x)) <= tol


def _terminating_2f1(a: float, b: float, c: float, z: complex) -> complex:
    m = int(round(-min(a, b) if _is_nonpositive_int(b) and b <= a else -a))
    # polynomial of degree m; direct product form
    tot = 1.0 + 0.0j
    term = 1.0 + 0.0j
    for k in range(m):
        term *= (a + k) * (b + k) / ((c + k) * (k + 1.0)) * z
        tot += term
    return tot


def _gammas_safe(*args: float) -> list[complex] | None:
    vals = []
    for x in args:
        if _near_nonpositive_int(complex(x), 1e-8):
            return None
        vals.append(gamma(x))
    return vals


def _euler_2f1(a: float, b: float, c: float, z: complex) -> complex:
    """Euler integral with the a<->b slot chosen for the mildest endpoints.

    The integrand carries t^(b-1) (1-t)^(c-b-1); picking the slot value
    that maximizes min(b, c-b) keeps both exponents integrable and the
    quadrature tails negligible.
    """
    cands = [x for x in (a, b) if c > x > 0.0]
    if not cands:
        raise DegenerateC(
            f"no Euler representation for parameters a={a}, b={b}, c={c}"
        )
    slot = max(cands, key=lambda x: min(x, c - x))
    if slot == b:
        a, b = a, b
    else:
        a, b = b, a
    if min(b, c - b) < 0.05:
        raise DegenerateC(
            f"Euler endpoint exponents too singular for a={a}, b={b}, c={c}"
        )
    pref = gamma(c) / (gamma(b) * gamma(c - b))

    def integrand(t, omt):
        return t ** (b - 1.0) * omt ** (c - b - 1.0) * (1.0 - z * t) ** (-a)

    return pref * _quad01(integrand, z)


def _hyp2f1_scalar(a: float, b: float, c: float, z: complex) -> complex:
    if _near_nonpositive_int(complex(c), CUT_TOL):
        raise DegenerateC(f"c={c} is a non-positive integer")
    z = _check_off_cut(z)

    if _is_nonpositive_int(a) or _is_nonpositive_int(b):
        return _terminating_2f1(a, b, c, z)
    if z == 0:
        return 1.0 + 0.0j

    if abs(z) <= SERIES_RADIUS:
        return _series_2f1(a, b, c, z)

    # Pfaff transform z -> z/(z-1)
    w = z / (z - 1.0)
    if abs(w) <= SERIES_RADIUS:
        return (1.0 - z) ** (-a) * _series_2f1(a, c - b, c, w)

    # 1-z connection (series at 1-z, Pfaff-composed if that is smaller)
    val = _conn_1mz(a, b, c, z)
    if val is not None:
        return val

    # 1/z connection
    val = _conn_recip(a, b, c, z)
    if val is not None:
        return val

    # remaining pocket near exp(+-i pi/3): quadratic transformation when
    # c = 2a or c = 2b (true for every block family used here), else the
    # Euler integral
    val = _quadratic_c_eq_2b(a, b, c, z)
    if val is not None:
        return val
    return _euler_2f1(a, b, c, z)


def _quadratic_c_eq_2b(a: float, b: float, c: float, z: complex) -> complex | None:
    if abs(c - 2.0 * b) <= 1e-10:
        alpha, beta = a, b
    elif abs(c - 2.0 * a) <= 1e-10:
        alpha, beta = b, a
    else:
        return None
    w = z / (2.0 - z)
    if abs(w) > 0.98:
        return None
    return (1.0 - z / 2.0) ** (-alpha) * _hyp2f1_scalar(
        alpha / 2.0, alpha / 2.0 + 0.5, beta + 0.5, w * w
    )


def _sub_series(a: float, b: float, c: float, w: complex) -> complex | None:
    """Series at w or its Pfaff transform, whichever converges comfortably."""
    if abs(w) <= 0.75:
        return _series_2f1(a, b, c, w)
    v = w / (w - 1.0)
    if abs(v) <= 0.75 and not _on_cut(w):
        return (1.0 - w) ** (-a) * _series_2f1(a, c - b, c, v)
    return None


def _conn_1mz(a: float, b: float, c: float, z: complex) -> complex | None:
    s = c - a - b
    if abs(s - round(s)) <= 1e-8:
        return None
    w = 1.0 - z
    f1 = _sub_series(a, b, a + b - c + 1.0, w)
    f2 = _sub_series(c - a, c - b, c - a - b + 1.0, w)
    if f1 is None or f2 is None:
        return None
    g = _gammas_safe(c, s, c - a, c - b, -s, a, b)
    if g is None:
        return None
    gc, gs, gca, gcb, gms, ga, gb = g
    return gc * gs / (gca * gcb) * f1 + w ** s * gc * gms / (ga * gb) * f2


def _conn_recip(a: float, b: float, c: float, z: complex) -> complex | None:
    d = a - b
    if abs(d - round(d)) <= 1e-8:
        return None
    if abs(z.imag) <= CUT_TOL and z.real >= 0.0:
        return None  # (-z)^p not single-valued on [0, inf)
    w = 1.0 / z
    f1 = _sub_series(a, a - c + 1.0, a - b + 1.0, w)
    f2 = _sub_series(b, b - c + 1.0, b - a + 1.0, w)
    if f1 is None or f2 is None:
        return None
    g = _gammas_safe(c, -d, b, c - a, d, a, c - b)
    if g is None:
        return None
    gc, gmd, gb, gca, gd, ga, gcb = g
    return (-z) ** (-a) * gc * gmd / (gb * gca) * f1 + (-z) ** (-b) * gc * gd / (
        ga * gcb
    ) * f2


def hyp2f1(a: float, b: float, c: float, z):
    """Gauss 2F1(a, b; c; z) for real parameters, z in the cut plane.

    Accepts a complex scalar or ndarray; arrays evaluate through a
    vectorized power series when every entry satisfies |z| <= 0.7 and
    element by element otherwise.  Relative accuracy target 1e-10.
    """
    if isinstance(z, np.ndarray):
        zc = np.asarray(z, dtype=complex)
        bad = (np.abs(zc.imag) <= CUT_TOL) & (zc.real >= 1.0 - CUT_TOL)
        if np.any(bad):
            raise CutError("array argument contains points on the cut [1, inf)")
        if _near_nonpositive_int(complex(c), CUT_TOL):
            raise DegenerateC(f"c={c} is a non-positive integer")
        if np.all(np.abs(zc) <= SERIES_RADIUS):
            return _series_2f1_vec(a, b, c, zc)
        out = np.empty(zc.shape, dtype=complex)
        flat = zc.ravel()
        res = out.ravel()
        for i in range(flat.size):
            res[i] = _hyp2f1_scalar(a, b, c, complex(flat[i]))
        return out
    return _hyp2f1_scalar(a, b, c, complex(z))


# ----------------------------------------------------------------------
# Lerch transcendent Phi(z, 1, 4/3)
# ----------------------------------------------------------------------

def lerch_phi_third(z):
    """Phi(z, 1, 4/3) = sum_k z^k / (k + 4/3) = int_0^1 t^(1/3)/(1 - z t) dt.

    Series for |z| <= 0.7, integral representation beyond; very large
    arguments go through Phi(z, 1, a) = (1/a) 2F1(1, a; 1+a; z), whose
    1/z continuation stays accurate arbitrarily close to the cut.
    """
    if isinstance(z, np.ndarray):
        zc = np.asarray(z, dtype=complex)
        return np.array([lerch_phi_third(complex(w)) for w in zc.ravel()]).reshape(
            zc.shape
        )
    z = _check_off_cut(z)
    if abs(z) > 20.0:
        return 0.75 * _hyp2f1_scalar(1.0, 4.0 / 3.0, 7.0 / 3.0, z)
    if abs(z) <= SERIES_RADIUS:
        tot = 0.0 + 0.0j
        term = 1.0 + 0.0j
        k = 0
        while k < _SERIES_MAX_TERMS:
            piece = term / (k + 4.0 / 3.0)
            tot += piece
            if abs(piece) <= _SERIES_TOL * max(abs(tot), 1e-300):
                break
            term *= z
            k += 1
        return tot

    def integrand(t, omt):
        return t ** (1.0 / 3.0) / (1.0 - z * t)

    return _quad01(integrand, z)


# ----------------------------------------------------------------------
# eta * 3F2(1, 1, 4/3; 2, 5/3; eta)
# ----------------------------------------------------------------------

# coefficient of eta^m is (4/3)_{m-1} / (m (5/3)_{m-1});  c_1 = 1 with the
# recurrence c_{m+1} = c_m * m (m + 1/3) / ((m + 1)(m + 2/3))

# prefactor of the logarithmic-kernel integral: Gamma(5/3)/(Gamma(4/3)Gamma(1/3))
_ETA3F2_C = 2.0 / 3.0 * math.gamma(2.0 / 3.0) / (
    math.gamma(4.0 / 3.0) * math.gamma(1.0 / 3.0)
)


def _eta3f2_series_vec(z: np.ndarray) -> np.ndarray:
    tot = np.zeros_like(z)
    term = np.array(z, copy=True)
    cm = 1.0
    m = 1
    while m < _SERIES_MAX_TERMS:
        piece = cm * term
        tot = tot + piece
        if np.max(np.abs(piece)) <= _SERIES_TOL * max(np.max(np.abs(tot)), 1e-300):
            break
        cm *= m * (m + 1.0 / 3.0) / ((m + 1.0) * (m + 2.0 / 3.0))
        term = term * z
        m += 1
    return tot


def _eta3f2_integral(z: complex) -> complex:
    def integrand(t, omt):
        return t ** (-2.0 / 3.0) * omt ** (-2.0 / 3.0) * np.log(1.0 - z * t)

    return -_ETA3F2_C * _quad01(integrand, z)


def eta_3f2(z):
    """eta * 3F2(1, 1, 4/3; 2, 5/3; eta) on the cut plane.

    Direct series inside |eta| <= 0.7; outside, the single-integral
    continuation -C int_0^1 t^(-2/3) (1-t)^(-2/3) log(1 - eta t) dt with
    C = Gamma(5/3)/(Gamma(4/3) Gamma(1/3)) and the principal log.
    """
    if isinstance(z, np.ndarray):
        zc = np.asarray(z, dtype=complex)
        bad = (np.abs(zc.imag) <= CUT_TOL) & (zc.real >= 1.0 - CUT_TOL)
        if np.any(bad):
            raise CutError("array argument contains points on the cut [1, inf)")
        if np.all(np.abs(zc) <= SERIES_RADIUS):
            return _eta3f2_series_vec(zc)
        out = np.empty(zc.shape, dtype=complex)
        flat = zc.ravel()
        res = out.ravel()
        for i in range(flat.size):
            res[i] = eta_3f2(complex(flat[i]))
        return out
    z = _check_off_cut(z)
    if abs(z) <= SERIES_RADIUS:
        return complex(_eta3f2_series_vec(np.array([z]))[0])
    return _eta3f2_integral(z)
