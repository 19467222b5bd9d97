"""Correlator tests: cross ratios, block coefficients, closed forms."""

import cmath
import math

import numpy as np
import pytest

from loopmass.correlators import (
    BulkConfig,
    Normalization,
    boundary_cross_ratio,
    boundary_two_point,
    coeff_B,
    cross_ratio,
    four_point,
    ising_four_point,
    ope_eta2_coefficient,
    ope_inferred_central_charge,
    two_point,
    xi_blocks,
)
from loopmass.errors import (
    BoundaryContact,
    CoincidentPoints,
    CutError,
    DegenerateKappa,
)
from loopmass.params import central_charge, params_from_n

NORM = Normalization()


def random_config(rng, scale=1.0):
    while True:
        pts = rng.normal(scale=scale, size=4) + 1j * rng.normal(scale=scale, size=4)
        try:
            cfg = BulkConfig(*pts)
        except CoincidentPoints:
            continue
        u = cross_ratio(*cfg.points()).u
        if abs(u.imag) > 1e-6:  # keep every permutation image off the cut
            return cfg


class TestCrossRatio:
    def test_collinear_quarter(self):
        pair = cross_ratio(0.0, 1.0, 2.0, 3.0)
        assert pair.u == pytest.approx(0.25)
        assert pair.v == pytest.approx(0.25)

    def test_conjugate_sector(self):
        pair = cross_ratio(0.1 + 0.2j, 1.0 - 0.3j, -0.5 + 1j, 2.0 + 0.5j)
        assert pair.v == pair.u.conjugate()

    def test_complement_identity(self):
        rng = np.random.default_rng(1)
        for _ in range(50):
            z = rng.normal(size=4) + 1j * rng.normal(size=4)
            pair = cross_ratio(*z)
            other = (z[0] - z[3]) * (z[1] - z[2]) / ((z[0] - z[2]) * (z[1] - z[3]))
            assert abs(1.0 - pair.u - other) < 1e-12 * max(1.0, abs(other))

    def test_swap_two_four(self):
        rng = np.random.default_rng(2)
        for _ in range(50):
            z = rng.normal(size=4) + 1j * rng.normal(size=4)
            u = cross_ratio(z[0], z[1], z[2], z[3]).u
            u_swap = cross_ratio(z[0], z[3], z[2], z[1]).u
            assert abs(u_swap - (1.0 - u)) < 1e-11 * max(1.0, abs(u))

    def test_degenerate_pair(self):
        with pytest.raises(CoincidentPoints):
            cross_ratio(0.0, 1e-15, 1.0, 2.0)

    def test_small_separation_limit(self):
        u = cross_ratio(0.0, 1e-6, 1.0, 1.0 + 1e-6j).u
        assert abs(u) < 1e-5


class TestCoeffB:
    def test_vanishes_at_dilute_end(self):
        assert abs(coeff_B(8.0 / 3.0)) < 1e-12

    def test_ising_value(self):
        # Gamma arithmetic: bracket = 2 pi^2 - pi^2, Gamma(5/4) = Gamma(1/4)/4
        # gives B(3) = 1/4 exactly
        assert coeff_B(3.0) == pytest.approx(0.25, abs=1e-10)

    def test_small_n_slope(self):
        target = (
            8.0
            * 2.0 ** (1.0 / 3.0)
            * math.pi
            / (3.0 * math.sqrt(3.0) * math.gamma(1.0 / 6.0) ** 2 * math.gamma(4.0 / 3.0) ** 2)
        )
        n = 1e-4
        assert coeff_B(params_from_n(n).kappa) / n == pytest.approx(target, rel=1e-4)

    def test_positive_inside_branch(self):
        for n in np.linspace(0.05, 1.95, 30):
            assert coeff_B(params_from_n(float(n)).kappa) > 0.0


class TestXiBlocks:
    def test_unit_at_origin(self):
        assert xi_blocks(0.0, 0.0, 3.0) == pytest.approx(1.0)

    def test_ising_diagonal_is_one(self):
        for u in (0.1, 0.35, 0.6, 0.9):
            val = xi_blocks(u, u, 3.0)
            assert val.real == pytest.approx(1.0, rel=1e-10)
            assert abs(val.imag) < 1e-12

    def test_reality_for_conjugate_pairs(self):
        rng = np.random.default_rng(9)
        count = 0
        while count < 100:
            u = complex(rng.normal(), rng.normal())
            if abs(u.imag) <= 1e-12 and u.real >= 1.0:
                continue
            val = xi_blocks(u, u.conjugate(), 2.9)
            assert abs(val.imag) < 1e-10 * max(abs(val), 1.0)
            count += 1

    def test_reality_on_negative_real_axis(self):
        # principal/reflected branch pairing keeps the product real there
        val = xi_blocks(-1.5, -1.5, 3.1)
        assert abs(val.imag) < 1e-10


class TestFourPoint:
    def test_free_limit(self):
        cfg = BulkConfig(0.0, 1.0, 1.0 + 1.0j, 1.0j)
        p = params_from_n(0.0)
        assert four_point(cfg, p, NORM) == pytest.approx(1.0, rel=1e-12)

    def test_short_distance_limit(self):
        d = 1e-5
        cfg = BulkConfig(0.0, d, 1.0, 1.0 + d * 1j)
        p = params_from_n(0.8)
        h2 = 3.0 * p.kappa / 16.0 - 0.5
        expected = abs(d * d * 1j) ** (-4.0 * h2)
        assert four_point(cfg, p, NORM) == pytest.approx(expected, rel=1e-3)

    def test_permutation_invariance(self):
        from itertools import permutations

        rng = np.random.default_rng(21)
        p = params_from_n(0.9)
        for _ in range(10):
            cfg = random_config(rng)
            base = four_point(cfg, p, NORM)
            pts = cfg.points()
            for perm in list(permutations(range(4)))[1::3]:
                cfg_p = BulkConfig(*(pts[i] for i in perm), a=cfg.a)
                assert four_point(cfg_p, p, NORM) == pytest.approx(base, rel=1e-9)

    def test_ising_identity(self):
        rng = np.random.default_rng(33)
        p = params_from_n(1.0)
        for _ in range(20):
            cfg = random_config(rng)
            lhs = four_point(cfg, p, NORM)
            rhs = ising_four_point(cfg, NORM)
            assert abs(lhs - rhs) <= 1e-8 * abs(rhs)

    def test_cluster_factorization(self):
        # |z12|, |z34| << |z13|: four-point -> product of two-points
        p = params_from_n(0.5)
        d = 1e-3
        cfg = BulkConfig(0.0, d, 1000.0, 1000.0 + d * 1j)
        ratio = four_point(cfg, p, NORM) / (
            two_point(0.0, d, p) * two_point(1000.0, 1000.0 + d * 1j, p)
        )
        assert ratio == pytest.approx(1.0, rel=0.01)


class TestTwoPoint:
    def test_free_limit(self):
        assert two_point(0.0, 5.0 + 2.0j, params_from_n(0.0)) == pytest.approx(1.0)

    def test_unit_separation(self):
        assert two_point(0.0, 1.0, params_from_n(1.3)) == pytest.approx(1.0)

    def test_small_n_log(self):
        n = 1e-6
        p = params_from_n(n)
        r = 7.0
        got = two_point(0.0, r, p)
        assert got == pytest.approx(
            1.0 - 2.0 * n / (3.0 * math.pi) * math.log(r), rel=1e-9
        )

    def test_coincident(self):
        with pytest.raises(CoincidentPoints):
            two_point(1.0, 1.0, params_from_n(1.0))


class TestIsingFourPoint:
    def test_real_eta_block_part(self):
        # for eta in (0, 1): |1+sqrt(eta)| + |1-sqrt(eta)| = 2
        cfg = BulkConfig(0.0, 1.0, 2.0, 3.0)  # eta = 1/4
        z1, z2, z3, z4 = cfg.points()
        pref = abs(
            (z1 - z3) * (z2 - z4) / ((z1 - z2) * (z3 - z4) * (z2 - z3) * (z1 - z4))
        ) ** 0.25
        assert ising_four_point(cfg, NORM) == pytest.approx(pref, rel=1e-12)

    def test_eta_to_zero(self):
        d = 1e-6
        cfg = BulkConfig(0.0, d, 1.0, 1.0 + d * 1j)
        expected = abs(d * d * 1j) ** (-0.25)
        assert ising_four_point(cfg, NORM) == pytest.approx(expected, rel=1e-3)


class TestBoundaryTwoPoint:
    def test_cross_ratio_value(self):
        assert boundary_cross_ratio(1j, 2j) == pytest.approx(-0.125)

    def test_free_limit(self):
        p = params_from_n(0.0)
        for (z1, z2) in ((1j, 2j), (0.3 + 0.7j, -1.2 + 0.4j)):
            assert boundary_two_point(z1, z2, p, NORM) == pytest.approx(1.0, rel=1e-10)

    def test_short_distance_limit(self):
        p = params_from_n(1.0)
        z1, z2 = 1j, 1e-4 + 1j
        got = boundary_two_point(z1, z2, p, NORM)
        expected = (abs(z1 - z2) ** 2) ** (1.0 - 3.0 * p.kappa / 8.0)
        assert got == pytest.approx(expected, rel=1e-3)

    def test_contact_rejected(self):
        p = params_from_n(1.0)
        with pytest.raises(BoundaryContact):
            boundary_two_point(1.0, 1j, p, NORM)
        with pytest.raises(BoundaryContact):
            boundary_two_point(1j, 1.0 - 1j, p, NORM)


def _eta2_coefficient_numeric(kappa: float) -> float:
    """Fourier extraction of the eta^2 Taylor coefficient of
    (1-eta)^(-2 h2) F1(eta), an oracle independent of the closed form."""
    from loopmass.specfun import hyp2f1

    h2 = 3.0 * kappa / 16.0 - 0.5
    r, m = 0.1, 64
    total = 0.0j
    for k in range(m):
        eta = r * cmath.exp(2j * math.pi * k / m)
        f = (1.0 - eta) ** (-2.0 * h2) * hyp2f1(
            1.0 - kappa / 4.0, 2.0 - 3.0 * kappa / 4.0, 2.0 - kappa / 2.0, eta
        )
        total += f * cmath.exp(-4j * math.pi * k / m)
    return (total / m).real / r**2


class TestOpeCoefficient:
    def test_numeric_extraction_oracle(self):
        for kappa in (2.8, 3.0, 3.2):
            assert ope_eta2_coefficient(kappa) == pytest.approx(
                _eta2_coefficient_numeric(kappa), abs=1e-6
            )

    def test_ising_exact_value(self):
        # h2 = 1/16: 9/128 - 1/64 - 5/128 = 1/64
        assert ope_eta2_coefficient(3.0) == pytest.approx(1.0 / 64.0, abs=1e-14)

    def test_inferred_central_charge(self):
        for kappa in (2.8, 3.0, 3.2):
            assert ope_inferred_central_charge(kappa) == pytest.approx(
                central_charge(kappa), abs=1e-6
            )
        assert ope_inferred_central_charge(3.0) == pytest.approx(0.5, abs=1e-10)

    def test_dilute_end(self):
        assert ope_eta2_coefficient(8.0 / 3.0) == pytest.approx(0.0, abs=1e-13)
        assert ope_inferred_central_charge(8.0 / 3.0) == 0.0

    def test_degenerate_kappa(self):
        with pytest.raises(DegenerateKappa):
            ope_eta2_coefficient(4.0)


class TestNormalization:
    def test_amplitudes(self):
        norm = Normalization(A=2.0, varrho=0.5, sigma=-0.25)
        assert norm.bulk_amplitude(0.1) == pytest.approx(2.05)
        assert norm.boundary_amplitude(0.1) == pytest.approx(1.975)

    def test_positive_A_required(self):
        with pytest.raises(ValueError):
            Normalization(A=0.0)
