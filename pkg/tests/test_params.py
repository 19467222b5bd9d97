"""Parameter-map tests: branch identities, dimensions, central charge."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from loopmass.errors import RangeError
from loopmass.params import (
    central_charge,
    kac_weights,
    params_from_n,
    twist_dimension,
    x_general,
)


class TestParamsFromN:
    def test_branch_endpoints(self):
        assert params_from_n(0.0).kappa == pytest.approx(8.0 / 3.0, abs=1e-14)
        assert params_from_n(1.0).kappa == pytest.approx(3.0, abs=1e-14)
        assert params_from_n(2.0).kappa == pytest.approx(4.0, abs=1e-14)

    def test_small_n_expansion(self):
        # kappa = 8/3 + 8 n / (9 pi) + O(n^2)
        n = 1e-6
        kappa = params_from_n(n).kappa
        assert kappa - 8.0 / 3.0 == pytest.approx(
            8.0 * n / (9.0 * math.pi), rel=1e-5
        )

    def test_invariants_roundtrip(self):
        for n in np.linspace(0.0, 2.0, 100):
            p = params_from_n(float(n))
            assert abs(2.0 * math.cos(6.0 * p.chi) - p.n) < 1e-12
            assert abs(p.g - (1.0 - 6.0 * p.chi / math.pi)) < 1e-14
            assert abs(p.kappa - 4.0 / p.g) < 1e-12
            assert 8.0 / 3.0 - 1e-12 <= p.kappa <= 4.0 + 1e-12
            assert -math.pi / 12.0 - 1e-12 <= p.chi <= 1e-12
            assert 1.0 - 1e-12 <= p.g <= 1.5 + 1e-12

    def test_kappa_monotone(self):
        ks = [params_from_n(float(n)).kappa for n in np.linspace(0.0, 2.0, 200)]
        assert all(a < b for a, b in zip(ks, ks[1:]))

    def test_out_of_range(self):
        for n in (-0.1, 2.1):
            with pytest.raises(RangeError):
                params_from_n(n)

    @given(st.floats(min_value=0.0, max_value=2.0))
    @settings(max_examples=100, deadline=None)
    def test_consistency_property(self, n):
        p = params_from_n(n)
        assert abs(2.0 * math.cos(6.0 * p.chi) - n) < 1e-12


class TestDimensions:
    def test_twist_dimension_endpoints(self):
        assert twist_dimension(params_from_n(0.0)) == pytest.approx(0.0, abs=1e-14)
        # Ising magnetisation dimension: 3*3/8 - 1 = 1/8
        assert twist_dimension(params_from_n(1.0)) == pytest.approx(0.125, abs=1e-13)

    def test_small_n_slope(self):
        n = 1e-7
        assert twist_dimension(params_from_n(n)) / n == pytest.approx(
            1.0 / (3.0 * math.pi), rel=1e-6
        )

    def test_kac_weights(self):
        p = params_from_n(1.0)
        w = kac_weights(p)
        assert w.h2 == pytest.approx(3.0 * 3.0 / 16.0 - 0.5, abs=1e-14)
        assert w.h3 == pytest.approx(0.5, abs=1e-14)
        assert w.x_twist == pytest.approx(2.0 * w.h2, abs=1e-15)

    def test_x_diagonal_vanishes(self):
        for n in (0.0, 0.3, 1.0, 1.7, 2.0):
            assert x_general(n, n) == pytest.approx(0.0, abs=1e-14)

    def test_x_twist_value(self):
        assert x_general(1.0, -1.0) == pytest.approx(0.125, abs=1e-13)

    def test_x_matches_twist_dimension(self):
        for n in np.linspace(0.0, 2.0, 25):
            n = float(n)
            assert abs(
                x_general(n, -n) - twist_dimension(params_from_n(n))
            ) < 1e-12

    def test_closed_form_algebra_oracle(self):
        # on the branch, x(n, -n) = 2 s / (3 pi - 2 s) with s = arcsin(n/2);
        # the linearized form n / (3 pi - n) agrees to O(n^3) at small n
        for n in (0.1, 0.5, 1.0):
            s = math.asin(n / 2.0)
            assert x_general(n, -n) == pytest.approx(
                2.0 * s / (3.0 * math.pi - 2.0 * s), rel=1e-12
            )
        n = 1e-3
        assert x_general(n, -n) == pytest.approx(n / (3.0 * math.pi - n), rel=1e-6)

    def test_x_out_of_range(self):
        with pytest.raises(RangeError):
            x_general(0.5, 2.5)


class TestCentralCharge:
    def test_values(self):
        assert central_charge(8.0 / 3.0) == pytest.approx(0.0, abs=1e-14)
        assert central_charge(3.0) == pytest.approx(0.5, abs=1e-14)

    def test_small_n_slope(self):
        # c(kappa(n))/n -> 5/(3 pi), linear extrapolation over two n values
        n1, n2 = 1e-3, 1e-4
        v1 = central_charge(params_from_n(n1).kappa) / n1
        v2 = central_charge(params_from_n(n2).kappa) / n2
        extrap = (v2 * n1 - v1 * n2) / (n1 - n2)
        assert extrap == pytest.approx(5.0 / (3.0 * math.pi), rel=1e-4)

    def test_nonnegative_on_branch(self):
        for n in np.linspace(0.0, 2.0, 50):
            c = central_charge(params_from_n(float(n)).kappa)
            assert c >= -1e-14
            if n > 1e-3:
                assert c > 0.0

    def test_positive_kappa_required(self):
        with pytest.raises(RangeError):
            central_charge(0.0)
