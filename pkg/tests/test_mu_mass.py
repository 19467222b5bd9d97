"""Loop-mass tests: crossing, Moebius invariance, normalization independence,
correlator reassembly, boundary mass, and the stress-tensor extraction."""

import math

import numpy as np
import pytest

from loopmass.correlators import BulkConfig, Normalization
from loopmass.errors import CutError, EpsTooLarge, RangeError, ScaleError
from loopmass.mu_mass import (
    PAIR_12,
    PAIR_13,
    PAIR_14,
    SeparationPattern,
    boundary_far_field_report,
    q_fn,
    spin2_component,
    ttilde_two_point,
    two_point_log_mass,
    w_boundary,
    w_bulk,
    w_from_correlators,
)

SQUARE = BulkConfig(0.0, 1.0, 1.0 + 1.0j, 1.0j)


def random_config(rng, scale=1.0):
    from loopmass.correlators import cross_ratio
    from loopmass.errors import CoincidentPoints

    while True:
        pts = rng.normal(scale=scale, size=4) + 1j * rng.normal(scale=scale, size=4)
        try:
            cfg = BulkConfig(*pts)
        except CoincidentPoints:
            continue
        u = cross_ratio(*cfg.points()).u
        if abs(u.imag) > 1e-6 or (abs(u.imag) <= 1e-6 and u.real < 1.0 - 1e-6):
            return cfg


class TestSeparationPattern:
    def test_complement_identification(self):
        assert SeparationPattern.bulk({1, 2}) == SeparationPattern.bulk({3, 4})
        assert SeparationPattern.bulk({1}) == SeparationPattern.bulk({2, 3, 4})
        assert SeparationPattern.bulk(set()) == SeparationPattern.bulk({1, 2, 3, 4})

    def test_eight_bulk_classes(self):
        pats = {
            SeparationPattern.bulk(s)
            for s in [
                set(),
                {1},
                {2},
                {3},
                {4},
                {1, 2},
                {1, 3},
                {1, 4},
                {2, 3},
                {2, 4},
                {3, 4},
                {1, 2, 3},
                {1, 2, 4},
                {1, 3, 4},
                {2, 3, 4},
                {1, 2, 3, 4},
            ]
        }
        assert len(pats) == 8

    def test_four_boundary_classes(self):
        pats = {
            SeparationPattern.half_plane(s) for s in [set(), {1}, {2}, {1, 2}]
        }
        assert len(pats) == 4
        # no complement identification on the boundary
        assert SeparationPattern.half_plane({1}) != SeparationPattern.half_plane({2})

    def test_labels(self):
        assert SeparationPattern.bulk({1, 4}).label() == "14|23"
        assert SeparationPattern.half_plane({1, 2}).label() == "(12)"


class TestQFunction:
    def test_zero_at_origin(self):
        assert q_fn(0.0) == pytest.approx(0.0, abs=1e-15)

    def test_crossing_symmetry(self):
        for eta in (0.2, 0.5, 0.7, 0.3 + 0.4j, -1.5 + 0.2j):
            assert q_fn(eta) == pytest.approx(q_fn(1.0 - eta), abs=1e-8)

    def test_schwarz_symmetry(self):
        for eta in (0.3 + 0.4j, -0.7 + 1.1j):
            assert q_fn(eta) == pytest.approx(q_fn(np.conj(eta)), abs=1e-12)

    def test_array_matches_scalar(self):
        etas = np.array([0.2 + 0.1j, -0.4, 0.55, 1e-4 + 1e-5j])
        arr = q_fn(etas)
        for i, e in enumerate(etas):
            assert arr[i] == pytest.approx(q_fn(complex(e)), abs=1e-12)

    def test_cut_rejected(self):
        with pytest.raises(CutError):
            q_fn(1.5)


class TestWBulk:
    def test_square_values_consistent(self):
        # pattern {1,3} is pure q; crossing maps {1,2} <-> {1,4} at eta=1/2
        w12 = w_bulk(PAIR_12, SQUARE).value
        w13 = w_bulk(PAIR_13, SQUARE).value
        w14 = w_bulk(PAIR_14, SQUARE).value
        assert w12 == pytest.approx(w14, abs=1e-12)  # eta = 1 - eta = 1/2
        assert w12 > w13 > 0.0

    def test_pattern_14_vanishes_as_pair_collides(self):
        # loops separating (z1, z4) from (z2, z3) disappear as z1 -> z2
        d = 1e-8
        cfg = BulkConfig(0.0, d, 1.0, 1.0 + 1.0j)
        assert abs(w_bulk(PAIR_14, cfg).value) < 1e-4

    def test_pattern_12_log_divergence(self):
        d = 1e-8
        cfg = BulkConfig(0.0, d, 1.0, 1.0 + 1.0j)
        eta = abs(d * (1.0 - 1.0 - 1.0j) / ((0.0 - 1.0) * (d - 1.0 - 1.0j)))
        expected = -math.log(abs(eta)) / (6.0 * math.pi)
        assert w_bulk(PAIR_12, cfg).value == pytest.approx(expected, rel=1e-2)

    def test_moebius_invariance(self):
        rng = np.random.default_rng(17)
        for _ in range(10):
            cfg = random_config(rng)
            base = {p: w_bulk(p, cfg).value for p in (PAIR_12, PAIR_13, PAIR_14)}
            a, b, c, d = 1.3, 0.2 - 0.1j, 0.05 + 0.02j, 0.9
            pts = [(a * z + b) / (c * z + d) for z in cfg.points()]
            cfg_m = BulkConfig(*pts)
            for p in (PAIR_12, PAIR_13, PAIR_14):
                assert w_bulk(p, cfg_m).value == pytest.approx(base[p], abs=1e-9)

    def test_relabeling_covariance(self):
        # permuting points and pattern together leaves the mass unchanged
        rng = np.random.default_rng(23)
        cfg = random_config(rng)
        pts = cfg.points()
        base = w_bulk(PAIR_12, cfg).value
        perm = (2, 3, 0, 1)  # send 1,2 -> 3,4: pattern {1,2} -> {3,4} = {1,2}
        cfg_p = BulkConfig(*(pts[i] for i in perm))
        assert w_bulk(PAIR_12, cfg_p).value == pytest.approx(base, abs=1e-11)
        # swap 2 and 4: pattern {1,2} becomes {1,4}
        cfg_s = BulkConfig(pts[0], pts[3], pts[2], pts[1])
        assert w_bulk(PAIR_14, cfg_s).value == pytest.approx(base, abs=1e-11)

    def test_positivity_generic(self):
        rng = np.random.default_rng(29)
        for _ in range(10):
            cfg = random_config(rng)
            for p in (PAIR_12, PAIR_13, PAIR_14):
                assert w_bulk(p, cfg).value > -1e-12

    def test_one_sided_pattern_rejected(self):
        with pytest.raises(ValueError):
            w_bulk(SeparationPattern.bulk({1}), SQUARE)


class TestWFromCorrelators:
    def test_matches_w_bulk(self):
        rng = np.random.default_rng(31)
        for _ in range(10):
            cfg = random_config(rng)
            for pat in (PAIR_12, PAIR_13, PAIR_14):
                direct = w_bulk(pat, cfg).value
                assembled = w_from_correlators(pat, cfg, 1e-4)
                assert assembled == pytest.approx(direct, rel=1e-3, abs=1e-6)

    def test_normalization_independence(self):
        for pat in (PAIR_12, PAIR_13, PAIR_14):
            w_plus = w_from_correlators(pat, SQUARE, 1e-4, Normalization(varrho=1.0))
            w_minus = w_from_correlators(pat, SQUARE, 1e-4, Normalization(varrho=-1.0))
            assert abs(w_plus - w_minus) < 1e-10
            w_a = w_from_correlators(pat, SQUARE, 1e-4, Normalization(A=3.0))
            assert abs(w_a - w_plus) < 1e-10

    def test_positive_masses(self):
        rng = np.random.default_rng(37)
        for _ in range(5):
            cfg = random_config(rng)
            for pat in (PAIR_12, PAIR_13, PAIR_14):
                assert w_from_correlators(pat, cfg, 1e-4) > -1e-8

    def test_n_small_range(self):
        with pytest.raises(RangeError):
            w_from_correlators(PAIR_12, SQUARE, 0.1)


class TestTwoPointLogMass:
    def test_zero_at_scale(self):
        assert two_point_log_mass(0.0, 1.0, a=1.0 - 1e-15) == pytest.approx(
            0.0, abs=1e-12
        )

    def test_e_separation(self):
        assert two_point_log_mass(0.0, math.e) == pytest.approx(
            1.0 / (3.0 * math.pi), rel=1e-12
        )

    def test_doubling_additivity(self):
        r = 7.3
        diff = two_point_log_mass(0.0, 2 * r) - two_point_log_mass(0.0, r)
        assert diff == pytest.approx(math.log(2.0) / (3.0 * math.pi), rel=1e-12)

    def test_scale_error(self):
        with pytest.raises(ScaleError):
            two_point_log_mass(0.0, 0.5, a=1.0)


class TestWBoundary:
    def test_value_at_standard_points(self):
        # z1 = i, z2 = 2i: eta = -1/8; finite, positive
        m = w_boundary(1j, 2j)
        assert m.pattern == SeparationPattern.half_plane({1, 2})
        assert 0.0 < m.value < 1.0

    def test_near_boundary_log(self):
        # eta -> 0-: value ~ -(1/12 pi) ln|eta| within 5 percent
        eta = -1e-6
        # place points to realize this cross ratio: z1 = i, z2 = i + d
        d = math.sqrt(-eta * 4.0)  # |z12|^2 = -eta * 4 y1 y2, y ~ 1
        val = w_boundary(1j, d + 1j).value
        ref = -math.log(abs(eta)) / (12.0 * math.pi)
        assert val == pytest.approx(ref, rel=0.05)

    def test_conformal_invariance(self):
        z1, z2 = 0.3 + 0.8j, -0.5 + 1.7j
        base = w_boundary(z1, z2).value
        for f in (
            lambda z: z + 2.7,
            lambda z: 3.1 * z,
            lambda z: -1.0 / z,
        ):
            assert w_boundary(f(z1), f(z2)).value == pytest.approx(base, abs=1e-9)

    def test_far_field_report(self):
        rep = boundary_far_field_report()
        assert len(rep["rows"]) == 6
        assert "far_slope_per_log_eta" in rep
        # the printed formula levels off: far slope much smaller than 1/(6 pi)
        assert abs(rep["far_slope_per_log_eta"]) < 1.0 / (6.0 * math.pi)


class TestSpin2:
    def test_eps_scaling(self):
        # the angular integral scales as eps^2: halving eps quarters it
        z1, z3, z4 = 0.0, 2.0 + 0.5j, 1.0 + 2.0j
        eps = 1e-3
        v1 = spin2_component(z1, z3, z4, eps)
        v2 = spin2_component(z1, z3, z4, eps / 2.0)
        # both are eps-normalized already, so the ratio tends to one
        assert abs(v1 / v2 - 1.0) < 0.02

    def test_ward_form_constant(self):
        cfgs = [
            (0.0, 2.0 + 0.5j, 1.0 + 2.0j),
            (0.0, 3.0, 1.0j),
            (1.0 + 1.0j, -2.0, 4.0 + 1.0j),
            (0.0, 1.5 + 1.0j, -1.0 - 2.0j),
            (0.5j, 2.5, 3.0 + 3.0j),
        ]
        vals = []
        for (z1, z3, z4) in cfgs:
            sep = min(abs(z1 - z3), abs(z1 - z4), abs(z3 - z4))
            v = spin2_component(z1, z3, z4, 2e-3 * sep, 1e-3 * sep, nodes=512)
            vals.append(v * (z1 - z3) ** 2 * (z1 - z4) ** 2 / (z3 - z4) ** 2)
        mean = sum(vals) / len(vals)
        for v in vals:
            assert abs(v - mean) <= 0.03 * abs(mean)

    def test_spin0_component_finite(self):
        # the theta-average of the gate mass stays bounded at small eps
        from loopmass.mu_mass import _gate_mass_array

        z1, z3, z4 = 0.0, 2.0 + 0.5j, 1.0 + 2.0j
        theta = 2.0 * math.pi * np.arange(256) / 256
        for eps in (1e-3, 1e-4):
            z2 = z1 + eps * np.exp(1j * theta)
            eta = (z1 - z2) * (z3 - z4) / ((z1 - z3) * (z2 - z4))
            mass = _gate_mass_array(eta)
            assert np.all(np.isfinite(mass))
            assert np.max(np.abs(mass)) < 1.0

    def test_eps_guard(self):
        with pytest.raises(EpsTooLarge):
            spin2_component(0.0, 1.0, 1.0j, 0.5)


class TestTtildeTwoPoint:
    def test_matches_central_charge_slope(self):
        z1, z3 = 0.0, 2.0 + 0.5j
        val = ttilde_two_point(z1, z3, 0.02, 0.01)
        target = 5.0 / (6.0 * math.pi)
        got = (val * (z1 - z3) ** 4).real
        assert abs(got - target) <= 0.1 * target

    def test_quartic_decay(self):
        v1 = ttilde_two_point(0.0, 2.0, 0.01)
        v2 = ttilde_two_point(0.0, 4.0, 0.01)
        assert abs(v1 / v2) == pytest.approx(16.0, rel=0.05)

    def test_small_imaginary_part_aligned(self):
        # for axis-aligned insertions the coefficient is real
        val = ttilde_two_point(0.0, 2.0, 0.02, 0.01)
        assert abs(val.imag) < 0.05 * abs(val)
