"""Loewner-chain tests: determinism, slit-map exactness, drift statistics."""

import math

import numpy as np
import pytest

from loopmass.correlators import BulkConfig
from loopmass.errors import BadStep, TooManySwallowed
from loopmass.sle import (
    DriftReport,
    LoewnerChain,
    drift_estimate,
    evolve_points,
    hydrodynamic_residual,
    sample_chain,
)

ASYM = BulkConfig(0.0, 0.45 + 0.1j, 1.3 + 0.6j, 0.3 + 1.4j)


def zero_chain(dt, steps, kappa=6.0):
    return LoewnerChain(
        dt=dt,
        steps=steps,
        driver=np.zeros(steps + 1),
        base_point=0.0j,
        kappa=kappa,
    )


class TestSampleChain:
    def test_deterministic(self):
        c1 = sample_chain(6.0, 1e-3, 0.1, seed=5)
        c2 = sample_chain(6.0, 1e-3, 0.1, seed=5)
        assert np.array_equal(c1.driver, c2.driver)
        assert c1.driver[0] == 0.0

    def test_increment_variance(self):
        # Var(U_T) = kappa T within three standard errors of the sample var
        kappa, T = 6.0, 1.0
        vals = np.array(
            [sample_chain(kappa, 1e-2, T, seed=s).driver[-1] for s in range(2000)]
        )
        var = vals.var()
        stderr = kappa * T * math.sqrt(2.0 / (len(vals) - 1))
        assert abs(var - kappa * T) <= 3.0 * stderr

    def test_default_kappa_six_for_drift(self):
        rep = drift_estimate(ASYM, 1e-3, 0.01, 200, seed=0)
        assert rep.kappa == 6.0

    def test_bad_step(self):
        with pytest.raises(BadStep):
            sample_chain(6.0, -1e-3, 0.1, seed=0)
        with pytest.raises(BadStep):
            sample_chain(6.0, 0.2, 0.1, seed=0)
        with pytest.raises(BadStep):
            sample_chain(0.0, 1e-3, 0.1, seed=0)


class TestEvolvePoints:
    def test_zero_steps_identity(self):
        chain = zero_chain(1e-3, 0)
        res = evolve_points(chain, [1.0 + 1.0j, -2.0 + 0.5j])
        assert res.points[0] == 1.0 + 1.0j
        assert res.points[1] == -2.0 + 0.5j

    def test_hydrodynamic_normalization(self):
        # g_t(z) = z + 2t/z + O(1/z^2) far away, for sampled chains
        for seed in (1, 2, 3):
            chain = sample_chain(6.0, 1e-3, 0.2, seed=seed)
            z = 1e3 + 1e3j
            res = hydrodynamic_residual(chain, z)
            assert res <= 1e-4

    def test_single_slit_map(self):
        dt = 0.01
        chain = zero_chain(dt, 1)
        z = 2.0 + 3.0j
        res = evolve_points(chain, [z])
        expected = np.sqrt(z * z + 4.0 * dt)
        assert abs(res.points[0] - expected) < 1e-14

    def test_capacity_additivity(self):
        # two zero-driver chains of duration t compose to capacity 2t
        t = 0.05
        z = 5.0 + 2.0j
        once = evolve_points(zero_chain(t, 1), [z]).points[0]
        twice = evolve_points(zero_chain(t, 1), [once]).points[0]
        direct = evolve_points(zero_chain(2.0 * t, 1), [z]).points[0]
        assert abs(twice - direct) < 1e-12

    def test_mirror_evolution(self):
        # points below the base line evolve as conjugates of their mirrors
        chain = sample_chain(6.0, 1e-3, 0.05, seed=9)
        up = evolve_points(chain, [0.7 + 0.9j]).points[0]
        down = evolve_points(chain, [0.7 - 0.9j]).points[0]
        assert abs(down - np.conj(up)) < 1e-13

    def test_swallowed_flagged(self):
        chain = sample_chain(6.0, 1e-4, 0.01, seed=3)
        res = evolve_points(chain, [1e-9 + 1e-9j, 5.0 + 5.0j])
        assert res.swallowed[0] is True
        assert res.swallowed[1] is False


class TestDriftEstimate:
    def test_deterministic_report(self):
        r1 = drift_estimate(ASYM, 1e-3, 0.01, 500, seed=11)
        r2 = drift_estimate(ASYM, 1e-3, 0.01, 500, seed=11)
        assert r1 == r2

    def test_kappa_six_within_band_smoke(self):
        rep = drift_estimate(ASYM, 1e-4, 0.01, 4000, seed=42, kappa=6.0)
        assert rep.censored == 0
        assert rep.within_band(5.0)

    def test_report_fields(self):
        rep = drift_estimate(ASYM, 1e-3, 0.01, 500, seed=1)
        assert isinstance(rep, DriftReport)
        assert rep.stderr > 0.0
        assert rep.n_runs == 500

    def test_minimum_runs(self):
        with pytest.raises(ValueError):
            drift_estimate(ASYM, 1e-3, 0.01, 50, seed=0)

    def test_too_many_swallowed(self):
        # a spectator glued to the base point is swallowed in every run
        cfg = BulkConfig(0.0, 1e-9 + 1e-9j, 1.0 + 1.0j, 1.0j)
        with pytest.raises(TooManySwallowed):
            drift_estimate(cfg, 1e-3, 0.01, 200, seed=0)
