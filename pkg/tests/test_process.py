"""Forward states: boundary identities, linearity, noise statistics."""

import math

import numpy as np
import pytest

from rgflow import (
    DimensionMismatch,
    EmptyDataset,
    PairSample,
    empirical_variance,
    interpolate,
    make_gaussian_pairs,
    new_schedule,
    sample_noise,
)

HALF_PI = math.pi / 2.0


@pytest.fixture
def pair():
    return PairSample(x0=np.array([1.0, 0.0]), x1=np.array([0.0, 1.0]))


class TestInterpolate:
    def test_clean_boundary_ignores_noise(self, pair):
        sched = new_schedule(0.3)
        za = np.array([5.0, -7.0])
        zb = np.array([-2.0, 9.0])
        a = interpolate(sched, pair, za, -sched.phi, 0.0)
        b = interpolate(sched, pair, zb, -sched.phi, 0.0)
        assert np.array_equal(a.x, b.x)
        np.testing.assert_allclose(a.x, pair.x0, atol=1e-12)

    def test_degraded_boundary(self, pair):
        sched = new_schedule(0.3)
        s = interpolate(sched, pair, np.zeros(2), sched.phi, 0.0)
        np.testing.assert_allclose(s.x, pair.x1, atol=1e-12)

    def test_pure_noise_at_full_generation_time(self, pair):
        sched = new_schedule(0.3)
        z = np.array([0.7, -1.3])
        s = interpolate(sched, pair, z, 0.1, HALF_PI)
        np.testing.assert_allclose(s.x, z, atol=1e-15)

    def test_center_point_uncorrelated(self, pair):
        sched = new_schedule(0.0)
        s = interpolate(sched, pair, np.zeros(2), 0.0, 0.0)
        np.testing.assert_allclose(s.x, [1 / math.sqrt(2)] * 2, atol=1e-15)

    def test_linear_in_each_argument(self):
        rng = np.random.default_rng(3)
        sched = new_schedule(0.5)
        x0, x1, z = rng.normal(size=(3, 4))
        r = rng.uniform(-sched.phi, sched.phi)
        g = rng.uniform(0.0, HALF_PI)
        base = interpolate(sched, PairSample(x0, x1), z, r, g).x
        for c in (2.0, -0.5):
            scaled_x0 = interpolate(sched, PairSample(c * x0, x1), z, r, g).x
            delta = interpolate(sched, PairSample((c - 1) * x0, 0 * x1), 0 * z, r, g).x
            np.testing.assert_allclose(scaled_x0, base + delta, atol=1e-12)
            scaled_z = interpolate(sched, PairSample(x0, x1), c * z, r, g).x
            dz = interpolate(sched, PairSample(0 * x0, 0 * x1), (c - 1) * z, r, g).x
            np.testing.assert_allclose(scaled_z, base + dz, atol=1e-12)

    def test_dimension_mismatch(self, pair):
        sched = new_schedule(0.3)
        with pytest.raises(DimensionMismatch):
            interpolate(sched, pair, np.zeros(3), 0.0, 0.1)
        with pytest.raises(DimensionMismatch):
            PairSample(x0=np.zeros(2), x1=np.zeros(3))


class TestSampleNoise:
    def test_deterministic_given_seed(self):
        a = sample_noise(np.random.default_rng(5), 8, 1.0)
        b = sample_noise(np.random.default_rng(5), 8, 1.0)
        assert np.array_equal(a, b)

    def test_unit_variance(self):
        z = sample_noise(np.random.default_rng(1), 1_000_000, 1.0)
        assert 0.995 <= z.var() <= 1.005

    def test_scaled_std(self):
        z = sample_noise(np.random.default_rng(1), 1_000_000, 2.0)
        assert 1.99 <= z.std() <= 2.01


class TestEmpiricalVariance:
    def test_interior_point(self):
        ds = make_gaussian_pairs(0.5, 50_000, seed=4)
        sched = new_schedule(0.5)
        v = empirical_variance(
            sched, ds.pairs, 0.1, 0.4, 100_000, np.random.default_rng(6)
        )
        assert v == pytest.approx(1.0, abs=0.02)

    def test_pure_noise_point(self):
        ds = make_gaussian_pairs(0.5, 10_000, seed=4)
        sched = new_schedule(0.5)
        v = empirical_variance(
            sched, ds.pairs, 0.0, HALF_PI, 100_000, np.random.default_rng(6)
        )
        assert v == pytest.approx(1.0, abs=0.02)

    def test_high_correlation_grid(self):
        ds = make_gaussian_pairs(0.9, 50_000, seed=4)
        sched = new_schedule(0.9)
        rng = np.random.default_rng(6)
        for rf in (-0.6, 0.0, 0.6):
            for g in (0.2, 0.8, 1.4):
                v = empirical_variance(
                    sched, ds.pairs, rf * sched.phi, g, 100_000, rng
                )
                assert v == pytest.approx(1.0, abs=0.02)

    def test_deterministic_given_seed(self):
        ds = make_gaussian_pairs(0.5, 1000, seed=4)
        sched = new_schedule(0.5)
        a = empirical_variance(sched, ds.pairs, 0.1, 0.4, 20_000, np.random.default_rng(3))
        b = empirical_variance(sched, ds.pairs, 0.1, 0.4, 20_000, np.random.default_rng(3))
        assert a == b

    def test_empty_dataset(self):
        with pytest.raises(EmptyDataset):
            empirical_variance(
                new_schedule(0.5), [], 0.0, 0.4, 100, np.random.default_rng(0)
            )
