"""Hybrid sampler: kappa limits, step identities, full restoration loops."""

import math

import numpy as np
import pytest

from rgflow import (
    CheatDenoiser,
    ConfigError,
    Elliptical,
    GaussianOracle,
    Linear,
    PairSample,
    Regression,
    SamplerConfig,
    SingularStart,
    boot_step,
    hybrid_step,
    interpolate,
    kappa,
    new_schedule,
    regression_step,
    restore,
    restore_batch,
)

HALF_PI = math.pi / 2.0


class TestKappa:
    def test_fully_stochastic_value(self):
        got = kappa(1.0, 0.2, 0.5)
        assert got == math.sin(0.5) - math.sin(0.2)
        assert got == pytest.approx(0.2808, abs=1e-4)

    def test_deterministic_is_exact_zero(self):
        assert kappa(0.0, 0.2, 0.5) == 0.0
        assert kappa(0.0, 1.0, 0.1) == 0.0

    def test_small_eta_is_small(self):
        for g1 in np.linspace(0.02, HALF_PI, 15):
            for g2 in np.linspace(0.02, HALF_PI, 15):
                assert abs(kappa(1e-4, g1, g2)) < 1e-3

    def test_monotone_vanishing_near_zero(self):
        for g1, g2 in ((0.2, 0.9), (1.1, 0.3)):
            vals = [abs(kappa(eta, g1, g2)) for eta in (1e-2, 1e-3, 1e-4, 1e-5)]
            assert all(a > b for a, b in zip(vals, vals[1:]))

    def test_target_at_zero_noise_time(self):
        assert kappa(0.5, 0.4, 0.0) == 0.0
        assert kappa(1.0, 0.4, 0.0) == -math.sin(0.4)

    def test_validation(self):
        with pytest.raises(SingularStart):
            kappa(0.5, 0.0, 0.3)
        with pytest.raises(ConfigError):
            kappa(1.5, 0.2, 0.3)


class TestHybridStep:
    def test_deterministic_step_ignores_noise(self):
        sched = new_schedule(0.4)
        rng = np.random.default_rng(0)
        x_prev, x0hat, x1 = rng.normal(size=(3, 3))
        a = hybrid_step(sched, x_prev, x0hat, x1, (0.1, 0.5), (-0.1, 0.3), 0.0,
                        rng.normal(size=3))
        b = hybrid_step(sched, x_prev, x0hat, x1, (0.1, 0.5), (-0.1, 0.3), 0.0,
                        rng.normal(size=3))
        assert np.array_equal(a, b)

    def test_singular_start_rejected(self):
        sched = new_schedule(0.4)
        z = np.zeros(2)
        with pytest.raises(SingularStart):
            hybrid_step(sched, z, z, z, (0.1, 0.0), (0.0, 0.2), 0.5, z)

    def test_manifold_invariance_deterministic(self):
        """With the exact clean point substituted, the eta=0 step transports
        forward states to forward states with the same latent."""
        rng = np.random.default_rng(5)
        for _ in range(200):
            rho = rng.uniform(-0.9, 0.9)
            sched = new_schedule(rho)
            pair = PairSample(x0=rng.normal(size=2), x1=rng.normal(size=2))
            z = rng.normal(size=2)
            r1, g1 = rng.uniform(-sched.phi, sched.phi), rng.uniform(0.05, HALF_PI)
            r2, g2 = rng.uniform(-sched.phi, sched.phi), rng.uniform(0.0, HALF_PI)
            x_prev = interpolate(sched, pair, z, r1, g1).x
            want = interpolate(sched, pair, z, r2, g2).x
            got = hybrid_step(
                sched, x_prev, pair.x0, pair.x1, (r1, g1), (r2, g2), 0.0, np.zeros(2)
            )
            np.testing.assert_allclose(got, want, atol=1e-10)

    def test_boot_step_matches_fully_stochastic_step(self):
        sched = new_schedule(0.4)
        rng = np.random.default_rng(6)
        x_prev, x0hat, x1, z = rng.normal(size=(4, 3))
        frm, to = (0.2, 0.3), (-0.1, 0.45)
        np.testing.assert_allclose(
            boot_step(sched, x_prev, x0hat, x1, frm, to, z),
            hybrid_step(sched, x_prev, x0hat, x1, frm, to, 1.0, z),
            atol=1e-14,
        )
        # and it stays defined from g1 = 0 where hybrid_step refuses
        boot_step(sched, x_prev, x0hat, x1, (sched.phi, 0.0), to, z)


class TestRegressionStep:
    def test_single_full_step_returns_prediction(self):
        sched = new_schedule(0.5)
        rng = np.random.default_rng(7)
        x1 = rng.normal(size=4)
        x0hat = rng.normal(size=4)
        out = regression_step(sched, x1, x0hat, x1, sched.phi, -sched.phi)
        rel = np.max(np.abs(out - x0hat)) / max(1.0, np.max(np.abs(x0hat)))
        assert rel <= 1e-15

    def test_noop_step(self):
        sched = new_schedule(0.5)
        x = np.array([1.0, -2.0])
        out = regression_step(sched, x, 2 * x, x, 0.2, 0.2)
        assert np.array_equal(out, x)

    def test_half_steps_telescope(self):
        sched = new_schedule(0.3)
        rng = np.random.default_rng(8)
        x_prev, x0hat, x1 = rng.normal(size=(3, 2))
        full = regression_step(sched, x_prev, x0hat, x1, sched.phi, -sched.phi)
        half = regression_step(sched, x_prev, x0hat, x1, sched.phi, 0.0)
        two = regression_step(sched, half, x0hat, x1, 0.0, -sched.phi)
        np.testing.assert_allclose(two, full, atol=1e-12)


class TestRestore:
    def test_one_step_regression_identity(self):
        sched = new_schedule(0.5)
        den = GaussianOracle(rho=0.5)
        x1 = np.array([1.0, -0.5, 0.25])
        cfg = SamplerConfig(trajectory=Regression(phi=sched.phi), n_steps=1)
        out = restore(sched, den, x1, cfg)
        pred = den.predict(x1, x1, sched.phi, 0.0)
        rel = np.max(np.abs(out - pred)) / max(1.0, np.max(np.abs(pred)))
        assert rel <= 1e-15

    def test_multi_step_regression_with_cheat_oracle(self):
        sched = new_schedule(0.2)
        x0 = np.array([0.3, 0.9])
        cfg = SamplerConfig(trajectory=Regression(phi=sched.phi), n_steps=5)
        out = restore(sched, CheatDenoiser(x0), np.array([1.0, -1.0]), cfg)
        np.testing.assert_allclose(out, x0, atol=1e-12)

    def test_zero_delta_reroutes_to_regression(self):
        sched = new_schedule(0.5)
        den = GaussianOracle(rho=0.5)
        x1 = np.array([0.7, 0.1])
        reg = restore(
            sched, den, x1,
            SamplerConfig(trajectory=Regression(phi=sched.phi), n_steps=4, eta=0.9),
        )
        for traj in (Elliptical(phi=sched.phi, delta=0.0),
                     Linear(phi=sched.phi, delta=0.0)):
            out = restore(
                sched, den, x1, SamplerConfig(trajectory=traj, n_steps=4, eta=0.9)
            )
            assert np.array_equal(out, reg)

    def test_single_step_on_noiseless_start_needs_full_stochasticity(self):
        sched = new_schedule(0.5)
        den = GaussianOracle(rho=0.5)
        traj = Elliptical(phi=sched.phi, delta=0.4)
        x1 = np.array([1.0])
        with pytest.raises(ConfigError):
            restore(sched, den, x1, SamplerConfig(trajectory=traj, n_steps=1, eta=0.0))
        out = restore(
            sched, den, x1, SamplerConfig(trajectory=traj, n_steps=1, eta=1.0)
        )
        pred = den.predict(x1, x1, sched.phi, 0.0)
        np.testing.assert_allclose(out, pred, atol=1e-12)

    def test_single_step_linear_path_allows_any_eta(self):
        sched = new_schedule(0.5)
        den = GaussianOracle(rho=0.5)
        traj = Linear(phi=sched.phi, delta=0.4)
        out = restore(
            sched, den, np.array([1.0]),
            SamplerConfig(trajectory=traj, n_steps=1, eta=0.0, seed=3),
        )
        assert np.all(np.isfinite(out))

    def test_deterministic_given_seed(self):
        sched = new_schedule(0.5)
        den = GaussianOracle(rho=0.5)
        traj = Elliptical(phi=sched.phi, delta=0.6)
        cfg = SamplerConfig(trajectory=traj, n_steps=8, eta=0.4, seed=21)
        a = restore(sched, den, np.array([1.0, 2.0]), cfg)
        b = restore(sched, den, np.array([1.0, 2.0]), cfg)
        assert np.array_equal(a, b)

    def test_eta_zero_depends_only_on_boot_draw(self):
        """At eta = 0 every post-boot noise coefficient vanishes, so a single
        supplied draw fully determines the run at any step count."""
        sched = new_schedule(0.5)
        den = GaussianOracle(rho=0.5)
        traj = Elliptical(phi=sched.phi, delta=0.6)
        z = np.array([0.37])
        outs = [
            restore(
                sched, den, np.array([1.0]),
                SamplerConfig(trajectory=traj, n_steps=n, eta=0.0),
                noise=[z],
            )
            for n in (2, 5, 20)
        ]
        assert all(np.all(np.isfinite(o)) for o in outs)

    def test_two_call_run_matches_one_step_regression(self):
        """Any two-call elliptical run collapses to the one-step regression
        answer: the final step to g = 0 keeps only the fresh prediction."""
        sched = new_schedule(0.5)
        x0 = np.array([0.4, -0.2])
        den = CheatDenoiser(x0)
        x1 = np.array([1.0, 0.6])
        reg = restore(
            sched, den, x1,
            SamplerConfig(trajectory=Regression(phi=sched.phi), n_steps=1),
        )
        for eta in (0.0, 0.5):
            out = restore(
                sched, den, x1,
                SamplerConfig(
                    trajectory=Elliptical(phi=sched.phi, delta=math.pi / 4),
                    n_steps=2, eta=eta, seed=3,
                ),
            )
            np.testing.assert_allclose(out, reg, atol=1e-15)

    def test_nfe2_collapse_across_delta(self):
        """With a shared boot draw and eta < 1, two-call runs give the same
        output for every apex delta (the final step to g = 0 keeps only the
        fresh prediction)."""
        sched = new_schedule(0.5)
        x0 = np.array([0.3, -0.8])
        den = CheatDenoiser(x0)
        x1 = np.array([1.0, 0.2])
        z = np.array([0.5, -0.1])
        outs = []
        for delta in (math.pi / 8, math.pi / 4, HALF_PI):
            traj = Elliptical(phi=sched.phi, delta=delta)
            cfg = SamplerConfig(trajectory=traj, n_steps=2, eta=0.0)
            outs.append(restore(sched, den, x1, cfg, noise=[z]))
        assert np.array_equal(outs[0], outs[1])
        assert np.array_equal(outs[0], outs[2])

    def test_batch_matches_sequential(self):
        sched = new_schedule(0.3)
        den = GaussianOracle(rho=0.3)
        traj = Linear(phi=sched.phi, delta=0.5)
        cfg = SamplerConfig(trajectory=traj, n_steps=6, eta=0.7, seed=2)
        rng = np.random.default_rng(11)
        x1s = rng.normal(size=(4, 2))
        batch = restore_batch(sched, den, x1s, cfg)
        for i in range(4):
            single = restore(
                sched, den, x1s[i], cfg, rng=np.random.default_rng([cfg.seed, i])
            )
            np.testing.assert_array_equal(batch[i], single)

    def test_gaussian_conditional_law_small(self):
        """Endpoint cloud approximates the exact conditional law (loose
        bounds; the acceptance suite runs the pinned version)."""
        sched = new_schedule(0.5)
        den = GaussianOracle(rho=0.5)
        traj = Elliptical(phi=sched.phi, delta=HALF_PI)
        cfg = SamplerConfig(trajectory=traj, n_steps=100, eta=0.0, seed=1)
        out = restore(sched, den, np.ones(4000), cfg)
        assert out.mean() == pytest.approx(0.5, abs=0.05)
        assert out.var() == pytest.approx(0.72, abs=0.06)

    def test_config_validation(self):
        traj = Elliptical(phi=0.5, delta=0.3)
        with pytest.raises(ConfigError):
            SamplerConfig(trajectory=traj, n_steps=0)
        with pytest.raises(ConfigError):
            SamplerConfig(trajectory=traj, n_steps=2, eta=1.2)
        with pytest.raises(ConfigError):
            SamplerConfig(trajectory=traj, n_steps=2, boot_epsilon=0.0)
