"""Inference paths: geometry, discretization, continuity classes."""

import math

import numpy as np
import pytest

from rgflow import (
    DomainError,
    Elliptical,
    Linear,
    QuadBezier,
    Regression,
    VPath,
    discretize,
    make_trajectory,
    path_continuity_order,
    point,
)

HALF_PI = math.pi / 2.0
PHI = 0.5


class TestPoint:
    def test_elliptical_endpoints_and_apex(self):
        traj = Elliptical(phi=PHI, delta=math.pi / 4.0)
        assert point(traj, HALF_PI) == (PHI, 0.0)
        assert point(traj, -HALF_PI) == (-PHI, 0.0)
        r, g = point(traj, 0.0)
        assert r == pytest.approx(0.0, abs=1e-15)
        assert g == pytest.approx(math.pi / 4.0, abs=1e-15)

    def test_linear_endpoints(self):
        traj = Linear(phi=PHI, delta=math.pi / 8.0)
        assert point(traj, 1.0) == (PHI, math.pi / 8.0)
        assert point(traj, 0.0) == (-PHI, 0.0)

    def test_regression_map(self):
        traj = Regression(phi=PHI)
        assert point(traj, 0.0) == (PHI, 0.0)
        assert point(traj, 1.0) == (-PHI, 0.0)
        r, g = point(traj, 0.25)
        assert r == pytest.approx(PHI * 0.5, abs=1e-15)
        assert g == 0.0

    def test_out_of_domain(self):
        with pytest.raises(DomainError):
            point(Elliptical(phi=PHI, delta=0.1), HALF_PI + 0.01)
        with pytest.raises(DomainError):
            point(Linear(phi=PHI, delta=0.1), -0.01)

    def test_implicit_equations_hold(self):
        rng = np.random.default_rng(12)
        for _ in range(1000):
            phi = rng.uniform(0.05, HALF_PI)
            delta = rng.uniform(1e-3, HALF_PI)
            t = rng.uniform(-HALF_PI, HALF_PI)
            r, g = Elliptical(phi=phi, delta=delta).point(t)
            assert abs((r / phi) ** 2 + (g / delta) ** 2 - 1.0) <= 1e-12
            t = rng.uniform(0.0, 1.0)
            r, g = Linear(phi=phi, delta=delta).point(t)
            assert abs(r / (-phi) + g / (delta / 2.0) - 1.0) <= 1e-12


class TestDiscretize:
    def test_elliptical_two_steps(self):
        traj = Elliptical(phi=PHI, delta=0.3)
        grid = discretize(traj, 2)
        np.testing.assert_allclose(grid.t, [HALF_PI, 0.0, -HALF_PI])
        assert (grid.r[0], grid.g[0]) == (PHI, 0.0)
        assert (grid.r[-1], grid.g[-1]) == (-PHI, 0.0)
        assert grid.r[1] == pytest.approx(0.0, abs=1e-15)
        assert grid.g[1] == pytest.approx(0.3, abs=1e-15)

    def test_regression_single_step(self):
        grid = discretize(Regression(phi=PHI), 1)
        assert list(grid.r) == [PHI, -PHI]
        assert list(grid.g) == [0.0, 0.0]

    def test_linear_generation_times(self):
        grid = discretize(Linear(phi=PHI, delta=math.pi / 8.0), 4)
        expected = [math.pi / 8, 3 * math.pi / 32, math.pi / 16, math.pi / 32, 0.0]
        np.testing.assert_allclose(grid.g, expected, atol=1e-15)

    def test_monotone_t_and_exact_ends(self):
        for traj in (
            Elliptical(phi=PHI, delta=0.4),
            Linear(phi=PHI, delta=0.4),
            Regression(phi=PHI),
            VPath(phi=PHI, delta=0.4, p=2.5),
            QuadBezier(phi=PHI, delta=0.4),
        ):
            grid = discretize(traj, 9)
            dt = np.diff(grid.t)
            assert np.all(dt > 0) or np.all(dt < 0)
            assert (grid.r[0], grid.g[0]) == traj.start_rg
            assert (grid.r[-1], grid.g[-1]) == (-PHI, 0.0)

    def test_zero_steps_rejected(self):
        with pytest.raises(DomainError):
            discretize(Elliptical(phi=PHI, delta=0.1), 0)

    def test_only_uniform_spacing(self):
        with pytest.raises(DomainError):
            discretize(Elliptical(phi=PHI, delta=0.1), 4, spacing="cosine")


class TestContinuityOrder:
    @pytest.mark.parametrize(
        "p,expected", [(1.0, "C0"), (1.5, "C1"), (2.0, "C1"), (2.5, "C2"), (3.0, "C2")]
    )
    def test_vpath_classes(self, p, expected):
        assert path_continuity_order(VPath(phi=PHI, delta=0.3, p=p)) == expected

    @pytest.mark.parametrize(
        "traj",
        [
            Elliptical(phi=PHI, delta=0.3),
            Linear(phi=PHI, delta=0.3),
            QuadBezier(phi=PHI, delta=0.3),
        ],
    )
    def test_smooth_families(self, traj):
        assert path_continuity_order(traj) == "C_inf"

    def test_unclassified_inputs(self):
        with pytest.raises(DomainError):
            path_continuity_order(VPath(phi=PHI, delta=0.3, p=3.5))
        with pytest.raises(DomainError):
            path_continuity_order(Regression(phi=PHI))

    def test_vpath_kink_matches_class(self):
        h = 1e-7
        for p, kinked in ((1.0, True), (1.5, False), (2.5, False)):
            traj = VPath(phi=PHI, delta=0.4, p=p)
            left = (traj.point(h)[1] - traj.point(0.0)[1]) / h
            right = (traj.point(0.0)[1] - traj.point(-h)[1]) / h
            if kinked:
                assert abs(left - right) > 0.1
            else:
                assert abs(left - right) < 1e-3


class TestBezier:
    def test_boundaries_and_peak(self):
        traj = QuadBezier(phi=PHI, delta=0.4)
        assert traj.point(0.0) == (PHI, 0.0)
        assert traj.point(1.0) == (-PHI, 0.0)
        r, g = traj.point(0.5)
        assert abs(r) <= 1e-12
        assert g == pytest.approx(0.2, abs=1e-12)
        peak = max(traj.point(float(t))[1] for t in np.linspace(0, 1, 101))
        assert peak == pytest.approx(0.2, abs=1e-12)


class TestFactoryAndFlags:
    def test_make_trajectory(self):
        assert isinstance(make_trajectory("elliptical", PHI, 0.2), Elliptical)
        assert isinstance(make_trajectory("vpath", PHI, 0.2, p=2.0), VPath)
        with pytest.raises(DomainError):
            make_trajectory("spiral", PHI)

    def test_boot_requirement_flags(self):
        assert Elliptical(phi=PHI, delta=0.2).starts_noiseless
        assert VPath(phi=PHI, delta=0.2, p=1.5).starts_noiseless
        assert QuadBezier(phi=PHI, delta=0.2).starts_noiseless
        assert Regression(phi=PHI).starts_noiseless
        assert not Linear(phi=PHI, delta=0.2).starts_noiseless

    def test_parameter_validation(self):
        with pytest.raises(DomainError):
            Elliptical(phi=PHI, delta=-0.1)
        with pytest.raises(DomainError):
            Linear(phi=PHI, delta=HALF_PI + 0.1)
        with pytest.raises(DomainError):
            VPath(phi=PHI, delta=0.2, p=0.0)
        with pytest.raises(DomainError):
            Elliptical(phi=0.0, delta=0.2)
