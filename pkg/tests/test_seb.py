import numpy as np
import pytest

from qvoronoi.bloch import bloch_to_density, bloch_to_density_batch, density_to_xi, sample_sphere, xi_to_bloch
from qvoronoi.errors import EmptySites, GridTooCoarse, NonConvergence
from qvoronoi.seb import SEBConfig, brute_force_center, max_divergence, smallest_enclosing_ball

from conftest import random_state

POLES = [np.diag([1.0, 0.0]), np.diag([0.0, 1.0])]


def center_bloch(res):
    return xi_to_bloch(density_to_xi(res.center).xi)


def random_set(rng):
    k = int(rng.integers(2, 12))
    v = rng.standard_normal((k, 3))
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    return bloch_to_density_batch(v * rng.uniform(0.3, 1.0, (k, 1)))


class TestSEB:
    def test_single_full_rank(self, rng):
        rho = random_state(3, rng)
        res = smallest_enclosing_ball([rho])
        np.testing.assert_allclose(res.center.matrix, rho, atol=1e-9)
        assert abs(res.radius) < 1e-8

    def test_two_poles(self):
        # oracle: one-dimensional scan over diag(t, 1-t)
        t = np.linspace(1e-3, 1 - 1e-3, 9999)
        scan = np.maximum(-np.log(t), -np.log(1 - t))
        res = smallest_enclosing_ball(POLES)
        assert res.radius == pytest.approx(scan.min(), abs=1e-6)
        assert res.radius == pytest.approx(np.log(2), abs=1e-8)
        np.testing.assert_allclose(res.center.matrix, np.eye(2) / 2, atol=1e-6)
        assert sorted(res.support) == [0, 1]

    def test_sphere(self):
        res = smallest_enclosing_ball(bloch_to_density_batch(sample_sphere(2562)))
        assert np.linalg.norm(center_bloch(res)) < 1e-3
        assert res.radius == pytest.approx(np.log(2), abs=1e-3)
        assert res.converged and res.gap <= 1e-8

    def test_certificate_bounds(self, rng):
        for _ in range(10):
            pts = random_set(rng)
            res = smallest_enclosing_ball(pts)
            assert res.lower_bound <= res.radius + 1e-12
            assert res.radius - res.lower_bound == pytest.approx(res.gap, abs=1e-12)
            assert max_divergence(pts, res.center.matrix) == pytest.approx(res.radius, abs=1e-9)

    def test_no_descent_direction(self, rng):
        for _ in range(5):
            pts = random_set(rng)
            res = smallest_enclosing_ball(pts)
            c = center_bloch(res)
            for _ in range(50):
                u = rng.standard_normal(3)
                trial = c + 1e-4 * u / np.linalg.norm(u)
                assert max_divergence(pts, bloch_to_density(trial).matrix) >= res.radius - res.gap - 1e-12

    def test_monotone_in_points(self, rng):
        pts = list(random_set(rng))
        prev = 0.0
        for extra in random_set(rng):
            pts.append(extra)
            r = smallest_enclosing_ball(pts).radius
            assert r >= prev - 1e-8
            prev = r

    def test_higher_dimension(self, rng):
        pts = [random_state(3, rng, 1) for _ in range(6)]
        res = smallest_enclosing_ball(pts)
        assert res.converged
        assert max_divergence(pts, res.center.matrix) == pytest.approx(res.radius, abs=1e-9)

    def test_nonconvergence(self, rng):
        pts = bloch_to_density_batch(sample_sphere(50))
        cfg = SEBConfig(max_iter=3, strict=True)
        with pytest.raises(NonConvergence) as exc:
            smallest_enclosing_ball(pts, cfg)
        assert not exc.value.result.converged
        res = smallest_enclosing_ball(pts, SEBConfig(max_iter=3))
        assert not res.converged and res.gap > 1e-8

    def test_empty(self):
        with pytest.raises(EmptySites):
            smallest_enclosing_ball([])


class TestGridOracle:
    def test_two_poles(self):
        res = brute_force_center(POLES, spacing=0.01)
        assert np.linalg.norm(center_bloch(res)) <= 0.01
        assert res.radius == pytest.approx(np.log(2), abs=1e-3)

    def test_single_point_nearest_node(self):
        v = np.array([0.1234, -0.3011, 0.2049])
        sigma = bloch_to_density(v).matrix
        res = brute_force_center([sigma], spacing=0.01)
        # nearest in divergence among the enclosing grid cell's corners
        lo = np.floor(v / 0.01)
        corners = [(lo + np.array(c)) * 0.01 for c in np.ndindex(2, 2, 2)]
        vals = [max_divergence([sigma], bloch_to_density(c).matrix) for c in corners]
        np.testing.assert_allclose(center_bloch(res), corners[int(np.argmin(vals))], atol=1e-12)
        assert res.radius == pytest.approx(min(vals), abs=1e-12)

    def test_agrees_with_solver(self, rng):
        for _ in range(20):
            pts = random_set(rng)
            seb = smallest_enclosing_ball(pts)
            grid = brute_force_center(pts)
            assert grid.radius >= seb.radius - seb.gap - 1e-12
            assert grid.radius - seb.radius <= grid.gap + seb.gap

    def test_too_coarse(self):
        with pytest.raises(GridTooCoarse):
            brute_force_center(POLES, spacing=0.05, tolerance=1e-6)

    def test_qubit_only(self, rng):
        with pytest.raises(ValueError):
            brute_force_center([random_state(3, rng)])
