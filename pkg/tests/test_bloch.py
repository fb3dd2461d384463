import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qvoronoi.bloch import (
    GeneralizedBloch,
    bloch_to_density,
    bloch_to_density_batch,
    bloch_to_xi,
    density_to_xi,
    is_pure,
    read_points_csv,
    sample_sphere,
    shrink_to_radius,
    write_points_csv,
    xi_to_bloch,
    xi_to_density,
)
from qvoronoi.errors import NotUnit, OutsideBall, RadiusOutOfRange

from conftest import random_state


class TestQubit:
    def test_origin(self):
        np.testing.assert_allclose(bloch_to_density([0, 0, 0]).matrix, np.eye(2) / 2)

    def test_north(self):
        np.testing.assert_allclose(bloch_to_density([0, 0, 1]).matrix, np.diag([1, 0]))

    def test_x(self):
        np.testing.assert_allclose(bloch_to_density([1, 0, 0]).matrix, [[0.5, 0.5], [0.5, 0.5]])

    def test_outside(self):
        with pytest.raises(OutsideBall):
            bloch_to_density([0.8, 0.8, 0.0])

    def test_batch_agrees(self, rng):
        v = rng.uniform(-0.5, 0.5, (10, 3))
        stack = bloch_to_density_batch(v)
        for i in range(10):
            np.testing.assert_allclose(stack[i], bloch_to_density(v[i]).matrix, atol=1e-15)

    def test_generalized_matches_qubit(self, rng):
        v = rng.uniform(-0.5, 0.5, 3)
        np.testing.assert_allclose(xi_to_density(bloch_to_xi(v)), bloch_to_density(v).matrix, atol=1e-15)
        np.testing.assert_allclose(xi_to_bloch(bloch_to_xi(v)), v)


class TestGeneralized:
    @pytest.mark.parametrize("d", [2, 3, 4, 6])
    def test_zero(self, d):
        np.testing.assert_allclose(xi_to_density(np.zeros(d * d - 1)), np.eye(d) / d, atol=1e-15)

    def test_first_pure_pattern(self):
        xi = np.zeros(8)
        xi[:2] = -1
        np.testing.assert_allclose(xi_to_density(xi), np.diag([0, 0, 1]), atol=1e-15)

    def test_inverse_of_zero(self):
        np.testing.assert_allclose(density_to_xi(np.eye(3) / 3).xi, 0.0, atol=1e-15)

    def test_diag_pure(self):
        xi = density_to_xi(np.diag([1.0, 0, 0])).xi
        np.testing.assert_allclose(xi, [2, -1, 0, 0, 0, 0, 0, 0], atol=1e-14)

    def test_round_trip(self, rng):
        for _ in range(100):
            d = int(rng.integers(2, 6))
            rho = random_state(d, rng)
            g = density_to_xi(rho)
            assert isinstance(g, GeneralizedBloch) and g.dim == d
            np.testing.assert_allclose(xi_to_density(g), rho, atol=1e-13)

    def test_bad_length(self):
        with pytest.raises(ValueError):
            xi_to_density(np.zeros(5))

    def test_hermitian_unit_trace(self, rng):
        xi = rng.standard_normal((7, 15))
        m = xi_to_density(xi)
        np.testing.assert_allclose(np.trace(m, axis1=1, axis2=2), 1.0)
        np.testing.assert_allclose(m, np.conj(np.swapaxes(m, 1, 2)))


class TestPure:
    def test_diag(self):
        assert is_pure(np.diag([1.0, 0, 0]))

    @pytest.mark.parametrize("d", [2, 3, 5])
    def test_mixed(self, d):
        assert not is_pure(np.eye(d) / d)

    def test_sphere(self, rng):
        for v in sample_sphere(20, "uniform", 3):
            assert is_pure(bloch_to_density(v))


class TestSampling:
    def test_single(self):
        u = sample_sphere(1)
        assert u.shape == (1, 3)
        assert abs(np.linalg.norm(u[0]) - 1) < 1e-12

    def test_uniform_mean(self):
        u = sample_sphere(1000, "uniform", seed=7)
        assert np.linalg.norm(u.mean(axis=0)) < 0.1

    def test_fibonacci_spacing(self):
        n = 2562
        u = sample_sphere(n)
        np.testing.assert_allclose(np.linalg.norm(u, axis=1), 1.0, atol=1e-12)
        g = np.clip(u @ u.T, -1, 1)
        np.fill_diagonal(g, -1)
        min_angle = np.arccos(g.max(axis=1)).min()
        assert min_angle > 0.5 * np.sqrt(4 * np.pi / n)

    def test_seeded(self):
        np.testing.assert_array_equal(sample_sphere(50, "uniform", 1), sample_sphere(50, "uniform", 1))

    def test_bad_scheme(self):
        with pytest.raises(ValueError):
            sample_sphere(3, "grid")


class TestShrink:
    def test_zero(self):
        np.testing.assert_allclose(shrink_to_radius([0, 0, 1], 0.0), 0.0)

    def test_one(self):
        np.testing.assert_allclose(shrink_to_radius([0, 1, 0], 1.0), [0, 1, 0])

    def test_eigenvalues(self):
        w = np.linalg.eigvalsh(bloch_to_density(shrink_to_radius([0, 0, 1], 0.999)).matrix)
        np.testing.assert_allclose(w, [0.0005, 0.9995], atol=1e-15)

    def test_errors(self):
        with pytest.raises(RadiusOutOfRange):
            shrink_to_radius([0, 0, 1], 1.5)
        with pytest.raises(NotUnit):
            shrink_to_radius([0, 0, 0.5], 0.5)


def test_points_csv_round_trip(tmp_path):
    u = sample_sphere(17, "uniform", 4)
    p = tmp_path / "pts.csv"
    write_points_csv(p, u, comment="seed=4")
    np.testing.assert_array_equal(read_points_csv(p), u)


@settings(max_examples=50, deadline=None)
@given(st.floats(-1, 1), st.floats(-1, 1), st.floats(-1, 1))
def test_ball_gives_valid_state(x, y, z):
    v = np.array([x, y, z])
    n = np.linalg.norm(v)
    if n > 1:
        v = v / n
    w = np.linalg.eigvalsh(bloch_to_density(v).matrix)
    assert w.min() >= -1e-12
