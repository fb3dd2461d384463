import json

import numpy as np
import pytest
from scipy.spatial.transform import Rotation

from qvoronoi.bloch import bloch_to_density_batch, sample_sphere
from qvoronoi.capacity import LN2, QubitChannel, apply_channel, holevo_capacity_estimate
from qvoronoi.errors import ImageOutsideBall
from qvoronoi.seb import brute_force_center


class TestApply:
    def test_identity(self):
        v = np.array([0.3, -0.2, 0.5])
        np.testing.assert_array_equal(apply_channel(QubitChannel.identity(), v), v)

    def test_fully_depolarizing(self):
        out = apply_channel(QubitChannel.depolarizing(1.0), sample_sphere(10))
        np.testing.assert_array_equal(out, 0.0)

    def test_half(self):
        np.testing.assert_allclose(apply_channel(QubitChannel.depolarizing(0.5), [0, 0, 1]), [0, 0, 0.5])

    def test_invalid(self):
        with pytest.raises(ImageOutsideBall):
            apply_channel(QubitChannel(np.eye(3), [0, 0, 0.5]), [0, 0, 1])


class TestEstimate:
    def test_identity(self):
        est = holevo_capacity_estimate(QubitChannel.identity())
        assert est.value == pytest.approx(np.log(2), abs=1e-3)
        assert est.bits == pytest.approx(est.value / LN2)

    def test_fully_depolarizing(self):
        assert abs(holevo_capacity_estimate(QubitChannel.depolarizing(1.0)).value) <= 1e-9

    def test_half_depolarizing_matches_grid(self):
        ch = QubitChannel.depolarizing(0.5)
        est = holevo_capacity_estimate(ch)
        grid = brute_force_center(bloch_to_density_batch(apply_channel(ch, sample_sphere(2562))))
        assert est.value == pytest.approx(grid.radius, abs=1e-3)

    def test_unitary_invariance(self):
        ref = holevo_capacity_estimate(QubitChannel.identity()).value
        for seed in range(3):
            m = Rotation.random(random_state=seed).as_matrix()
            assert holevo_capacity_estimate(QubitChannel(m, np.zeros(3))).value == pytest.approx(ref, abs=2e-3)

    def test_contraction_monotone(self):
        vals = [holevo_capacity_estimate(QubitChannel.depolarizing(p), 642).value for p in (0.0, 0.2, 0.5, 0.8, 1.0)]
        assert all(a >= b - 1e-8 for a, b in zip(vals, vals[1:]))

    def test_amplitude_damping_bounded(self):
        est = holevo_capacity_estimate(QubitChannel.amplitude_damping(0.3), 642)
        assert 0 < est.value <= np.log(2) + est.gap

    def test_sample_size_convergence(self):
        ch = QubitChannel.amplitude_damping(0.4)
        vals = [holevo_capacity_estimate(ch, n) for n in (642, 2562, 10242)]
        for a, b in zip(vals, vals[1:]):
            assert b.value >= a.value - (a.gap + b.gap) - 1e-6
        assert abs(vals[2].value - vals[1].value) < 1e-2

    def test_interior_not_larger(self):
        ch = QubitChannel.amplitude_damping(0.3)
        pure = holevo_capacity_estimate(ch, 642).value
        mixed = holevo_capacity_estimate(ch, 642, interior=True).value
        assert mixed <= pure + 1e-6

    def test_needs_two(self):
        with pytest.raises(ValueError):
            holevo_capacity_estimate(QubitChannel.identity(), 1)


def test_channel_json(tmp_path):
    ch = QubitChannel.amplitude_damping(0.25)
    p = tmp_path / "ch.json"
    p.write_text(json.dumps(ch.to_dict()))
    back = QubitChannel.from_json(p)
    np.testing.assert_array_equal(back.m, ch.m)
    np.testing.assert_array_equal(back.b, ch.b)
    with pytest.raises(ValueError):
        QubitChannel.from_dict({"m": [1, 0], "b": [0, 0, 0]})
