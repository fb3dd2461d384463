"""One-qubit channels as affine Bloch-ball maps and the enclosing-ball capacity estimate."""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .bloch import bloch_to_density_batch, sample_sphere
from .errors import ImageOutsideBall
from .qdm import DEFAULT_TOL, DensityMatrix, Tolerances
from .seb import SEBConfig, smallest_enclosing_ball

LN2 = float(np.log(2.0))


@dataclass(frozen=True, eq=False)
class QubitChannel:
    """``v -> M v + b`` on Bloch vectors."""

    m: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.m, dtype=float).reshape(3, 3)
        b = np.asarray(self.b, dtype=float).reshape(3)
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "b", b)

    @classmethod
    def identity(cls):
        return cls(np.eye(3), np.zeros(3))

    @classmethod
    def depolarizing(cls, p: float):
        """``rho -> (1 - p) rho + p I/2``; p = 1 is fully depolarizing."""
        return cls((1.0 - p) * np.eye(3), np.zeros(3))

    @classmethod
    def amplitude_damping(cls, gamma: float):
        s = np.sqrt(1.0 - gamma)
        return cls(np.diag([s, s, 1.0 - gamma]), np.array([0.0, 0.0, gamma]))

    @classmethod
    def from_dict(cls, data: dict):
        m, b = data["m"], data["b"]
        if len(m) != 9 or len(b) != 3:
            raise ValueError("channel spec needs 9 entries in m (row-major) and 3 in b")
        return cls(np.array(m, dtype=float), np.array(b, dtype=float))

    @classmethod
    def from_json(cls, path):
        """Load ``{"m": [9 reals, row-major], "b": [3 reals]}``.

        Malformed JSON raises json.JSONDecodeError, which carries line and column.
        """
        with open(path) as fh:
            return cls.from_dict(json.load(fh))

    def to_dict(self) -> dict:
        return {"m": self.m.ravel().tolist(), "b": self.b.tolist()}


def apply_channel(ch: QubitChannel, v, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Image Bloch vector(s); raises ImageOutsideBall for an invalid image."""
    v = np.asarray(v, dtype=float)
    out = v @ ch.m.T + ch.b
    norms = np.linalg.norm(np.atleast_2d(out), axis=1)
    if norms.max() > 1.0 + tol.psd:
        raise ImageOutsideBall(f"image norm {norms.max():.6g} > 1")
    return out


@dataclass
class CapacityEstimate:
    value: float  # nats
    n: int
    gap: float
    center: DensityMatrix
    scheme: str = "fibonacci"
    seed: int | None = None
    iterations: int = 0

    @property
    def bits(self) -> float:
        return self.value / LN2

    def to_dict(self) -> dict:
        from .bloch import density_to_xi, xi_to_bloch

        return {
            "capacity_nats": self.value,
            "capacity_bits": self.bits,
            "n": self.n,
            "scheme": self.scheme,
            "seed": self.seed,
            "seb_gap": self.gap,
            "seb_iterations": self.iterations,
            "center_bloch": xi_to_bloch(density_to_xi(self.center).xi).tolist(),
        }


def holevo_capacity_estimate(
    ch: QubitChannel,
    n: int = 2562,
    scheme: str = "fibonacci",
    seed: int | None = 0,
    seb: SEBConfig = SEBConfig(),
    interior: bool = False,
    tol: Tolerances = DEFAULT_TOL,
) -> CapacityEstimate:
    """Sample pure inputs, map them through the channel, and take the divergence
    radius of the smallest ball enclosing the images.

    ``interior=True`` also scales the samples to random radii in [0, 1] (a
    diagnostic; the supremum is attained on pure inputs).
    """
    if n < 2:
        raise ValueError("need at least 2 samples")
    v = sample_sphere(n, scheme, seed)
    if interior:
        rng = np.random.default_rng(None if seed is None else seed + 1)
        v = v * rng.uniform(0.0, 1.0, size=(n, 1)) ** (1.0 / 3.0)
    images = apply_channel(ch, v, tol)
    res = smallest_enclosing_ball(bloch_to_density_batch(images), seb, tol)
    return CapacityEstimate(res.radius, n, res.gap, res.center, scheme, seed, res.iterations)
