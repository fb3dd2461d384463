"""Coordinates <-> density matrices, purity, and pure-state sampling.

Index convention for generalized Bloch coordinates (stored 0-based, named
1-based below as xi_1 ... xi_{d^2-1}):

* xi_1 ... xi_{d-1} set the diagonal: ``rho[i, i] = (xi_{i+1} + 1) / d`` for
  i < d-1, and the last diagonal entry is ``(1 - sum xi_1..xi_{d-1}) / d``.
* The remaining coordinates come in (real, imaginary) pairs, one pair per
  upper-triangular entry taken row-major starting at xi_d:
  ``rho[i, j] = (xi_k - 1j * xi_{k+1}) / 2`` for i < j, lower triangle by
  conjugation. Entry (1,2) gets (xi_d, xi_{d+1}), entry (1,d) gets
  (xi_{3d-4}, xi_{3d-3}) and entry (d-1,d) gets (xi_{d^2-2}, xi_{d^2-1}).

For d = 2 this gives xi = (z, x, y) in terms of the Bloch vector (x, y, z).
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from functools import lru_cache
from math import isqrt

import numpy as np

from .errors import NotUnit, OutsideBall, RadiusOutOfRange, TraceNotOne
from .qdm import DEFAULT_TOL, DensityMatrix, Tolerances, as_matrix

GOLDEN_ANGLE = np.pi * (3.0 - np.sqrt(5.0))


@dataclass(frozen=True, eq=False)
class GeneralizedBloch:
    dim: int
    xi: np.ndarray

    def __post_init__(self):
        xi = np.asarray(self.xi, dtype=float)
        if xi.shape[-1] != self.dim**2 - 1:
            raise ValueError(f"d={self.dim} needs {self.dim**2 - 1} coordinates, got {xi.shape[-1]}")
        object.__setattr__(self, "xi", xi)


def dim_from_length(n: int) -> int:
    d = isqrt(n + 1)
    if d * d != n + 1 or d < 2:
        raise ValueError(f"{n} is not d^2 - 1 for an integer d >= 2")
    return d


@lru_cache(maxsize=None)
def offdiag_layout(d: int):
    """Row-major (i, j) pairs of the upper triangle and their real-part xi index (0-based)."""
    rows, cols = np.triu_indices(d, k=1)
    first = d - 1 + 2 * np.arange(rows.size)
    return rows, cols, first


def _coords(g):
    if isinstance(g, GeneralizedBloch):
        return g.dim, g.xi
    xi = np.asarray(g, dtype=float)
    return dim_from_length(xi.shape[-1]), xi


def xi_to_density(g) -> np.ndarray:
    """Hermitian unit-trace matrix for generalized Bloch coordinates.

    Accepts a GeneralizedBloch, a single coordinate vector, or a stack of
    shape ``(..., d^2 - 1)``. Positivity is not implied.
    """
    d, xi = _coords(g)
    lead = xi.shape[:-1]
    out = np.zeros(lead + (d, d), dtype=complex)
    diag = xi[..., : d - 1]
    idx = np.arange(d - 1)
    out[..., idx, idx] = (diag + 1.0) / d
    out[..., d - 1, d - 1] = (1.0 - diag.sum(axis=-1)) / d
    rows, cols, first = offdiag_layout(d)
    upper = (xi[..., first] - 1j * xi[..., first + 1]) / 2.0
    out[..., rows, cols] = upper
    out[..., cols, rows] = upper.conj()
    return out


def density_to_xi(rho, tol: Tolerances = DEFAULT_TOL) -> GeneralizedBloch:
    a = as_matrix(rho)
    d = a.shape[-1]
    tr = np.trace(a, axis1=-2, axis2=-1)
    if np.max(np.abs(tr - 1.0)) > tol.trace:
        raise TraceNotOne(np.max(np.abs(tr - 1.0)))
    xi = np.empty(a.shape[:-2] + (d * d - 1,))
    idx = np.arange(d - 1)
    xi[..., : d - 1] = d * a[..., idx, idx].real - 1.0
    rows, cols, first = offdiag_layout(d)
    upper = a[..., rows, cols]
    xi[..., first] = 2.0 * upper.real
    xi[..., first + 1] = -2.0 * upper.imag
    return GeneralizedBloch(d, xi)


def bloch_to_xi(v) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    return v[..., [2, 0, 1]]


def xi_to_bloch(xi) -> np.ndarray:
    xi = np.asarray(getattr(xi, "xi", xi), dtype=float)
    return xi[..., [1, 2, 0]]


def bloch_to_density(v, tol: Tolerances = DEFAULT_TOL) -> DensityMatrix:
    """One-qubit state ``[[1+z, x-iy], [x+iy, 1-z]] / 2``."""
    x, y, z = np.asarray(v, dtype=float)
    norm = np.sqrt(x * x + y * y + z * z)
    if norm > 1.0 + tol.psd:
        raise OutsideBall(f"Bloch vector norm {norm:.6g} > 1")
    m = 0.5 * np.array([[1 + z, x - 1j * y], [x + 1j * y, 1 - z]])
    return DensityMatrix(m)


def bloch_to_density_batch(v) -> np.ndarray:
    """Unchecked stack version of bloch_to_density: ``(n, 3) -> (n, 2, 2)``."""
    return xi_to_density(bloch_to_xi(v))


def is_pure(rho, tol: float = 1e-9) -> bool:
    """True iff the second largest eigenvalue is at most ``tol``."""
    w = np.linalg.eigvalsh(as_matrix(rho))
    return bool(w.size < 2 or w[-2] <= tol)


def sample_sphere(n: int, scheme: str = "fibonacci", seed: int | None = 0) -> np.ndarray:
    """``n`` unit vectors as an ``(n, 3)`` array.

    ``fibonacci`` is the deterministic golden-angle lattice with half-step
    offsets in z; ``uniform`` draws seeded Gaussian vectors and normalizes.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if scheme == "fibonacci":
        i = np.arange(n, dtype=float)
        z = 1.0 - (2.0 * i + 1.0) / n
        rho = np.sqrt(np.maximum(0.0, 1.0 - z * z))
        phi = GOLDEN_ANGLE * i
        return np.column_stack([rho * np.cos(phi), rho * np.sin(phi), z])
    if scheme in ("uniform", "uniform-random", "random"):
        rng = np.random.default_rng(seed)
        g = rng.standard_normal((n, 3))
        return g / np.linalg.norm(g, axis=1, keepdims=True)
    raise ValueError(f"unknown sampling scheme {scheme!r}")


def shrink_to_radius(v, r: float, tol: float = 1e-9) -> np.ndarray:
    """Scale unit vector(s) ``v`` to radius ``r`` (full rank for r < 1)."""
    if not 0.0 <= r <= 1.0:
        raise RadiusOutOfRange(f"r={r} not in [0, 1]")
    v = np.asarray(v, dtype=float)
    norms = np.linalg.norm(v, axis=-1)
    if np.any(np.abs(norms - 1.0) > tol):
        raise NotUnit("shrink_to_radius expects pure (unit) Bloch vectors")
    return r * v


def write_points_csv(path, points, columns=("x", "y", "z"), comment: str | None = None):
    """One row per point with round-trip float formatting (``repr``)."""
    points = np.asarray(points, dtype=float)
    with open(path, "w", newline="") as fh:
        if comment:
            fh.write(f"# {comment}\n")
        w = csv.writer(fh, lineterminator="\r\n")
        w.writerow(columns)
        for row in points:
            w.writerow([repr(float(x)) for x in row])


def read_points_csv(path) -> np.ndarray:
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(line for line in fh if not line.startswith("#"))]
    return np.array([[float(x) for x in r] for r in rows[1:]])
