"""Dense Hermitian matrix algebra for density matrices.

Validation, eigendecomposition, the matrix logarithm, the quantum divergence
``D(sigma||rho) = Tr sigma (log sigma - log rho)`` (natural log, nats) and the
coordinate distances used by the Voronoi engine.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    ConvergenceFailure,
    DimensionMismatch,
    NotHermitian,
    NotPSD,
    SingularSecondArgument,
    SingularState,
    TraceNotOne,
)

__all__ = [
    "Tolerances",
    "DEFAULT_TOL",
    "DensityMatrix",
    "EigenDecomposition",
    "as_matrix",
    "validate_density",
    "hermitian_eig",
    "matrix_log",
    "neg_entropy",
    "von_neumann_entropy",
    "trace_sigma_log_rho",
    "divergence",
    "divergence_matrix",
    "coordinate_distance_sq",
    "hilbert_schmidt_distance_sq",
]


@dataclass(frozen=True)
class Tolerances:
    herm: float = 1e-9
    trace: float = 1e-9
    psd: float = 1e-9
    rank: float = 1e-12
    eig: float = 1e-10


DEFAULT_TOL = Tolerances()


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """A validated complex Hermitian, unit-trace, PSD matrix."""

    matrix: np.ndarray

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def __array__(self, dtype=None, copy=None):
        return self.matrix if dtype is None else self.matrix.astype(dtype)


@dataclass(frozen=True)
class EigenDecomposition:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        u = self.eigenvectors
        return (u * self.eigenvalues) @ u.conj().T


def as_matrix(m) -> np.ndarray:
    if isinstance(m, DensityMatrix):
        return m.matrix
    return np.asarray(m, dtype=complex)


def _check_square(a: np.ndarray):
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {a.shape}")


def validate_density(m, tol: Tolerances = DEFAULT_TOL) -> DensityMatrix:
    """Check the three density-matrix conditions and wrap ``m``.

    Raises NotHermitian, TraceNotOne or NotPSD (in that order of checking),
    each carrying the violation magnitude.
    """
    a = as_matrix(m)
    _check_square(a)
    herm = np.max(np.abs(a - a.conj().T)) if a.size else 0.0
    if herm > tol.herm:
        raise NotHermitian(herm)
    tr = abs(np.trace(a) - 1.0)
    if tr > tol.trace:
        raise TraceNotOne(tr)
    lam_min = np.linalg.eigvalsh(a).min()
    if lam_min < -tol.psd:
        raise NotPSD(-lam_min)
    return DensityMatrix(a.copy())


def hermitian_eig(rho) -> EigenDecomposition:
    """Eigendecomposition with eigenvalues sorted descending.

    Ties keep the solver's index order, so the output is deterministic.
    """
    a = as_matrix(rho)
    _check_square(a)
    try:
        w, u = np.linalg.eigh(a)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceFailure(str(exc)) from exc
    order = np.argsort(-w, kind="stable")
    return EigenDecomposition(w[order], u[:, order])


def matrix_log(rho, tol: Tolerances = DEFAULT_TOL, support: bool = False) -> np.ndarray:
    """``X diag(log lambda) X*`` for a positive definite Hermitian matrix.

    With ``support=True`` eigenvalues ``<= tol.rank`` are treated as the kernel
    and contribute zero, i.e. the logarithm restricted to the support.
    """
    eig = hermitian_eig(rho)
    w, u = eig.eigenvalues, eig.eigenvectors
    kernel = w <= tol.rank
    if kernel.any() and not support:
        raise SingularState(f"smallest eigenvalue {w.min():.3e} <= {tol.rank:g}")
    logw = np.where(kernel, 0.0, np.log(np.where(kernel, 1.0, w)))
    return (u * logw) @ u.conj().T


def _xlogx(w: np.ndarray, cutoff: float) -> np.ndarray:
    # 0 log 0 = 0 for eigenvalues at or below the cutoff
    keep = w > cutoff
    return np.where(keep, w * np.log(np.where(keep, w, 1.0)), 0.0)


def neg_entropy(sigma, tol: Tolerances = DEFAULT_TOL):
    """``Tr sigma log sigma``; accepts a single matrix or a stack ``(n, d, d)``."""
    a = as_matrix(sigma)
    w = np.linalg.eigvalsh(a)
    return _xlogx(w, tol.rank).sum(axis=-1)


def von_neumann_entropy(sigma, tol: Tolerances = DEFAULT_TOL):
    return -neg_entropy(sigma, tol)


def _trace_log_batch(sigmas: np.ndarray, rhos: np.ndarray, tol: Tolerances, support: bool) -> np.ndarray:
    """``Tr sigma_k log rho_j`` for stacks sigmas (k,d,d) and rhos (n,d,d) -> (k, n)."""
    try:
        w, u = np.linalg.eigh(rhos)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceFailure(str(exc)) from exc
    kernel = w <= tol.rank
    # weight of sigma_k along each eigenvector of rho_j
    weights = np.einsum("naj,kab,nbj->knj", u.conj(), sigmas, u, optimize=True).real
    if kernel.any():
        if not support:
            raise SingularSecondArgument(f"second argument has eigenvalue {w.min():.3e} <= {tol.rank:g}")
        leak = np.where(kernel[None], weights, 0.0).sum(axis=-1)
        if leak.max() > tol.psd:
            raise SingularSecondArgument(
                f"first argument has weight {leak.max():.3e} on the kernel of the second"
            )
    logw = np.where(kernel, 0.0, np.log(np.where(kernel, 1.0, w)))
    return np.einsum("knj,nj->kn", weights, logw)


def trace_sigma_log_rho(sigma, rho, tol: Tolerances = DEFAULT_TOL, support: bool = False) -> float:
    s, r = as_matrix(sigma), as_matrix(rho)
    if s.shape != r.shape:
        raise DimensionMismatch(f"{s.shape} vs {r.shape}")
    return float(_trace_log_batch(s[None], r[None], tol, support)[0, 0])


def divergence(sigma, rho, tol: Tolerances = DEFAULT_TOL, support: bool = False) -> float:
    """Quantum divergence ``D(sigma||rho)`` in nats.

    ``rho`` must be full rank unless ``support=True``, in which case it only
    needs to be full rank on the support of ``sigma`` (the value is finite
    exactly then). ``sigma`` may be rank deficient.
    """
    s, r = as_matrix(sigma), as_matrix(rho)
    _check_square(s)
    if s.shape != r.shape:
        raise DimensionMismatch(f"{s.shape} vs {r.shape}")
    d = float(neg_entropy(s, tol)) - trace_sigma_log_rho(s, r, tol, support)
    # round-off can leave -1e-16 for sigma == rho
    return max(d, 0.0) if d > -1e-12 else d


def divergence_matrix(sigmas, rhos, tol: Tolerances = DEFAULT_TOL, support: bool = False) -> np.ndarray:
    """``D(sigma_k || rho_j)`` for every pair; returns shape (k, n)."""
    s = np.asarray(sigmas, dtype=complex)
    r = np.asarray(rhos, dtype=complex)
    if s.ndim != 3 or r.ndim != 3 or s.shape[1:] != r.shape[1:]:
        raise DimensionMismatch(f"{s.shape} vs {r.shape}")
    return neg_entropy(s, tol)[:, None] - _trace_log_batch(s, r, tol, support)


def coordinate_distance_sq(xi_a, xi_b) -> float:
    """Squared Euclidean distance between generalized Bloch coordinate vectors."""
    a = np.asarray(getattr(xi_a, "xi", xi_a), dtype=float)
    b = np.asarray(getattr(xi_b, "xi", xi_b), dtype=float)
    if a.shape[-1] != b.shape[-1]:
        raise DimensionMismatch(f"{a.shape} vs {b.shape}")
    return np.sum((a - b) ** 2, axis=-1)


def hilbert_schmidt_distance_sq(a, b) -> float:
    """``||a - b||_F^2`` for matrices (or broadcastable stacks)."""
    x, y = as_matrix(a), as_matrix(b)
    if x.shape[-2:] != y.shape[-2:]:
        raise DimensionMismatch(f"{x.shape} vs {y.shape}")
    return np.sum(np.abs(x - y) ** 2, axis=(-2, -1))
