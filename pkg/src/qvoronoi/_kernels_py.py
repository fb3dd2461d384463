"""Numpy implementations of the compiled kernels (same signatures and semantics)."""

import numpy as np

_CHUNK = 4096


def _center_terms(centers):
    s = np.linalg.norm(centers, axis=1)
    alpha = 0.5 * np.log((1.0 - s * s) / 4.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        beta = np.where(s > 1e-12, np.arctanh(s) / np.where(s > 1e-12, s, 1.0), 1.0)
    return alpha, beta


def qubit_max_divergence(centers, points, neg_entropy):
    centers = np.ascontiguousarray(centers, dtype=float)
    alpha, beta = _center_terms(centers)
    values = np.empty(len(centers))
    args = np.empty(len(centers), dtype=np.intp)
    for lo in range(0, len(centers), _CHUNK):
        sl = slice(lo, lo + _CHUNK)
        vals = neg_entropy[None, :] - beta[sl, None] * (centers[sl] @ points.T)
        args[sl] = np.argmax(vals, axis=1)
        values[sl] = vals[np.arange(vals.shape[0]), args[sl]] - alpha[sl]
    return values, args


def qubit_grid_minimax(centers, points, neg_entropy):
    values, args = qubit_max_divergence(centers, points, neg_entropy)
    j = int(np.argmin(values))
    return j, float(values[j]), int(args[j])


def nearest_two(dist):
    dist = np.asarray(dist, dtype=float)
    idx = np.argmin(dist, axis=1)
    if dist.shape[1] < 2:
        return idx, np.full(dist.shape[0], np.inf)
    two = np.partition(dist, 1, axis=1)
    return idx, two[:, 1] - two[:, 0]
