"""Kernel backend selection.

The Cython extension is used when it was built; otherwise (or when
``QVORONOI_PURE_PYTHON=1``) the numpy implementations are used. Both expose
``qubit_max_divergence``, ``qubit_grid_minimax`` and ``nearest_two``.
"""

import os

import numpy as np

from . import _kernels_py

BACKEND = "python"
_impl = _kernels_py
if os.environ.get("QVORONOI_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _impl  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:
        _impl = _kernels_py


def _prep(centers, points, neg_entropy):
    return (
        np.ascontiguousarray(centers, dtype=np.float64).reshape(-1, 3),
        np.ascontiguousarray(points, dtype=np.float64).reshape(-1, 3),
        np.ascontiguousarray(neg_entropy, dtype=np.float64).ravel(),
    )


def qubit_max_divergence(centers, points, neg_entropy, impl=None):
    """For each Bloch center c (|c| < 1): ``max_i D(v_i || c)`` and the arg-max.

    Uses the one-qubit closed form ``D(v||c) = Tr s log s - a(|c|) - b(|c|) v.c``
    with ``a(s) = log((1-s^2)/4)/2`` and ``b(s) = artanh(s)/s``;
    ``neg_entropy[i]`` is ``Tr sigma_i log sigma_i``.
    """
    return (impl or _impl).qubit_max_divergence(*_prep(centers, points, neg_entropy))


def qubit_grid_minimax(centers, points, neg_entropy, impl=None):
    """Best center index, its max-divergence value, and its farthest point index."""
    j, val, far = (impl or _impl).qubit_grid_minimax(*_prep(centers, points, neg_entropy))
    return int(j), float(val), int(far)


def nearest_two(dist, impl=None):
    """Row-wise arg-min (lowest index wins ties) and the gap to the runner-up."""
    return (impl or _impl).nearest_two(np.ascontiguousarray(dist, dtype=np.float64))
