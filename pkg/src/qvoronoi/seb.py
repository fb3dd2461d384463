"""Smallest enclosing ball under the quantum divergence.

Solves ``min_rho max_i D(sigma_i || rho)`` over full-rank states. Two bounds
bracket the optimum at every step: any center rho gives the upper bound
``max_i D(sigma_i || rho)``, and any mixture weights p give the lower bound

    chi(p) = S(rho_p) - sum_i p_i S(sigma_i) = min_rho sum_i p_i D(sigma_i || rho),

with ``rho_p = sum_i p_i sigma_i``. Their difference is a rigorous gap.

The solver runs in three phases:

1. farthest-point averaging: move the weights toward the current farthest
   point with step 1/(t+1);
2. multiplicative refinement ``p_i <- p_i exp(D(sigma_i || rho_p))``;
3. a trust-region sequential LP on the center coordinates. Each step
   linearizes the divergences of the near-farthest points and solves the
   resulting minimax LP; the LP dual values are mixture weights, which
   supply the lower bound.

If the gap is still open the multiplicative updates resume until
``max_iter``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linprog

from . import kernels
from .bloch import bloch_to_density, density_to_xi, xi_to_bloch, xi_to_density
from .errors import EmptySites, GridTooCoarse, NonConvergence
from .qdm import DEFAULT_TOL, DensityMatrix, Tolerances, neg_entropy

log = logging.getLogger(__name__)

__all__ = ["SEBConfig", "SEBResult", "smallest_enclosing_ball", "brute_force_center", "max_divergence"]


@dataclass(frozen=True)
class SEBConfig:
    tol: float = 1e-8
    max_iter: int = 50_000
    warm_start_iter: int = 200
    refine_iter: int = 500  # multiplicative steps before the LP polish
    polish_iter: int = 200
    polish_working_set: int = 400
    clamp: float = 1e-9
    strict: bool = False


@dataclass
class SEBResult:
    center: DensityMatrix
    radius: float
    support: list
    iterations: int
    gap: float
    lower_bound: float = float("nan")
    weights: np.ndarray | None = field(default=None, repr=False)
    converged: bool = True


def _stack(points) -> np.ndarray:
    if len(points) == 0:
        raise EmptySites("no points given")
    return np.asarray([np.asarray(p, dtype=complex) for p in points])


def max_divergence(points, center, tol: Tolerances = DEFAULT_TOL) -> float:
    """``max_i D(sigma_i || center)`` evaluated directly."""
    s = _stack(points)
    w, u = np.linalg.eigh(np.asarray(center, dtype=complex))
    logc = (u * np.log(w)) @ u.conj().T
    f = neg_entropy(s, tol) - np.einsum("iab,ba->i", s, logc).real
    return float(f.max())


def _dlog_kernel(w):
    """Divided differences of log: the Frechet derivative of log in the eigenbasis."""
    lw = np.log(w)
    dw = w[:, None] - w[None, :]
    top = np.maximum(w[:, None], w[None, :])
    close = np.abs(dw) <= 1e-12 * top
    with np.errstate(divide="ignore", invalid="ignore"):
        g = (lw[:, None] - lw[None, :]) / dw
    return np.where(close, 1.0 / top, g)


class _Problem:
    def __init__(self, s, tol, clamp):
        self.s = s
        self.nege = neg_entropy(s, tol)
        self.tol = tol
        self.clamp = clamp
        d = s.shape[1]
        m = d * d - 1
        self.m = m
        # xi coordinates are affine in the matrix: rho(theta) = rho(0) + sum_k theta_k B_k
        self.basis = xi_to_density(np.eye(m)) - xi_to_density(np.zeros(m))

    def lower(self, p):
        rho = np.einsum("i,iab->ab", p, self.s)
        w = np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))
        w = w[w > self.tol.rank]
        return float(-(w * np.log(w)).sum() + p @ self.nege)

    def mixture(self, p):
        """Divergences to the clamped mixture center, and that center."""
        rho = np.einsum("i,iab->ab", p, self.s)
        w, u = np.linalg.eigh(0.5 * (rho + rho.conj().T))
        w = np.maximum(w, self.clamp)
        w = w / w.sum()
        return self._divergences(w, u), (u * w) @ u.conj().T

    def _divergences(self, w, u):
        logc = (u * np.log(w)) @ u.conj().T
        return self.nege - np.einsum("iab,ba->i", self.s, logc).real

    def at(self, theta):
        """Divergences, eigenpairs at the center with coordinates theta; None if not full rank."""
        w, u = np.linalg.eigh(xi_to_density(theta))
        if w.min() <= self.clamp:
            return None
        return self._divergences(w, u), w, u

    def gradients(self, idx, w, u):
        """d f_i / d theta for i in idx; f_i = D(sigma_i || rho(theta))."""
        g = _dlog_kernel(w)
        sw = np.einsum("aj,iab,bk->ijk", u.conj(), self.s[idx], u, optimize=True)
        bw = np.einsum("aj,kab,bl->kjl", u.conj(), self.basis, u, optimize=True)
        return -np.einsum("ijl,klj->ik", g[None] * sw, bw, optimize=True).real


def _polish(prob: _Problem, center, lower, config: SEBConfig):
    """Trust-region sequential LP on the center coordinates.

    Yields (upper, center, divergences, weights, lower) after each LP solve.
    """
    theta = density_to_xi(center).xi
    state = prob.at(theta)
    if state is None:
        return
    f, w, u = state
    radius = 0.1
    m = prob.m
    cost = np.zeros(m + 1)
    cost[-1] = 1.0
    for _ in range(config.polish_iter):
        upper = float(f.max())
        margin = max(1e-3, 10.0 * (upper - lower)) if np.isfinite(lower) else 1e-3
        work = np.flatnonzero(f >= upper - margin)
        if len(work) > config.polish_working_set:
            work = work[np.argsort(-f[work], kind="stable")[: config.polish_working_set]]
        grad = prob.gradients(work, w, u)
        a_ub = np.hstack([grad, -np.ones((len(work), 1))])
        res = linprog(cost, A_ub=a_ub, b_ub=-f[work], bounds=[(-radius, radius)] * m + [(None, None)],
                      method="highs")
        if res.status != 0:
            return
        lam = np.maximum(-res.ineqlin.marginals, 0.0)
        p = np.zeros(len(f))
        if lam.sum() > 0:
            p[work] = lam / lam.sum()
            lower = max(lower, prob.lower(p))
        yield upper, xi_to_density(theta), f, p, lower
        if upper - lower <= config.tol:
            return
        trial = prob.at(theta + res.x[:m])
        if trial is not None and trial[0].max() < upper:
            theta = theta + res.x[:m]
            f, w, u = trial
            radius *= 2.0
        else:
            radius /= 4.0
            if radius < 1e-14:
                return


def smallest_enclosing_ball(points, config: SEBConfig = SEBConfig(), tol: Tolerances = DEFAULT_TOL) -> SEBResult:
    s = _stack(points)
    n = len(s)
    prob = _Problem(s, tol, config.clamp)

    best = {"upper": np.inf, "lower": -np.inf, "center": None, "f": None, "p": None}

    def record(upper, center, f, p, lower):
        if upper < best["upper"]:
            best.update(upper=upper, center=center, f=f)
        if lower > best["lower"]:
            best.update(lower=lower, p=p)
        return best["upper"] - best["lower"] <= config.tol

    p = np.full(n, 1.0 / n)
    it = 0
    done = False
    polished = False
    while it < config.max_iter and not done:
        it += 1
        f, center = prob.mixture(p)
        done = record(float(f.max()), center, f, p, prob.lower(p))
        if done:
            break
        if it <= config.warm_start_iter:
            far = int(np.argmax(f))
            step = 1.0 / (it + 1)
            p = (1.0 - step) * p
            p[far] += step
        else:
            g = p * np.exp(f - f.max())
            p = g / g.sum()
        if not polished and it >= config.warm_start_iter + config.refine_iter:
            polished = True
            for step_out in _polish(prob, best["center"], best["lower"], config):
                it += 1
                if record(*step_out):
                    done = True
                    break
    gap = max(best["upper"] - best["lower"], 0.0)
    converged = gap <= config.tol
    support = np.flatnonzero(best["f"] >= best["upper"] - max(gap, config.tol)).tolist()
    result = SEBResult(
        center=DensityMatrix(best["center"]),
        radius=best["upper"],
        support=support,
        iterations=it,
        gap=gap,
        lower_bound=best["lower"],
        weights=best["p"],
        converged=converged,
    )
    if not converged:
        log.warning("SEB stopped with gap %.3e > %.3e after %d iterations", gap, config.tol, it)
        if config.strict:
            raise NonConvergence(result)
    return result


def _ball_grid(center_idx, half_width, h, limit=1.0 - 1e-9):
    k = np.arange(-half_width, half_width + 1)
    g = np.stack(np.meshgrid(k, k, k, indexing="ij"), axis=-1).reshape(-1, 3)
    idx = g + np.asarray(center_idx)
    c = idx * h
    keep = np.einsum("ij,ij->i", c, c) <= limit * limit
    return idx[keep], c[keep]


def brute_force_center(
    points,
    spacing: float = 0.005,
    coarse: float = 0.05,
    window: int = 3,
    tolerance: float | None = None,
    tol: Tolerances = DEFAULT_TOL,
    impl=None,
) -> SEBResult:
    """Exhaustive grid minimax over the open Bloch ball (qubit states only).

    A full grid at ``coarse`` spacing locates the basin, then a full grid at
    ``spacing`` covers a box of ``window`` coarse cells around it. The
    objective is convex in the Bloch coordinates, so a fine-grid optimum that
    is not on the box faces is the grid optimum over the whole ball; if it
    lands on a face the box is recentered and searched again.

    ``gap`` reports the grid error bound ``L * spacing * sqrt(3) / 2`` with L
    the largest gradient norm of the component divergences at the best node.
    Raises GridTooCoarse when that bound exceeds ``tolerance``.
    """
    s = _stack(points)
    if s.shape[1] != 2:
        raise ValueError("brute_force_center handles one-qubit states only")
    v = xi_to_bloch(density_to_xi(s).xi)
    nege = neg_entropy(s, tol)

    evaluated = 0
    if coarse > spacing:
        _, cc = _ball_grid((0, 0, 0), int(np.ceil(1.0 / coarse)), coarse)
        j, _, _ = kernels.qubit_grid_minimax(cc, v, nege, impl=impl)
        evaluated += len(cc)
        start = np.rint(cc[j] / spacing).astype(int)
        half = int(np.ceil(window * coarse / spacing))
    else:
        start = np.zeros(3, dtype=int)
        half = int(np.ceil(1.0 / spacing))
    for _ in range(50):
        idx, cf = _ball_grid(start, half, spacing)
        j, val, far = kernels.qubit_grid_minimax(cf, v, nege, impl=impl)
        evaluated += len(cf)
        off = idx[j] - start
        if np.max(np.abs(off)) < half:
            break
        # on a box face: recenter, unless the face is cut by the ball boundary
        nxt = idx[j]
        if np.array_equal(nxt, start):
            break
        start = nxt
    c = cf[j]
    bound = _grid_error_bound(c, v, spacing)
    if tolerance is not None and bound > tolerance:
        raise GridTooCoarse(f"grid error bound {bound:.3e} exceeds tolerance {tolerance:.3e}")
    return SEBResult(
        center=bloch_to_density(c),
        radius=val,
        support=[far],
        iterations=evaluated,
        gap=bound,
        lower_bound=val - bound,
        converged=True,
    )


def _grid_error_bound(c, v, spacing):
    # gradient of D(v||c) in c:  -a'(s) c/s - b'(s) (v.c) c/s - b(s) v
    s = float(np.linalg.norm(c))
    if s < 1e-12:
        grads = np.linalg.norm(v, axis=1)
    else:
        chat = c / s
        a_p = -s / (1.0 - s * s)
        b = np.arctanh(s) / s
        b_p = (1.0 / (1.0 - s * s) - b) / s
        g = -(a_p + b_p * (v @ c))[:, None] * chat[None, :] - b * v
        grads = np.linalg.norm(g, axis=1)
    return float(grads.max() * spacing * np.sqrt(3.0) / 2.0)
