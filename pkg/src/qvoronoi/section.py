"""Closed forms on the three-parameter section of d-level states (d >= 3).

The section sets every generalized Bloch coordinate beyond xi_{d+1} to zero,
leaving a matrix that is diagonal apart from the (1,2)/(2,1) block. The free
coordinates are (xi_1, xi_d, xi_{d+1}); a *constrained* point additionally
fixes xi_1 + xi_2 = d - 2 and xi_3 = ... = xi_{d-1} = -1, so the 2x2 block
carries unit trace and the other diagonal entries vanish. Pure constrained
points form an ellipsoid, which the affine map

    x = (xi_1 - (d-2)/2) / (d/2),  y = xi_d,  z = xi_{d+1}

sends onto the unit sphere.

Sign conventions: ``divergence_boundary_residual`` and
``geodesic_bisector_residual`` are positive where the point is closer to the
first site; ``euclidean_boundary_residual`` is d(a,p) - d(b,p) and so is
negative there.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bloch import xi_to_density
from .errors import DegenerateR, IdenticalSites, NotUnit, PureRho

__all__ = [
    "SectionPoint",
    "SectionSite",
    "SectionEigen",
    "RankOneClass",
    "section_xi",
    "section_density",
    "section_eigen",
    "rank_one_classify",
    "pure_ellipsoid_residual",
    "trace_sigma_log_rho",
    "divergence_boundary_residual",
    "euclidean_boundary_residual",
    "ellipsoid_to_sphere",
    "sphere_to_ellipsoid",
    "geodesic_bisector_residual",
    "triples_to_xi",
    "xi_to_triples",
    "example_sites",
]


def _check_dim(d):
    if int(d) != d or d < 3:
        raise ValueError(f"the section requires d >= 3, got d={d}")


@dataclass(frozen=True)
class SectionPoint:
    """A point (xi_1, xi_d, xi_{d+1}) of the section.

    ``rest`` holds xi_2 ... xi_{d-1} and is only used when ``constrained`` is
    False (zeros if omitted).
    """

    dim: int
    xi1: float
    xid: float = 0.0
    xid1: float = 0.0
    constrained: bool = True
    rest: tuple | None = None

    def __post_init__(self):
        _check_dim(self.dim)
        if self.rest is not None and len(self.rest) != self.dim - 2:
            raise ValueError(f"rest must hold xi_2..xi_{self.dim - 1}")

    @property
    def triple(self):
        return np.array([self.xi1, self.xid, self.xid1], dtype=float)

    def diagonal(self) -> np.ndarray:
        """xi_1 ... xi_{d-1}."""
        d = self.dim
        if self.constrained:
            return np.concatenate([[self.xi1, d - 2 - self.xi1], -np.ones(d - 3)])
        rest = np.zeros(d - 2) if self.rest is None else np.asarray(self.rest, dtype=float)
        return np.concatenate([[self.xi1], rest])


@dataclass(frozen=True)
class SectionSite:
    """Site (eta_1, eta_d, eta_{d+1}); always constrained, eta_2 = d - 2 - eta_1."""

    dim: int
    eta1: float
    etad: float = 0.0
    etad1: float = 0.0

    def __post_init__(self):
        _check_dim(self.dim)

    @property
    def triple(self):
        return np.array([self.eta1, self.etad, self.etad1], dtype=float)

    def as_point(self) -> SectionPoint:
        return SectionPoint(self.dim, self.eta1, self.etad, self.etad1)


@dataclass(frozen=True)
class SectionEigen:
    lambda1: float
    lambda2: float
    r: float
    Rplus: float
    Rminus: float
    X: np.ndarray
    others: np.ndarray
    degenerate: bool = False

    def spectrum(self) -> np.ndarray:
        """All d eigenvalues, descending."""
        return np.sort(np.concatenate([[self.lambda1, self.lambda2], self.others]))[::-1]


@dataclass(frozen=True)
class RankOneClass:
    variant: str  # "Case1", "Case2", "Case3" or "NotRankOne"
    k: int | None = None

    def __str__(self):
        return f"Case2(k={self.k})" if self.variant == "Case2" else self.variant


def section_xi(p: SectionPoint) -> np.ndarray:
    d = p.dim
    xi = np.zeros(d * d - 1)
    xi[: d - 1] = p.diagonal()
    xi[d - 1] = p.xid
    xi[d] = p.xid1
    return xi


def section_density(p: SectionPoint) -> np.ndarray:
    """The section matrix; identical to xi_to_density on the embedded xi. PSD is not checked."""
    return xi_to_density(section_xi(p))


def triples_to_xi(dim: int, triples) -> np.ndarray:
    """Embed constrained (xi_1, xi_d, xi_{d+1}) triples ``(..., 3)`` as full xi vectors."""
    _check_dim(dim)
    t = np.asarray(triples, dtype=float)
    out = np.zeros(t.shape[:-1] + (dim * dim - 1,))
    out[..., 0] = t[..., 0]
    out[..., 1] = dim - 2 - t[..., 0]
    out[..., 2 : dim - 1] = -1.0
    out[..., dim - 1] = t[..., 1]
    out[..., dim] = t[..., 2]
    return out


def xi_to_triples(dim: int, xi) -> np.ndarray:
    xi = np.asarray(xi, dtype=float)
    return xi[..., [0, dim - 1, dim]]


def section_eigen(p: SectionPoint, tol: float = 1e-12) -> SectionEigen:
    """Closed-form eigenstructure of the section matrix.

    The 2x2 block has eigenvalues ``(xi_1+xi_2+2)/(2d) +- r/2`` with
    eigenvectors ``(c*, lambda - a)`` normalized by sqrt(R+-). When one of
    R+- vanishes (off-diagonal zero) the column falls back to the matching
    standard basis vector; when r vanishes X is the identity and
    ``degenerate`` is set.
    """
    d = p.dim
    diag = p.diagonal()
    x1, x2 = diag[0], diag[1]
    off2 = p.xid**2 + p.xid1**2
    r = float(np.sqrt((x1 - x2) ** 2 / d**2 + off2))
    mean = (x1 + x2 + 2.0) / (2.0 * d)
    l1, l2 = mean + r / 2.0, mean - r / 2.0
    h = (x2 - x1) / (2.0 * d)
    Rp = off2 / 4.0 + (h + r / 2.0) ** 2
    Rm = off2 / 4.0 + (h - r / 2.0) ** 2
    others = np.concatenate([(diag[2:] + 1.0) / d, [(1.0 - diag.sum()) / d]])
    c_bar = (p.xid - 1j * p.xid1) / 2.0
    if r <= tol:
        return SectionEigen(l1, l2, r, Rp, Rm, np.eye(2, dtype=complex), others, True)
    X = np.empty((2, 2), dtype=complex)
    for col, (R, top) in enumerate(((Rp, h + r / 2.0), (Rm, h - r / 2.0))):
        if R > tol:
            X[:, col] = np.array([c_bar, top]) / np.sqrt(R)
        else:
            # c = 0 and this eigenvalue equals the diagonal entry a = (xi_1+1)/d
            X[:, col] = [1.0, 0.0]
    if Rp <= tol or Rm <= tol:
        # the other column must be the orthogonal complement
        j = 1 if Rp <= tol else 0
        X[:, j] = [0.0, 1.0]
    return SectionEigen(l1, l2, r, Rp, Rm, X, others, False)


def rank_one_classify(p: SectionPoint, tol: float = 1e-9) -> RankOneClass:
    """Which of the three rank-one patterns (if any) the section point realizes.

    Rank is decided numerically from the spectrum of section_density; the
    surviving eigenvalue is then located by coordinate pattern.
    """
    d = p.dim
    w = np.linalg.eigvalsh(section_density(p))
    if np.sum(np.abs(w) > tol) != 1 or w.min() < -tol:
        return RankOneClass("NotRankOne")
    e = section_eigen(p)
    if abs(e.others[-1] - 1.0) <= tol:
        return RankOneClass("Case1")
    for k in range(3, d):
        if abs(e.others[k - 3] - 1.0) <= tol:
            return RankOneClass("Case2", k)
    # only one member of the r-split pair survives; lambda1 >= lambda2 forces lambda1 = 1
    if abs(e.lambda1 - 1.0) <= tol and abs(e.lambda2) <= tol:
        return RankOneClass("Case3")
    return RankOneClass("NotRankOne")


def _triple_of(obj):
    if isinstance(obj, (SectionPoint, SectionSite)):
        return obj.dim, obj.triple
    raise TypeError("expected a SectionPoint or SectionSite")


def pure_ellipsoid_residual(s, dim: int | None = None):
    """``(d-2-2 eta_1)^2/d^2 + eta_d^2 + eta_{d+1}^2 - 1``; zero on pure constrained states.

    ``s`` is a SectionSite/SectionPoint or an array of triples with ``dim`` given.
    """
    if dim is None:
        dim, t = _triple_of(s)
    else:
        t = np.asarray(s, dtype=float)
    d = dim
    return (d - 2 - 2 * t[..., 0]) ** 2 / d**2 + t[..., 1] ** 2 + t[..., 2] ** 2 - 1.0


def trace_sigma_log_rho(s: SectionSite, p: SectionPoint, tol: float = 1e-12) -> float:
    """Closed form of ``Tr sigma log rho`` for a constrained site and point.

    Requires 0 < r < 1 for the point so both block eigenvalues are positive.
    """
    d = p.dim
    if not p.constrained:
        raise ValueError("trace_sigma_log_rho needs a constrained point")
    if s.dim != d:
        raise ValueError("site and point dimensions differ")
    e = section_eigen(p)
    if e.r <= tol:
        raise DegenerateR(f"r={e.r:.3e}")
    if e.r >= 1.0 - tol:
        raise PureRho(f"r={e.r:.6g} >= 1")
    c = (d - 2) / 2.0
    coef = (s.etad * p.xid + s.etad1 * p.xid1) / (2 * e.r) + 2 * (s.eta1 - c) * (p.xi1 - c) / (d**2 * e.r)
    return coef * np.log(e.lambda1 / e.lambda2) + 0.5 * np.log(e.lambda1 * e.lambda2)


def _site_pair(a, b):
    if a.dim != b.dim:
        raise ValueError("sites live in different dimensions")
    ta, tb = a.triple, b.triple
    if np.array_equal(ta, tb):
        raise IdenticalSites("the two sites coincide")
    return a.dim, ta, tb


def _point_triples(p):
    if isinstance(p, (SectionPoint, SectionSite)):
        return p.triple
    return np.asarray(p, dtype=float)


def divergence_boundary_residual(a: SectionSite, b: SectionSite, p):
    """Residual whose zero set is the divergence bisector of two pure sites.

    ``(eta_d - eta~_d) xi_d + (eta_{d+1} - eta~_{d+1}) xi_{d+1}
    + 4 (eta_1 - eta~_1)(xi_1 - (d-2)/2) / d^2``. ``p`` may be a point or
    an array of (xi_1, xi_d, xi_{d+1}) triples.
    """
    d, ta, tb = _site_pair(a, b)
    t = _point_triples(p)
    de = ta - tb
    return de[1] * t[..., 1] + de[2] * t[..., 2] + 4.0 * de[0] * (t[..., 0] - (d - 2) / 2.0) / d**2


def euclidean_boundary_residual(a: SectionSite, b: SectionSite, p):
    """``d(a, p) - d(b, p)`` for the squared coordinate distance on constrained points."""
    _, ta, tb = _site_pair(a, b)
    t = _point_triples(p)
    de = ta - tb
    sq = ta**2 - tb**2
    return (
        -4.0 * de[0] * t[..., 0]
        - 2.0 * de[1] * t[..., 1]
        - 2.0 * de[2] * t[..., 2]
        + 2.0 * sq[0]
        + sq[1]
        + sq[2]
    )


def ellipsoid_to_sphere(s, dim: int | None = None) -> np.ndarray:
    """Affine map sending the pure-state ellipsoid onto the unit sphere."""
    if dim is None:
        dim, t = _triple_of(s)
    else:
        t = np.asarray(s, dtype=float)
    out = np.array(t, dtype=float, copy=True)
    out[..., 0] = (t[..., 0] - (dim - 2) / 2.0) / (dim / 2.0)
    return out


def sphere_to_ellipsoid(u, dim: int) -> np.ndarray:
    _check_dim(dim)
    u = np.asarray(u, dtype=float)
    out = np.array(u, copy=True)
    out[..., 0] = (dim - 2) / 2.0 + (dim / 2.0) * u[..., 0]
    return out


def geodesic_bisector_residual(a, b, q, tol: float = 1e-9):
    """``q . (a - b)``: zero on the great-circle bisector, positive nearer ``a``."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    q = np.asarray(q, dtype=float)
    for v in (a, b):
        if abs(np.linalg.norm(v) - 1.0) > tol:
            raise NotUnit("sites must be unit vectors")
    if np.any(np.abs(np.linalg.norm(q, axis=-1) - 1.0) > tol):
        raise NotUnit("evaluation points must be unit vectors")
    if np.array_equal(a, b):
        raise IdenticalSites("the two sites coincide")
    return q @ (a - b)


def example_sites(example: int, dim: int, reading: str = "mirrored") -> np.ndarray:
    """Site triples (eta_1, eta_d, eta_{d+1}) of the built-in site sets.

    1: the two diagonal pure states (d-1, 0, 0) and (-1, 0, 0).
    2: a pair mirrored in xi_{d+1}, ((d-2)/2, 0, +-1) with ``reading="mirrored"``;
       ``reading="literal"`` gives (0, +-1, 0), which is not pure for d >= 3.
    3: eight sites on the sphere image: (1, +-1, +-1)/sqrt(3), plus four points
       with first coordinate -1/sqrt(3) on the axes of the other two.
    """
    _check_dim(dim)
    d = dim
    c = (d - 2) / 2.0
    if example == 1:
        return np.array([[d - 1.0, 0.0, 0.0], [-1.0, 0.0, 0.0]])
    if example == 2:
        if reading == "literal":
            return np.array([[0.0, 1.0, 0.0], [0.0, -1.0, 0.0]])
        return np.array([[c, 0.0, 1.0], [c, 0.0, -1.0]])
    if example == 3:
        s3, s23 = 1 / np.sqrt(3.0), np.sqrt(2.0 / 3.0)
        hi, lo = c + d / (2 * np.sqrt(3.0)), c - d / (2 * np.sqrt(3.0))
        sites = [[hi, sy, sz] for sy in (s3, -s3) for sz in (s3, -s3)]
        sites += [[lo, s23, 0.0], [lo, -s23, 0.0], [lo, 0.0, s23], [lo, 0.0, -s23]]
        return np.array(sites)
    raise ValueError(f"no example {example}")
