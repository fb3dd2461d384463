"""Nearest-site cells over pure-state point clouds, diagram comparison and boundary tracing.

Points and sites are generalized Bloch coordinate arrays of shape
``(n, d^2 - 1)``. For d = 2 they are pure qubit states; for d >= 3 they must
lie on the constrained section (see ``qvoronoi.section``). Both surfaces are
identified with the unit sphere: the Bloch vector for d = 2, the affine
ellipsoid-to-sphere map for d >= 3.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .bloch import bloch_to_xi, dim_from_length, xi_to_bloch, xi_to_density
from .errors import EmptySites, ImpureSite, PointSetMismatch, RadiusOutOfRange
from .qdm import DEFAULT_TOL, Tolerances, divergence_matrix
from .section import ellipsoid_to_sphere, sphere_to_ellipsoid, triples_to_xi, xi_to_triples

__all__ = [
    "DivergenceLimit",
    "CoordinateEuclidean",
    "Geodesic",
    "HilbertSchmidt",
    "parse_kind",
    "to_sphere",
    "from_sphere",
    "pure_points",
    "distance_matrix",
    "CellAssignment",
    "assign_cells",
    "ComparisonReport",
    "compare_diagrams",
    "Polyline",
    "Boundary",
    "extract_boundary",
]

BOUNDARY_TOL = 1e-7


@dataclass(frozen=True)
class DivergenceLimit:
    """``D(site || point shrunk to radius r)``; sites in the first argument."""

    r: float = 0.9999
    name = "divergence"

    def __post_init__(self):
        if not 0.0 < self.r < 1.0:
            raise RadiusOutOfRange(f"shrink radius {self.r} not in (0, 1)")


@dataclass(frozen=True)
class CoordinateEuclidean:
    """Squared Euclidean distance between generalized Bloch coordinate vectors."""

    name = "euclidean"


@dataclass(frozen=True)
class Geodesic:
    """Great-circle arc length on the unit-sphere image."""

    name = "geodesic"


@dataclass(frozen=True)
class HilbertSchmidt:
    """Squared Frobenius distance between density matrices."""

    name = "hilbert-schmidt"


def parse_kind(text: str, r: float = 0.9999):
    key = text.strip().lower()
    if key in ("divergence", "divergence-limit", "div"):
        return DivergenceLimit(r)
    if key in ("euclidean", "coordinate-euclidean", "coord"):
        return CoordinateEuclidean()
    if key in ("geodesic", "geo"):
        return Geodesic()
    if key in ("hilbert-schmidt", "hs", "hilbertschmidt"):
        return HilbertSchmidt()
    raise ValueError(f"unknown distance kind {text!r}")


def _dim_of(xi) -> int:
    return dim_from_length(np.asarray(xi).shape[-1])


def to_sphere(xi, dim: int | None = None) -> np.ndarray:
    xi = np.atleast_2d(np.asarray(xi, dtype=float))
    dim = dim or _dim_of(xi)
    if dim == 2:
        return xi_to_bloch(xi)
    embedded = triples_to_xi(dim, xi_to_triples(dim, xi))
    if not np.allclose(embedded, xi, atol=1e-12, rtol=0):
        raise ValueError("points are not on the constrained section")
    return ellipsoid_to_sphere(xi_to_triples(dim, xi), dim)


def from_sphere(u, dim: int) -> np.ndarray:
    u = np.atleast_2d(np.asarray(u, dtype=float))
    if dim == 2:
        return bloch_to_xi(u)
    return triples_to_xi(dim, sphere_to_ellipsoid(u, dim))


def pure_points(dim: int, n: int, scheme: str = "fibonacci", seed: int | None = 0) -> np.ndarray:
    """``n`` pure points (qubit sphere or section ellipsoid) as xi coordinates."""
    from .bloch import sample_sphere

    return from_sphere(sample_sphere(n, scheme, seed), dim)


def _check_pure_sites(site_mats, tol=1e-8):
    w = np.linalg.eigvalsh(site_mats)
    bad = np.flatnonzero(w[:, -2] > tol)
    if bad.size:
        raise ImpureSite(f"site(s) {bad.tolist()} are not pure")


def distance_matrix(points, sites, kind, dim: int | None = None, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Distance from every point to every site, shape ``(n_points, n_sites)``."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    sites = np.atleast_2d(np.asarray(sites, dtype=float))
    if sites.shape[0] == 0:
        raise EmptySites("no sites given")
    dim = dim or _dim_of(sites)
    if points.shape[-1] != sites.shape[-1]:
        raise PointSetMismatch("points and sites have different coordinate lengths")
    if isinstance(kind, DivergenceLimit):
        site_mats = xi_to_density(sites)
        _check_pure_sites(site_mats)
        shrunk = from_sphere(kind.r * to_sphere(points, dim), dim)
        rhos = xi_to_density(shrunk)
        # for d >= 3 the shrunk state is supported on the 2x2 block only
        return divergence_matrix(site_mats, rhos, tol, support=dim > 2).T
    if isinstance(kind, Geodesic):
        up, us = to_sphere(points, dim), to_sphere(sites, dim)
        up = up / np.linalg.norm(up, axis=1, keepdims=True)
        us = us / np.linalg.norm(us, axis=1, keepdims=True)
        return np.arccos(np.clip(up @ us.T, -1.0, 1.0))
    if isinstance(kind, CoordinateEuclidean):
        return np.sum((points[:, None, :] - sites[None, :, :]) ** 2, axis=-1)
    if isinstance(kind, HilbertSchmidt):
        a, b = xi_to_density(points), xi_to_density(sites)
        return np.sum(np.abs(a[:, None] - b[None]) ** 2, axis=(-2, -1))
    raise TypeError(f"unsupported distance kind {kind!r}")


@dataclass
class CellAssignment:
    site: np.ndarray
    margin: np.ndarray
    kind: str = ""
    boundary_tol: float = BOUNDARY_TOL

    @property
    def boundary(self) -> np.ndarray:
        return self.margin < self.boundary_tol

    def __len__(self):
        return len(self.site)


def assign_cells(points, sites, kind, dim: int | None = None, boundary_tol: float = BOUNDARY_TOL,
                 tol: Tolerances = DEFAULT_TOL) -> CellAssignment:
    """Nearest site for every point; ties go to the lowest site index."""
    dist = distance_matrix(points, sites, kind, dim, tol)
    idx, margin = kernels.nearest_two(dist)
    return CellAssignment(np.asarray(idx), np.asarray(margin), getattr(kind, "name", str(kind)), boundary_tol)


@dataclass
class ComparisonReport:
    n_points: int
    n_agree: int
    n_disagree: int
    n_boundary: int
    witnesses: list = field(default_factory=list)
    boundary_tol: float = BOUNDARY_TOL
    kinds: tuple = ()

    @property
    def identical(self) -> bool:
        return self.n_disagree == 0

    @property
    def disagreement_fraction(self) -> float:
        decided = self.n_agree + self.n_disagree
        return self.n_disagree / decided if decided else 0.0

    def to_dict(self) -> dict:
        return {
            "kinds": list(self.kinds),
            "n_points": self.n_points,
            "n_agree": self.n_agree,
            "n_disagree": self.n_disagree,
            "n_boundary": self.n_boundary,
            "disagreement_fraction": self.disagreement_fraction,
            "identical": self.identical,
            "boundary_tol": self.boundary_tol,
            "witnesses": self.witnesses,
        }


def compare_diagrams(a: CellAssignment, b: CellAssignment, boundary_tol: float | None = None,
                     max_witnesses: int = 20) -> ComparisonReport:
    """Count agreement between two assignments over the same points.

    Points within ``boundary_tol`` of a tie in either assignment are
    inconclusive and excluded from the verdict.
    """
    if len(a) != len(b):
        raise PointSetMismatch(f"{len(a)} vs {len(b)} points")
    tol = max(a.boundary_tol, b.boundary_tol) if boundary_tol is None else boundary_tol
    near = (a.margin < tol) | (b.margin < tol)
    differ = (a.site != b.site) & ~near
    wit = np.flatnonzero(differ)[:max_witnesses]
    witnesses = [
        {"point": int(i), "site_a": int(a.site[i]), "site_b": int(b.site[i]),
         "margin_a": float(a.margin[i]), "margin_b": float(b.margin[i])}
        for i in wit
    ]
    n_bnd = int(near.sum())
    n_dis = int(differ.sum())
    return ComparisonReport(len(a), len(a) - n_bnd - n_dis, n_dis, n_bnd, witnesses, tol, (a.kind, b.kind))


@dataclass
class Polyline:
    site_a: int
    site_b: int
    sphere: np.ndarray  # (m, 3) points on the unit sphere
    coords: np.ndarray  # (m, 3): (x, y, z) for d = 2, (xi_1, xi_d, xi_{d+1}) for d >= 3
    closed: bool = False


@dataclass
class Boundary:
    polylines: list
    max_deviation: float  # radians, interpolated vertex vs refined zero
    cell_bound: float  # radians, diagonal of a grid cell
    max_residual: float  # |d_a - d_b| at the refined vertices


def _sphere_pt(theta, phi):
    return np.stack([np.cos(theta), np.sin(theta) * np.cos(phi), np.sin(theta) * np.sin(phi)], axis=-1)


def _stitch(lines, eps=1e-9):
    """Join polylines whose end points coincide on the sphere."""
    lines = [np.asarray(l) for l in lines if len(l) >= 2]
    merged = True
    while merged:
        merged = False
        for i in range(len(lines)):
            for j in range(len(lines)):
                if i == j:
                    continue
                a, b = lines[i], lines[j]
                for aa, bb in ((a, b), (a, b[::-1]), (a[::-1], b), (a[::-1], b[::-1])):
                    if np.linalg.norm(aa[-1] - bb[0]) < eps:
                        lines[i] = np.vstack([aa, bb[1:]])
                        del lines[j]
                        merged = True
                        break
                if merged:
                    break
            if merged:
                break
    return [(l, bool(len(l) > 2 and np.linalg.norm(l[0] - l[-1]) < eps)) for l in lines]


def extract_boundary(sites, kind, dim: int | None = None, resolution=(180, 361), refine_iter: int = 40,
                     tol: Tolerances = DEFAULT_TOL) -> Boundary:
    """Trace the cell boundaries on the unit-sphere image of the pure surface.

    The pairwise distance difference is contoured on a (theta, phi) grid whose
    pole is the first sphere axis, restricted to where the pair are the two
    nearest sites. Each vertex is then moved onto the true zero of the
    difference by bisection along its grid edge.
    """
    import contourpy

    sites = np.atleast_2d(np.asarray(sites, dtype=float))
    if sites.shape[0] < 2:
        raise EmptySites("at least two sites are needed for a boundary")
    dim = dim or _dim_of(sites)
    nt, nph = resolution
    theta = np.linspace(0.0, np.pi, nt)
    phi = np.linspace(0.0, 2.0 * np.pi, nph)
    TH, PH = np.meshgrid(theta, phi, indexing="ij")
    grid_xi = from_sphere(_sphere_pt(TH, PH).reshape(-1, 3), dim)
    dist = distance_matrix(grid_xi, sites, kind, dim, tol).reshape(nt, nph, -1)
    top2 = np.sort(np.argsort(dist, axis=-1, kind="stable")[..., :2], axis=-1)
    dth, dph = theta[1] - theta[0], phi[1] - phi[0]

    def diff(a, b, th, ph):
        x = from_sphere(_sphere_pt(th, ph), dim)
        dd = distance_matrix(x, sites[[a, b]], kind, dim, tol)
        return dd[:, 0] - dd[:, 1]

    polylines, max_dev, max_res = [], 0.0, 0.0
    k = sites.shape[0]
    for a in range(k):
        for b in range(a + 1, k):
            mask = ~((top2[..., 0] == a) & (top2[..., 1] == b))
            if mask.all():
                continue
            z = np.ma.array(dist[..., a] - dist[..., b], mask=mask)
            gen = contourpy.contour_generator(x=phi, y=theta, z=z, line_type="Separate")
            raw = [l for l in gen.lines(0.0) if len(l) >= 2]
            if not raw:
                continue
            verts = np.vstack(raw)
            ph0, th0 = verts[:, 0].copy(), verts[:, 1].copy()
            th1, ph1 = _refine(diff, a, b, th0, ph0, theta, phi, refine_iter)
            p0, p1 = _sphere_pt(th0, ph0), _sphere_pt(th1, ph1)
            max_dev = max(max_dev, float(np.max(np.arccos(np.clip(np.sum(p0 * p1, axis=1), -1, 1)))))
            max_res = max(max_res, float(np.max(np.abs(diff(a, b, th1, ph1)))))
            splits = np.cumsum([len(l) for l in raw])[:-1]
            for line, closed in _stitch(np.split(p1, splits)):
                coords = xi_to_bloch(from_sphere(line, 2)) if dim == 2 else xi_to_triples(dim, from_sphere(line, dim))
                polylines.append(Polyline(a, b, line, coords, closed))
    return Boundary(polylines, max_dev, float(np.hypot(dth, dph)), max_res)


def _refine(diff, a, b, th, ph, theta, phi, iters):
    """Bisect each contour vertex along the grid edge it was interpolated on."""
    dth, dph = theta[1] - theta[0], phi[1] - phi[0]
    on_th = np.abs(th / dth - np.rint(th / dth)) < 1e-9
    lo_th = np.where(on_th, th, np.floor(th / dth) * dth)
    hi_th = np.where(on_th, th, np.minimum(lo_th + dth, np.pi))
    lo_ph = np.where(on_th, np.floor(ph / dph) * dph, ph)
    hi_ph = np.where(on_th, np.minimum(lo_ph + dph, 2 * np.pi), ph)
    f_lo = diff(a, b, lo_th, lo_ph)
    f_hi = diff(a, b, hi_th, hi_ph)
    ok = f_lo * f_hi < 0
    t_lo, t_hi = np.zeros_like(th), np.ones_like(th)
    for _ in range(iters):
        t = 0.5 * (t_lo + t_hi)
        f = diff(a, b, lo_th + t * (hi_th - lo_th), lo_ph + t * (hi_ph - lo_ph))
        left = np.sign(f) == np.sign(f_lo)
        t_lo = np.where(left, t, t_lo)
        t_hi = np.where(left, t_hi, t)
    t = 0.5 * (t_lo + t_hi)
    t = np.where(f_lo == 0, 0.0, np.where(f_hi == 0, 1.0, t))
    ok |= (f_lo == 0) | (f_hi == 0)
    th_r = np.where(ok, lo_th + t * (hi_th - lo_th), th)
    ph_r = np.where(ok, lo_ph + t * (hi_ph - lo_ph), ph)
    return th_r, ph_r
