"""Executable acceptance checks.

Each check returns a CheckResult with the measured values next to the
tolerance it was judged against. ``run_checks`` drives them for the CLI
``verify`` subcommand and for the test suite.
"""

from __future__ import annotations

import time
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.optimize import brentq

from . import section as sec
from .bloch import bloch_to_density_batch, sample_sphere
from .capacity import LN2, QubitChannel, holevo_capacity_estimate
from .errors import ConfigError
from .qdm import coordinate_distance_sq, divergence, hermitian_eig, trace_sigma_log_rho
from .seb import brute_force_center, smallest_enclosing_ball
from .voronoi import (
    CoordinateEuclidean,
    DivergenceLimit,
    Geodesic,
    assign_cells,
    compare_diagrams,
    from_sphere,
    pure_points,
)


@dataclass
class VerifyConfig:
    seed: int = 20240601
    section_dims: tuple = (3, 4, 5)
    r: float = 0.9999
    # 1
    coincide_sets: int = 20
    coincide_points: int = 10_000
    coincide_margin: float = 1e-6
    coincide_time_limit: float = 30.0
    # 2
    example2_points: int = 1000
    example2_tol: float = 1e-12
    # 3
    example1_tol: float = 1e-4
    # 4
    noncoincidence_points: int = 20_000
    # 5
    trace_pairs: int = 100
    trace_tol: float = 1e-8
    eigen_points: int = 500
    eig_tol: float = 1e-9
    rpm_tol: float = 1e-10
    # 6
    bisector_triples: int = 1000
    bisector_tol: float = 1e-9
    # 7
    kl_pairs: int = 100
    kl_tol: float = 1e-10
    nonneg_pairs: int = 1000
    # 8
    capacity_n: int = 2562
    capacity_tol: float = 1e-3
    depolarizing_zero_tol: float = 1e-9
    grid_spacing: float = 0.005
    capacity_time_limit: float = 60.0
    # 9
    seb_sets: int = 20

    def __post_init__(self):
        dims = tuple(int(d) for d in self.section_dims)
        if any(d < 3 for d in dims):
            raise ConfigError(f"section checks require d >= 3, got {dims}")
        self.section_dims = dims

    @classmethod
    def from_dict(cls, data: dict):
        known = {k: v for k, v in data.items() if k in cls.__dataclass_fields__}
        if "section_dims" in known:
            known["section_dims"] = tuple(known["section_dims"])
        return cls(**known)


@dataclass
class CheckResult:
    criterion: int
    name: str
    passed: bool
    measured: dict = field(default_factory=dict)
    tolerance: dict = field(default_factory=dict)
    informational: bool = False
    seconds: float = 0.0
    notes: list = field(default_factory=list)

    def line(self) -> str:
        tag = "INFO" if self.informational else ("PASS" if self.passed else "FAIL")
        return f"[{tag}] {self.criterion:>2} {self.name} ({self.seconds:.2f}s)"

    def lines(self) -> list:
        return [self.line()] + [f"       {n}" for n in self.notes]

    def to_dict(self) -> dict:
        return asdict(self)


def random_state(d, rng, rank=None):
    g = rng.standard_normal((d, rank or d)) + 1j * rng.standard_normal((d, rank or d))
    m = g @ g.conj().T
    return m / np.trace(m).real


def _random_unit(rng, n):
    v = rng.standard_normal((n, 3))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


# 1 -------------------------------------------------------------------------
def check_qubit_coincidence(cfg: VerifyConfig) -> CheckResult:
    t0 = time.perf_counter()
    rng = np.random.default_rng(cfg.seed)
    kinds = [DivergenceLimit(cfg.r), Geodesic(), CoordinateEuclidean()]
    total, decided, disagree = 0, 0, 0
    per_set = []
    for s in range(cfg.coincide_sets):
        k = int(rng.integers(2, 9))
        sites = from_sphere(_random_unit(rng, k), 2)
        pts = pure_points(2, cfg.coincide_points, "uniform", seed=cfg.seed + s)
        a = [assign_cells(pts, sites, kind) for kind in kinds]
        ok = np.all([x.margin > cfg.coincide_margin for x in a], axis=0)
        bad = ok & ((a[0].site != a[1].site) | (a[0].site != a[2].site))
        total += len(pts)
        decided += int(ok.sum())
        disagree += int(bad.sum())
        per_set.append({"sites": k, "decided": int(ok.sum()), "disagree": int(bad.sum())})
    secs = time.perf_counter() - t0
    return CheckResult(
        1,
        "Qubit coincidence: divergence-limit = geodesic = Euclidean",
        disagree == 0 and secs < cfg.coincide_time_limit,
        {"points": total, "decided": decided, "disagreements": disagree, "seconds": secs, "sets": per_set},
        {"margin": cfg.coincide_margin, "r": cfg.r, "seconds": cfg.coincide_time_limit},
    )


# 2 -------------------------------------------------------------------------
def check_example2(cfg: VerifyConfig) -> CheckResult:
    rng = np.random.default_rng(cfg.seed + 2)
    worst = {}
    for d in cfg.section_dims:
        a, b = (sec.SectionSite(d, *t) for t in sec.example_sites(2, d))
        plane = np.column_stack([
            rng.uniform(-1.0, d - 1.0, cfg.example2_points),
            rng.uniform(-1.0, 1.0, cfg.example2_points),
            np.zeros(cfg.example2_points),
        ])
        rd = np.abs(sec.divergence_boundary_residual(a, b, plane)).max()
        re = np.abs(sec.euclidean_boundary_residual(a, b, plane)).max()
        worst[d] = {"divergence": float(rd), "euclidean": float(re)}
    m = max(max(v.values()) for v in worst.values())
    return CheckResult(
        2,
        "Example 2: both residuals vanish on the plane xi_{d+1} = 0",
        m <= cfg.example2_tol,
        {"max_abs_residual": m, "per_d": worst},
        {"abs": cfg.example2_tol},
    )


def _meridian_root(fun, lo=1e-6, hi=np.pi - 1e-6):
    return brentq(fun, lo, hi, xtol=1e-14, rtol=1e-14, maxiter=200)


def divergence_bisector_xi1(d, r=0.9999, phis=(0.0, 0.7, 1.9, 3.1, 4.4)):
    """Numeric Example-1 divergence bisector along meridians, via the matrix path only."""
    ta, tb = sec.example_sites(1, d)
    sa = sec.section_density(sec.SectionSite(d, *ta).as_point())
    sb = sec.section_density(sec.SectionSite(d, *tb).as_point())
    roots = []
    for phi in phis:
        def g(theta):
            u = np.array([np.cos(theta), np.sin(theta) * np.cos(phi), np.sin(theta) * np.sin(phi)])
            rho = sec.section_density(sec.SectionPoint(d, *sec.sphere_to_ellipsoid(r * u, d)))
            return divergence(sa, rho, support=True) - divergence(sb, rho, support=True)

        theta = _meridian_root(g)
        roots.append((d - 2) / 2.0 + (d / 2.0) * np.cos(theta))
    return np.array(roots)


def euclidean_bisector_xi1(d, phis=(0.0, 0.7, 1.9, 3.1, 4.4)):
    """Numeric Example-1 bisector of the squared coordinate distance on the pure ellipsoid."""
    xa, xb = sec.triples_to_xi(d, sec.example_sites(1, d))
    roots = []
    for phi in phis:
        def g(theta):
            u = np.array([np.cos(theta), np.sin(theta) * np.cos(phi), np.sin(theta) * np.sin(phi)])
            p = sec.triples_to_xi(d, sec.sphere_to_ellipsoid(u, d))
            return coordinate_distance_sq(p, xa) - coordinate_distance_sq(p, xb)

        theta = _meridian_root(g)
        roots.append((d - 2) / 2.0 + (d / 2.0) * np.cos(theta))
    return np.array(roots)


def euclidean_residual_root_xi1(d):
    """Root in xi_1 of the Euclidean boundary residual at the Example-1 sites (it is linear)."""
    a, b = (sec.SectionSite(d, *t) for t in sec.example_sites(1, d))
    f0 = sec.euclidean_boundary_residual(a, b, np.array([0.0, 0.0, 0.0]))
    f1 = sec.euclidean_boundary_residual(a, b, np.array([1.0, 0.0, 0.0]))
    return float(-f0 / (f1 - f0))


# 3 -------------------------------------------------------------------------
def check_example1(cfg: VerifyConfig) -> CheckResult:
    per_d, worst, exact = {}, 0.0, True
    for d in cfg.section_dims:
        roots = divergence_bisector_xi1(d, cfg.r)
        err = float(np.max(np.abs(roots - (d - 2) / 2.0)))
        a, b = (sec.SectionSite(d, *t) for t in sec.example_sites(1, d))
        t = np.linspace(0, 2 * np.pi, 64)
        on = np.column_stack([np.full_like(t, (d - 2) / 2.0), np.cos(t), np.sin(t)])
        zero = float(np.abs(sec.divergence_boundary_residual(a, b, on)).max())
        exact &= zero == 0.0
        worst = max(worst, err)
        per_d[d] = {"numeric_xi1": roots.tolist(), "max_error": err, "closed_form_residual_on_plane": zero}
    return CheckResult(
        3,
        "Example 1 divergence boundary at xi_1 = (d-2)/2",
        worst <= cfg.example1_tol and exact,
        {"max_error": worst, "per_d": per_d},
        {"abs": cfg.example1_tol, "r": cfg.r},
    )


# 4 -------------------------------------------------------------------------
def check_noncoincidence(cfg: VerifyConfig) -> CheckResult:
    d = 5
    sites = sec.triples_to_xi(d, sec.example_sites(3, d))
    pts = pure_points(d, cfg.noncoincidence_points)
    rep5 = compare_diagrams(assign_cells(pts, sites, DivergenceLimit(cfg.r)), assign_cells(pts, sites, CoordinateEuclidean()))
    rng = np.random.default_rng(cfg.seed + 4)
    while True:
        u = _random_unit(rng, 2)
        if abs(u[0, 0] - u[1, 0]) > 0.1 and abs(u[0, 1] - u[1, 1]) > 0.1:
            break
    sites3 = from_sphere(u, 3)
    pts3 = pure_points(3, cfg.noncoincidence_points)
    rep3 = compare_diagrams(assign_cells(pts3, sites3, DivergenceLimit(cfg.r)), assign_cells(pts3, sites3, CoordinateEuclidean()))
    return CheckResult(
        4,
        "Non-coincidence for d >= 3 (Example 3 at d=5, random pair at d=3)",
        rep5.n_disagree > 0 and rep3.n_disagree > 0,
        {
            "d5_example3": {k: v for k, v in rep5.to_dict().items() if k != "witnesses"} | {"witnesses": rep5.witnesses[:5]},
            "d3_pair": {k: v for k, v in rep3.to_dict().items() if k != "witnesses"} | {"witnesses": rep3.witnesses[:5]},
            "d3_sites_sphere": u.tolist(),
        },
        {"min_witnesses": 1},
    )


def _random_constrained(d, rng, rmin=0.0, rmax=1.0):
    u = _random_unit(rng, 1)[0] * rng.uniform(rmin, rmax)
    return sec.sphere_to_ellipsoid(u, d)


# 5 -------------------------------------------------------------------------
def check_closed_forms(cfg: VerifyConfig) -> CheckResult:
    rng = np.random.default_rng(cfg.seed + 5)
    trace_err = eig_err = rpm_err = 0.0
    for d in (3, 4, 5, 6):
        for _ in range(cfg.trace_pairs):
            s = sec.SectionSite(d, *_random_constrained(d, rng))
            p = sec.SectionPoint(d, *_random_constrained(d, rng, 0.05, 0.95))
            closed = sec.trace_sigma_log_rho(s, p)
            direct = trace_sigma_log_rho(sec.section_density(s.as_point()), sec.section_density(p), support=True)
            trace_err = max(trace_err, abs(closed - direct))
        for i in range(cfg.eigen_points):
            if i % 2:
                p = sec.SectionPoint(d, *_random_constrained(d, rng))
            else:
                x = rng.uniform(-1.0, 1.0, 3)
                p = sec.SectionPoint(d, x[0], x[1], x[2], constrained=False, rest=tuple(rng.uniform(-1, 1, d - 2)))
            e = sec.section_eigen(p)
            ref = hermitian_eig(sec.section_density(p)).eigenvalues
            eig_err = max(eig_err, float(np.max(np.abs(e.spectrum() - ref))))
            diag = p.diagonal()
            h = (diag[1] - diag[0]) / (2 * d)
            rpm_err = max(rpm_err, abs(e.Rplus - e.r * (h + e.r / 2)), abs(e.Rminus + e.r * (h - e.r / 2)))
    ok = trace_err <= cfg.trace_tol and eig_err <= cfg.eig_tol and rpm_err <= cfg.rpm_tol
    return CheckResult(
        5,
        "Closed forms: Tr sigma log rho, section eigenvalues, R+- identities",
        ok,
        {"trace_max_err": trace_err, "eigen_max_err": eig_err, "rpm_max_err": rpm_err},
        {"trace": cfg.trace_tol, "eigen": cfg.eig_tol, "rpm": cfg.rpm_tol},
    )


# 6 -------------------------------------------------------------------------
def check_section_bisector(cfg: VerifyConfig) -> CheckResult:
    rng = np.random.default_rng(cfg.seed + 6)
    worst, sign_bad = 0.0, 0
    for d in (3, 5):
        for _ in range(cfg.bisector_triples):
            u = _random_unit(rng, 3)
            ta, tb, tp = sec.sphere_to_ellipsoid(u, d)
            a, b = sec.SectionSite(d, *ta), sec.SectionSite(d, *tb)
            div = sec.divergence_boundary_residual(a, b, tp)
            geo = sec.geodesic_bisector_residual(sec.ellipsoid_to_sphere(a), sec.ellipsoid_to_sphere(b),
                                                 sec.ellipsoid_to_sphere(tp, d))
            worst = max(worst, abs(div - geo))
            if abs(div) > cfg.bisector_tol and np.sign(div) != np.sign(geo):
                sign_bad += 1
    return CheckResult(
        6,
        "Section divergence bisector = geodesic bisector after the sphere map",
        sign_bad == 0 and worst <= cfg.bisector_tol,
        {"max_abs_difference": worst, "sign_mismatches": sign_bad},
        {"abs": cfg.bisector_tol},
    )


# 7 -------------------------------------------------------------------------
def check_divergence(cfg: VerifyConfig) -> CheckResult:
    rng = np.random.default_rng(cfg.seed + 7)
    kl_err = self_max = 0.0
    for d in range(2, 7):
        p = rng.dirichlet(np.ones(d), cfg.kl_pairs)
        q = rng.dirichlet(np.ones(d), cfg.kl_pairs)
        for a, b in zip(p, q):
            kl = float(np.sum(a * np.log(a / b)))
            kl_err = max(kl_err, abs(divergence(np.diag(a), np.diag(b)) - kl))
            self_max = max(self_max, abs(divergence(np.diag(a), np.diag(a))))
    neg_min = np.inf
    for _ in range(cfg.nonneg_pairs):
        d = int(rng.integers(2, 7))
        s, r = random_state(d, rng), random_state(d, rng)
        neg_min = min(neg_min, divergence(s, r))
        self_max = max(self_max, abs(divergence(s, s)))
    ok = kl_err <= cfg.kl_tol and self_max <= cfg.kl_tol and neg_min >= 0.0
    return CheckResult(
        7,
        "Divergence: classical KL on commuting pairs, D(s||s)=0, nonnegativity",
        ok,
        {"kl_max_err": kl_err, "self_max": self_max, "min_divergence": float(neg_min)},
        {"kl": cfg.kl_tol, "self": cfg.kl_tol},
    )


# 8 -------------------------------------------------------------------------
def check_capacity(cfg: VerifyConfig) -> CheckResult:
    out, ok = {}, True
    t0 = time.perf_counter()
    ident = holevo_capacity_estimate(QubitChannel.identity(), cfg.capacity_n)
    out["identity"] = {"nats": ident.value, "error": ident.value - LN2, "seconds": time.perf_counter() - t0}
    ok &= abs(ident.value - LN2) <= cfg.capacity_tol and out["identity"]["seconds"] < cfg.capacity_time_limit
    t0 = time.perf_counter()
    full = holevo_capacity_estimate(QubitChannel.depolarizing(1.0), cfg.capacity_n)
    out["fully_depolarizing"] = {"nats": full.value, "seconds": time.perf_counter() - t0}
    ok &= abs(full.value) <= cfg.depolarizing_zero_tol
    for p in (0.25, 0.5, 0.75):
        t0 = time.perf_counter()
        ch = QubitChannel.depolarizing(p)
        est = holevo_capacity_estimate(ch, cfg.capacity_n)
        imgs = bloch_to_density_batch(sample_sphere(cfg.capacity_n) @ ch.m.T + ch.b)
        grid = brute_force_center(imgs, spacing=cfg.grid_spacing)
        secs = time.perf_counter() - t0
        err = abs(est.value - grid.radius)
        out[f"depolarizing_{p}"] = {"nats": est.value, "grid_nats": grid.radius, "error": err, "seconds": secs}
        ok &= err <= cfg.capacity_tol and secs < cfg.capacity_time_limit
    return CheckResult(8, "Holevo capacity estimates (identity, depolarizing)", bool(ok), out,
                       {"abs": cfg.capacity_tol, "zero": cfg.depolarizing_zero_tol, "grid_spacing": cfg.grid_spacing,
                        "seconds": cfg.capacity_time_limit})


# 9 -------------------------------------------------------------------------
def check_seb_oracle(cfg: VerifyConfig) -> CheckResult:
    rng = np.random.default_rng(cfg.seed + 9)
    rows, ok = [], True
    for _ in range(cfg.seb_sets):
        n = int(rng.integers(3, 51))
        v = _random_unit(rng, n) * rng.uniform(0.0, 1.0, (n, 1)) ** 0.3
        pts = bloch_to_density_batch(v)
        seb = smallest_enclosing_ball(pts)
        grid = brute_force_center(pts, spacing=cfg.grid_spacing)
        allowed = grid.gap + seb.gap
        diff = grid.radius - seb.radius
        good = abs(diff) <= allowed and diff >= -seb.gap - 1e-12
        ok &= bool(good)
        rows.append({"n": n, "seb": seb.radius, "grid": grid.radius, "diff": diff, "allowed": allowed})
    return CheckResult(9, "SEB solver agrees with the brute-force grid oracle", bool(ok),
                       {"sets": rows, "max_abs_diff": max(abs(r["diff"]) for r in rows)},
                       {"combined": "grid bound + SEB gap"})


# 10 ------------------------------------------------------------------------
def check_example1_euclidean_report(cfg: VerifyConfig) -> CheckResult:
    per_d, notes = {}, []
    for d in cfg.section_dims:
        numeric = euclidean_bisector_xi1(d)
        per_d[d] = {
            "reference_xi1": 1.0,
            "residual_root_xi1": euclidean_residual_root_xi1(d),
            "numeric_bisector_xi1": float(np.mean(numeric)),
            "numeric_spread": float(np.ptp(numeric)),
            "divergence_xi1": (d - 2) / 2.0,
        }
        row = per_d[d]
        notes.append(f"d={d}: reference xi_1 = 1, residual root xi_1 = {row['residual_root_xi1']:.12g}, "
                     f"numeric bisector xi_1 = {row['numeric_bisector_xi1']:.12g}")
    return CheckResult(10, "Example 1 Euclidean boundary: reference value vs residual root vs numeric bisector",
                       True, per_d, {}, informational=True, notes=notes)


CHECKS = {
    1: check_qubit_coincidence,
    2: check_example2,
    3: check_example1,
    4: check_noncoincidence,
    5: check_closed_forms,
    6: check_section_bisector,
    7: check_divergence,
    8: check_capacity,
    9: check_seb_oracle,
    10: check_example1_euclidean_report,
}


def run_check(number: int, cfg: VerifyConfig | None = None) -> CheckResult:
    cfg = cfg or VerifyConfig()
    t0 = time.perf_counter()
    res = CHECKS[number](cfg)
    res.seconds = time.perf_counter() - t0
    return res


def run_checks(cfg: VerifyConfig | None = None, only=None) -> list:
    cfg = cfg or VerifyConfig()
    return [run_check(k, cfg) for k in sorted(CHECKS) if only is None or k in only]


def summarize(results) -> dict:
    return {
        "passed": all(r.passed for r in results if not r.informational),
        "checks": [r.to_dict() for r in results],
    }
