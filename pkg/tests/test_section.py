import numpy as np
import pytest

from qvoronoi.bloch import xi_to_density
from qvoronoi.errors import DegenerateR, IdenticalSites, NotUnit, PureRho
from qvoronoi.qdm import divergence, hermitian_eig, trace_sigma_log_rho as direct_trace
from qvoronoi.section import (
    SectionPoint,
    SectionSite,
    divergence_boundary_residual,
    ellipsoid_to_sphere,
    euclidean_boundary_residual,
    example_sites,
    geodesic_bisector_residual,
    pure_ellipsoid_residual,
    rank_one_classify,
    section_density,
    section_eigen,
    sphere_to_ellipsoid,
    trace_sigma_log_rho,
    triples_to_xi,
    xi_to_triples,
)

DIMS = [3, 4, 5, 6]


def random_point(d, rng, rmin=0.0, rmax=1.0):
    """Constrained point with block radius r drawn from [rmin, rmax]."""
    u = rng.standard_normal(3)
    u /= np.linalg.norm(u)
    t = sphere_to_ellipsoid(u * rng.uniform(rmin, rmax), d)
    return SectionPoint(d, *t)


def random_pure_site(d, rng):
    u = rng.standard_normal(3)
    return SectionSite(d, *sphere_to_ellipsoid(u / np.linalg.norm(u), d))


class TestSectionMatrix:
    def test_all_zero_unconstrained(self):
        np.testing.assert_allclose(section_density(SectionPoint(4, 0.0, constrained=False)), np.eye(4) / 4)

    def test_constrained_d3(self):
        np.testing.assert_allclose(section_density(SectionPoint(3, 1.0)), np.diag([2 / 3, 1 / 3, 0]), atol=1e-15)

    @pytest.mark.parametrize("d", DIMS)
    def test_first_pattern(self, d):
        p = SectionPoint(d, -1.0, constrained=False, rest=(-1.0,) * (d - 2))
        expected = np.zeros((d, d))
        expected[-1, -1] = 1
        np.testing.assert_allclose(section_density(p), expected, atol=1e-15)

    def test_low_dim_rejected(self):
        with pytest.raises(ValueError):
            SectionPoint(2, 0.0)

    def test_triples_round_trip(self, rng):
        t = rng.standard_normal((5, 3))
        np.testing.assert_array_equal(xi_to_triples(5, triples_to_xi(5, t)), t)


class TestEigen:
    def test_degenerate(self):
        e = section_eigen(SectionPoint(4, 0.5, constrained=False, rest=(0.5, 0.0)))
        assert e.degenerate and e.r == 0
        assert e.lambda1 == pytest.approx(1.5 / 4) and e.lambda2 == pytest.approx(1.5 / 4)
        np.testing.assert_array_equal(e.X, np.eye(2))

    def test_d3_diagonal(self):
        e = section_eigen(SectionPoint(3, 1.0))
        assert (e.r, e.lambda1, e.lambda2) == pytest.approx((1 / 3, 2 / 3, 1 / 3))
        np.testing.assert_allclose(hermitian_eig(section_density(SectionPoint(3, 1.0))).eigenvalues[:2], [2 / 3, 1 / 3])

    def test_d3_unconstrained_spectrum(self):
        p = SectionPoint(3, 1.0, constrained=False, rest=(0.0,))
        # unit trace pins the last diagonal entry to 1 - 2/3 - 1/3 = 0
        np.testing.assert_allclose(section_eigen(p).spectrum(), [2 / 3, 1 / 3, 0], atol=1e-15)
        np.testing.assert_allclose(hermitian_eig(section_density(p)).eigenvalues, [2 / 3, 1 / 3, 0], atol=1e-15)

    def test_pure(self):
        e = section_eigen(SectionPoint(3, 1.0, np.sqrt(8) / 3, 0.0))
        assert (e.r, e.lambda1, e.lambda2) == pytest.approx((1.0, 1.0, 0.0), abs=1e-14)

    @pytest.mark.parametrize("d", DIMS)
    def test_against_generic_solver(self, d, rng):
        for _ in range(500):
            if rng.random() < 0.5:
                p = random_point(d, rng)
            else:
                p = SectionPoint(d, *rng.uniform(-1, 1, 3), constrained=False,
                                 rest=tuple(rng.uniform(-1, 1, d - 2)))
            e = section_eigen(p)
            np.testing.assert_allclose(np.sort(e.spectrum()), np.linalg.eigvalsh(section_density(p)), atol=1e-9)
            if not e.degenerate:
                # X diagonalizes the 2x2 block
                blk = section_density(p)[:2, :2]
                np.testing.assert_allclose(e.X.conj().T @ blk @ e.X, np.diag([e.lambda1, e.lambda2]), atol=1e-9)

    @pytest.mark.parametrize("d", DIMS)
    def test_r_pm_identities(self, d, rng):
        for _ in range(200):
            p = random_point(d, rng)
            e = section_eigen(p)
            x1, x2 = p.diagonal()[:2]
            h = (x2 - x1) / (2 * d)
            assert e.Rplus == pytest.approx(e.r * (h + e.r / 2), abs=1e-10)
            assert e.Rminus == pytest.approx(-e.r * (h - e.r / 2), abs=1e-10)

    def test_offdiag_zero_fallback(self):
        e = section_eigen(SectionPoint(4, 2.0))
        np.testing.assert_allclose(np.abs(e.X), np.eye(2))


class TestRankOne:
    @pytest.mark.parametrize("d", DIMS)
    def test_case1(self, d):
        p = SectionPoint(d, -1.0, constrained=False, rest=(-1.0,) * (d - 2))
        assert rank_one_classify(p).variant == "Case1"

    @pytest.mark.parametrize("d", [4, 5, 6])
    def test_case2(self, d):
        for k in range(3, d):
            rest = [-1.0] * (d - 2)
            rest[k - 2] = d - 1.0  # k-th diagonal entry (xi_k + 1)/d = 1
            c = rank_one_classify(SectionPoint(d, -1.0, constrained=False, rest=tuple(rest)))
            assert (c.variant, c.k) == ("Case2", k)

    def test_case2_value_d_minus_3_is_rank_two(self):
        p = SectionPoint(5, -1.0, constrained=False, rest=(-1.0, 2.0, -1.0))
        assert np.sum(np.linalg.eigvalsh(section_density(p)) > 1e-9) == 2
        assert rank_one_classify(p).variant == "NotRankOne"

    @pytest.mark.parametrize("d", DIMS)
    def test_mixed(self, d):
        assert rank_one_classify(SectionPoint(d, 0.0, constrained=False)).variant == "NotRankOne"

    @pytest.mark.parametrize("d", DIMS)
    def test_completeness(self, d, rng):
        for _ in range(200):
            pure = rng.random() < 0.5
            p = random_point(d, rng, 1.0, 1.0) if pure else random_point(d, rng, 0.0, 0.999)
            rank = int(np.sum(np.linalg.eigvalsh(section_density(p)) > 1e-9))
            cls = rank_one_classify(p).variant
            assert (rank == 1) == (cls != "NotRankOne")
            assert (cls == "Case3") == (abs(pure_ellipsoid_residual(p)) < 1e-9)


class TestEllipsoid:
    @pytest.mark.parametrize("d", DIMS)
    def test_example1_site(self, d):
        assert pure_ellipsoid_residual(SectionSite(d, d - 1.0)) == pytest.approx(0.0, abs=1e-14)

    @pytest.mark.parametrize("d", DIMS)
    def test_example3_sites(self, d):
        np.testing.assert_allclose(pure_ellipsoid_residual(example_sites(3, d), d), 0.0, atol=1e-14)

    def test_center(self):
        assert pure_ellipsoid_residual(SectionPoint(4, 0.0)) == pytest.approx(-0.75)

    @pytest.mark.parametrize("d", DIMS)
    def test_sphere_map(self, d):
        np.testing.assert_allclose(ellipsoid_to_sphere(SectionSite(d, d - 1.0)), [1, 0, 0])
        np.testing.assert_allclose(ellipsoid_to_sphere(SectionSite(d, (d - 2) / 2)), [0, 0, 0])
        u = ellipsoid_to_sphere(example_sites(3, d), d)
        np.testing.assert_allclose(u[0], [1 / np.sqrt(3)] * 3)
        np.testing.assert_allclose(np.linalg.norm(u, axis=1), 1.0)
        np.testing.assert_allclose(sphere_to_ellipsoid(u, d), example_sites(3, d))


class TestTraceClosedForm:
    def test_self_trace(self, rng):
        d = 3
        u = rng.standard_normal(3)
        p = SectionPoint(d, *sphere_to_ellipsoid(0.5 * u / np.linalg.norm(u), d))
        rho = section_density(p)
        site = SectionSite(d, p.xi1, p.xid, p.xid1)
        assert trace_sigma_log_rho(site, p) == pytest.approx(direct_trace(rho, rho, support=True), abs=1e-12)

    @pytest.mark.parametrize("d", DIMS)
    def test_random_pairs(self, d, rng):
        err = 0.0
        for _ in range(100):
            s = random_pure_site(d, rng)
            p = random_point(d, rng, 0.05, 0.95)
            direct = direct_trace(section_density(s.as_point()), section_density(p), support=True)
            err = max(err, abs(trace_sigma_log_rho(s, p) - direct))
        assert err <= 1e-8

    @pytest.mark.parametrize("d", DIMS)
    def test_degenerate(self, d):
        with pytest.raises(DegenerateR):
            trace_sigma_log_rho(SectionSite(d, d - 1.0), SectionPoint(d, (d - 2) / 2))

    def test_pure_rho(self):
        with pytest.raises(PureRho):
            trace_sigma_log_rho(SectionSite(4, 3.0), SectionPoint(4, 3.0))


class TestBoundaryResiduals:
    def test_identical(self):
        a = SectionSite(4, 3.0)
        with pytest.raises(IdenticalSites):
            divergence_boundary_residual(a, a, a.as_point())
        with pytest.raises(IdenticalSites):
            euclidean_boundary_residual(a, a, a.as_point())

    @pytest.mark.parametrize("d", DIMS)
    def test_example2_plane(self, d, rng):
        a, b = (SectionSite(d, *t) for t in example_sites(2, d))
        u = rng.standard_normal((50, 3))
        u /= np.linalg.norm(u, axis=1, keepdims=True)
        t = sphere_to_ellipsoid(u, d)
        flip = t * [1, 1, -1]
        for f in (divergence_boundary_residual, euclidean_boundary_residual):
            np.testing.assert_allclose(f(a, b, flip), -f(a, b, t), atol=1e-12)
            t0 = t * [1, 1, 0]
            np.testing.assert_allclose(f(a, b, t0), 0.0, atol=1e-12)

    @pytest.mark.parametrize("d", DIMS)
    def test_divergence_residual_is_geodesic_residual(self, d, rng):
        for _ in range(20):
            a, b = random_pure_site(d, rng), random_pure_site(d, rng)
            ta, tb = ellipsoid_to_sphere(a), ellipsoid_to_sphere(b)
            u = rng.standard_normal((40, 3))
            u /= np.linalg.norm(u, axis=1, keepdims=True)
            res = divergence_boundary_residual(a, b, sphere_to_ellipsoid(u, d))
            geo = geodesic_bisector_residual(ta, tb, u)
            np.testing.assert_allclose(res, geo, atol=1e-12)

    def test_limit_consistency(self):
        d = 4
        a, b = example_sites(2, d)
        sa, sb = (xi_to_density(triples_to_xi(d, t)) for t in (a, b))
        q = np.array([0.6, 0.8, 0.0])  # on the bisector plane
        gaps = []
        for r in (0.9, 0.99, 0.999, 0.9999):
            rho = xi_to_density(triples_to_xi(d, sphere_to_ellipsoid(r * q, d)))
            gaps.append(abs(divergence(sa, rho, support=True) - divergence(sb, rho, support=True)))
        assert gaps[-1] < 1e-9
        # off the plane the closed-form sign matches the direct difference
        site_a, site_b = SectionSite(d, *a), SectionSite(d, *b)
        rng = np.random.default_rng(5)
        for _ in range(50):
            u = rng.standard_normal(3)
            u /= np.linalg.norm(u)
            rho = xi_to_density(triples_to_xi(d, sphere_to_ellipsoid(0.9999 * u, d)))
            direct = divergence(sb, rho, support=True) - divergence(sa, rho, support=True)
            closed = divergence_boundary_residual(site_a, site_b, sphere_to_ellipsoid(u, d))
            if abs(closed) > 1e-6:
                assert np.sign(direct) == np.sign(closed)


class TestGeodesic:
    def test_equator(self):
        q = np.array([[1.0, 0, 0], [0, 1.0, 0], [0, 0, 1.0]])
        np.testing.assert_allclose(geodesic_bisector_residual([0, 0, 1], [0, 0, -1], q), [0, 0, 2])

    def test_at_site(self):
        a, b = np.array([0, 0, 1.0]), np.array([1.0, 0, 0])
        assert geodesic_bisector_residual(a, b, a) == pytest.approx(1 - a @ b)

    def test_errors(self):
        with pytest.raises(IdenticalSites):
            geodesic_bisector_residual([0, 0, 1], [0, 0, 1], [1, 0, 0])
        with pytest.raises(NotUnit):
            geodesic_bisector_residual([0, 0, 2], [0, 0, 1], [1, 0, 0])

    @pytest.mark.parametrize("d", DIMS)
    def test_example1_pullback(self, d):
        a, b = ellipsoid_to_sphere(example_sites(1, d), d)
        phi = np.linspace(0, 2 * np.pi, 13)
        q = np.column_stack([np.zeros_like(phi), np.cos(phi), np.sin(phi)])
        np.testing.assert_allclose(geodesic_bisector_residual(a, b, q), 0.0, atol=1e-15)
        np.testing.assert_allclose(sphere_to_ellipsoid(q, d)[:, 0], (d - 2) / 2)
