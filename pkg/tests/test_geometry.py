import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from numpy.testing import assert_allclose

from qtet.geometry import (AngleTuple, DomainError, GeometryError, Partition, alpha_point,
                           cos_gram, covolume, gram, gram_point, in_domain,
                           is_hyperideal_angles, kappa_func, kappa_ratio_lhs, quad_coeffs,
                           solve_geometry, u_dalpha, u_dxi, u_dxi2, u_func, u_grad,
                           w_derivatives, w_func, xi_candidates, xi_of_alpha)
from qtet.qdilog import lobachevsky

PI = math.pi
EDGE_POS = {0: (0, 1), 1: (0, 2), 2: (1, 2), 3: (2, 3), 4: (1, 3), 5: (0, 3)}


def random_alpha(rng, spread=0.35, imag=0.15):
    # near (pi,...,pi) the configuration is hyperideal and (alpha, xi(alpha))
    # stays in the analyticity region
    return PI + rng.uniform(-spread, spread, 6) + 1j * rng.uniform(-imag, imag, 6)


def cofactor_cosh(G, k):
    """Cosine/cosh read off from the cofactor of the complementary pair."""
    p, q = EDGE_POS[k]
    c, d = [i for i in range(4) if i not in (p, q)]
    adj = np.linalg.inv(G) * np.linalg.det(G)
    return abs(adj[c, d] / math.sqrt(adj[c, c] * adj[d, d]))


class TestPartition:
    def test_complement(self):
        p = Partition((3, 1))
        assert p.I == (1, 3)
        assert p.J == (2, 4, 5, 6)
        assert p.deep == [0, 2]
        assert list(p.mask) == [True, False, True, False, False, False]

    def test_parse(self):
        assert Partition.parse("1,2") == Partition((1, 2))
        assert Partition.parse("") == Partition(())

    def test_bad_label(self):
        with pytest.raises(ValueError):
            Partition((0,))


class TestAngleTuple:
    def test_half_sums(self):
        a = AngleTuple((1, 2, 3, 4, 5, 6))
        assert a.tau == (3, 6, 6, 6)
        assert a.eta == (6, 7, 8)

    def test_hyperideal_type(self):
        assert is_hyperideal_angles([PI] * 6)
        assert is_hyperideal_angles([2 * PI / 3] * 6)
        assert not is_hyperideal_angles([PI / 2] * 6)


class TestGram:
    def test_zero(self):
        G = gram(np.zeros(6))
        assert_allclose(np.diag(G), 1)
        assert_allclose(G[~np.eye(4, dtype=bool)], -1)
        assert np.linalg.det(G) == pytest.approx(-16)

    def test_symmetric(self):
        z = np.random.default_rng(1).normal(size=6) + 1j * np.random.default_rng(2).normal(size=6)
        G = gram(z)
        assert_allclose(G, G.T)

    def test_angles_give_cosines(self):
        theta = np.array([0.1, 0.2, 0.3, 0.4, 0.5, 0.6])
        G = gram(gram_point([], theta, Partition(())))
        c = np.cos(theta)
        assert G[0, 1] == pytest.approx(-c[0])
        assert G[0, 3] == pytest.approx(-c[5])
        assert G[2, 3] == pytest.approx(-c[3])

    def test_cos_gram_at_geometric_point(self):
        a = alpha_point([0.7], [0.1] * 5, Partition((1,)))
        assert_allclose(cos_gram(a), gram(gram_point([0.7], [0.1] * 5, Partition((1,)))),
                        atol=1e-15)


class TestQuadratic:
    def test_all_pi(self):
        A, B, C = quad_coeffs([PI] * 6)
        assert A == pytest.approx(8)
        assert abs(B) < 1e-14
        assert C == pytest.approx(8)

    def test_discriminant_identity(self):
        rng = np.random.default_rng(0)
        for _ in range(1000):
            a = rng.uniform(0, 2 * PI, 6) + 1j * rng.uniform(-1, 1, 6)
            A, B, C = quad_coeffs(a)
            d = B * B - 4 * A * C - 16 * np.linalg.det(cos_gram(a))
            assert abs(d) < 1e-10 * max(1.0, abs(B * B))

    def test_tetrahedral_symmetry(self):
        # relabelling the tetrahedron preserves A, B and C
        perms = [(1, 0, 2, 4, 3, 5), (0, 2, 1, 3, 5, 4), (3, 4, 2, 0, 1, 5)]
        rng = np.random.default_rng(3)
        for _ in range(20):
            a = rng.uniform(0, 2 * PI, 6)
            for p in perms:
                assert_allclose(quad_coeffs(a[list(p)]), quad_coeffs(a), atol=1e-12)

    def test_opposite_edge_swap_is_not_a_symmetry_of_A(self):
        # exchanging all three opposite pairs trades vertex triples for faces
        a = np.random.default_rng(3).uniform(0, 2 * PI, 6)
        assert abs(quad_coeffs(a)[0] - quad_coeffs(a[[3, 4, 5, 0, 1, 2]])[0]) > 1e-3

    def test_roots_at_pi(self):
        xs = sorted(x.real for x in xi_candidates([PI] * 6))
        assert_allclose(xs, [5 * PI / 4, 7 * PI / 4], atol=1e-12)
        # only 7pi/4 is in the region max tau <= Re xi
        assert xi_of_alpha([PI] * 6) == pytest.approx(7 * PI / 4)


class TestPotential:
    def test_critical_point(self):
        rng = np.random.default_rng(11)
        for _ in range(50):
            a = random_alpha(rng)
            assert abs(u_dxi(a, xi_of_alpha(a))) < 1e-9

    def test_dxi_finite_difference(self):
        rng = np.random.default_rng(12)
        h = 1e-6
        for _ in range(20):
            a = random_alpha(rng)
            xi = xi_of_alpha(a) - 0.05 + 0.03j
            fd = (u_func(a, xi + h) - u_func(a, xi - h)) / (2 * h)
            assert abs(fd - u_dxi(a, xi)) < 1e-6

    def test_dalpha_finite_difference(self):
        rng = np.random.default_rng(13)
        h = 1e-6
        for _ in range(10):
            a = random_alpha(rng)
            xi = xi_of_alpha(a)
            for k in range(6):
                e = np.zeros(6)
                e[k] = h
                fd = (u_func(a + e, xi) - u_func(a - e, xi)) / (2 * h)
                assert abs(fd - u_dalpha(a, xi, k + 1)) < 1e-6

    def test_dxi2_finite_difference(self):
        a = random_alpha(np.random.default_rng(14))
        xi = xi_of_alpha(a)
        h = 1e-5
        fd = (u_func(a, xi + h) - 2 * u_func(a, xi) + u_func(a, xi - h)) / h ** 2
        assert abs(fd - u_dxi2(a, xi)) < 1e-4

    def test_closed_form_derivatives(self):
        # exponentiated derivative formulas in u = e^{i alpha}, z = e^{-2i xi}
        rng = np.random.default_rng(15)
        for _ in range(10):
            a = random_alpha(rng)
            xi = xi_of_alpha(a) + 0.02 - 0.01j
            u1, u2, u3, u4, u5, u6 = np.exp(1j * a)
            z = cmath.exp(-2j * xi)
            ratio = ((1 - z) * (1 - z * u1 * u2 * u4 * u5) * (1 - z * u1 * u3 * u4 * u6)
                     * (1 - z * u2 * u3 * u5 * u6)) / (
                (1 - z * u1 * u2 * u3) * (1 - z * u1 * u5 * u6) * (1 - z * u2 * u4 * u6)
                * (1 - z * u3 * u4 * u5))
            assert abs(cmath.exp(u_dxi(a, xi) / 2j) - ratio) < 1e-9 * abs(ratio)
            first = ((1 - u1 * u2 / u3) * (1 - u1 * u3 / u2) * (1 - u1 * u5 / u6)
                     * (1 - u1 * u6 / u5)) / (
                u1 ** 4 * (1 - u2 * u3 / u1) * (1 - 1 / (u1 * u2 * u3))
                * (1 - u5 * u6 / u1) * (1 - 1 / (u1 * u5 * u6)))
            second = (u4 * (1 - z * u1 * u2 * u3) * (1 - z * u1 * u5 * u6)) / (
                (1 - z * u1 * u2 * u4 * u5) * (1 - z * u1 * u3 * u4 * u6))
            # the formula holds mod pi, i.e. after exp(2i * ...)
            lhs = cmath.exp(2j * u_dalpha(a, xi, 1))
            rhs = cmath.exp(2j * (0.5j * cmath.log(first) + 1j * cmath.log(second)))
            assert abs(lhs - rhs) < 1e-9 * abs(rhs)

    def test_outside_region(self):
        with pytest.raises(DomainError):
            u_func([PI] * 6, 5 * PI / 4)
        with pytest.raises(DomainError):
            u_dxi([PI / 2] * 6, 7 * PI / 4)

    def test_domain_flag(self):
        assert in_domain([PI] * 6, 7 * PI / 4)
        assert not in_domain([PI] * 6, 5 * PI / 4)


class TestKappa:
    @pytest.mark.parametrize("sign", [1, -1])
    @pytest.mark.parametrize("I", [(), (1,), (2, 5), (1, 2, 3, 4, 5, 6)])
    def test_alternative_expression(self, sign, I):
        P = Partition(I)
        n = len(I)
        g = solve_geometry([0.15] * n, [0.2] * (6 - n), P, signs=sign)
        a, xi = g.alpha, g.xi
        tau = AngleTuple(a).tau
        alt = (-0.5j * sum(sign * g.theta[i] for i in P.deep)
               - 0.5 * sum(sign * g.l[j] for j in P.regular)
               - 0.5j * a.sum() + 2j * xi
               - 0.5 * sum(cmath.log(1 - cmath.exp(2j * (xi - t))) for t in tau))
        assert abs(kappa_func(a, xi) - alt) < 1e-8

    def test_finite_on_grid(self):
        rng = np.random.default_rng(4)
        for _ in range(30):
            a = random_alpha(rng)
            assert np.isfinite(kappa_func(a, xi_of_alpha(a)))

    def test_conjugation_of_real_part(self):
        # with xi shifted by its reflection the log terms pair up, leaving
        # Re kappa symmetric under alpha -> conj(alpha), xi -> conj(xi)
        a = np.full(6, PI + 0.2) + 0.05j * np.arange(6)
        xi = xi_of_alpha(a)
        k1 = kappa_func(a, xi)
        k2 = kappa_func(np.conj(a), np.conj(xi))
        assert abs(k1.real - k2.real) < 1e-10


class TestW:
    def test_regular_ideal(self):
        a = [2 * PI / 3] * 6
        assert w_func(a).imag / 2 == pytest.approx(3 * lobachevsky(PI / 3), abs=1e-10)
        assert w_func(a).real == pytest.approx(2 * PI ** 2, abs=1e-10)

    def test_both_orientations_of_regular_ideal(self):
        assert w_func([4 * PI / 3] * 6) == pytest.approx(w_func([2 * PI / 3] * 6), abs=1e-10)

    def test_flat_limit(self):
        a = [PI + 1e-4] * 6
        assert w_func(a).imag / 2 == pytest.approx(8 * lobachevsky(PI / 4), abs=1e-6)

    def test_gradient_matches_finite_difference(self):
        a = random_alpha(np.random.default_rng(5))
        _, grad, hess, _ = w_derivatives(a)
        h = 1e-5
        for k in range(6):
            e = np.zeros(6)
            e[k] = h
            fd = (w_func(a + e) - w_func(a - e)) / (2 * h)
            assert abs(fd - grad[k]) < 1e-7
            fdh = (w_derivatives(a + e)[1] - w_derivatives(a - e)[1]) / (2 * h)
            assert np.max(np.abs(fdh - hess[k])) < 1e-6


class TestCovolume:
    def test_empty_partition_is_volume(self):
        P = Partition(())
        g = solve_geometry([], [0.3] * 6, P)
        assert covolume([], [0.3] * 6, P) == pytest.approx(g.vol, abs=1e-12)

    @pytest.mark.parametrize("I", [(1,), (1, 2, 3)])
    def test_schlafli_lengths(self, I):
        P = Partition(I)
        n = len(I)
        l = np.array([0.6, 0.7, 0.8][:n])
        th = np.array([0.2, 0.25, 0.3, 0.35, 0.15][:6 - n])
        g_alpha = w_derivatives(alpha_point(l, th, P))[1]
        h = 1e-5
        for k in range(n):
            e = np.zeros(n)
            e[k] = h
            fd = (covolume(l + e, th, P) - covolume(l - e, th, P)) / (2 * h)
            assert fd == pytest.approx(g_alpha[P.deep[k]].real / 2, abs=1e-6)

    @pytest.mark.parametrize("I", [(), (2,)])
    def test_schlafli_angles(self, I):
        P = Partition(I)
        n = len(I)
        l = np.array([0.6][:n])
        th = np.array([0.2, 0.25, 0.3, 0.35, 0.15, 0.22][:6 - n])
        geo_l = (1j * w_derivatives(alpha_point(l, th, P))[1]).real
        h = 1e-5
        for k in range(6 - n):
            e = np.zeros(6 - n)
            e[k] = h
            fd = (covolume(l, th + e, P) - covolume(l, th - e, P)) / (2 * h)
            assert fd == pytest.approx(-geo_l[P.regular[k]] / 2, abs=1e-6)

    def test_outside_geometric_region(self):
        # large angles at a vertex make the configuration non-hyperbolic
        with pytest.raises(DomainError):
            covolume([], [2.5, 2.5, 2.5, 0.1, 0.1, 0.1], Partition(()))


class TestSolveGeometry:
    def test_regular_ideal_volume(self):
        g = solve_geometry([], [PI / 3] * 6, Partition(()))
        assert g.vol == pytest.approx(3 * lobachevsky(PI / 3), abs=1e-6)
        assert g.vol == pytest.approx(1.014941606, abs=1e-8)

    def test_flat_volume(self):
        g = solve_geometry([], [1e-4] * 6, Partition(()))
        assert g.vol == pytest.approx(8 * lobachevsky(PI / 4), abs=1e-6)
        assert g.vol == pytest.approx(3.663862377, abs=1e-6)

    def test_empty_partition_no_iterations(self):
        g = solve_geometry([], [0.3] * 6, Partition(()))
        assert g.iterations == 0
        assert g.jac.shape == (0, 0)
        assert g.vol == pytest.approx(g.cov)

    def test_lengths_match_gram_cofactors(self):
        theta = [0.3, 0.2, 0.25, 0.35, 0.15, 0.4]
        P = Partition(())
        g = solve_geometry([], theta, P)
        G = gram(gram_point([], theta, P)).real
        for k in range(6):
            assert g.l[k] == pytest.approx(math.acosh(cofactor_cosh(G, k)), abs=1e-9)

    def test_deep_angles_match_gram_cofactors(self):
        P = Partition((1, 4))
        g = solve_geometry([0.12, 0.2], [0.1, 0.15, 0.25, 0.3], P)
        G = gram(gram_point(g.l[P.deep], g.theta[P.regular], P)).real
        for k in P.deep:
            assert g.theta[k] == pytest.approx(math.acos(cofactor_cosh(G, k)), abs=1e-9)
        for k in P.regular:
            assert g.l[k] == pytest.approx(math.acosh(cofactor_cosh(G, k)), abs=1e-9)

    def test_symmetric_all_deep(self):
        P = Partition((1, 2, 3, 4, 5, 6))
        g = solve_geometry([0.1] * 6, [], P)
        assert np.ptp(g.l) < 1e-10
        assert_allclose(g.theta, 0.1, atol=1e-12)

    @pytest.mark.parametrize("I", [(1,), (1, 2), (2, 4, 6), (1, 2, 3, 4, 5)])
    def test_round_trip(self, I):
        P = Partition(I)
        n = len(I)
        target = np.linspace(0.08, 0.2, n)
        thJ = np.linspace(0.1, 0.3, 6 - n)
        g = solve_geometry(target, thJ, P, tol=1e-12)
        theta_back = w_derivatives(alpha_point(g.l[P.deep], thJ, P))[1][P.deep].real
        assert_allclose(theta_back, target, atol=1e-12)

    def test_gram_det_negative_and_volume_positive(self):
        rng = np.random.default_rng(6)
        for I in [(), (1,), (3, 5), (1, 2, 3)]:
            P = Partition(I)
            g = solve_geometry(rng.uniform(0.05, 0.3, len(I)),
                               rng.uniform(0.05, 0.3, 6 - len(I)), P)
            assert g.gram_det < 0
            assert g.vol > 0

    def test_sign_convention_irrelevant(self):
        P = Partition((2, 3))
        a = solve_geometry([0.1, 0.2], [0.15] * 4, P, signs=1)
        b = solve_geometry([0.1, 0.2], [0.15] * 4, P, signs=-1)
        assert_allclose(a.l, b.l, atol=1e-10)
        assert a.vol == pytest.approx(b.vol, abs=1e-10)

    def test_jacobian_symmetric(self):
        P = Partition((1, 2, 5))
        g = solve_geometry([0.1, 0.12, 0.14], [0.2, 0.1, 0.3], P)
        assert_allclose(g.jac, g.jac.T, atol=1e-6)

    def test_jacobian_matches_finite_difference(self):
        P = Partition((1, 3))
        thJ = [0.2, 0.1, 0.3, 0.25]
        g = solve_geometry([0.1, 0.2], thJ, P)
        h = 1e-5
        for k in range(2):
            e = np.zeros(2)
            e[k] = h
            lp = g.l[P.deep] + e
            lm = g.l[P.deep] - e
            dp = w_derivatives(alpha_point(lp, thJ, P))[1][P.deep].real
            dm = w_derivatives(alpha_point(lm, thJ, P))[1][P.deep].real
            assert_allclose((dp - dm) / (2 * h), g.jac[:, k], atol=1e-6)

    @pytest.mark.xfail(strict=True, reason="the angle-length Jacobian is positive-definite "
                                           "in the small-angle regime")
    def test_jacobian_negative_definite(self):
        P = Partition((1, 2, 3))
        g = solve_geometry([0.1] * 3, [0.1] * 3, P)
        assert np.all(np.linalg.eigvalsh(g.jac) < 0)

    def test_volume_decreases_with_angle(self):
        base = np.array([0.2, 0.25, 0.3, 0.15, 0.2, 0.1])
        P = Partition(())
        v0 = solve_geometry([], base, P).vol
        for k in range(6):
            b = base.copy()
            b[k] += 1e-3
            assert solve_geometry([], b, P).vol < v0

    def test_shape_mismatch(self):
        with pytest.raises(ValueError):
            solve_geometry([0.1], [0.1] * 6, Partition((1,)))

    def test_no_solution_reported(self):
        # no dihedral angle can exceed pi; the lengths run off to infinity
        with pytest.raises(GeometryError):
            solve_geometry([3.5], [0.1] * 5, Partition((1,)), max_iter=20)

    def test_large_deep_angle_is_fine(self):
        g = solve_geometry([3.0], [0.1] * 5, Partition((1,)))
        assert g.vol > 0 and g.l[0] > 5


class TestKappaRatio:
    @pytest.mark.parametrize("sign", [1, -1])
    @pytest.mark.parametrize("I", [(), (1,), (1, 3), (1, 2, 3, 4, 5, 6)])
    def test_identity(self, sign, I):
        P = Partition(I)
        n = len(I)
        g = solve_geometry([0.15] * n, [0.2] * (6 - n), P, signs=sign)
        lhs = kappa_ratio_lhs(g.alpha, g.xi)
        rhs = -1 / (16 * cmath.sqrt(g.gram_det))
        assert abs(lhs - rhs) < 1e-8 * abs(rhs)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(0.05, 0.6), min_size=6, max_size=6))
def test_volume_between_regular_and_flat(theta):
    g = solve_geometry([], theta, Partition(()))
    assert 0 < g.vol < 8 * lobachevsky(PI / 4) + 1e-9
