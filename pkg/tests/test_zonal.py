import math

import numpy as np
import pytest
from scipy.integrate import quad
from scipy.special import roots_jacobi

from sobstab.specfun import SobolevParams, eigenvalue, sphere_area, _sphere_area
from sobstab.zonal import (
    ZonalFunction,
    analyze,
    basis_eval,
    basis_function,
    constant,
    from_json_dict,
    gauss_jacobi_rule,
    inner_star,
    lambdas,
    norm_l2,
    norm_lp,
    norm_star,
    synthesize,
    to_json_dict,
)

from conftest import P32, smooth_random_zonal


class TestGaussJacobiRule:
    def test_total_measure(self):
        # constant 1 integrates to |S^N| for every dimension and size
        assert gauss_jacobi_rule(2, 7).weights.sum() == pytest.approx(4 * math.pi, rel=1e-13)
        assert gauss_jacobi_rule(1, 9).weights.sum() == pytest.approx(2 * math.pi, rel=1e-13)
        for N in range(1, 9):
            for M in (2, 8, 33, 130):
                rule = gauss_jacobi_rule(N, M)
                assert rule.weights.sum() == pytest.approx(sphere_area(N), rel=1e-10)

    def test_symmetry_and_ordering(self):
        for N in (1, 2, 3, 5, 8):
            rule = gauss_jacobi_rule(N, 24)
            assert np.all(np.diff(rule.nodes) > 0)
            assert np.array_equal(rule.nodes, -rule.nodes[::-1])
            assert np.array_equal(rule.weights, rule.weights[::-1])
            assert np.all(rule.weights > 0)
            assert np.all(np.abs(rule.nodes) < 1)

    def test_latitude_second_moment(self):
        # brute-force 1-D adaptive quadrature as the oracle
        rule = gauss_jacobi_rule(3, 8)
        oracle, _ = quad(lambda t: 4 * math.pi * t**2 * (1 - t**2) ** 0.5, -1, 1)
        got = float(rule.weights @ rule.nodes**2)
        assert got == pytest.approx(oracle, rel=1e-10)
        assert got == pytest.approx(math.pi**2 / 2, rel=1e-12)

    def test_polynomial_exactness_against_adaptive_oracle(self):
        for N in (1, 2, 3, 6):
            M = 6
            rule = gauss_jacobi_rule(N, M)
            area = _sphere_area(N - 1)
            for j in range(M):  # t^(2j), degree up to 2M-2 <= 2M-1
                oracle, _ = quad(
                    lambda t, j=j: area * t ** (2 * j) * (1 - t**2) ** ((N - 2) / 2),
                    -1, 1)
                got = float(rule.weights @ rule.nodes ** (2 * j))
                assert got == pytest.approx(oracle, rel=1e-10), (N, j)

    def test_matches_reference_jacobi_rule(self):
        # scipy's Gauss-Jacobi rule as an independent construction
        for N in (1, 2, 4, 7):
            M = 20
            rule = gauss_jacobi_rule(N, M)
            alpha = (N - 2) / 2.0
            x, w = roots_jacobi(M, alpha, alpha)
            assert np.allclose(rule.nodes, x, rtol=0, atol=5e-13)
            assert np.allclose(rule.weights, _sphere_area(N - 1) * w, rtol=5e-12)

    def test_rejects_tiny_rule(self):
        with pytest.raises(ValueError):
            gauss_jacobi_rule(3, 1)
        with pytest.raises(ValueError):
            gauss_jacobi_rule(0, 8)


class TestBasis:
    def test_constant_mode(self):
        for N in (1, 3, 6):
            val = basis_eval(N, 0, 0.3)
            assert val == pytest.approx(sphere_area(N) ** -0.5, rel=1e-13)

    def test_degree_one_is_positive_multiple_of_latitude(self):
        for N in (1, 2, 5):
            v1 = basis_eval(N, 1, 0.5)
            v2 = basis_eval(N, 1, -0.5)
            assert v1 > 0
            assert v1 == pytest.approx(-v2, rel=1e-14)
            # linear in t
            assert basis_eval(N, 1, 0.25) == pytest.approx(v1 / 2, rel=1e-13)

    def test_orthonormality_by_quadrature(self):
        for N in (1, 2, 3, 7):
            K = 12
            rule = gauss_jacobi_rule(N, K + K + 2)
            E = rule.basis(K)
            gram = (E * rule.weights) @ E.T
            assert np.max(np.abs(gram - np.eye(K + 1))) < 1e-10

    def test_domain_error(self):
        with pytest.raises(ValueError):
            basis_eval(3, 2, 1.5)
        with pytest.raises(ValueError):
            basis_eval(3, -1, 0.0)


class TestAnalyzeSynthesize:
    def test_constant_function(self, rule32):
        samples = np.full(rule32.M, 2.5)
        u = analyze(P32, samples, rule32, 16)
        assert u.coeffs[0] == pytest.approx(2.5 * math.sqrt(sphere_area(3)), rel=1e-13)
        assert np.max(np.abs(u.coeffs[1:])) < 1e-12
        assert synthesize(u, 0.37) == pytest.approx(2.5, rel=1e-13)

    def test_recovers_basis_mode(self, rule32):
        samples = basis_eval(3, 3, rule32.nodes)
        u = analyze(P32, samples, rule32, 10)
        expected = np.zeros(11)
        expected[3] = 1.0
        assert np.max(np.abs(u.coeffs - expected)) < 1e-12

    def test_round_trip(self, rule32):
        rng = np.random.default_rng(3)
        for _ in range(5):
            u = smooth_random_zonal(P32, rng, K=40, max_degree=40, decay=1.0)
            v = analyze(P32, synthesize(u, rule32.nodes), rule32, 40)
            assert np.max(np.abs(u.coeffs - v.coeffs)) < 1e-11

    def test_refuses_aliasing(self):
        rule = gauss_jacobi_rule(3, 8)
        with pytest.raises(ValueError):
            analyze(P32, np.ones(8), rule, 8)

    def test_rejects_non_finite(self, rule32):
        samples = np.ones(rule32.M)
        samples[0] = math.inf
        with pytest.raises(ValueError):
            analyze(P32, samples, rule32, 4)

    def test_synthesize_linearity(self, rule32):
        rng = np.random.default_rng(4)
        u = smooth_random_zonal(P32, rng)
        v = smooth_random_zonal(P32, rng)
        t = np.linspace(-1, 1, 11)
        lhs = synthesize(2.0 * u + (-0.5) * v, t)
        rhs = 2.0 * synthesize(u, t) - 0.5 * synthesize(v, t)
        assert np.max(np.abs(lhs - rhs)) < 1e-12

    def test_unit_mode_synthesis(self, rule32):
        e2 = basis_function(P32, 2, 8)
        t = np.linspace(-0.9, 0.9, 7)
        assert np.allclose(synthesize(e2, t), basis_eval(3, 2, t), atol=1e-14)


class TestSpectralForms:
    def test_norm_star_of_constant(self):
        for p in (P32, SobolevParams(2, 0.5), SobolevParams(6, 3.3)):
            one = constant(p, 1.0, 12)
            target = eigenvalue(p, 0) * sphere_area(p.N)
            assert norm_star(one) ** 2 == pytest.approx(target, rel=1e-13)

    def test_norm_star_of_modes(self):
        assert norm_star(basis_function(P32, 1, 8)) ** 2 == pytest.approx(3.75, rel=1e-13)
        for k in (0, 2, 7):
            u = basis_function(P32, k, 8)
            assert norm_star(u) ** 2 == pytest.approx(eigenvalue(P32, k), rel=1e-13)

    def test_inner_star(self):
        e2, e5 = basis_function(P32, 2, 8), basis_function(P32, 5, 8)
        assert inner_star(e2, e5) == 0.0
        assert inner_star(e2, e2) == pytest.approx(norm_star(e2) ** 2, rel=1e-14)
        one = constant(P32, 1.0, 8)
        rng = np.random.default_rng(5)
        u = smooth_random_zonal(P32, rng, K=8, max_degree=8)
        target = eigenvalue(P32, 0) * math.sqrt(sphere_area(3)) * u.coeffs[0]
        assert inner_star(u, one) == pytest.approx(target, rel=1e-12)

    def test_cauchy_schwarz(self):
        rng = np.random.default_rng(6)
        for _ in range(50):
            u = smooth_random_zonal(P32, rng, decay=0.9)
            v = smooth_random_zonal(P32, rng, decay=0.9)
            assert abs(inner_star(u, v)) <= norm_star(u) * norm_star(v) * (1 + 1e-12)

    def test_params_mismatch(self):
        u = constant(P32, 1.0, 4)
        v = constant(SobolevParams(3, 1.0), 1.0, 4)
        with pytest.raises(ValueError):
            inner_star(u, v)

    def test_operator_reduction_for_s2(self):
        # lambda_k(2) = ((N-2)/2 + k)(N/2 + k), checked against the spectrum
        for N in (3, 5, 8):
            p = SobolevParams(N, 2.0)
            lam = lambdas(p, 50)
            k = np.arange(51)
            target = ((N - 2) / 2 + k) * (N / 2 + k)
            assert np.allclose(lam, target, rtol=1e-12)


class TestNormLp:
    def test_constant(self, rule32):
        u = constant(P32, -3.0, 8)
        for pexp in (1.0, 2.0, P32.q):
            assert norm_lp(u, pexp, rule32) == pytest.approx(
                3.0 * sphere_area(3) ** (1 / pexp), rel=1e-12)

    def test_parseval_cross_check(self, rule32):
        rng = np.random.default_rng(7)
        for _ in range(20):
            u = smooth_random_zonal(P32, rng, K=64, max_degree=63, decay=1.0)
            assert norm_lp(u, 2.0, rule32) == pytest.approx(norm_l2(u), rel=1e-9)
            assert norm_l2(u) == pytest.approx(float(np.linalg.norm(u.coeffs)), rel=1e-14)

    def test_rejects_p_below_one(self, rule32):
        with pytest.raises(ValueError):
            norm_lp(constant(P32, 1.0, 4), 0.5, rule32)

    def test_sharp_inequality_has_no_counterexample(self, rule32):
        # randomized search for a violation of ||u||_*^2 >= S |u|_q^2
        from sobstab.specfun import sharp_constant

        s_const = sharp_constant(P32)
        rng = np.random.default_rng(8)
        for _ in range(1000):
            coeffs = rng.standard_normal(65) * rng.uniform(0.5, 1.0) ** np.arange(65)
            u = ZonalFunction(P32, coeffs)
            lq = norm_lp(u, P32.q, rule32)
            assert norm_star(u) ** 2 >= s_const * lq * lq * (1 - 1e-9)


class TestSerialization:
    def test_round_trip(self):
        rng = np.random.default_rng(9)
        u = smooth_random_zonal(P32, rng, K=10, max_degree=10)
        d = to_json_dict(u)
        assert list(d.keys()) == ["N", "s", "K", "coeffs"]
        v = from_json_dict(d)
        assert v.params == u.params
        assert np.array_equal(v.coeffs, u.coeffs)

    def test_inconsistent_truncation_rejected(self):
        with pytest.raises(ValueError):
            from_json_dict({"N": 3, "s": 2.0, "K": 5, "coeffs": [1.0, 2.0]})


class TestDomainChecks:
    def test_synthesize_rejects_latitude_outside_range(self):
        u = constant(P32, 1.0, 4)
        with pytest.raises(ValueError):
            synthesize(u, 1.0001)

    def test_norm_lp_rejects_mismatched_rule_dimension(self):
        u = constant(P32, 1.0, 4)
        rule2 = gauss_jacobi_rule(2, 12)
        with pytest.raises(ValueError):
            norm_lp(u, 2.0, rule2)
