"""Symmetric-function algebra against independent oracles and identities."""

import math
from fractions import Fraction

import numpy as np
import pytest

from hessianlab import (
    ConeSpec,
    DomainError,
    SingularMetricError,
    check_garding,
    check_maclaurin,
    cone_margins,
    cone_membership,
    elem_sym,
    elem_sym_minors,
    elem_sym_table,
    generalized_eigenvalues,
    grad_elem_sym,
    hess_elem_sym,
    hessian_operator_F,
    restricted_esp,
)

from conftest import (
    esp_enumeration,
    pencil_roots_oracle,
    random_hermitian,
    random_spd,
    sample_cone_tuples,
)


class TestElemSym:
    def test_direct_expansion(self):
        assert elem_sym([1, 2, 3], 2) == pytest.approx(11.0, abs=0)
        assert elem_sym([1, 1, 1], 3) == pytest.approx(1.0, abs=0)
        assert elem_sym([4, 5], 0) == 1.0

    def test_out_of_range(self):
        with pytest.raises(DomainError):
            elem_sym([1, 2], 3)
        with pytest.raises(DomainError):
            elem_sym([1, 2], -1)

    def test_matches_subset_enumeration(self, rng):
        for _ in range(50):
            n = int(rng.integers(3, 7))
            lam = rng.uniform(-2, 2, n)
            for k in range(2, min(n, 4) + 1):
                expected = esp_enumeration(lam, k)
                got = elem_sym(lam, k)
                assert got == pytest.approx(expected, rel=1e-12, abs=1e-12)

    def test_batched_table(self, rng):
        lam = rng.uniform(-1, 2, size=(40, 5))
        table = elem_sym_table(lam)
        for i in range(40):
            for k in range(6):
                assert table[i, k] == pytest.approx(
                    esp_enumeration(lam[i], k), rel=1e-12, abs=1e-12
                )

    def test_thousand_tuples_up_to_n6(self, rng):
        for _ in range(1000):
            n = int(rng.integers(2, 7))
            lam = rng.uniform(-2, 2, n)
            table = elem_sym_table(lam)
            for k in range(n + 1):
                want = esp_enumeration(lam, k)
                assert table[k] == pytest.approx(want, rel=1e-12, abs=1e-12)


class TestMinors:
    def test_diagonal_cases(self):
        assert elem_sym_minors(np.diag([1.0, 2, 3]), 2) == pytest.approx(11.0)
        assert elem_sym_minors(np.eye(3), 3) == pytest.approx(1.0)

    def test_matches_eigen_route(self, rng):
        for _ in range(100):
            n = int(rng.integers(2, 6))
            a = random_hermitian(rng, n)
            lam = np.linalg.eigvalsh(a)
            for k in range(1, n + 1):
                want = elem_sym(lam, k)
                got = elem_sym_minors(a, k)
                assert got == pytest.approx(want, rel=1e-10, abs=1e-10)

    def test_rejects_non_hermitian(self):
        with pytest.raises(DomainError):
            elem_sym_minors(np.array([[0.0, 1.0], [0.0, 0.0]]), 1)


class TestCone:
    def test_all_ones(self):
        member, worst = cone_membership([1, 1, 1], ConeSpec(n=3, m=2))
        assert member and worst == pytest.approx(1.0)

    def test_mixed_sign(self):
        member, worst = cone_membership([3, -1, -1], 2)
        assert not member
        assert worst == pytest.approx(-5.0 / 3.0)
        member1, worst1 = cone_membership([3, -1, -1], 1)
        assert member1 and worst1 == pytest.approx(1.0 / 3.0)

    def test_margin_slack(self):
        member, _ = cone_membership([1, 1, 1], ConeSpec(n=3, m=2, margin=0.9))
        assert member
        member, _ = cone_membership([1, 1, 1], ConeSpec(n=3, m=2, margin=1.0))
        assert not member  # strict inequality at the slack level

    def test_monotonicity_under_positive_shift(self, rng):
        for n, m in ((3, 2), (4, 3)):
            lams = sample_cone_tuples(rng, n, m, 200)
            shifts = rng.uniform(0, 1.5, size=lams.shape)
            assert np.all(cone_margins(lams + shifts, m) > 0.0)


class TestDerivatives:
    def test_gradient_direct(self):
        assert np.allclose(grad_elem_sym([1, 2, 3], 2), [5, 4, 3])
        assert np.allclose(grad_elem_sym([1, 1, 1], 3), [1, 1, 1])

    def test_euler_identity(self, rng):
        for _ in range(200):
            n = int(rng.integers(2, 7))
            m = int(rng.integers(1, n + 1))
            lam = rng.uniform(-2, 2, n)
            lhs = float(np.dot(lam, grad_elem_sym(lam, m)))
            rhs = m * elem_sym(lam, m)
            assert lhs == pytest.approx(rhs, rel=1e-11, abs=1e-11)

    def test_gradient_matches_finite_differences(self, rng):
        step = 1e-6
        for _ in range(25):
            n = int(rng.integers(2, 6))
            m = int(rng.integers(1, n + 1))
            lam = rng.uniform(-1.5, 1.5, n)
            grad = grad_elem_sym(lam, m)
            for i in range(n):
                up, dn = lam.copy(), lam.copy()
                up[i] += step
                dn[i] -= step
                fd = (elem_sym(up, m) - elem_sym(dn, m)) / (2 * step)
                assert grad[i] == pytest.approx(fd, rel=1e-6, abs=1e-6)

    def test_restricted_esp_matches_removal(self, rng):
        lam = rng.uniform(-1, 2, size=(30, 5))
        for k in range(5):
            got = restricted_esp(lam, k)
            for row in range(30):
                for i in range(5):
                    rest = np.delete(lam[row], i)
                    assert got[row, i] == pytest.approx(
                        esp_enumeration(rest, k), rel=1e-10, abs=1e-10
                    )

    def test_hessian_entries(self):
        h2 = hess_elem_sym([1, 2, 3], 2)
        assert h2[0, 1] == pytest.approx(1.0)  # S_0
        assert np.all(np.diag(h2) == 0.0)
        h3 = hess_elem_sym([1, 2, 3], 3)
        assert h3[0, 1] == pytest.approx(3.0)  # S_1 of remaining entry

    def test_hessian_matches_finite_differences(self, rng):
        step = 1e-4
        for _ in range(10):
            n = int(rng.integers(3, 6))
            m = int(rng.integers(2, n + 1))
            lam = rng.uniform(-1.0, 1.5, n)
            hess = hess_elem_sym(lam, m)
            for i in range(n):
                for j in range(n):
                    pp, pm, mp, mm = (lam.copy() for _ in range(4))
                    pp[i] += step
                    pp[j] += step
                    pm[i] += step
                    pm[j] -= step
                    mp[i] -= step
                    mp[j] += step
                    mm[i] -= step
                    mm[j] -= step
                    fd = (
                        elem_sym(pp, m) - elem_sym(pm, m)
                        - elem_sym(mp, m) + elem_sym(mm, m)
                    ) / (4 * step * step)
                    assert hess[i, j] == pytest.approx(fd, abs=1e-5)


class TestInequalities:
    def test_maclaurin_equal_entries(self):
        assert check_maclaurin([2, 2, 2], 2) == pytest.approx(0.0, abs=1e-14)

    def test_maclaurin_generic_gap_exact_rationals(self):
        # S_1/C(3,1) = 2 and S_2/C(3,2) = 11/3 via exact rational arithmetic
        mean1 = Fraction(1 + 2 + 3, 3)
        mean2 = Fraction(1 * 2 + 1 * 3 + 2 * 3, 3)
        expected = float(mean1) - math.sqrt(float(mean2))
        assert expected > 0
        assert check_maclaurin([1, 2, 3], 2) == pytest.approx(expected, rel=1e-14)

    def test_maclaurin_outside_cone(self):
        with pytest.raises(DomainError):
            check_maclaurin([3, -1, -1], 2)

    def test_maclaurin_sampled(self, rng):
        for n, m in ((2, 2), (3, 2), (3, 3)):
            for lam in sample_cone_tuples(rng, n, m, 1000):
                assert check_maclaurin(lam, m) >= -1e-12

    def test_garding_euler_equality(self, rng):
        lam = sample_cone_tuples(rng, 3, 2, 1)[0]
        assert check_garding(lam, lam, 2) == pytest.approx(0.0, abs=1e-12)

    def test_garding_proportional_equality(self):
        assert check_garding([1, 1, 1], [2, 2, 2], 2) == pytest.approx(0.0, abs=1e-12)

    def test_garding_sampled(self, rng):
        for n, m in ((2, 2), (3, 2), (4, 2)):
            tuples = sample_cone_tuples(rng, n, m, 2000)
            for lam, eta in zip(tuples[::2], tuples[1::2]):
                assert check_garding(lam, eta, m) >= -1e-10

    def test_garding_outside_cone(self):
        with pytest.raises(DomainError):
            check_garding([3, -1, -1], [1, 1, 1], 2)

    def test_operator_concavity(self, rng):
        for n, m in ((3, 2), (4, 3)):
            tuples = sample_cone_tuples(rng, n, m, 2000)
            thetas = rng.uniform(0, 1, 1000)
            for lam, eta, theta in zip(tuples[::2], tuples[1::2], thetas):
                mix = hessian_operator_F(theta * lam + (1 - theta) * eta, m)
                split = theta * hessian_operator_F(lam, m) + (
                    1 - theta
                ) * hessian_operator_F(eta, m)
                assert mix >= split - 1e-10


class TestGeneralizedEigenvalues:
    def test_identity_pencil(self):
        g = np.diag([2.0, 3.0])
        assert np.allclose(generalized_eigenvalues(g, g), [1, 1])

    def test_diagonal_pencil(self):
        lam = generalized_eigenvalues(np.diag([2.0, 6.0]), np.diag([1.0, 2.0]))
        assert np.allclose(lam, [3, 2])

    def test_matches_companion_roots(self, rng):
        for _ in range(40):
            n = int(rng.integers(2, 5))
            a = random_hermitian(rng, n)
            g = random_spd(rng, n)
            got = generalized_eigenvalues(a, g)
            want = pencil_roots_oracle(a, g)
            assert np.allclose(got, want, atol=1e-9, rtol=1e-9)

    def test_congruence_invariance(self, rng):
        for _ in range(25):
            n = int(rng.integers(2, 5))
            a = random_hermitian(rng, n)
            g = random_spd(rng, n)
            p = np.eye(n) + 0.3 * (
                rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
            )
            lam = generalized_eigenvalues(a, g)
            lam_c = generalized_eigenvalues(p.conj().T @ a @ p, p.conj().T @ g @ p)
            assert np.abs(lam - lam_c).max() < 1e-9

    def test_singular_metric(self):
        with pytest.raises(SingularMetricError):
            generalized_eigenvalues(np.eye(2), np.diag([1.0, 0.0]))


class TestOperatorF:
    def test_normalization_and_homogeneity(self):
        assert hessian_operator_F([1, 1, 1], 2) == pytest.approx(1.0)
        assert hessian_operator_F([2.5, 2.5, 2.5], 3) == pytest.approx(2.5)

    def test_direct_value(self):
        assert hessian_operator_F([1, 2, 3], 2) == pytest.approx(math.sqrt(11 / 3))

    def test_negative_sm(self):
        with pytest.raises(DomainError):
            hessian_operator_F([3, -1, -1], 2)
