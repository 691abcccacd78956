"""Iteration-lemma formulas, hypothesis certification, synthetic assertions."""

import numpy as np
import pytest

from hessianlab import DomainError, degiorgi_threshold, kolodziej_bound
from hessianlab.iteration import (
    DEGIORGI,
    KOLODZIEJ,
    assert_degiorgi_family,
    assert_kolodziej_family,
    certify_iteration_hypothesis,
    synthetic_degiorgi_family,
    synthetic_kolodziej_family,
)


class TestKolodziejBound:
    def test_algebraic_identity(self):
        for delta0 in (0.5, 1.0, 2.0):
            s0 = 1.7
            c0 = 0.5 * (1.0 - 2.0**-delta0) * s0
            assert kolodziej_bound(c0, delta0, s0) == pytest.approx(1.0)

    def test_direct_substitution(self):
        assert kolodziej_bound(1.0, 1.0, 1.0) == pytest.approx(0.25)

    def test_rejects_nonpositive(self):
        with pytest.raises(DomainError):
            kolodziej_bound(0.0, 1.0, 1.0)


class TestDeGiorgiThreshold:
    def test_direct_substitution(self):
        assert degiorgi_threshold(1.0, 1.0, 1.0, 1.0) == pytest.approx(4.0)

    def test_degenerate_level(self):
        assert degiorgi_threshold(2.0, 1.5, 0.7, 0.0) == 0.0

    def test_rejects_bad_constants(self):
        with pytest.raises(DomainError):
            degiorgi_threshold(1.0, -1.0, 1.0, 1.0)
        with pytest.raises(DomainError):
            degiorgi_threshold(1.0, 1.0, 1.0, -0.5)


class TestCertify:
    def test_linear_function_quarter(self):
        s = np.arange(1, 241) / 240.0
        c_min, feasible = certify_iteration_hypothesis(s, s, KOLODZIEJ, delta0=1.0)
        assert feasible
        assert c_min == pytest.approx(0.25, rel=1e-12)

    def test_non_monotone_infeasible(self):
        s = np.linspace(0.1, 1.0, 20)
        phi = np.sin(8 * s) + 2.0
        _, feasible = certify_iteration_hypothesis(s, phi, KOLODZIEJ, delta0=1.0)
        assert not feasible

    def test_constant_function(self):
        # ratio t * phi / phi^(1+delta0) grows with the gap t, so the
        # certificate is attained by the widest sampled pair
        s = np.linspace(0.1, 2.0, 60)
        phi = np.full_like(s, 1.7)
        c_min, feasible = certify_iteration_hypothesis(s, phi, KOLODZIEJ, delta0=1.0)
        assert feasible
        widest = s[-2] - s[0]  # largest s strictly below s0 = 2.0
        assert c_min == pytest.approx(widest * 1.7 / 1.7**2, rel=1e-12)

    def test_degiorgi_increasing_infeasible(self):
        s = np.linspace(1.0, 2.0, 20)
        _, feasible = certify_iteration_hypothesis(s, s, DEGIORGI, alpha=1.0, delta=1.0)
        assert not feasible

    def test_needs_parameters(self):
        s = np.linspace(0.1, 1.0, 10)
        with pytest.raises(DomainError):
            certify_iteration_hypothesis(s, s, KOLODZIEJ)
        with pytest.raises(DomainError):
            certify_iteration_hypothesis(s, s, "unknown-form", delta0=1.0)


class TestSyntheticFamilies:
    def test_kolodziej_lower_bound_holds(self, rng):
        for _ in range(100):
            fam = synthetic_kolodziej_family(rng)
            gap, c_min = assert_kolodziej_family(fam)
            assert c_min > 0
            assert gap >= -1e-12

    def test_degiorgi_vanishing_holds(self, rng):
        for _ in range(100):
            fam = synthetic_degiorgi_family(rng)
            leftover, d, c_min = assert_degiorgi_family(fam)
            assert c_min > 0
            assert d > 0
            assert leftover <= 1e-12

    def test_tight_kolodziej_gap_is_small(self, rng):
        # the equality family theta * delta0 = 1 certifies the exact
        # constant, so the bound matches phi(s0) almost exactly
        found = False
        for _ in range(50):
            fam = synthetic_kolodziej_family(rng)
            if fam.params["tight"] and fam.params["delta0"] == 1.0:
                gap, _ = assert_kolodziej_family(fam)
                assert abs(gap) < 1e-10
                found = True
        assert found
