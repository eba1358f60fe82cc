"""Closed-form stability analysis and its empirical cross-check."""

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gravmix.errors import ParameterError
from gravmix.stability import (
    MARGINAL,
    STABLE,
    UNSTABLE,
    analyze_lambda,
    growth_rate_empirical,
)


class TestAnalyzeLambda:
    def test_pure_conversion_limit(self):
        rep = analyze_lambda(0.0)
        assert rep.classification == UNSTABLE
        assert rep.growth_rate == pytest.approx(1.0)
        assert sorted(mu.imag for mu in rep.eigenvalues) == pytest.approx([-1.0, 1.0])
        assert all(mu.real == 0.0 for mu in rep.eigenvalues)

    def test_marginal_point(self):
        rep = analyze_lambda(1.0)
        assert rep.classification == MARGINAL
        assert rep.growth_rate == 0.0
        assert rep.eigenvalues == (0.0 + 0.0j, -0.0 + 0.0j) or all(
            abs(mu) == 0.0 for mu in rep.eigenvalues
        )

    def test_stable_side(self):
        rep = analyze_lambda(2.0)
        assert rep.classification == STABLE
        assert rep.growth_rate == 0.0
        assert sorted(mu.real for mu in rep.eigenvalues) == pytest.approx(
            [-math.sqrt(3.0), math.sqrt(3.0)]
        )

    @given(lam=st.floats(-3.0, 3.0))
    @settings(max_examples=40, deadline=None)
    def test_sign_symmetry(self, lam):
        a, b = analyze_lambda(lam), analyze_lambda(-lam)
        assert a.classification == b.classification
        assert a.growth_rate == pytest.approx(b.growth_rate, abs=1e-15)

    @given(lam=st.floats(-3.0, 3.0))
    @settings(max_examples=40, deadline=None)
    def test_eigenvalues_satisfy_characteristic_equation(self, lam):
        for mu in analyze_lambda(lam).eigenvalues:
            assert abs(mu * mu - (lam * lam - 1.0)) < 1e-12

    def test_boundary_is_exact(self):
        assert analyze_lambda(1.0 - 1e-12).classification == UNSTABLE
        assert analyze_lambda(1.0).classification == MARGINAL
        assert analyze_lambda(1.0 + 1e-12).classification == STABLE
        assert analyze_lambda(-1.0).classification == MARGINAL

    def test_rejects_nonfinite(self):
        with pytest.raises(ParameterError):
            analyze_lambda(float("inf"))


class TestEmpiricalGrowth:
    @pytest.mark.parametrize("lam", [0.0, 0.25, 0.5, 0.75, 0.9])
    def test_measured_rate_matches_closed_form(self, lam):
        measured = growth_rate_empirical(lam)
        assert measured.growing
        assert measured.rate == pytest.approx(math.sqrt(1.0 - lam * lam), abs=0.05)
        assert measured.r_squared > 0.999

    def test_stable_lambda_never_grows(self):
        measured = growth_rate_empirical(1.5)
        assert not measured.growing
        assert measured.rate is None
        assert measured.max_amplification <= 3.0

    def test_marginal_lambda_reported_non_growing(self):
        assert not growth_rate_empirical(1.0).growing

    def test_fit_window_stays_linear(self):
        measured = growth_rate_empirical(0.0)
        lo, hi = measured.window
        assert 0.0 < lo < hi

    def test_rejects_large_seed(self):
        with pytest.raises(ParameterError):
            growth_rate_empirical(0.0, seed=1e-3)
