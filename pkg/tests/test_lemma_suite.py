import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import fracvexp as fx
from fracvexp import lemma_suite as ls


class TestMeanValueAlpha:
    def test_degenerate_equal_endpoints(self):
        w = ls.mean_value_alpha(0.3, 0.3, 3.0)
        assert w.alpha == 0.3 and w.residual == 0.0
        chk = ls.check_c0_bound(w, 3.0, 3.0)
        assert chk.ok and chk.c0 <= 1.0

    def test_quadratic_case(self):
        # f(t) = t^2 on positives: 4 - 1 = 2 alpha, alpha = 1.5
        w = ls.mean_value_alpha(1.0, 2.0, 3.0)
        assert w.alpha == pytest.approx(1.5, abs=1e-9)
        assert w.c0_case == ls.SAME_SIGN_CLOSE
        chk = ls.check_c0_bound(w, 3.0, 3.0)
        assert chk.ok and chk.c0 == pytest.approx(0.5)
        assert abs(w.alpha) >= 0.5 * 2.0 - 1e-12

    def test_cubic_opposite_sign(self):
        # f(t) = t^3: 2 = 3 alpha^2 * 2, |alpha| = 1/sqrt(3)
        w = ls.mean_value_alpha(-1.0, 1.0, 4.0)
        assert abs(w.alpha) == pytest.approx(1.0 / math.sqrt(3.0), abs=1e-9)
        assert w.c0_case == ls.OPPOSITE_SIGN
        chk = ls.check_c0_bound(w, 4.0, 4.0)
        assert chk.ok and chk.c0 == pytest.approx(1.0 / 6.0)

    def test_alpha_between_endpoints(self):
        rng = np.random.default_rng(5)
        for _ in range(200):
            t1, t2 = rng.uniform(-1, 1, 2)
            p = rng.uniform(2.001, 6.0)
            w = ls.mean_value_alpha(t1, t2, p)
            assert min(t1, t2) - 1e-12 <= w.alpha <= max(t1, t2) + 1e-12
            assert w.residual <= ls.MV_RESIDUAL_TOL

    def test_closed_form_magnitude(self):
        # |alpha| = (slope/(p-1))^(1/(p-2)) for p away from 2
        rng = np.random.default_rng(9)
        for _ in range(100):
            t1, t2 = rng.uniform(-2, 2, 2)
            if t1 == t2:
                continue
            p = rng.uniform(2.5, 5.0)
            slope = (fx.f_power(t2, p) - fx.f_power(t1, p)) / (t2 - t1)
            expect = (slope / (p - 1.0)) ** (1.0 / (p - 2.0))
            w = ls.mean_value_alpha(t1, t2, p)
            assert abs(w.alpha) == pytest.approx(expect, rel=1e-8, abs=1e-10)

    def test_requires_p_above_2(self):
        with pytest.raises(fx.PreconditionError):
            ls.mean_value_alpha(0.1, 0.5, 2.0)

    @settings(max_examples=150, deadline=None)
    @given(st.floats(-1, 1), st.floats(-1, 1),
           st.floats(2.01, 6.0))
    def test_bound_property(self, t1, t2, p):
        w = ls.mean_value_alpha(t1, t2, p)
        assert ls.check_c0_bound(w, p, p).ok


class TestClassification:
    def test_cases(self):
        assert ls.classify_case(1.0, 2.0) == ls.SAME_SIGN_CLOSE
        assert ls.classify_case(-1.0, 1.0) == ls.OPPOSITE_SIGN
        assert ls.classify_case(0.1, 2.0) == ls.FAR_APART
        assert ls.classify_case(0.0, 2.0) == ls.FAR_APART  # zero counts as far

    def test_constants(self):
        assert ls.c0_constant(ls.SAME_SIGN_CLOSE, 3.0, 3.0) == pytest.approx(0.5)
        assert ls.c0_constant(ls.OPPOSITE_SIGN, 3.0, 4.0) == pytest.approx(1.0 / 6.0)
        assert ls.c0_constant(ls.FAR_APART, 3.0, 3.0) == pytest.approx((4.0 - 1.0) / (2.0 * 8.0))


class TestKernelMonotone:
    def test_closed_form_example(self):
        # 0.5^-2.5 - 1.5^-2.5
        c3 = fx.make_spec("constant", dimension=1, order=0.5, m=0.5, value=3.0)
        plane = fx.axis_plane(1, 0.0)
        res = ls.check_kernel_monotone(c3, plane, [-0.5], [-1.0])
        expected = 0.5 ** -2.5 - 1.5 ** -2.5
        assert res.ok and res.kappa == pytest.approx(expected, rel=1e-12)
        assert res.kappa == pytest.approx(5.294, abs=1e-3)

    def test_boundary_fixed_point(self, spec_1d):
        plane = fx.axis_plane(1, -0.25)
        res = ls.check_kernel_monotone(spec_1d, plane, [-0.5], [-0.25])
        assert res.boundary and res.kappa == 0.0

    def test_halfspace_preconditions(self, spec_1d):
        plane = fx.axis_plane(1, 0.0)
        with pytest.raises(fx.PreconditionError):
            ls.check_kernel_monotone(spec_1d, plane, [0.5], [-1.0])

    def test_suite(self, spec_2d):
        rep = ls.run_kernel_monotone_suite(spec_2d, n=4000, seed=3)
        assert rep.passed and rep.failures == 0 and rep.min_margin > 0.0


class TestCxPositivity:
    def test_constant_far_field_limit_one(self, const3_1d):
        rep = ls.check_cx_positive(const3_1d, [2.0])
        assert rep.positive
        assert rep.far_field_ratio == pytest.approx(1.0, abs=1e-6)

    def test_near_boundary_sample(self, spec_1d):
        rep = ls.check_cx_positive(spec_1d, [2.0], samples=4000)
        assert rep.positive and rep.infimum > 0.0

    def test_excludes_origin(self, spec_1d):
        with pytest.raises(fx.PreconditionError):
            ls.check_cx_positive(spec_1d, [0.0])


class TestGprime:
    def test_margin_formula(self):
        # p1 = p2 gives exactly zero margin
        assert ls.gprime_margin(0.3, 3.0, 3.0) == 0.0
        assert ls.gprime_margin(0.3, 2.7, 3.4) > 0.0

    def test_suite(self):
        rep = ls.run_gprime_suite(0.5, 6.0, n=50_000, seed=1)
        assert rep.passed and rep.min_margin >= -1e-12

    def test_m_validation(self):
        with pytest.raises(fx.PreconditionError):
            ls.run_gprime_suite(1.5, 6.0)


class TestSuites:
    def test_mean_value_suite_seeded(self):
        rep = ls.run_mean_value_suite(20_000, seed=7)
        assert rep.passed and rep.failures == 0
        assert rep.max_residual <= ls.MV_RESIDUAL_TOL
        rep2 = ls.run_mean_value_suite(20_000, seed=7)
        assert rep2.min_margin == rep.min_margin  # reproducible

    def test_certify_bundle(self, spec_1d):
        out = ls.certify_lemmas(spec_1d, seed=3, n_mean_value=5000,
                                n_kernel=2000, n_gprime=5000)
        assert out["passed"]
        assert {s["name"] for s in out["suites"]} == {
            "mean_value_c0", "kernel_monotone", "gprime_sign"}
        assert out["cx_infimum"]["positive"]
