import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import fracvexp as fx
from fracvexp import ball_solver as bs
from fracvexp import max_principles as mp
from fracvexp.grids import ReflectedFunction

unit2 = st.floats(-2.0, 2.0)


@pytest.fixture(scope="module")
def star(spec_model, qcfg):
    u_star, _ = bs.manufacture(spec_model, n=201, amplitude=0.5, cfg=qcfg)
    return u_star


class TestReflect:
    def test_formula(self):
        plane = fx.PlaneGeometry((1.0, 0.0), -0.1)
        out = plane.reflect(np.array([-0.3, 0.2]))
        np.testing.assert_allclose(out, [0.1, 0.2], atol=1e-15)

    def test_fixed_point(self):
        plane = fx.PlaneGeometry((0.0, 1.0), 0.4)
        x = np.array([1.3, 0.4])
        np.testing.assert_allclose(plane.reflect(x), x, atol=1e-15)

    @settings(max_examples=100, deadline=None)
    @given(unit2, unit2, unit2, unit2, st.floats(-1, 1))
    def test_involution_and_isometry(self, x0, x1, y0, y1, lam):
        e = np.array([0.6, 0.8])
        plane = fx.PlaneGeometry(tuple(e), lam)
        x, y = np.array([x0, x1]), np.array([y0, y1])
        np.testing.assert_allclose(plane.reflect(plane.reflect(x)), x, atol=1e-12)
        d1 = np.linalg.norm(plane.reflect(x) - plane.reflect(y))
        assert d1 == pytest.approx(np.linalg.norm(x - y), abs=1e-12)

    def test_unit_norm_required(self):
        with pytest.raises(fx.PreconditionError):
            fx.PlaneGeometry((1.0, 1.0), 0.0)


class TestWLambda:
    def test_even_function_vanishes(self, u_bump_1d):
        plane = fx.axis_plane(1, 0.0)
        assert mp.w_lambda(u_bump_1d, plane, [0.4]) == pytest.approx(0.0, abs=1e-12)

    def test_affine_case(self):
        u = fx.SampledFunction.from_function(lambda p: p[:, 0], extent=1.5, n=201,
                                             dim=1, exterior_rule="zero_outside_box")
        plane = fx.axis_plane(1, -0.2)
        for x in (-0.5, -0.9, -0.3):
            # u(x) = x: w(x) = (2 lam - x) - x = 2(lam - x)
            assert mp.w_lambda(u, plane, [x]) == pytest.approx(2 * (-0.2 - x), abs=1e-8)

    def test_antisymmetry(self, u_bump_1d):
        plane = fx.axis_plane(1, -0.3)
        rng = np.random.default_rng(2)
        pts = rng.uniform(-1.4, 1.4, (50, 1))
        w = mp.w_lambda_field(u_bump_1d, plane, pts)
        w_ref = mp.w_lambda_field(u_bump_1d, plane, plane.reflect(pts))
        np.testing.assert_allclose(w + w_ref, 0.0, atol=1e-8)


class TestStrongMP:
    def test_nonneg_bump_holds(self, spec_1d, qcfg):
        u = fx.SampledFunction.from_function(
            lambda p: np.maximum(0.0, 1.0 - p[:, 0] ** 2) ** 2, 1.5, 101, 1)
        mask = bs.interior_mask(u)
        pts = u.nodes()[mask]
        field = fx.eval_plap_field(spec_1d, u, pts, qcfg)
        auto = np.zeros(u.values.size, bool)
        auto[np.nonzero(mask)[0]] = field >= -mp.HYPOTHESIS_TOL
        rep = mp.check_strong_mp(spec_1d, u, auto, qcfg)
        assert rep.verdict == mp.HOLDS

    def test_zero_function_degenerate(self, spec_1d, qcfg):
        u = fx.SampledFunction(np.zeros(101), (101,), 1.5)
        rep = mp.check_strong_mp(spec_1d, u, bs.interior_mask(u), qcfg)
        assert rep.verdict == mp.HOLDS
        assert rep.diagnostics.get("vanishes_everywhere")

    def test_negative_minimum_violated_with_proof_diagnostic(self, spec_1d, qcfg):
        nodes = np.linspace(-1.5, 1.5, 101)
        base = np.maximum(0.0, 1.0 - nodes ** 2) ** 2
        dip = base - 1.3 * np.exp(-8 * nodes ** 2) * np.maximum(0.0, 1.0 - nodes ** 2)
        u = fx.SampledFunction(np.where(np.abs(nodes) < 1, dip, 0.0), (101,), 1.5)
        rep = mp.check_strong_mp(spec_1d, u, bs.interior_mask(u), qcfg)
        assert rep.verdict == mp.VIOLATED
        assert rep.witness_point is not None and rep.witness_value < 0
        assert rep.diagnostics["eval_at_min"] < 0.0  # the proof's contradiction

    def test_precondition_negative_outside(self, spec_1d, qcfg):
        vals = np.zeros(101)
        vals[0] = -0.5
        u = fx.SampledFunction(vals, (101,), 1.5, exterior_rule="zero_outside_box")
        mask = bs.interior_mask(u)
        with pytest.raises(fx.PreconditionError):
            mp.check_strong_mp(spec_1d, u, mask, qcfg)

    def test_hypothesis_failure_is_inconclusive(self, spec_1d, qcfg):
        # positive bump, full-ball mask: the operator changes sign inside,
        # so the hypothesis set is smaller than the mask
        u = fx.SampledFunction.from_function(
            lambda p: np.maximum(0.0, 1.0 - p[:, 0] ** 2) ** 2, 1.5, 101, 1)
        rep = mp.check_strong_mp(spec_1d, u, bs.interior_mask(u), qcfg)
        assert rep.verdict in (mp.HOLDS, mp.INCONCLUSIVE)


class TestAntisymMP:
    def test_degenerate_symmetric(self, spec_model, star, qcfg):
        rep = mp.check_antisym_mp(spec_model, star, fx.axis_plane(1, 0.0),
                                  m_bound=0.7, cfg=qcfg)
        assert rep.verdict == mp.HOLDS
        assert rep.diagnostics.get("w_vanishes")

    def test_manufactured_conclusion_holds(self, spec_model, star, qcfg):
        # w >= 0 holds for the radial bump; the operator-difference
        # hypothesis genuinely fails near the support edge, so the faithful
        # verdict is 'inconclusive' with the conclusion recorded
        rep = mp.check_antisym_mp(spec_model, star, fx.axis_plane(1, -0.5),
                                  m_bound=0.7, cfg=qcfg)
        assert rep.verdict in (mp.HOLDS, mp.INCONCLUSIVE)
        assert rep.diagnostics["min_w"] >= -mp.CONCLUSION_TOL

    def test_constructed_violation(self, spec_model, star, qcfg):
        nodes = star.nodes()
        pert = 0.05 * np.sin(3 * nodes[:, 0]) * np.maximum(0.0, 1 - nodes[:, 0] ** 2)
        asym = star.with_values(np.clip(star.values - pert, 0.0, 0.55))
        rep = mp.check_antisym_mp(spec_model, asym, fx.axis_plane(1, -0.1),
                                  m_bound=0.7, cfg=qcfg)
        assert rep.verdict == mp.VIOLATED
        assert rep.witness_value < 0
        assert rep.diagnostics["gamma"] < 0.0  # reproduces the strict inequality

    def test_range_precondition(self, spec_model, star, qcfg):
        with pytest.raises(fx.PreconditionError):
            mp.check_antisym_mp(spec_model, star, fx.axis_plane(1, -0.5),
                                m_bound=0.3, cfg=qcfg)  # sup u = 0.5 >= m


class TestJSplit:
    def test_fold_consistency(self, spec_model, qcfg):
        u_star, _ = bs.manufacture(spec_model, n=201, amplitude=0.5, cfg=qcfg)
        plane = fx.axis_plane(1, -0.5)
        x0 = np.array([-0.72])
        j1, j2 = mp.j1_j2_split(spec_model, u_star, plane, x0, qcfg)
        view = ReflectedFunction(u_star, plane)
        gamma = (fx.eval_plap(spec_model, view, x0, qcfg)
                 - fx.eval_plap(spec_model, u_star, x0, qcfg))
        scale = abs(j1) + abs(j2) + abs(gamma)
        assert (j1 + j2) == pytest.approx(gamma, abs=2e-2 * scale)

    def test_halfspace_precondition(self, spec_model, qcfg):
        u = fx.SampledFunction(np.zeros(101), (101,), 1.5)
        with pytest.raises(fx.PreconditionError):
            mp.j1_j2_split(spec_model, u, fx.axis_plane(1, -0.5), [0.0], qcfg)


class TestBoundaryProbe:
    def test_negative_ratios_with_margin(self, spec_model, star, qcfg):
        plane = fx.axis_plane(1, -0.5)
        xs = [np.array([-0.5 - 2.0 ** -k]) for k in range(3, 11)]
        rep = mp.boundary_estimate_probe(spec_model, star, [plane] * 8, xs, qcfg)
        assert rep.ok and rep.verdict == mp.HOLDS
        assert all(r < 0 for r in rep.ratios)
        assert rep.margin > 0

    def test_zero_function_refused(self, spec_model, qcfg):
        u = fx.SampledFunction(np.zeros(201), (201,), 1.5)
        plane = fx.axis_plane(1, -0.5)
        xs = [np.array([-0.5 - 2.0 ** -k]) for k in range(3, 6)]
        rep = mp.boundary_estimate_probe(spec_model, u, [plane] * 3, xs, qcfg)
        assert rep.verdict == mp.INCONCLUSIVE

    def test_deltas_must_decrease(self, spec_model, star, qcfg):
        plane = fx.axis_plane(1, -0.5)
        xs = [np.array([-0.6]), np.array([-0.7])]  # increasing delta
        with pytest.raises(fx.PreconditionError):
            mp.boundary_estimate_probe(spec_model, star, [plane] * 2, xs, qcfg)

    def test_zero_delta_is_numeric_error(self, spec_model, star, qcfg):
        plane = fx.axis_plane(1, -0.5)
        with pytest.raises(fx.NumericError):
            mp.boundary_estimate_probe(spec_model, star, [plane], [np.array([-0.5])], qcfg)


class TestMPReportInvariant:
    def test_witness_iff_violated(self):
        with pytest.raises(fx.PreconditionError):
            mp.MPReport(mp.HOLDS, witness_point=(0.0,))
        with pytest.raises(fx.PreconditionError):
            mp.MPReport(mp.VIOLATED)
