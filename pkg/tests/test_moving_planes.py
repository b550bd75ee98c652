import math

import numpy as np
import pytest

import fracvexp as fx
from fracvexp import ball_solver as bs
from fracvexp import moving_planes as mvp


@pytest.fixture(scope="module")
def star(spec_model, qcfg):
    u_star, _ = bs.manufacture(spec_model, n=201, amplitude=0.5, cfg=qcfg)
    return u_star


class TestSweep:
    def test_exact_radial_profile(self, star):
        rep = mvp.sweep(star, [1.0])
        assert rep.symmetric_verdict and rep.monotone_verdict
        assert rep.lambda0_estimate >= -rep.tol_lambda
        assert min(rep.min_w) >= -1e-8

    def test_translated_profile_fails(self):
        v = fx.SampledFunction.from_function(
            lambda p: 0.5 * np.maximum(0.0, 1.0 - (p[:, 0] - 0.2) ** 2) ** 0.5,
            1.5, 201, 1, exterior_rule="zero_outside_box")
        reports = [mvp.sweep(v, d) for d in ([1.0], [-1.0])]
        assert not all(r.symmetric_verdict for r in reports)
        back = next(r for r in reports if r.direction == (-1.0,))
        assert back.lambda0_estimate == pytest.approx(-0.2, abs=2e-2)

    def test_zero_function_degenerate_pass(self):
        u = fx.SampledFunction(np.zeros(201), (201,), 1.5)
        rep = mvp.sweep(u, [1.0])
        assert rep.symmetric_verdict
        assert rep.lambda0_estimate == 0.0

    def test_lambda_grid_validation(self, star):
        with pytest.raises(fx.PreconditionError):
            mvp.sweep(star, [1.0], lambda_grid=[0.0, -0.5])
        with pytest.raises(fx.PreconditionError):
            mvp.sweep(star, [1.0], lambda_grid=[-0.5, 0.5])

    def test_direction_consistency_2d(self, spec_2d, qcfg):
        # w at off-lattice reflected points carries the interpolation floor
        # of the 81^2 grid (~4e-5 with cubic stencils near the support edge),
        # so the minima tolerance is set above it
        u2 = fx.SampledFunction.from_function(
            lambda p: 0.5 * np.maximum(0.0, 1.0 - (p ** 2).sum(1)) ** 2,
            1.5, 81, 2, smoothness_hint=3)
        for d in mvp.sweep_directions(2, 8, seed=4):
            rep = mvp.sweep(u2, d, np.linspace(-1.0, 0.0, 41), tol=1e-4)
            assert rep.symmetric_verdict, d
            assert rep.lambda0_estimate >= -rep.tol_lambda

    def test_antisymmetry_of_w(self, star):
        plane = fx.axis_plane(1, -0.4)
        from fracvexp.max_principles import w_lambda_field
        pts = np.linspace(-1.3, 1.3, 37)[:, None]
        w = w_lambda_field(star, plane, pts)
        w_r = w_lambda_field(star, plane, plane.reflect(pts))
        np.testing.assert_allclose(w + w_r, 0.0, atol=1e-8)

    def test_lambda0_rescan_consistency(self, star):
        rep = mvp.sweep(star, [-1.0])
        grid = np.asarray(rep.lambda_grid)
        mins = np.asarray(rep.min_w)
        sel = grid <= rep.lambda0_estimate
        assert np.all(mins[sel] >= -rep.tol)

    def test_whole_space_decay_certificate(self, spec_1d):
        u = fx.SampledFunction.from_function(
            lambda p: 0.4 * np.exp(-4.0 * p[:, 0] ** 2), 1.5, 201, 1,
            exterior_rule="zero_outside_box")
        rep = mvp.sweep(u, [1.0], np.linspace(-1.0, 0.0, 41), mode="whole-space")
        assert rep.decay_ok is False and rep.inconclusive
        u2 = fx.SampledFunction.from_function(
            lambda p: 0.4 * np.exp(-14.0 * p[:, 0] ** 2), 1.5, 201, 1,
            exterior_rule="zero_outside_box")
        rep2 = mvp.sweep(u2, [1.0], np.linspace(-1.0, 0.0, 41), mode="whole-space",
                         decay_tol=1e-6)
        assert rep2.decay_ok and not rep2.inconclusive


class TestRadialProfile:
    def test_star_passes(self, star):
        chk = mvp.radial_profile_check(star, [0.0], 1e-4)
        assert chk.passed and chk.max_violation <= 1e-12

    def test_tilted_fails_with_witness(self, star):
        nodes = star.nodes()[:, 0]
        tilt = star.values + 0.05 * nodes * np.maximum(0.0, 1.0 - nodes ** 2)
        chk = mvp.radial_profile_check(star.with_values(np.maximum(tilt, 0.0)), [0.0], 1e-4)
        assert not chk.passed
        assert chk.worst_pair is not None
        assert chk.shell_spread > 1e-4

    def test_center_inside_box(self, star):
        with pytest.raises(fx.PreconditionError):
            mvp.radial_profile_check(star, [2.0], 1e-4)


class TestLinearization:
    def test_degenerate_equal_values(self):
        u = fx.SampledFunction(np.full(201, 0.5), (201,), 1.5,
                               exterior_rule="zero_outside_box")
        probe = mvp.linearization_probe(u, fx.axis_plane(1, 0.0), 2.0, [0.3])
        assert probe.xi == pytest.approx(0.5) and probe.coefficient == pytest.approx(1.0)

    def test_quadratic_closed_form(self):
        # u = 0.25, u_l = 0.75, q = 2: xi = 0.5, coefficient 1.0
        nodes = np.linspace(-1.5, 1.5, 301)
        vals = np.where(nodes > 0.0, 0.25, 0.75)
        u = fx.SampledFunction(vals, (301,), 1.5, exterior_rule="zero_outside_box")
        probe = mvp.linearization_probe(u, fx.axis_plane(1, 0.0), 2.0, [0.8])
        assert probe.xi == pytest.approx(0.5, abs=1e-10)
        assert probe.coefficient == pytest.approx(1.0, abs=1e-9)

    def test_cubic_closed_form(self):
        nodes = np.linspace(-1.5, 1.5, 301)
        vals = np.where(nodes > 0.0, 0.2, 0.4)
        u = fx.SampledFunction(vals, (301,), 1.5, exterior_rule="zero_outside_box")
        probe = mvp.linearization_probe(u, fx.axis_plane(1, 0.0), 3.0, [0.8])
        xi_expect = math.sqrt((0.4 ** 3 - 0.2 ** 3) / (3.0 * 0.2))
        assert probe.xi == pytest.approx(xi_expect, abs=1e-10)
        assert probe.coefficient == pytest.approx(3.0 * xi_expect ** 2, abs=1e-9)
        assert probe.coefficient == pytest.approx(0.28, abs=1e-9)

    def test_identity_residual(self, star):
        plane = fx.axis_plane(1, -0.3)
        rng = np.random.default_rng(8)
        count = 0
        for x in rng.uniform(-0.9, -0.35, 40):
            uv = float(star.point_eval([[x]])[0])
            ul = float(star.point_eval(plane.reflect(np.array([[x]])))[0])
            if not (0 < uv < 1 and 0 < ul < 1):
                continue
            probe = mvp.linearization_probe(star, plane, 2.5, [x])
            assert probe.residual <= 1e-10
            assert min(uv, ul) - 1e-12 <= probe.xi <= max(uv, ul) + 1e-12
            count += 1
        assert count > 20

    def test_range_precondition(self):
        u = fx.SampledFunction(np.zeros(201), (201,), 1.5)
        with pytest.raises(fx.PreconditionError):
            mvp.linearization_probe(u, fx.axis_plane(1, 0.0), 2.0, [0.3])


class TestWidthProbe:
    def test_positive_ratio_1d(self, star):
        c3 = fx.make_spec("constant", dimension=1, order=0.5, m=0.5, value=3.0)
        probe = mvp.width_estimate_probe(c3, star, fx.axis_plane(1, -0.9), [-0.95])
        assert probe.ratio > 0.0 and probe.delta == pytest.approx(0.1)

    def test_delta_halving_growth(self, star):
        # same x0; moving the plane toward -1 halves delta and the kernel
        # mass grows at least like 2^(s p-) up to a small slack
        c3 = fx.make_spec("constant", dimension=1, order=0.5, m=0.5, value=3.0)
        x0 = [-0.975]
        a = mvp.width_estimate_probe(c3, star, fx.axis_plane(1, -0.9), x0)
        b = mvp.width_estimate_probe(c3, star, fx.axis_plane(1, -0.95), x0)
        assert b.delta == pytest.approx(a.delta / 2.0)
        assert b.integral / a.integral >= 2.0 ** (0.5 * 3.0) * 0.9

    def test_vanishing_value_degenerates(self, star):
        c3 = fx.make_spec("constant", dimension=1, order=0.5, m=0.5, value=3.0)
        with pytest.raises(fx.PreconditionError):
            mvp.width_estimate_probe(c3, star, fx.axis_plane(1, -0.9), [-1.2])

    def test_delta_positive_required(self, star):
        c3 = fx.make_spec("constant", dimension=1, order=0.5, m=0.5, value=3.0)
        with pytest.raises(fx.PreconditionError):
            mvp.width_estimate_probe(c3, star, fx.axis_plane(1, -1.2), [-1.3])

    def test_2d_runs(self, spec_2d, qcfg):
        u2 = fx.SampledFunction.from_function(
            lambda p: 0.5 * np.maximum(0.0, 1.0 - (p ** 2).sum(1)) ** 2, 1.5, 61, 2)
        probe = mvp.width_estimate_probe(spec_2d, u2, fx.axis_plane(2, -0.8), [-0.9, 0.0])
        assert probe.ratio > 0.0


class TestDirections:
    def test_1d_alternating(self):
        d = mvp.sweep_directions(1, 8)
        assert d.shape == (8, 1)
        assert set(d[:, 0].tolist()) == {1.0, -1.0}

    def test_2d_unit_norm_seeded(self):
        a = mvp.sweep_directions(2, 8, seed=5)
        b = mvp.sweep_directions(2, 8, seed=5)
        np.testing.assert_array_equal(a, b)
        np.testing.assert_allclose(np.linalg.norm(a, axis=1), 1.0, atol=1e-14)
