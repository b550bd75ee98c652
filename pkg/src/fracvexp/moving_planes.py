"""Moving-planes diagnostics: plane sweeps, the critical offset estimate,
radial-profile checks, and the probes supporting the symmetry theorems.

Sweeps are falsifiable numerical diagnostics of the symmetry conclusion;
they never claim a proof.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

from .errors import NumericError, PreconditionError
from .exponents import ExponentSpec
from .geometry import PlaneGeometry
from .grids import SampledFunction
from .lemma_suite import FAR_APART, OPPOSITE_SIGN, SAME_SIGN_CLOSE, c0_constant
from .max_principles import w_lambda_field
from .quadrature import QuadratureConfig

BALL = "ball"
WHOLE_SPACE = "whole-space"

#: default tolerance on w minima
SWEEP_TOL = 1e-5
#: refinement factor for the lambda grid around the first sign change
REFINE_FACTOR = 10


@dataclass(frozen=True)
class SweepReport:
    direction: tuple
    lambda_grid: tuple
    min_w: tuple
    lambda0_estimate: float
    symmetric_verdict: bool
    monotone_verdict: bool
    mode: str
    tol: float
    tol_lambda: float
    decay_ok: bool | None = None
    inconclusive: bool = False

    def to_dict(self):
        return {
            "direction": list(self.direction),
            "lambda_grid": list(self.lambda_grid),
            "min_w": list(self.min_w),
            "lambda0_estimate": self.lambda0_estimate,
            "symmetric_verdict": bool(self.symmetric_verdict),
            "monotone_verdict": bool(self.monotone_verdict),
            "mode": self.mode,
            "tol": self.tol,
            "tol_lambda": self.tol_lambda,
            "decay_ok": self.decay_ok,
            "inconclusive": bool(self.inconclusive),
        }


def _min_w_at(u: SampledFunction, plane: PlaneGeometry, nodes, coord, ball_mask):
    sel = coord < plane.offset
    if ball_mask is not None:
        sel &= ball_mask
    if not np.any(sel):
        return math.inf
    return float(np.min(w_lambda_field(u, plane, nodes[sel])))


def _lambda0_from(grid: np.ndarray, mins: np.ndarray, tol: float) -> float:
    """Largest lambda such that every mu <= lambda has min_w >= -tol."""
    ok = mins >= -tol
    bad = np.nonzero(~ok)[0]
    if bad.size == 0:
        return float(grid[-1])
    if bad[0] == 0:
        return float(grid[0])  # fails from the start; report the left end
    return float(grid[bad[0] - 1])


def sweep(u: SampledFunction, direction, lambda_grid=None, tol: float = SWEEP_TOL,
          mode: str = BALL, ball_radius: float = 1.0,
          refine: int = REFINE_FACTOR, tol_lambda: float | None = None,
          decay_tol: float = 1e-6, center=None,
          radial_tol: float = 1e-4) -> SweepReport:
    """Sweep the reflecting plane along `direction` over lambda_grid.

    Ball mode restricts minima to half-space nodes inside the unit ball;
    whole-space mode uses all half-space nodes and additionally requires a
    decay certificate (max |u| over the outer 10% shell below decay_tol),
    reporting `inconclusive` without it.  A 10x refinement pass around the
    first sign change tightens the lambda0 estimate before reporting.
    """
    e = np.asarray(direction, dtype=float)
    e = e / np.linalg.norm(e)
    nodes = u.nodes()
    coord = nodes @ e

    if lambda_grid is None:
        lo = -1.0 if mode == BALL else -u.extent
        lambda_grid = np.linspace(lo, 0.0, 101)
    grid = np.asarray(lambda_grid, dtype=float)
    if np.any(np.diff(grid) <= 0):
        raise PreconditionError("lambda_grid must be strictly increasing")
    if grid[-1] > 0.0 + 1e-12:
        raise PreconditionError("lambda_grid must stay at or below 0")

    ball_mask = np.linalg.norm(nodes, axis=1) < ball_radius if mode == BALL else None

    decay_ok = None
    if mode == WHOLE_SPACE:
        shell = np.max(np.abs(nodes), axis=1) >= 0.9 * u.extent
        decay_ok = bool(np.max(np.abs(u.values[shell])) <= decay_tol)

    def plane_at(lam: float) -> PlaneGeometry:
        return PlaneGeometry(tuple(e), float(lam))

    if mode == WHOLE_SPACE:
        # reflected evaluation points must stay inside the sampled box:
        # outside it the decaying function is unknown, not zero
        for lam in (grid[0], grid[-1]):
            pl = plane_at(lam)
            sel = coord < lam
            if np.any(sel) and not np.all(u.inside_box(pl.reflect(nodes[sel]))):
                raise PreconditionError(
                    "reflected points leave the sampled box; enlarge the box")

    mins = np.array([_min_w_at(u, plane_at(l), nodes, coord, ball_mask) for l in grid])

    # refinement around the first violation
    bad = np.nonzero(mins < -tol)[0]
    if bad.size and bad[0] > 0:
        j = bad[0]
        fine = np.linspace(grid[j - 1], grid[j], refine + 1)[1:-1]
        fine_mins = np.array([_min_w_at(u, plane_at(l), nodes, coord, ball_mask) for l in fine])
        grid = np.concatenate([grid, fine])
        mins = np.concatenate([mins, fine_mins])
        order = np.argsort(grid)
        grid, mins = grid[order], mins[order]

    base_step = float(np.min(np.diff(grid))) if len(grid) > 1 else 1.0
    tol_l = tol_lambda if tol_lambda is not None else 2.0 * base_step
    lam0 = _lambda0_from(grid, mins, tol)

    ctr = np.zeros(u.dim) if center is None else np.asarray(center, dtype=float)
    radial = radial_profile_check(u, ctr, radial_tol)

    inconclusive = mode == WHOLE_SPACE and not decay_ok
    symmetric = bool(lam0 >= -tol_l) and not inconclusive
    return SweepReport(tuple(e.tolist()), tuple(grid.tolist()), tuple(mins.tolist()),
                       lam0, symmetric, radial.passed, mode, tol, tol_l,
                       decay_ok, inconclusive)


@dataclass(frozen=True)
class RadialCheck:
    passed: bool
    max_violation: float
    shell_spread: float
    worst_pair: tuple | None
    tol: float

    def to_dict(self):
        return {"passed": bool(self.passed), "max_violation": self.max_violation,
                "shell_spread": self.shell_spread,
                "worst_pair": None if self.worst_pair is None else
                [list(self.worst_pair[0]), list(self.worst_pair[1])],
                "tol": self.tol}


def radial_profile_check(u: SampledFunction, center, tol: float) -> RadialCheck:
    """Monotone decrease along radii from `center` plus equal-radius
    shell spread, both within tol."""
    center = np.atleast_1d(np.asarray(center, dtype=float))
    nodes = u.nodes()
    if not bool(u.inside_box(center[None, :])[0]):
        raise PreconditionError("center must lie inside the grid box")
    r = np.linalg.norm(nodes - center[None, :], axis=1)
    keys = np.round(r / max(u.spacing * 1e-9, 1e-12)).astype(np.int64)
    order = np.lexsort((np.arange(len(r)), keys))
    r_s, v_s, k_s = r[order], u.values[order], keys[order]

    # group contiguous equal radii
    starts = np.nonzero(np.concatenate([[True], k_s[1:] != k_s[:-1]]))[0]
    ends = np.concatenate([starts[1:], [len(k_s)]])
    gmin = np.minimum.reduceat(v_s, starts)
    gmax = np.maximum.reduceat(v_s, starts)
    spread = float(np.max(gmax - gmin)) if len(starts) else 0.0

    run_min = np.minimum.accumulate(gmin)
    viol = gmax[1:] - run_min[:-1]
    if viol.size:
        j = int(np.argmax(viol))
        max_viol = float(viol[j])
        gi = int(np.argmin(np.where(np.arange(len(gmin)) <= j, gmin, np.inf)))
        lo_node = starts[gi] + int(np.argmin(v_s[starts[gi]:ends[gi]]))
        hi_node = starts[j + 1] + int(np.argmax(v_s[starts[j + 1]:ends[j + 1]]))
        worst = (tuple(nodes[order[lo_node]].tolist()),
                 tuple(nodes[order[hi_node]].tolist()))
    else:
        max_viol, worst = 0.0, None
    passed = max_viol <= tol and spread <= tol
    return RadialCheck(passed, max_viol, spread, None if passed else worst, tol)


@dataclass(frozen=True)
class LinearizationProbe:
    x: tuple
    xi: float
    coefficient: float
    q: float
    u_value: float
    u_reflected: float
    residual: float

    def to_dict(self):
        return {"x": list(self.x), "xi": self.xi, "coefficient": self.coefficient,
                "q": self.q, "u_value": self.u_value,
                "u_reflected": self.u_reflected, "residual": self.residual}


def linearization_probe(u: SampledFunction, plane: PlaneGeometry,
                        q_function, x) -> LinearizationProbe:
    """Mean-value point xi with u_l^q - u^q = q xi^(q-1) (u_l - u).

    Both values must lie in (0,1); the coefficient q(x) xi^(q-1) is the
    bounded linearization weight."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    uv = float(u.point_eval(x[None, :])[0])
    ul = float(u.point_eval(plane.reflect(x[None, :]))[0])
    q = float(q_function(x[None, :])[0]) if callable(q_function) else float(q_function)
    for v in (uv, ul):
        if not 0.0 < v < 1.0:
            raise PreconditionError(f"values must lie in (0,1); got {v}")
    if ul == uv:
        xi = uv
        resid = 0.0
    else:
        lo, hi = min(uv, ul), max(uv, ul)
        target = ul ** q - uv ** q

        def phi(t: float) -> float:
            return q * t ** (q - 1.0) * (ul - uv) - target

        flo, fhi = phi(lo), phi(hi)
        if flo * fhi > 0.0:
            raise NumericError("linearization bracket failed")
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if mid == lo or mid == hi:
                break
            if phi(lo) * phi(mid) <= 0.0:
                hi = mid
            else:
                lo = mid
        xi = 0.5 * (lo + hi)
        resid = abs(q * xi ** (q - 1.0) * (ul - uv) - target)
    return LinearizationProbe(tuple(x.tolist()), float(xi),
                              float(q * xi ** (q - 1.0)), q, uv, ul, float(resid))


@dataclass(frozen=True)
class WidthProbe:
    integral: float
    rhs_scale: float
    ratio: float
    delta: float
    c0: float

    def to_dict(self):
        return {"integral": self.integral, "rhs_scale": self.rhs_scale,
                "ratio": self.ratio, "delta": self.delta, "c0": self.c0}


def width_estimate_probe(spec: ExponentSpec, u: SampledFunction,
                         plane: PlaneGeometry, x0,
                         cfg: QuadratureConfig | None = None) -> WidthProbe:
    """Realized constant in the narrow-region kernel mass estimate.

    Integrates (p-1) c0 |u(x0)|^(p(x0,z)-2) K(x0,z) over the reflected
    slab {lambda <= <z,e> < lambda+1} inside the unit ball (the chain's
    substituted variable; the un-substituted form would place the kernel
    singularity inside the region) and divides by
    min(|u(x0)|^(p+-2), |u(x0)|^(p--2)) / delta^(s p-) with delta = lambda+1.
    """
    x0 = np.atleast_1d(np.asarray(x0, dtype=float))
    lam = plane.offset
    delta = lam + 1.0
    if delta <= 0.0:
        raise PreconditionError("width estimate needs lambda + 1 > 0")
    if not plane.in_halfspace(x0, strict=True):
        raise PreconditionError("x0 must lie strictly inside the half-space")
    u_x0 = float(u.point_eval(x0[None, :])[0])
    if u_x0 <= 0.0:
        raise PreconditionError("u(x0) must be positive")

    s, N = spec.order, spec.dimension
    c0 = min(c0_constant(c, spec.p_minus, spec.p_plus)
             for c in (SAME_SIGN_CLOSE, OPPOSITE_SIGN, FAR_APART))

    e = plane.e
    a_hi = min(lam + 1.0, 1.0)

    def radial_integrand(a: float, b: float = 0.0) -> float:
        z = a * e if N == 1 else a * e + b * _perp(e)
        d = float(np.linalg.norm(x0 - z))
        q = float(spec.q(d))
        return (q - 1.0) * c0 * u_x0 ** (q - 2.0) * d ** (-(N + s * q))

    if N == 1:
        val, _ = integrate.quad(lambda a: radial_integrand(a), lam, a_hi, limit=200)
    else:
        gx, gw = np.polynomial.legendre.leggauss(48)

        def chord(a: float) -> float:
            half = math.sqrt(max(0.0, 1.0 - a * a))
            if half == 0.0:
                return 0.0
            bs = half * gx
            return half * float(sum(w * radial_integrand(a, b) for w, b in zip(gw, bs)))

        val, _ = integrate.quad(chord, lam, a_hi, limit=200)

    sp = s * spec.p_minus
    rhs = min(u_x0 ** (spec.p_plus - 2.0), u_x0 ** (spec.p_minus - 2.0)) / delta ** sp
    return WidthProbe(float(val), float(rhs), float(val / rhs), float(delta), float(c0))


def _perp(e: np.ndarray) -> np.ndarray:
    return np.array([-e[1], e[0]])


def sweep_directions(dim: int, count: int, seed: int = 0) -> np.ndarray:
    """`count` unit directions: alternating signs in 1-d, seeded angles in 2-d."""
    if dim == 1:
        return np.array([[1.0 if k % 2 == 0 else -1.0] for k in range(count)])
    rng = np.random.default_rng(seed)
    th = rng.uniform(0.0, 2.0 * np.pi, count)
    return np.column_stack([np.cos(th), np.sin(th)])
