"""Checkers for the strong, antisymmetric, and boundary maximum principles.

Each checker verifies an implication at the discrete level: if the
conclusion fails the verdict is 'violated' with a witness node plus the
proof-step diagnostic (the operator value at the minimizer, or the
half-space split of the operator difference); if the conclusion holds the
hypotheses are verified and the verdict is 'holds' or, when the
hypotheses themselves fail numerically, 'inconclusive'.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import NumericError, PreconditionError
from .exponents import ExponentSpec
from .geometry import PlaneGeometry, axis_plane, reflect
from .grids import ReflectedFunction, SampledFunction
from .nonlocal_operator import eval_plap, eval_plap_field
from .quadrature import (QuadratureConfig, _f_abs_max, directions,
                         radial_rule, tail_radius_needed)

__all__ = [
    "PlaneGeometry", "axis_plane", "reflect", "MPReport", "ProbeReport",
    "w_lambda", "w_lambda_field", "check_strong_mp", "check_antisym_mp",
    "boundary_estimate_probe", "j1_j2_split",
    "HYPOTHESIS_TOL", "CONCLUSION_TOL",
]

#: default tolerance when verifying checker hypotheses
HYPOTHESIS_TOL = 1e-6
#: default (looser) tolerance on conclusions: quadrature error enters twice
CONCLUSION_TOL = 1e-5

HOLDS = "holds"
VIOLATED = "violated"
INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class MPReport:
    verdict: str
    witness_point: tuple | None = None
    witness_value: float = 0.0
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self):
        if (self.witness_point is not None) != (self.verdict == VIOLATED):
            raise PreconditionError("witness present iff verdict is 'violated'")

    def to_dict(self):
        return {
            "verdict": self.verdict,
            "witness_point": None if self.witness_point is None else list(self.witness_point),
            "witness_value": self.witness_value,
            "diagnostics": self.diagnostics,
        }


def w_lambda(u: SampledFunction, plane: PlaneGeometry, x) -> float:
    """Antisymmetric comparison field w(x) = u(reflect(x)) - u(x)."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    vals = w_lambda_field(u, plane, x[None, :])
    return float(vals[0])


def w_lambda_field(u: SampledFunction, plane: PlaneGeometry, pts) -> np.ndarray:
    pts = np.atleast_2d(np.asarray(pts, dtype=float))
    return u.point_eval(plane.reflect(pts)) - u.point_eval(pts)


def _node_scan_min(values: np.ndarray, mask: np.ndarray):
    """Minimum over masked nodes; ties resolved by smallest flat index."""
    idx = np.nonzero(mask)[0]
    if idx.size == 0:
        return None, np.inf
    j = idx[int(np.argmin(values[idx]))]
    return int(j), float(values[j])


def check_strong_mp(spec: ExponentSpec, u: SampledFunction, domain_mask,
                    cfg: QuadratureConfig | None = None,
                    hyp_tol: float = HYPOTHESIS_TOL,
                    concl_tol: float = CONCLUSION_TOL) -> MPReport:
    """Strong maximum principle on a node mask Omega.

    Requires u >= 0 outside Omega (precondition error otherwise).  Verdict
    'violated' carries the interior minimizer and the directly evaluated
    operator there, reproducing the contradiction computation; the
    degenerate branch checks that an interior zero forces u to vanish at
    every node.
    """
    cfg = cfg or QuadratureConfig()
    mask = np.asarray(domain_mask, dtype=bool).ravel()
    if mask.shape != u.values.shape:
        raise PreconditionError("domain_mask must be a boolean per-node array")
    outside = ~mask
    if np.any(u.values[outside] < -hyp_tol):
        bad = np.nonzero(outside & (u.values < -hyp_tol))[0]
        raise PreconditionError(
            f"u >= 0 outside the domain is violated at {bad.size} nodes, first {int(bad[0])}")

    nodes = u.nodes()
    j_min, min_u = _node_scan_min(u.values, mask)
    if j_min is None:
        return MPReport(HOLDS, diagnostics={"note": "empty domain mask", "min_u": None})

    if min_u < -concl_tol:
        gamma = eval_plap(spec, u, nodes[j_min], cfg)
        return MPReport(VIOLATED, tuple(nodes[j_min].tolist()), min_u,
                        {"eval_at_min": gamma, "min_u": min_u})

    field_pts = nodes[mask]
    field = eval_plap_field(spec, u, field_pts, cfg)
    j_bad = int(np.argmin(field))
    if field[j_bad] < -hyp_tol:
        return MPReport(INCONCLUSIVE, diagnostics={
            "reason": "operator hypothesis fails on the domain",
            "worst_eval": float(field[j_bad]),
            "worst_point": field_pts[j_bad].tolist(),
            "min_u": min_u})

    diagnostics = {"min_u": min_u, "min_eval": float(field[j_bad])}
    if min_u <= concl_tol:
        off = np.nonzero(np.abs(u.values) > concl_tol)[0]
        if off.size:
            return MPReport(VIOLATED, tuple(nodes[off[0]].tolist()),
                            float(u.values[off[0]]),
                            {**diagnostics,
                             "reason": "interior zero but u does not vanish everywhere"})
        diagnostics["vanishes_everywhere"] = True
    return MPReport(HOLDS, diagnostics=diagnostics)


def check_antisym_mp(spec: ExponentSpec, u: SampledFunction, plane: PlaneGeometry,
                     ball_radius: float = 1.0, m_bound: float | None = None,
                     cfg: QuadratureConfig | None = None,
                     hyp_tol: float = HYPOTHESIS_TOL,
                     concl_tol: float = CONCLUSION_TOL) -> MPReport:
    """Antisymmetric maximum principle for w = u_lambda - u.

    Hypotheses at the discrete level: w >= 0 on half-space nodes outside
    the ball, u in [0, m) with u > 0 on the ball part of the half-space,
    and nonnegativity of the operator difference on those nodes.  The
    conclusion w >= -tol is checked on every half-space node; the
    J1/J2 decomposition at the minimizing node is reported.
    """
    cfg = cfg or QuadratureConfig()
    m_bound = spec.m_bound if m_bound is None else float(m_bound)
    nodes = u.nodes()
    coord = nodes @ plane.e
    in_h = coord < plane.offset
    in_ball = np.linalg.norm(nodes, axis=1) < ball_radius
    omega = in_h & in_ball

    if np.any(u.values < -hyp_tol) or float(np.max(u.values)) >= m_bound:
        raise PreconditionError(
            f"u must take values in [0, m) with m = {m_bound}; "
            f"range is [{u.values.min():.3g}, {u.values.max():.3g}]")
    nonpos = omega & (u.values <= 0.0)
    if np.any(nonpos):
        raise PreconditionError(
            f"u must be positive on the ball part of the half-space; "
            f"{int(nonpos.sum())} offending nodes")

    w = w_lambda_field(u, plane, nodes)
    out_ball = in_h & ~in_ball
    if np.any(w[out_ball] < -hyp_tol):
        bad = np.nonzero(out_ball & (w < -hyp_tol))[0]
        raise PreconditionError(
            f"w >= 0 outside the ball fails at {int(bad.size)} half-space nodes")

    j_min, min_w = _node_scan_min(w, in_h)
    jo_min, min_w_omega = _node_scan_min(w, omega)

    def split_at(j):
        view = ReflectedFunction(u, plane)
        gamma = (eval_plap(spec, view, nodes[j], cfg)
                 - eval_plap(spec, u, nodes[j], cfg))
        j1, j2 = j1_j2_split(spec, u, plane, nodes[j], cfg)
        return {"gamma": gamma, "J1": j1, "J2": j2}

    if min_w < -concl_tol:
        diag = {"min_w": min_w, "min_w_omega": min_w_omega}
        if jo_min is not None:
            diag.update(split_at(jo_min))
            diag["omega_minimizer"] = nodes[jo_min].tolist()
        return MPReport(VIOLATED, tuple(nodes[j_min].tolist()), min_w, diag)

    # hypothesis: operator difference nonnegative on interior Omega nodes
    diag = {"min_w": min_w, "min_w_omega": min_w_omega}
    if jo_min is not None:
        pts = nodes[omega]
        view = ReflectedFunction(u, plane)
        delta = (eval_plap_field(spec, view, pts, cfg)
                 - eval_plap_field(spec, u, pts, cfg))
        k_bad = int(np.argmin(delta))
        diag["min_delta"] = float(delta[k_bad])
        diag.update(split_at(jo_min))
        diag["omega_minimizer"] = nodes[jo_min].tolist()
        if delta[k_bad] < -hyp_tol:
            diag["reason"] = "operator-difference hypothesis fails"
            diag["worst_point"] = pts[k_bad].tolist()
            return MPReport(INCONCLUSIVE, diagnostics=diag)

    if min_w_omega <= concl_tol and jo_min is not None:
        off = np.nonzero(in_h & (np.abs(w) > concl_tol))[0]
        if off.size:
            return MPReport(VIOLATED, tuple(nodes[off[0]].tolist()), float(w[off[0]]),
                            {**diag, "reason": "interior zero of w but w not identically zero"})
        diag["w_vanishes"] = True
    return MPReport(HOLDS, diagnostics=diag)


def j1_j2_split(spec: ExponentSpec, u: SampledFunction, plane: PlaneGeometry,
                x0, cfg: QuadratureConfig | None = None) -> tuple[float, float]:
    """Half-space decomposition of the operator difference at x0.

    J1 integrates the kernel difference kappa against the f-difference over
    the half-space; J2 folds the remaining terms through the reflected
    kernel.  Both integrands are absolutely integrable near x0 when
    p(0)(1-s) > 1, which holds for the shipped configurations; nodes pair
    antipodally near x0 anyway, keeping the sum stable.
    """
    cfg = cfg or QuadratureConfig()
    x0 = np.atleast_1d(np.asarray(x0, dtype=float))
    N, s = spec.dimension, spec.order
    if not plane.in_halfspace(x0, strict=False):
        raise PreconditionError("x0 must lie in the closed half-space")

    u_abs = float(np.max(np.abs(u.values)))
    f_max = _f_abs_max(2.2 * max(u_abs, 1e-30), spec.p_minus, spec.p_plus)
    r_eff = max(cfg.tail_radius,
                tail_radius_needed(f_max, N, s, spec.p_minus, cfg.tail_tolerance))
    dist_box = float(np.min(u.extent - np.abs(x0)))
    delta = min(cfg.pairing_radius, 0.5 * dist_box)
    rs, wr = radial_rule(delta, r_eff, cfg)
    dirs, aw = directions(N, cfg.angular_nodes)

    pos = (x0[None, None, :] + rs[:, None, None] * dirs[None, :, :]).reshape(-1, N)
    w_node = ((wr * rs ** (N - 1))[:, None] * aw[None, :]).ravel()
    in_h = pos @ plane.e < plane.offset
    y = pos[in_h]
    w = w_node[in_h]

    y_l = plane.reflect(y)
    r1 = np.repeat(rs, len(dirs))[in_h]
    r2 = np.linalg.norm(x0[None, :] - y_l, axis=1)
    q1 = np.asarray(spec.q(r1), dtype=float)
    q2 = np.asarray(spec.q(r2), dtype=float)
    k1 = r1 ** (-(N + s * q1))
    k2 = r2 ** (-(N + s * q2))

    u_x0 = float(u.point_eval(x0[None, :])[0])
    ul_x0 = float(u.point_eval(plane.reflect(x0[None, :]))[0])
    u_y = u.point_eval(y)
    ul_y = u.point_eval(y_l)

    def f(t, p):
        return np.abs(t) ** (p - 2.0) * t

    diff_f = f(ul_x0 - ul_y, q1) - f(u_x0 - u_y, q1)
    j1 = float(np.sum(w * (k1 - k2) * diff_f))
    folded = diff_f + f(ul_x0 - u_y, q2) - f(u_x0 - ul_y, q2)
    j2 = float(np.sum(w * k2 * folded))
    return j1, j2


@dataclass(frozen=True)
class ProbeReport:
    deltas: tuple
    ratios: tuple
    window_max: float
    margin: float
    ok: bool
    verdict: str
    diagnostics: dict = field(default_factory=dict)

    def to_dict(self):
        return {"deltas": list(self.deltas), "ratios": list(self.ratios),
                "window_max": self.window_max, "margin": self.margin,
                "ok": bool(self.ok), "verdict": self.verdict,
                "diagnostics": self.diagnostics}


def boundary_estimate_probe(spec: ExponentSpec, u: SampledFunction,
                            plane_sequence, x_sequence,
                            cfg: QuadratureConfig | None = None,
                            window: int = 4) -> ProbeReport:
    """Hopf-style boundary ratio sequence (operator difference over distance).

    Preconditions: the distances delta_k decrease strictly toward zero and
    w > 0 for the limiting plane on its ball half-space nodes (otherwise
    the probe refuses with verdict 'inconclusive').  The report asserts
    the final-window maximum of the ratios stays below zero and returns
    the realized margin.
    """
    cfg = cfg or QuadratureConfig()
    planes = list(plane_sequence)
    xs = [np.atleast_1d(np.asarray(x, dtype=float)) for x in x_sequence]
    if len(planes) != len(xs) or not planes:
        raise PreconditionError("plane and point sequences must match and be nonempty")

    deltas = []
    for pl, x in zip(planes, xs):
        d = abs(float(pl.coord(x)) - pl.offset)
        if d == 0.0:
            raise NumericError("delta_k = 0: point sits on its plane")
        deltas.append(d)
    if any(b >= a for a, b in zip(deltas, deltas[1:])):
        raise PreconditionError("delta_k must be strictly decreasing")

    # limiting-plane positivity on ball half-space nodes
    pl0 = planes[-1]
    nodes = u.nodes()
    omega0 = (nodes @ pl0.e < pl0.offset) & (np.linalg.norm(nodes, axis=1) < 1.0)
    if np.any(omega0):
        w0 = w_lambda_field(u, pl0, nodes[omega0])
        if float(np.min(w0)) <= 0.0:
            return ProbeReport(tuple(deltas), (), np.nan, np.nan, False, INCONCLUSIVE,
                               {"reason": "w for the limiting plane is not strictly positive",
                                "min_w0": float(np.min(w0))})
    else:
        return ProbeReport(tuple(deltas), (), np.nan, np.nan, False, INCONCLUSIVE,
                           {"reason": "no ball half-space nodes for the limiting plane"})

    ratios = []
    for pl, x, d in zip(planes, xs, deltas):
        view = ReflectedFunction(u, pl)
        gamma = eval_plap(spec, view, x, cfg) - eval_plap(spec, u, x, cfg)
        ratios.append(gamma / d)

    wmax = float(np.max(ratios[-window:]))
    ok = all(r < 0.0 for r in ratios) and wmax < 0.0
    return ProbeReport(tuple(deltas), tuple(ratios), wmax, -wmax, ok,
                       HOLDS if ok else VIOLATED,
                       {"window": window, "n": len(ratios)})
