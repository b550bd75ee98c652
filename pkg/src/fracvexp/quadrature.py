"""Quadrature plans for the principal-value evaluation.

The singular integral is split as in the pointwise well-definedness
argument: a symmetric-pair region around the evaluation point (dyadically
graded toward the singularity, so the leading odd part cancels pair by
pair), geometric annuli out to an effective truncation radius, and a
discarded far tail certified by the kernel decay r^(-(N + s p_minus)).

A plan freezes, per evaluation point, every quadrature node's kernel
weight, exponent, and interpolation stencil into flat arrays; applying a
plan to a value vector is then a pure gather/power/reduce kernel which is
what the numba and numpy backends execute.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import PreconditionError, TailError
from .exponents import ExponentSpec
from .geometry import PlaneGeometry
from .grids import ZERO_BALL, ReflectedFunction, SampledFunction

#: Hard ceiling on the auto-raised truncation radius.  Annuli grow
#: geometrically, so even radii this large cost only ~50 intervals.
R_EFF_CAP = 1e15

#: Width ratio of the geometric annuli between pairing radius and tail.
ANNULUS_RATIO = 2.0


@dataclass(frozen=True)
class QuadratureConfig:
    """Knobs of the principal-value quadrature.

    pairing_radius   : cap on the symmetric-pair region radius delta
    graded_levels    : dyadic refinement levels toward the singularity
    nodes_per_level  : Gauss nodes per radial interval
    angular_nodes    : equispaced angles in 2-d (even: antipodal pairing)
    tail_radius      : requested outer truncation radius R
    tail_tolerance   : absolute bound allowed for the discarded tail
    """

    pairing_radius: float = 0.25
    graded_levels: int = 12
    nodes_per_level: int = 8
    angular_nodes: int = 32
    tail_radius: float = 4.0
    tail_tolerance: float = 1e-8

    def __post_init__(self):
        if not 0.0 < self.pairing_radius <= 1.0:
            raise PreconditionError("pairing_radius must lie in (0, 1]")
        if self.graded_levels < 1 or self.nodes_per_level < 1:
            raise PreconditionError("graded_levels and nodes_per_level must be >= 1")
        if self.angular_nodes < 4 or self.angular_nodes % 2:
            raise PreconditionError("angular_nodes must be even and >= 4")
        if self.tail_tolerance <= 0.0:
            raise PreconditionError("tail_tolerance must be positive")

    def validate_for_extent(self, extent: float) -> None:
        if self.tail_radius <= max(1.0, 2.0 * extent):
            raise PreconditionError(
                f"tail_radius must exceed max(1, 2L) = {max(1.0, 2.0 * extent)}")


@dataclass
class EvalPlan:
    """Frozen quadrature for a batch of evaluation points (see module docs).

    `level_tag` marks the two innermost dyadic levels (2 = innermost,
    1 = next): their measured contribution ratio drives a geometric
    remainder for the part of the grading truncated below the last level,
    which matters when an interpolant kink sits at the evaluation point
    (paired decay exponent p - 1 - s p can be close to zero).
    """

    ptr: np.ndarray        # (npts+1,) segment offsets into the node arrays
    idx: np.ndarray        # (nnz, S) flat grid indices (dummy 0 for exterior)
    coef: np.ndarray       # (nnz, S) stencil coefficients (0 for exterior)
    ext: np.ndarray        # (nnz,) 1.0 where the exterior rule supplies the value
    bias: np.ndarray       # (nnz,) exterior value at the node
    wk: np.ndarray         # (nnz,) quadrature weight times kernel
    pm2: np.ndarray        # (nnz,) p(r) - 2
    level_tag: np.ndarray  # (nnz,) int8: 2 innermost level, 1 second, 0 rest
    cidx: np.ndarray       # (npts, S) center stencil indices
    ccoef: np.ndarray      # (npts, S) center stencil coefficients
    cbias: np.ndarray      # (npts,) center exterior value
    rho: np.ndarray        # (npts,) frozen level-contribution ratio (0: off)
    r_eff: float
    tail_bound: float
    meta: dict = field(default_factory=dict)

    @property
    def n_points(self) -> int:
        return len(self.ptr) - 1


def _gauss_on(a: float, b: float, n: int):
    x, w = np.polynomial.legendre.leggauss(n)
    mid, half = 0.5 * (a + b), 0.5 * (b - a)
    return mid + half * x, half * w


def radial_rule(delta: float, r_max: float, cfg: QuadratureConfig):
    """Radii and dr-weights: dyadic levels inside delta, geometric annuli beyond.

    Truncation below delta*2^-levels is benign: paired level contributions
    decay geometrically with exponent Q(0+)(1-s) > 0.
    """
    rs, ws = [], []
    for lev in range(cfg.graded_levels - 1, -1, -1):
        a = delta * 2.0 ** (-(lev + 1))
        b = delta * 2.0 ** (-lev)
        x, w = _gauss_on(a, b, cfg.nodes_per_level)
        rs.append(x)
        ws.append(w)
    a = delta
    while a < r_max:
        b = min(a * ANNULUS_RATIO, max(r_max, a * 1.0000001))
        if b <= a:
            break
        x, w = _gauss_on(a, b, cfg.nodes_per_level)
        rs.append(x)
        ws.append(w)
        a = b
    return np.concatenate(rs), np.concatenate(ws)


def directions(dim: int, angular_nodes: int):
    """Antipodally paired unit directions and their angular weights."""
    if dim == 1:
        return np.array([[1.0], [-1.0]]), np.array([1.0, 1.0])
    theta = 2.0 * np.pi * np.arange(angular_nodes) / angular_nodes
    d = np.column_stack([np.cos(theta), np.sin(theta)])
    w = np.full(angular_nodes, 2.0 * np.pi / angular_nodes)
    return d, w


def sphere_measure(dim: int) -> float:
    return 2.0 if dim == 1 else 2.0 * np.pi


def tail_radius_needed(f_max: float, dim: int, s: float, p_minus: float,
                       tol: float) -> float:
    """Smallest R >= 1 with |f|*omega_N*R^(-s p_minus)/(s p_minus) <= tol."""
    sp = s * p_minus
    if f_max == 0.0:
        return 1.0
    r = (f_max * sphere_measure(dim) / (tol * sp)) ** (1.0 / sp)
    return max(1.0, r)


def tail_bound_at(f_max: float, dim: int, s: float, p_minus: float, r: float) -> float:
    sp = s * p_minus
    return f_max * sphere_measure(dim) * r ** (-sp) / sp


def _f_abs_max(t_bound: float, p_minus: float, p_plus: float) -> float:
    if t_bound <= 0.0:
        return 0.0
    return max(t_bound ** (p_minus - 1.0), t_bound ** (p_plus - 1.0))


def build_plan(spec: ExponentSpec, u, points, cfg: QuadratureConfig,
               raise_on_tail: bool = True, values_bound: float = 0.0) -> EvalPlan:
    """Assemble the quadrature plan for `points` (each strictly inside the box).

    `u` may be a SampledFunction or a ReflectedFunction view; for the view,
    the reflection is applied to quadrature positions before the exterior
    rule and interpolation, so no resampling happens.  `values_bound` widens
    the tail budget so the plan stays valid when it is re-applied to other
    value vectors with |u| below the bound (solver iterates).
    """
    plane: PlaneGeometry | None = None
    if isinstance(u, ReflectedFunction):
        plane, u = u.plane, u.base
    if not isinstance(u, SampledFunction):
        raise PreconditionError("u must be a SampledFunction or ReflectedFunction")
    if u.dim != spec.dimension:
        raise PreconditionError(
            f"grid dimension {u.dim} does not match spec dimension {spec.dimension}")
    cfg.validate_for_extent(u.extent)

    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if pts.shape[1] != u.dim:
        raise PreconditionError(f"points must have {u.dim} coordinates")
    inside = u.inside_box(pts, strict=True)
    if not np.all(inside):
        bad = np.nonzero(~inside)[0]
        raise PreconditionError(
            f"evaluation points must be strictly inside the grid box; offenders: {bad.tolist()}")

    s, N = spec.order, spec.dimension
    values = u.values

    # conservative bound on |u(x)-u(y)|; 10% headroom absorbs interpolation overshoot
    u_abs = float(np.max(np.abs(values))) if values.size else 0.0
    t_bound = 2.2 * max(u_abs, values_bound, 1e-30)
    f_max = _f_abs_max(t_bound, spec.p_minus, spec.p_plus)
    r_eff = max(cfg.tail_radius,
                tail_radius_needed(f_max, N, s, spec.p_minus, cfg.tail_tolerance))
    if r_eff > R_EFF_CAP:
        raise TailError(
            f"tail bound needs truncation radius {r_eff:.3g} beyond the supported cap; "
            "raise tail_tolerance or rescale the data")

    dirs, aw = directions(N, cfg.angular_nodes)
    n_dirs = len(dirs)

    S = (u.smoothness_hint + 1) ** u.dim
    seg_idx, seg_coef, seg_ext, seg_bias, seg_wk, seg_pm2 = [], [], [], [], [], []
    seg_tag = []
    ptr = [0]
    cidx = np.zeros((len(pts), S), dtype=np.int64)
    ccoef = np.zeros((len(pts), S))
    cbias = np.zeros(len(pts))
    tail_reported = 0.0

    rule = u.exterior_rule
    ext_fn = u.exterior_fn
    for i, x in enumerate(pts):
        dist_box = float(np.min(u.extent - np.abs(x)))
        delta = min(cfg.pairing_radius, 0.5 * dist_box)
        rs, wr = radial_rule(delta, r_eff, cfg)
        q_r = np.asarray(spec.q(rs), dtype=float)
        kern = rs ** (-(N + s * q_r))
        tag_r = np.zeros(len(rs), dtype=np.int8)
        tag_r[:cfg.nodes_per_level] = 2                      # innermost level
        tag_r[cfg.nodes_per_level:2 * cfg.nodes_per_level] = 1
        # node enumeration is radius-major then direction: fixed summation order
        pos = x[None, None, :] + rs[:, None, None] * dirs[None, :, :]
        w_node = (wr * rs ** (N - 1))[:, None] * aw[None, :]
        pos = pos.reshape(-1, N)
        w_node = w_node.ravel()
        kern_n = np.repeat(kern, n_dirs)
        pm2_n = np.repeat(q_r - 2.0, n_dirs)
        tag_n = np.repeat(tag_r, n_dirs)

        zpos = plane.reflect(pos) if plane is not None else pos
        in_box = u.inside_box(zpos)
        if rule == ZERO_BALL:
            interp_mask = in_box & (np.linalg.norm(zpos, axis=1) < 1.0)
        else:
            interp_mask = in_box
        bias_v = np.zeros(len(zpos))
        if ext_fn is not None:
            out_mask = ~in_box
            if np.any(out_mask):
                bias_v[out_mask] = np.asarray(ext_fn(zpos[out_mask]), dtype=float).ravel()

        zc = plane.reflect(x[None, :])[0] if plane is not None else x
        idx_n = np.zeros((len(zpos), S), dtype=np.int64)
        coef_n = np.zeros((len(zpos), S))
        if np.any(interp_mask):
            ii, cc = u.stencils(zpos[interp_mask])
            idx_n[interp_mask] = ii
            coef_n[interp_mask] = cc
        ext_n = (~interp_mask).astype(float)

        seg_idx.append(idx_n)
        seg_coef.append(coef_n)
        seg_ext.append(ext_n)
        seg_bias.append(bias_v)
        seg_wk.append(w_node * kern_n)
        seg_pm2.append(pm2_n)
        seg_tag.append(tag_n)
        ptr.append(ptr[-1] + len(zpos))

        # center value u(x) (or u(reflect(x)) for the view)
        c_in = bool(u.inside_box(zc[None, :])[0])
        c_interp = c_in and (rule != ZERO_BALL or float(np.linalg.norm(zc)) < 1.0)
        if c_interp:
            ci, cw = u.stencils(zc[None, :])
            cidx[i], ccoef[i] = ci[0], cw[0]
        elif ext_fn is not None and not c_in:
            cbias[i] = float(np.asarray(ext_fn(zc[None, :])).ravel()[0])
        c_val = float(ccoef[i] @ values[cidx[i]] + cbias[i])

        # certify the discarded tail for this point
        if ext_fn is not None:
            ray = x[None, :] + r_eff * dirs
            zray = plane.reflect(ray) if plane is not None else ray
            u_far = np.asarray(ext_fn(zray), dtype=float).ravel()
            t_far = float(np.max(np.abs(c_val - u_far)))
        else:
            t_far = abs(c_val)
        fb = _f_abs_max(t_far, spec.p_minus, spec.p_plus)
        bound = tail_bound_at(fb, N, s, spec.p_minus, r_eff)
        tail_reported = max(tail_reported, bound)
        if raise_on_tail and bound > cfg.tail_tolerance * (1.0 + 1e-9):
            need = tail_radius_needed(fb, N, s, spec.p_minus, cfg.tail_tolerance)
            raise TailError(
                f"discarded tail bound {bound:.3g} exceeds tolerance at R = {r_eff:.6g}; "
                f"use tail_radius >= {need:.6g}")

    plan = EvalPlan(
        ptr=np.asarray(ptr, dtype=np.int64),
        idx=np.concatenate(seg_idx, axis=0),
        coef=np.concatenate(seg_coef, axis=0),
        ext=np.concatenate(seg_ext),
        bias=np.concatenate(seg_bias),
        wk=np.concatenate(seg_wk),
        pm2=np.concatenate(seg_pm2),
        level_tag=np.concatenate(seg_tag),
        cidx=cidx, ccoef=ccoef, cbias=cbias,
        rho=np.zeros(len(pts)),
        r_eff=float(r_eff), tail_bound=float(tail_reported),
        meta={"n_points": len(pts), "dim": N},
    )
    plan.rho = _frozen_ratio(plan, values)
    return plan


def _frozen_ratio(plan: EvalPlan, values: np.ndarray) -> np.ndarray:
    """Ratio of the two innermost dyadic level sums at build-time values.

    Freezing the ratio keeps the applied map smooth in the value vector
    (solver iterations would otherwise chatter on the acceptance gates);
    the remainder itself still scales with the live level sum.
    """
    c = np.einsum("ps,ps->p", plan.ccoef, values[plan.cidx]) + plan.cbias
    crep = np.repeat(c, np.diff(plan.ptr))
    t = np.einsum("js,js->j", plan.coef, crep[:, None] - values[plan.idx])
    t = t + plan.ext * (crep - plan.bias)
    contrib = plan.wk * np.abs(t) ** plan.pm2 * t
    a1 = np.add.reduceat(np.where(plan.level_tag == 2, contrib, 0.0), plan.ptr[:-1])
    a2 = np.add.reduceat(np.where(plan.level_tag == 1, contrib, 0.0), plan.ptr[:-1])
    with np.errstate(divide="ignore", invalid="ignore"):
        rho = np.where(a2 != 0.0, a1 / a2, 0.0)
    ok = (rho > 0.0) & (rho < 0.98) & np.isfinite(rho)
    return np.where(ok, rho, 0.0)
