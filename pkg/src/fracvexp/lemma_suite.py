"""Numerical certification of the auxiliary lemmas.

Covers the uniform mean-value constant for f(t) = |t|^(p-2) t, positivity
of the kernel difference across a reflecting plane, positivity of the
tail-weight infimum, and the sign of the exponent-comparison derivative
feeding the antisymmetric maximum principle.  Certification is sampled
evidence with reported margins, never a symbolic proof.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import NumericError, PreconditionError
from .exponents import ExponentSpec
from .geometry import PlaneGeometry
from .nonlocal_operator import f_power, kernel

#: target residual of the mean-value equation, relative to max(1, |f2 - f1|)
MV_RESIDUAL_TOL = 1e-10

SAME_SIGN_CLOSE = "same_sign_close"
OPPOSITE_SIGN = "opposite_sign"
FAR_APART = "far_apart"


def c0_constant(case: str, p_minus: float, p_plus: float) -> float:
    """The case constants of the uniform mean-value bound."""
    if case == SAME_SIGN_CLOSE:
        return 1.0 / 2.0 ** (p_plus - 2.0)
    if case == OPPOSITE_SIGN:
        return 1.0 / (2.0 * (p_plus - 1.0))
    if case == FAR_APART:
        return (2.0 ** (p_minus - 1.0) - 1.0) / ((p_plus - 1.0) * 2.0 ** p_minus)
    raise PreconditionError(f"unknown mean-value case {case!r}")


def classify_case(t1: float, t2: float) -> str:
    """Case split with |t_small| vs |t_big|/2 and the sign pattern."""
    if t1 * t2 < 0.0:
        return OPPOSITE_SIGN
    ts, tb = sorted((abs(t1), abs(t2)))
    return SAME_SIGN_CLOSE if ts >= 0.5 * tb else FAR_APART


@dataclass(frozen=True)
class MeanValueWitness:
    t1: float
    t2: float
    p: float
    alpha: float
    c0_case: str
    c0: float
    residual: float

    def to_dict(self):
        return {"t1": self.t1, "t2": self.t2, "p": self.p, "alpha": self.alpha,
                "c0_case": self.c0_case, "c0": self.c0, "residual": self.residual}


def mean_value_alpha(t1: float, t2: float, p: float) -> MeanValueWitness:
    """Solve f(t2) - f(t1) = f'(alpha)(t2 - t1) by safeguarded bisection.

    f'(a) = (p-1)|a|^(p-2) is even and increasing in |a|, so |alpha| has a
    unique root in [0, max(|t1|,|t2|)]; the sign is chosen to land inside
    the endpoint interval, preferring the root of smaller magnitude (any
    valid alpha satisfies the bound, the choice only shapes the witness).
    """
    if p <= 2.0:
        raise PreconditionError("mean-value witness needs p > 2")
    t1, t2, p = float(t1), float(t2), float(p)
    if t1 == t2:
        case = classify_case(t1, t2)
        return MeanValueWitness(t1, t2, p, t1, case, c0_constant(case, p, p), 0.0)

    slope = (f_power(t2, p) - f_power(t1, p)) / (t2 - t1)
    t_max = max(abs(t1), abs(t2))
    if slope == 0.0:
        # f(t1) and f(t2) collide in floats (underflow); the larger-magnitude
        # endpoint is a valid witness in that degenerate arithmetic
        alpha = t1 if abs(t1) >= abs(t2) else t2
        case = classify_case(t1, t2)
        return MeanValueWitness(t1, t2, p, alpha, case, c0_constant(case, p, p), 0.0)

    def psi(a: float) -> float:
        return (p - 1.0) * a ** (p - 2.0) - slope

    lo, hi = 0.0, t_max
    flo = psi(lo)
    fhi = psi(hi)
    if flo > 0.0 or fhi < 0.0:
        raise NumericError(f"mean-value bracket failed: psi({lo})={flo}, psi({hi})={fhi}")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        fm = psi(mid)
        if fm <= 0.0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-13 * t_max:
            break
    a = 0.5 * (lo + hi)

    lo_t, hi_t = min(t1, t2), max(t1, t2)
    exact = [c for c in (a, -a) if lo_t <= c <= hi_t]
    if exact:
        alpha = exact[0]  # ties carry equal |alpha|; keep the positive root
    else:
        # bisection fuzz pushed |a| just past the endpoint: clamp on the
        # side whose endpoint magnitude matches
        alpha = hi_t if abs(a - hi_t) <= abs(-a - lo_t) else lo_t

    resid = abs((f_power(t2, p) - f_power(t1, p)) - (p - 1.0) * abs(alpha) ** (p - 2.0) * (t2 - t1))
    resid /= max(1.0, abs(f_power(t2, p) - f_power(t1, p)))
    case = classify_case(t1, t2)
    return MeanValueWitness(t1, t2, p, float(alpha), case, c0_constant(case, p, p), float(resid))


@dataclass(frozen=True)
class C0Check:
    ok: bool
    margin: float
    c0: float

    def to_dict(self):
        return {"ok": bool(self.ok), "margin": self.margin, "c0": self.c0}


def check_c0_bound(witness: MeanValueWitness, p_minus: float, p_plus: float) -> C0Check:
    """Assert |alpha|^(p-2) >= c0 max(|t1|^(p-2), |t2|^(p-2)) for the case constant."""
    c0 = c0_constant(witness.c0_case, p_minus, p_plus)
    p = witness.p
    lhs = abs(witness.alpha) ** (p - 2.0)
    rhs = c0 * max(abs(witness.t1) ** (p - 2.0), abs(witness.t2) ** (p - 2.0))
    return C0Check(lhs >= rhs * (1.0 - 1e-12), float(lhs - rhs), c0)


@dataclass(frozen=True)
class KernelMonotoneResult:
    ok: bool
    kappa: float
    boundary: bool

    def to_dict(self):
        return {"ok": bool(self.ok), "kappa": self.kappa, "boundary": bool(self.boundary)}


def check_kernel_monotone(spec: ExponentSpec, plane: PlaneGeometry,
                          x0, y) -> KernelMonotoneResult:
    """kappa(x0, y) = K(x0, y) - K(x0, y_lambda) must be positive for
    x0 in the closed half-space and y strictly inside it; y on the plane
    is the reflection fixed point with kappa exactly zero."""
    x0 = np.atleast_1d(np.asarray(x0, dtype=float))
    y = np.atleast_1d(np.asarray(y, dtype=float))
    if not plane.in_halfspace(x0, strict=False):
        raise PreconditionError("x0 must lie in the closed half-space")
    if not plane.in_halfspace(y, strict=False):
        raise PreconditionError("y must lie in the (closed) half-space")
    y_l = plane.reflect(y)
    if np.array_equal(y_l, y):
        return KernelMonotoneResult(True, 0.0, True)
    kap = kernel(spec, x0, y) - kernel(spec, x0, y_l)
    return KernelMonotoneResult(kap > 0.0, float(kap), False)


@dataclass(frozen=True)
class InfimumReport:
    infimum: float
    argmin: tuple
    far_field_ratio: float
    positive: bool
    samples: int

    def to_dict(self):
        return {"infimum": self.infimum, "argmin": list(self.argmin),
                "far_field_ratio": self.far_field_ratio,
                "positive": bool(self.positive), "samples": self.samples}


def check_cx_positive(spec: ExponentSpec, x, sample_radius: float = 1e3,
                      samples: int = 2000, margin: float = 0.0,
                      rng: np.random.Generator | None = None) -> InfimumReport:
    """Sampled infimum over |x-y| > 1 of |x-y|^(N+sp)/(1+|y|^(N+sp)).

    Includes near-boundary radii 1 + 1e-6 and a far-field ray check where
    the ratio tends to a positive limit.  The point x = 0 is excluded, as
    in the statement being certified.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if float(np.linalg.norm(x)) == 0.0:
        raise PreconditionError("the infimum statement excludes x = 0")
    if samples < 1:
        raise PreconditionError("samples must be >= 1")
    rng = rng or np.random.default_rng(0)
    N, s = spec.dimension, spec.order

    n_r = max(8, samples // 64)
    radii = np.concatenate([
        [1.0 + 1e-6, 1.0 + 1e-3],
        np.geomspace(1.01, sample_radius, n_r),
    ])
    if N == 1:
        dirs = np.array([[1.0], [-1.0]])
    else:
        th = rng.uniform(0.0, 2.0 * np.pi, size=max(8, samples // n_r))
        dirs = np.column_stack([np.cos(th), np.sin(th)])

    pos = x[None, None, :] + radii[:, None, None] * dirs[None, :, :]
    pts = pos.reshape(-1, N)
    d = np.repeat(radii, len(dirs))
    q = np.asarray(spec.q(d), dtype=float)
    expo = N + s * q
    ratio = d ** expo / (1.0 + np.linalg.norm(pts, axis=1) ** expo)

    i_min = int(np.argmin(ratio))
    far = x[None, :] + 1e9 * dirs[:1]
    qf = float(spec.q(1e9))
    far_ratio = float(1e9 ** (N + s * qf) / (1.0 + np.linalg.norm(far[0]) ** (N + s * qf)))
    inf_v = float(ratio[i_min])
    return InfimumReport(inf_v, tuple(pts[i_min].tolist()), far_ratio,
                         inf_v > margin and far_ratio > margin, int(ratio.size))


def gprime_margin(t0, p1, p2):
    """(p1-1)|t0|^(p1-2) - (p2-1)|t0|^(p2-2), nonnegative when
    1 - 1/ln(m) <= p1 <= p2 and |t0| < m (vectorized)."""
    a = np.abs(np.asarray(t0, dtype=float))
    p1 = np.asarray(p1, dtype=float)
    p2 = np.asarray(p2, dtype=float)
    return (p1 - 1.0) * a ** (p1 - 2.0) - (p2 - 1.0) * a ** (p2 - 2.0)


# ---------------------------------------------------------------------------
# Randomized suites (seeded, reproducible)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SuiteReport:
    name: str
    passed: bool
    count: int
    failures: int
    min_margin: float
    max_residual: float
    seed: int
    detail: dict = field(default_factory=dict)

    def to_dict(self):
        return {"name": self.name, "passed": bool(self.passed), "count": self.count,
                "failures": int(self.failures), "min_margin": self.min_margin,
                "max_residual": self.max_residual, "seed": self.seed,
                "detail": self.detail}


def _bisect_alpha_vec(t1, t2, p, iters: int = 80):
    """Vectorized twin of the witness bisection (|alpha| only)."""
    f1 = np.abs(t1) ** (p - 2.0) * t1
    f2 = np.abs(t2) ** (p - 2.0) * t2
    slope = np.where(t2 != t1, (f2 - f1) / np.where(t2 != t1, t2 - t1, 1.0), 0.0)
    lo = np.zeros_like(slope)
    hi = np.maximum(np.abs(t1), np.abs(t2))
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        neg = (p - 1.0) * mid ** (p - 2.0) - slope <= 0.0
        lo = np.where(neg, mid, lo)
        hi = np.where(neg, hi, mid)
    a = 0.5 * (lo + hi)
    return np.where(t1 == t2, np.abs(t1), a)


def run_mean_value_suite(n: int = 100_000, seed: int = 0,
                         p_range: tuple = (2.0, 6.0),
                         spot_checks: int = 200) -> SuiteReport:
    """n seeded samples of (t1, t2, p); every witness must satisfy the
    case bound and the mean-value residual tolerance.

    The bulk run uses the vectorized bisection; `spot_checks` samples are
    re-derived through the scalar `mean_value_alpha` path and must agree.
    """
    rng = np.random.default_rng(seed)
    t1 = rng.uniform(-1.0, 1.0, n)
    t2 = rng.uniform(-1.0, 1.0, n)
    lo_p = np.nextafter(p_range[0], p_range[1])
    p = rng.uniform(lo_p, p_range[1], n)

    a = _bisect_alpha_vec(t1, t2, p)
    f1 = np.abs(t1) ** (p - 2.0) * t1
    f2 = np.abs(t2) ** (p - 2.0) * t2
    resid = np.abs((f2 - f1) - (p - 1.0) * a ** (p - 2.0) * (t2 - t1))
    resid /= np.maximum(1.0, np.abs(f2 - f1))

    opp = t1 * t2 < 0.0
    ts = np.minimum(np.abs(t1), np.abs(t2))
    tb = np.maximum(np.abs(t1), np.abs(t2))
    close = ~opp & (ts >= 0.5 * tb)
    c0 = np.where(opp, 1.0 / (2.0 * (p - 1.0)),
                  np.where(close, 0.5 ** (p - 2.0),
                           (2.0 ** (p - 1.0) - 1.0) / ((p - 1.0) * 2.0 ** p)))
    lhs = a ** (p - 2.0)
    rhs = c0 * tb ** (p - 2.0)
    margin = lhs - rhs
    ok = (lhs >= rhs * (1.0 - 1e-12)) & (resid <= MV_RESIDUAL_TOL)

    spot_fail = 0
    idx = rng.choice(n, size=min(spot_checks, n), replace=False)
    for i in idx:
        w = mean_value_alpha(float(t1[i]), float(t2[i]), float(p[i]))
        chk = check_c0_bound(w, float(p[i]), float(p[i]))
        if (not chk.ok or w.residual > MV_RESIDUAL_TOL
                or abs(abs(w.alpha) - a[i]) > 1e-9 * max(1.0, a[i])):
            spot_fail += 1

    failures = int(np.count_nonzero(~ok)) + spot_fail
    return SuiteReport("mean_value_c0", failures == 0, n, failures,
                       float(np.min(margin)), float(np.max(resid)), seed,
                       {"spot_checks": int(len(idx)), "spot_failures": spot_fail})


def run_kernel_monotone_suite(spec: ExponentSpec, n: int = 10_000,
                              seed: int = 0) -> SuiteReport:
    """n random (x0, y, plane) configurations; kappa must be positive off
    the plane and exactly zero on it."""
    rng = np.random.default_rng(seed)
    N, s = spec.dimension, spec.order
    lam = rng.uniform(-1.0, 0.5, n)
    if N == 1:
        e = np.ones((n, 1))
    else:
        th = rng.uniform(0.0, 2.0 * np.pi, n)
        e = np.column_stack([np.cos(th), np.sin(th)])
    # x0 strictly inside the half-space (kappa degenerates to 0 for x0 on
    # the plane), y strictly inside as well
    x0 = rng.uniform(-2.0, 2.0, (n, N))
    y = rng.uniform(-2.0, 2.0, (n, N))
    cx = np.einsum("ij,ij->i", x0, e)
    cy = np.einsum("ij,ij->i", y, e)
    gap_x = rng.uniform(1e-9, 1.0, n)
    x0 -= np.maximum(cx - (lam - gap_x), 0.0)[:, None] * e
    gap = rng.uniform(1e-6, 2.0, n)
    y -= (cy - lam + gap)[:, None] * e

    y_l = y - 2.0 * (np.einsum("ij,ij->i", y, e) - lam)[:, None] * e
    d1 = np.linalg.norm(x0 - y, axis=1)
    d2 = np.linalg.norm(x0 - y_l, axis=1)
    keep = d1 > 1e-12
    q1 = np.asarray(spec.q(d1[keep]), dtype=float)
    q2 = np.asarray(spec.q(d2[keep]), dtype=float)
    kap = d1[keep] ** (-(N + s * q1)) - d2[keep] ** (-(N + s * q2))
    failures = int(np.count_nonzero(kap <= 0.0))

    # boundary fixed point: kappa must vanish to round-off
    e0 = np.zeros(N)
    e0[0] = 1.0
    plane = PlaneGeometry(tuple(e0), -0.25)
    boundary = check_kernel_monotone(spec, plane, -0.5 * e0, -0.25 * e0)
    if not boundary.boundary or boundary.kappa != 0.0:
        failures += 1

    return SuiteReport("kernel_monotone", failures == 0, int(keep.sum()), failures,
                       float(np.min(kap)), 0.0, seed,
                       {"boundary_kappa": boundary.kappa})


def run_gprime_suite(m: float, p_plus: float, n: int = 100_000,
                     seed: int = 0) -> SuiteReport:
    """n samples of |t0| in (0, m) and 1 - 1/ln(m) <= p1 <= p2 <= p_plus;
    the exponent-comparison derivative must be nonnegative.

    Callers must pass the same m as the exponent spec in use: the lower
    bound on p is tied to m through the decreasing window of
    h(t) = (t-1)|t0|^(t-2).
    """
    if not 0.0 < m < 1.0:
        raise PreconditionError("m must lie in (0,1)")
    p_floor = 1.0 - 1.0 / math.log(m)
    if p_plus < p_floor:
        raise PreconditionError("p_plus below the m-tied lower bound")
    rng = np.random.default_rng(seed)
    t0 = rng.uniform(-m, m, n)
    t0 = np.where(t0 == 0.0, m / 2.0, t0)
    p1 = rng.uniform(p_floor, p_plus, n)
    p2 = rng.uniform(p1, p_plus)
    g = gprime_margin(t0, p1, p2)
    failures = int(np.count_nonzero(g < -1e-12 * np.maximum(1.0, np.abs(g))))
    return SuiteReport("gprime_sign", failures == 0, n, failures,
                       float(np.min(g)), 0.0, seed,
                       {"m": m, "p_floor": p_floor, "p_plus": p_plus})


def certify_lemmas(spec: ExponentSpec, seed: int = 0,
                   n_mean_value: int = 100_000, n_kernel: int = 10_000,
                   n_gprime: int = 100_000) -> dict:
    """Run all lemma suites for one spec; returns a JSON-ready report."""
    ss = np.random.SeedSequence(seed).spawn(4)
    seeds = [int(s.generate_state(1)[0]) % (2 ** 31) for s in ss]
    mv = run_mean_value_suite(n_mean_value, seeds[0], (2.0, max(6.0, spec.p_plus)))
    km = run_kernel_monotone_suite(spec, n_kernel, seeds[1])
    gp = run_gprime_suite(spec.m_bound, max(spec.p_plus, 6.0), n_gprime, seeds[2])
    x_probe = np.zeros(spec.dimension)
    x_probe[0] = 2.0
    cx = check_cx_positive(spec, x_probe, rng=np.random.default_rng(seeds[3]))
    passed = mv.passed and km.passed and gp.passed and cx.positive
    return {
        "passed": bool(passed),
        "seed": seed,
        "suites": [mv.to_dict(), km.to_dict(), gp.to_dict()],
        "cx_infimum": cx.to_dict(),
    }
