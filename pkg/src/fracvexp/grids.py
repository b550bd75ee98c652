"""Discrete functions on symmetric tensor grids over [-L, L]^N.

A SampledFunction carries node values, an exterior rule deciding values
off the grid (or past the unit ball), and a smoothness hint selecting the
local interpolation order used to emulate a C^{1,1} representative.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Union

import numpy as np

from .errors import PreconditionError
from .geometry import PlaneGeometry

ZERO_BALL = "zero_outside_ball"
ZERO_BOX = "zero_outside_box"
CONSTANT_PREFIX = "constant:"  # serializable constant exterior, e.g. "constant:0.3"
_RULES = (ZERO_BALL, ZERO_BOX)


@dataclass
class SampledFunction:
    """Node values on an equispaced symmetric grid plus an exterior rule.

    values : flat float64 array, C-order for 2-d grids
    shape  : (n,) or (nx, ny); nodes span [-extent, extent] per axis
    exterior_rule : 'zero_outside_ball', 'zero_outside_box', or a callable
        u_ext(points) giving values outside the grid box
    smoothness_hint : 2 (quadratic stencils) or 3 (cubic stencils)
    """

    values: np.ndarray
    shape: tuple
    extent: float
    exterior_rule: Union[str, Callable] = ZERO_BALL
    smoothness_hint: int = 2

    def __post_init__(self):
        self.values = np.ascontiguousarray(self.values, dtype=float).ravel()
        self.shape = tuple(int(n) for n in np.atleast_1d(self.shape))
        if self.values.size != int(np.prod(self.shape)):
            raise PreconditionError("values size does not match grid shape")
        if any(n < 5 for n in self.shape):
            raise PreconditionError("grids need at least 5 nodes per axis")
        if any(n % 2 == 0 for n in self.shape):
            # symmetric pairing around interior points needs the origin on
            # the lattice, hence an odd node count per axis
            raise PreconditionError("grids need an odd node count per axis")
        if not np.all(np.isfinite(self.values)):
            raise PreconditionError("node values must be finite")
        if self.smoothness_hint not in (2, 3):
            raise PreconditionError("smoothness_hint must be 2 or 3")
        if isinstance(self.exterior_rule, str) and self.exterior_rule not in _RULES \
                and not self.exterior_rule.startswith(CONSTANT_PREFIX):
            raise PreconditionError(f"unknown exterior rule {self.exterior_rule!r}")
        if isinstance(self.exterior_rule, str) and self.exterior_rule.startswith(CONSTANT_PREFIX):
            float(self.exterior_rule[len(CONSTANT_PREFIX):])  # must parse
        if self.exterior_rule == ZERO_BALL and self.extent < 1.0:
            raise PreconditionError("zero_outside_ball needs the grid box to contain the unit ball")
        if self.exterior_rule == ZERO_BALL:
            r = np.linalg.norm(self.nodes(), axis=1)
            off = (r >= 1.0) & (self.values != 0.0)
            if np.any(off):
                raise PreconditionError(
                    "zero_outside_ball requires zero values at nodes with |x| >= 1 "
                    f"({int(off.sum())} offending nodes)")

    # -- geometry -----------------------------------------------------------

    @property
    def dim(self) -> int:
        return len(self.shape)

    @property
    def spacing(self) -> float:
        return 2.0 * self.extent / (self.shape[0] - 1)

    def axis_nodes(self, axis: int = 0) -> np.ndarray:
        # antisymmetrized so that node_i == -node_{n-1-i} bitwise: radial
        # symmetry of sampled even functions then holds exactly
        raw = np.linspace(-self.extent, self.extent, self.shape[axis])
        return 0.5 * (raw - raw[::-1])

    def nodes(self) -> np.ndarray:
        """All node coordinates, shape (n_total, dim), C-order."""
        axes = [self.axis_nodes(a) for a in range(self.dim)]
        if self.dim == 1:
            return axes[0][:, None]
        xx, yy = np.meshgrid(axes[0], axes[1], indexing="ij")
        return np.column_stack([xx.ravel(), yy.ravel()])

    @classmethod
    def from_function(cls, fn: Callable, extent: float, n: int, dim: int = 1,
                      exterior_rule=ZERO_BALL, smoothness_hint: int = 2):
        """Sample fn on the grid; under the ball rule, values at |x| >= 1 are zeroed."""
        shape = (n,) * dim
        probe = cls(np.zeros(int(np.prod(shape))), shape, extent,
                    ZERO_BOX, smoothness_hint)
        pts = probe.nodes()
        vals = np.asarray(fn(pts), dtype=float).ravel()
        if exterior_rule == ZERO_BALL:
            vals = np.where(np.linalg.norm(pts, axis=1) < 1.0, vals, 0.0)
        return cls(vals, shape, extent, exterior_rule, smoothness_hint)

    def with_values(self, values: np.ndarray) -> "SampledFunction":
        return SampledFunction(values, self.shape, self.extent,
                               self.exterior_rule, self.smoothness_hint)

    def inside_box(self, pts: np.ndarray, strict: bool = False) -> np.ndarray:
        pts = np.atleast_2d(pts)
        if strict:
            return np.all(np.abs(pts) < self.extent, axis=1)
        return np.all(np.abs(pts) <= self.extent, axis=1)

    # -- interpolation ------------------------------------------------------

    def _axis_stencil(self, coords: np.ndarray):
        """Per-axis stencil start indices and Lagrange weights at coords.

        Stencils are cell-anchored, so neighboring stencils meet at a node
        they both interpolate: the piecewise interpolant is continuous
        everywhere.  (Center-anchored stencils would jump by O(h^3) across
        half-cell lines, which the principal-value pairing cannot absorb.)
        The quadratic stencil's extra node sits on the origin side, so the
        interpolant of even data is mirror-symmetric to round-off; cubic
        stencils are symmetric about the cell already.
        """
        n = self.shape[0]
        h = self.spacing
        u = (coords + self.extent) / h
        if self.smoothness_hint == 2:
            i0 = np.clip(np.floor(u + 1e-9).astype(np.int64), 1, n - 2)
            t = u - i0
            near = np.rint(t)
            t = np.where(np.abs(t - near) < 1e-9, near, t)
            # mirror-coherent bias: negative coordinates take the stencil
            # with the extra node on the right
            neg = (coords < 0.0) & (i0 < n - 2)
            shift = neg & (t != 0.0)
            i0 = np.where(shift, i0 + 1, i0)
            t = np.where(shift, t - 1.0, t)
            w = np.stack([0.5 * t * (t - 1.0),
                          (1.0 - t) * (1.0 + t),
                          0.5 * t * (t + 1.0)], axis=-1)
            return i0 - 1, w
        i0 = np.clip(np.floor(u + 1e-9).astype(np.int64), 1, n - 3)
        t = u - i0
        near = np.rint(t)
        t = np.where(np.abs(t - near) < 1e-9, near, t)
        w = np.stack([-t * (t - 1.0) * (t - 2.0) / 6.0,
                      (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0,
                      -t * (t + 1.0) * (t - 2.0) / 2.0,
                      t * (t + 1.0) * (t - 1.0) / 6.0], axis=-1)
        return i0 - 1, w

    def stencils(self, pts: np.ndarray):
        """Interpolation stencils at points inside the box.

        Returns (idx, coef) with shapes (m, S): flat node indices and
        Lagrange coefficients; points are clamped to valid stencil range.
        """
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        if self.dim == 1:
            i0, w = self._axis_stencil(pts[:, 0])
            offs = np.arange(w.shape[-1])
            return i0[:, None] + offs[None, :], w
        i0x, wx = self._axis_stencil(pts[:, 0])
        i0y, wy = self._axis_stencil(pts[:, 1])
        s = wx.shape[-1]
        offs = np.arange(s)
        ix = (i0x[:, None] + offs[None, :])  # (m, s)
        iy = (i0y[:, None] + offs[None, :])
        ny = self.shape[1]
        idx = (ix[:, :, None] * ny + iy[:, None, :]).reshape(len(pts), s * s)
        coef = (wx[:, :, None] * wy[:, None, :]).reshape(len(pts), s * s)
        return idx, coef

    @property
    def exterior_fn(self):
        """Callable giving values outside the grid box, or None for the
        zero rules."""
        rule = self.exterior_rule
        if callable(rule):
            return rule
        if isinstance(rule, str) and rule.startswith(CONSTANT_PREFIX):
            v = float(rule[len(CONSTANT_PREFIX):])
            return lambda pts: np.full(len(np.atleast_2d(pts)), v)
        return None

    def point_eval(self, pts) -> np.ndarray:
        """Evaluate the interpolant with the exterior rule applied pointwise."""
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        out = np.zeros(len(pts))
        inside = self.inside_box(pts)
        if self.exterior_rule == ZERO_BALL:
            inside &= np.linalg.norm(pts, axis=1) < 1.0
        if np.any(inside):
            idx, coef = self.stencils(pts[inside])
            out[inside] = np.einsum("ms,ms->m", coef, self.values[idx])
        ext = self.exterior_fn
        if ext is not None:
            outside = ~self.inside_box(pts)
            if np.any(outside):
                out[outside] = np.asarray(ext(pts[outside]), dtype=float).ravel()
        return out

    def __call__(self, pts):
        res = self.point_eval(pts)
        return float(res[0]) if np.asarray(pts).ndim <= 1 else res

    # -- serialization ------------------------------------------------------

    def save(self, csv_path) -> None:
        """Write `<stem>.csv` (coordinates..., value) and `<stem>.json` header."""
        csv_path = Path(csv_path)
        if callable(self.exterior_rule):
            raise PreconditionError("callable exterior rules are not serializable")
        pts = self.nodes()
        cols = [pts[:, a] for a in range(self.dim)] + [self.values]
        header = ",".join(["x", "y"][: self.dim] + ["value"])
        np.savetxt(csv_path, np.column_stack(cols), delimiter=",",
                   header=header, comments="", fmt="%.17g")
        meta = {
            "dim": self.dim,
            "shape": list(self.shape),
            "extent": self.extent,
            "exterior_rule": self.exterior_rule,
            "smoothness_hint": self.smoothness_hint,
        }
        csv_path.with_suffix(".json").write_text(json.dumps(meta, sort_keys=True, indent=1))

    @classmethod
    def load(cls, csv_path) -> "SampledFunction":
        csv_path = Path(csv_path)
        meta = json.loads(csv_path.with_suffix(".json").read_text())
        data = np.loadtxt(csv_path, delimiter=",", skiprows=1)
        vals = np.atleast_2d(data)[:, -1]
        return cls(vals, tuple(meta["shape"]), float(meta["extent"]),
                   meta["exterior_rule"], int(meta["smoothness_hint"]))


@dataclass
class ReflectedFunction:
    """View u_lambda(x) = u(reflect(x)): reflection pre-composed with the
    interpolant, never a resample onto a new grid."""

    base: SampledFunction
    plane: PlaneGeometry

    def point_eval(self, pts) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        return self.base.point_eval(self.plane.reflect(pts))

    def __call__(self, pts):
        res = self.point_eval(pts)
        return float(res[0]) if np.asarray(pts).ndim <= 1 else res

    @property
    def dim(self) -> int:
        return self.base.dim
