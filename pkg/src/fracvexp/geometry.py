"""Reflecting hyperplanes: direction, offset, reflection map, half-space tests."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import PreconditionError


@dataclass(frozen=True)
class PlaneGeometry:
    """Hyperplane {x : <x, e> = lambda} with unit normal e.

    The first basis vector with offset lambda reproduces the classical
    x_1 = lambda setup; any unit direction is allowed.
    """

    direction: tuple
    offset: float

    def __post_init__(self):
        e = np.asarray(self.direction, dtype=float)
        if abs(np.linalg.norm(e) - 1.0) > 1e-14:
            raise PreconditionError(f"direction must be a unit vector, |e| = {np.linalg.norm(e)!r}")
        object.__setattr__(self, "direction", tuple(float(v) for v in e))

    @property
    def e(self) -> np.ndarray:
        return np.asarray(self.direction, dtype=float)

    def coord(self, x) -> np.ndarray:
        """Signed coordinate <x, e> of points x, shape (..., dim) -> (...)."""
        x = np.asarray(x, dtype=float)
        return x @ self.e if x.ndim > 1 else float(x @ self.e)

    def reflect(self, x):
        """Mirror image across the plane: x - 2(<x,e> - lambda) e."""
        x = np.asarray(x, dtype=float)
        c = np.atleast_1d(x @ self.e) - self.offset
        out = np.atleast_2d(x) - 2.0 * c[:, None] * self.e[None, :]
        return out if np.asarray(x).ndim > 1 else out[0]

    def in_halfspace(self, x, strict: bool = True):
        """Membership in H_lambda = {<x,e> < lambda} (closed when strict=False)."""
        c = self.coord(x)
        return c < self.offset if strict else c <= self.offset

    def on_plane(self, x, tol: float = 0.0):
        c = self.coord(x)
        return np.abs(np.asarray(c) - self.offset) <= tol


def axis_plane(dim: int, offset: float, axis: int = 0) -> PlaneGeometry:
    e = np.zeros(dim)
    e[axis] = 1.0
    return PlaneGeometry(tuple(e), float(offset))


def reflect(plane: PlaneGeometry, x):
    """Functional form of PlaneGeometry.reflect."""
    return plane.reflect(x)
