"""Ellipse/sphere geometry and the constant linking full and partial means."""

import math
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError

__all__ = [
    "unit_sphere_area",
    "decomposition_constant",
    "EllipseBoundary",
]


def _gamma_half(n: int) -> float:
    """Gamma(n/2) for integer n >= 1 via the recursion from Gamma(1/2), Gamma(1)."""
    if n < 1:
        raise ValidationError(f"gamma argument n/2 needs n >= 1, got {n}")
    g = math.sqrt(math.pi) if n % 2 else 1.0
    k = n % 2 if n % 2 else 2
    z = k / 2.0
    while k < n:
        g *= z
        z += 1.0
        k += 2
    return g


def unit_sphere_area(d: int) -> float:
    """Surface measure of the unit sphere in R^d, i.e. |S^(d-1)| = 2 pi^(d/2) / Gamma(d/2)."""
    if not isinstance(d, (int, np.integer)) or d < 1:
        raise ValidationError(f"dimension must be an integer >= 1, got {d!r}")
    return 2.0 * math.pi ** (d / 2.0) / _gamma_half(d)


def decomposition_constant(n: int, m: int) -> float:
    """Constant C_{n,m} = |S^m| |S^(n-1)| / (2 |S^(n+m-1)|) relating the cylinder
    mean to the composition of the two partial means."""
    if not isinstance(n, (int, np.integer)) or n < 2:
        raise ValidationError(f"n must be an integer >= 2, got {n!r}")
    if not isinstance(m, (int, np.integer)) or m < 1:
        raise ValidationError(f"m must be an integer >= 1, got {m!r}")
    return 0.5 * unit_sphere_area(m + 1) * unit_sphere_area(n) / unit_sphere_area(n + m)


@dataclass
class EllipseBoundary:
    """Boundary of the solid ellipse {(x1/a1)^2 + (x2/a2)^2 < 1}, parameterized
    by the angle theta -> (a1 cos(theta), a2 sin(theta))."""

    a1: float
    a2: float

    def __post_init__(self):
        if not (np.isfinite(self.a1) and np.isfinite(self.a2)):
            raise ValidationError("semi-axes must be finite")
        if self.a1 <= 0 or self.a2 <= 0:
            raise ValidationError(f"semi-axes must be positive, got a1={self.a1}, a2={self.a2}")

    def point(self, theta):
        """Boundary point(s) at angle(s) theta, shape (..., 2)."""
        theta = np.asarray(theta, dtype=float)
        return np.stack([self.a1 * np.cos(theta), self.a2 * np.sin(theta)], axis=-1)

    def normal(self, theta):
        """Outer unit normal at angle(s) theta, shape (..., 2)."""
        theta = np.asarray(theta, dtype=float)
        nx = np.cos(theta) / self.a1
        ny = np.sin(theta) / self.a2
        norm = np.hypot(nx, ny)
        return np.stack([nx / norm, ny / norm], axis=-1)

    def arclength_element(self, theta):
        """|d point / d theta| = sqrt(a1^2 sin^2 + a2^2 cos^2)."""
        theta = np.asarray(theta, dtype=float)
        return np.hypot(self.a1 * np.sin(theta), self.a2 * np.cos(theta))
