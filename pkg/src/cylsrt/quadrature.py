"""Numeric spherical means over callable fields and the residual of the
decomposition of a cylinder-center mean into two partial means.

These routines exist to cross-check the analytic machinery; they are accurate
but make no attempt to be fast beyond vectorized evaluation.
"""

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import ValidationError
from .geometry import decomposition_constant

__all__ = ["FieldFn", "spherical_mean_numeric", "factorization_residual"]


@dataclass
class FieldFn:
    """Scalar field on R^dim; fn maps an (N, dim) array of points to (N,) values."""

    fn: Callable[[np.ndarray], np.ndarray]
    dim: int

    def __post_init__(self):
        if not isinstance(self.dim, (int, np.integer)) or not 2 <= self.dim <= 4:
            raise ValidationError(f"field dimension must be 2, 3, or 4, got {self.dim!r}")
        self.dim = int(self.dim)

    def __call__(self, pts: np.ndarray) -> np.ndarray:
        vals = np.asarray(self.fn(pts), dtype=float)
        if vals.shape != pts.shape[:1]:
            raise ValidationError("field returned wrong shape")
        return vals


def _check_nq(nq):
    if not isinstance(nq, (int, np.integer)) or nq < 8:
        raise ValidationError(f"nq must be an integer >= 8, got {nq!r}")
    return int(nq)


def _periodic_nodes(nq):
    return 2.0 * np.pi * np.arange(nq) / nq


def _midpoint_nodes(nq):
    return np.pi * (np.arange(nq) + 0.5) / nq


def spherical_mean_numeric(f: FieldFn, center, r: float, nq: int) -> float:
    """Mean of f over the sphere of radius |r| about center, normalized by the
    sphere's surface measure.

    Product-angle parameterization: uniform trapezoid in the 2pi-periodic
    angle, midpoint in each polar angle with the sin^k surface element.  The
    normalization is the discrete weight sum (not the exact surface measure),
    so constants are averaged exactly.
    """
    nq = _check_nq(nq)
    center = np.asarray(center, dtype=float).reshape(-1)
    d = f.dim
    if center.shape[0] != d:
        raise ValidationError(f"center has dimension {center.shape[0]}, field has {d}")
    r = abs(float(r))
    if r == 0.0:
        return float(f(center[None, :])[0])

    alpha = _periodic_nodes(nq)
    ca, sa = np.cos(alpha), np.sin(alpha)
    if d == 2:
        pts = center[None, :] + r * np.stack([ca, sa], axis=-1)
        return float(np.mean(f(pts)))

    beta = _midpoint_nodes(nq)
    cb, sb = np.cos(beta), np.sin(beta)
    if d == 3:
        # omega = (cos a sin b, sin a sin b, cos b), element sin(b) da db
        pts = np.empty((nq, nq, 3))
        pts[..., 0] = sb[:, None] * ca[None, :]
        pts[..., 1] = sb[:, None] * sa[None, :]
        pts[..., 2] = cb[:, None]
        vals = f(center[None, :] + r * pts.reshape(-1, 3)).reshape(nq, nq)
        return float((vals.sum(axis=1) @ sb) / (nq * sb.sum()))

    # d == 4: omega = (cos a sin b1 sin b2, sin a sin b1 sin b2, cos b1 sin b2, cos b2),
    # element sin(b1) sin(b2)^2 da db1 db2.  Evaluated per b2 slice to bound memory.
    total = 0.0
    sb2 = sb * sb
    base = np.empty((nq, nq, 4))
    base[..., 0] = sb[:, None] * ca[None, :]
    base[..., 1] = sb[:, None] * sa[None, :]
    base[..., 2] = cb[:, None]
    for i2 in range(nq):
        pts = np.empty((nq, nq, 4))
        pts[..., :3] = base[..., :3] * sb[i2]
        pts[..., 3] = cb[i2]
        vals = f(center[None, :] + r * pts.reshape(-1, 4)).reshape(nq, nq)
        total += (vals.sum(axis=1) @ sb) * sb2[i2]
    return float(total / (nq * sb.sum() * sb2.sum()))


def _circle_mean_x(f: FieldFn, x, y_points, s_radii, nq):
    """Partial mean of f over circles in the first two coordinates.

    x is the common horizontal base point (2,), y_points (Q, m) the
    remaining coordinates and s_radii (Q,) the circle radii; returns (Q,).
    """
    alpha = _periodic_nodes(nq)
    circ = np.stack([np.cos(alpha), np.sin(alpha)], axis=-1)  # (nq, 2)
    q = y_points.shape[0]
    pts = np.empty((q, nq, f.dim))
    pts[:, :, :2] = x[None, None, :] + np.abs(s_radii)[:, None, None] * circ[None, :, :]
    pts[:, :, 2:] = y_points[:, None, :]
    return f(pts.reshape(-1, f.dim)).reshape(q, nq).mean(axis=1)


def factorization_residual(f: FieldFn, x, y, r: float, nq: int) -> float:
    """Relative mismatch |LHS - RHS| / (|LHS| + eps) of the identity

        M_{x,y} f = C_{n,m} |r|^(1-n) M_{y,s}( |s|^(n-1) M_x f )

    for n = 2 and m = dim - 2 in {1, 2}, with both sides evaluated by
    independent quadratures.

    The left side is the full spherical mean; the right side composes the
    planar mean M_{y,s} (evaluated in the substituted variable t = cos(angle),
    which absorbs the |s| factor's kink, with Gauss-Legendre nodes) with the
    circle mean M_x (uniform trapezoid).
    """
    nq = _check_nq(nq)
    m = f.dim - 2
    if m not in (1, 2):
        raise ValidationError("factorization residual supports fields on R^3 and R^4 only")
    x = np.asarray(x, dtype=float).reshape(2)
    y = np.asarray(y, dtype=float).reshape(m)
    r = float(r)
    if r == 0.0:
        raise ValidationError("r must be nonzero (the |r|^(1-n) weight is singular)")

    lhs = spherical_mean_numeric(f, np.concatenate([x, y]), r, nq)

    c_nm = decomposition_constant(2, m)
    t, wt = np.polynomial.legendre.leggauss(nq)
    if m == 1:
        # M_{y,s}(|s| g)(y, r) = (|r| / pi) * int_{-1}^{1} g(y + r t, |r| sqrt(1-t^2)) dt
        y_pts = (y[0] + r * t)[:, None]
        s_rads = abs(r) * np.sqrt(1.0 - t * t)
        inner = _circle_mean_x(f, x, y_pts, s_rads, nq)
        m_ys = (abs(r) / np.pi) * (wt @ inner)
    else:
        # Cylindrical coordinates on S^2 with the pole along the s-axis; the
        # integrand is even in s, so integrate t = s-component over (0, 1).
        t01 = 0.5 * (t + 1.0)
        w01 = 0.5 * wt
        phi = _periodic_nodes(nq)
        rho = np.sqrt(1.0 - t01 * t01)
        y_pts = np.empty((nq, nq, 2))  # (t, phi, 2)
        y_pts[..., 0] = y[0] + r * rho[:, None] * np.cos(phi)[None, :]
        y_pts[..., 1] = y[1] + r * rho[:, None] * np.sin(phi)[None, :]
        s_rads = np.repeat(abs(r) * t01, nq)
        inner = _circle_mean_x(f, x, y_pts.reshape(-1, 2), s_rads, nq).reshape(nq, nq)
        # (1/4pi) * 2 * (2pi/nq) * sum_phi sum_t w * (|r| t) * inner
        m_ys = (abs(r) / nq) * np.einsum("t,t,tp->", w01, t01, inner)

    rhs = c_nm * abs(r) ** (-1) * m_ys
    return float(abs(lhs - rhs) / (abs(lhs) + 1e-300))
