"""Ball-superposition phantoms with closed-form spherical means.

A phantom is a finite sum of ball indicator functions.  The mean of such a
function over a sphere is the fraction of the sphere's surface covered by the
ball (the "cap fraction"), which has a closed form, so simulated measurement
data are exact up to floating point.
"""

from dataclasses import dataclass, field

import numpy as np

from .core import DataGrid, ScanGeometry, Volume
from .errors import ValidationError

__all__ = [
    "cap_fraction",
    "arc_fraction",
    "Ball",
    "Phantom",
    "forward_data",
    "rasterize",
    "demo_phantom",
    "save_phantom",
    "load_phantom",
]

_BOUNDARY_SAMPLES = 4096


def _fraction_inputs(d, r, rho):
    d = np.asarray(d, dtype=float)
    r = np.asarray(r, dtype=float)
    rho = np.asarray(rho, dtype=float)
    for name, a in (("d", d), ("r", r)):
        if not np.all(np.isfinite(a)) or np.any(a < 0):
            raise ValidationError(f"{name} must be finite and >= 0")
    if not np.all(np.isfinite(rho)) or np.any(rho <= 0):
        raise ValidationError("rho must be finite and > 0")
    return np.broadcast_arrays(d, r, rho)


def _cos_opening(d, r, rho):
    """clamp((d^2 + r^2 - rho^2) / (2 d r), -1, 1) with the d r = 0 limits
    resolved by the point/center indicator (+-1 encode fractions 1 and 0)."""
    dr = 2.0 * d * r
    with np.errstate(divide="ignore", invalid="ignore"):
        c = np.where(dr > 0.0, (d * d + r * r - rho * rho) / np.where(dr > 0, dr, 1.0), 0.0)
    c = np.clip(c, -1.0, 1.0)
    degenerate = dr == 0.0
    if np.any(degenerate):
        # d = 0: sphere concentric with the ball, inside iff r <= rho;
        # r = 0: the sphere is the single point at distance d from the center.
        inside = np.where(d == 0.0, r <= rho, d <= rho)
        c = np.where(degenerate, np.where(inside, -1.0, 1.0), c)
    return c


def cap_fraction(d, r, rho):
    """Fraction of the sphere with radius r, centered at distance d from a
    ball of radius rho, that lies inside the ball.  Scalars or broadcastable
    arrays; the result is in [0, 1]."""
    d, r, rho = _fraction_inputs(d, r, rho)
    out = 0.5 * (1.0 - _cos_opening(d, r, rho))
    return float(out) if out.ndim == 0 else out


def arc_fraction(d, r, rho):
    """Circle analogue of cap_fraction: fraction of the circle of radius r at
    center distance d that lies inside a disc of radius rho."""
    d, r, rho = _fraction_inputs(d, r, rho)
    out = np.arccos(_cos_opening(d, r, rho)) / np.pi
    return float(out) if out.ndim == 0 else out


@dataclass
class Ball:
    """Ball with center (x1, x2, y), radius rho > 0 and a signed amplitude."""

    center: np.ndarray
    radius: float
    amplitude: float

    def __post_init__(self):
        self.center = np.asarray(self.center, dtype=float).reshape(3)
        if not np.all(np.isfinite(self.center)):
            raise ValidationError("ball center must be finite")
        if not np.isfinite(self.radius) or self.radius <= 0:
            raise ValidationError(f"ball radius must be positive, got {self.radius}")
        if not np.isfinite(self.amplitude):
            raise ValidationError("ball amplitude must be finite")


@dataclass
class Phantom:
    balls: list = field(default_factory=list)

    def validate_for(self, geom: ScanGeometry) -> None:
        """Every ball must lie inside the open cylinder (ellipse interior x (-H, H)).

        Horizontal containment is checked against a dense sampling of the
        ellipse boundary (the ellipse is convex, so center-inside plus
        boundary clearance > rho is sufficient).
        """
        if not self.balls:
            raise ValidationError("phantom has no balls")
        theta = 2.0 * np.pi * np.arange(_BOUNDARY_SAMPLES) / _BOUNDARY_SAMPLES
        boundary = geom.boundary.point(theta)
        for i, b in enumerate(self.balls):
            cx, cy, cz = b.center
            if (cx / geom.a1) ** 2 + (cy / geom.a2) ** 2 >= 1.0:
                raise ValidationError(f"ball {i} center is outside the ellipse")
            clearance = np.min(np.hypot(boundary[:, 0] - cx, boundary[:, 1] - cy))
            if clearance <= b.radius:
                raise ValidationError(f"ball {i} crosses the lateral cylinder boundary")
            if abs(cz) + b.radius >= geom.half_height:
                raise ValidationError(f"ball {i} crosses the top/bottom of the cylinder")


def demo_phantom() -> Phantom:
    """Three-ball demo phantom used by the CLI and the examples."""
    return Phantom(
        [
            Ball((0.3, 0.0, 0.6), 0.25, 1.0),
            Ball((-0.35, 0.2, 0.0), 0.3, 1.0),
            Ball((0.0, -0.3, -0.7), 0.2, 1.0),
        ]
    )


def forward_data(phantom: Phantom, geom: ScanGeometry) -> DataGrid:
    """Exact spherical means of the phantom on the detector lattice:
    g[k, m, l] = sum over balls of amplitude * cap_fraction(distance, r_l, rho)."""
    phantom.validate_for(geom)
    det = geom.detectors
    heights = geom.heights
    radii = geom.radii
    out = np.zeros(geom.data_shape())
    for b in phantom.balls:
        cx, cy, cz = b.center
        dxy2 = (det[:, 0] - cx) ** 2 + (det[:, 1] - cy) ** 2  # (K,)
        dist = np.sqrt(dxy2[:, None] + (heights[None, :] - cz) ** 2)  # (K, 2L+1)
        out += b.amplitude * cap_fraction(dist[:, :, None], radii[None, None, :], b.radius)
    return DataGrid(geom, out)


def rasterize(phantom: Phantom, Nx: int, Lz: int, geom: ScanGeometry) -> Volume:
    """Ground-truth volume: per voxel the mean of the phantom over a 2x2x2
    subsample of the voxel; voxel columns outside the ellipse are zeroed."""
    if Nx < 2 or Lz < 2:
        raise ValidationError("rasterize needs Nx >= 2 and Lz >= 2")
    dx = geom.a1 / Nx
    dz = geom.half_height / Lz
    vol = Volume.zeros(Nx, Lz, dx, dz)
    x = vol.x_coords
    z = vol.z_coords
    acc = np.zeros(vol.shape())
    offsets = [
        (sx * dx / 4, sy * dx / 4, sz * dz / 4)
        for sx in (-1, 1)
        for sy in (-1, 1)
        for sz in (-1, 1)
    ]
    for b in phantom.balls:
        cx, cy, cz = b.center
        rho2 = b.radius**2
        for ox, oy, oz in offsets:
            d2 = (
                (x[:, None, None] + ox - cx) ** 2
                + (x[None, :, None] + oy - cy) ** 2
                + (z[None, None, :] + oz - cz) ** 2
            )
            acc += (b.amplitude / 8.0) * (d2 <= rho2)
    acc *= vol.interior_mask(geom.a1, geom.a2)[:, :, None]
    vol.values = acc
    return vol


def save_phantom(phantom: Phantom, path) -> None:
    """Write the text format: one 'ball cx cy cz radius amplitude' line per ball."""
    lines = ["# ball cx cy cz radius amplitude"]
    for b in phantom.balls:
        fields = [repr(float(v)) for v in (*b.center, b.radius, b.amplitude)]
        lines.append("ball " + " ".join(fields))
    with open(path, "w", encoding="ascii") as fh:
        fh.write("\n".join(lines) + "\n")


def load_phantom(path) -> Phantom:
    balls = []
    with open(path, "r", encoding="ascii") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if parts[0] != "ball" or len(parts) != 6:
                raise ValidationError(f"{path}:{lineno}: expected 'ball cx cy cz radius amplitude'")
            try:
                cx, cy, cz, rho, amp = (float(p) for p in parts[1:])
            except ValueError as exc:
                raise ValidationError(f"{path}:{lineno}: malformed number ({exc})") from exc
            balls.append(Ball((cx, cy, cz), rho, amp))
    if not balls:
        raise ValidationError(f"{path}: no balls found")
    return Phantom(balls)
