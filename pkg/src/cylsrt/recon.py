"""End-to-end filtered-backprojection pipelines for the elliptical cylinder
(direct formula and detector-normal weighted formula) and for the circular
cylinder.

Pipelines (g is the measured DataGrid):

* inv3d:    -a1 a2 / (2 pi) * Lap_A [ stage2( stage1( r * g ) ) ]
* ubp3d:    stage2_weighted( stage1( radial_filter(g) ) )
* circular: -1 / (2 pi) * stage2( d^2/ds^2 stage1( r * g ) )   (needs a1 = a2)

The horizontal Laplacian of the inv3d pipeline is evaluated on a grid padded
by two voxel layers and cropped afterwards, so one-sided boundary stencils
never touch retained voxels; all outputs are masked to the open ellipse.
"""

import math
from dataclasses import dataclass

import numpy as np

from .backprojection import ReconPlanGrid, mx_backprojection, ubp_backprojection, _mys_planes
from .core import DataGrid, ScanGeometry, Volume
from .errors import ValidationError
from .filters import _diff2_array, _ubp_filter_array, laplacian_Ax, multiply_radius_power
from .geometry import unit_sphere_area

__all__ = ["ReconRequest", "reconstruct", "reconstruct_inv3d", "reconstruct_ubp",
           "reconstruct_circular"]

METHODS = ("inv3d", "ubp3d", "circular")

_LAPLACIAN_PAD = 2

# The hard-wired pipeline constants, cross-checked against the surface-area
# formulas they come from.  inv3d: the general elliptical-cylinder coefficient
# at (n, m) = (2, 1) reduces to det(A)/(2 pi); circular: |S^2|/(2 (2 pi)^2).
assert abs(unit_sphere_area(3) / (2.0 * (2.0 * math.pi) ** 2) - 1.0 / (2.0 * math.pi)) < 1e-15
assert abs(unit_sphere_area(3) / (unit_sphere_area(1) * unit_sphere_area(2)) - 1.0) < 1e-15


@dataclass
class ReconRequest:
    """Reconstruction parameters: method, scan geometry, horizontal
    half-resolution Nx and vertical half-resolution Lz (defaults to L, i.e.
    the central half of the scanned height at the data's height step)."""

    method: str
    geometry: ScanGeometry
    Nx: int
    Lz: int = None

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValidationError(f"method must be one of {METHODS}, got {self.method!r}")
        if self.Lz is None:
            self.Lz = self.geometry.L
        if not isinstance(self.Nx, (int, np.integer)) or self.Nx < 4:
            raise ValidationError(f"Nx must be an integer >= 4, got {self.Nx!r}")
        if not isinstance(self.Lz, (int, np.integer)) or self.Lz < 4 or self.Lz % 2:
            raise ValidationError(f"Lz must be an even integer >= 4, got {self.Lz!r}")
        self.Nx = int(self.Nx)
        self.Lz = int(self.Lz)
        if self.Lz > self.geometry.L:
            raise ValidationError(
                f"Lz={self.Lz} exceeds the scanned height resolution L={self.geometry.L}"
            )
        if self.method == "circular" and self.geometry.a1 != self.geometry.a2:
            raise ValidationError("the circular-cylinder formula requires a1 = a2")


def _check_request(d: DataGrid, req: ReconRequest, method: str):
    if req.method != method:
        raise ValidationError(f"request method {req.method!r} does not match {method!r}")
    if d.geometry != req.geometry:
        raise ValidationError("data grid and request use different geometries")


def reconstruct_inv3d(d: DataGrid, req: ReconRequest, threads=1, backend=None) -> Volume:
    """Direct elliptical-cylinder inversion:
    f = -a1 a2 / (2 pi) * Lap_A stage2 stage1 (r g)."""
    _check_request(d, req, "inv3d")
    geom = req.geometry
    weighted = multiply_radius_power(d, 1)
    plan = ReconPlanGrid.for_reconstruction(geom, req.Nx, pad=_LAPLACIAN_PAD)
    planes = _mys_planes(weighted, plan, threads, backend)
    dx = geom.a1 / req.Nx
    dz = geom.half_height / req.Lz
    padded = mx_backprojection(planes, geom, req.Nx + _LAPLACIAN_PAD, req.Lz, plan,
                               dx=dx, dz=dz, mask=False, threads=threads, backend=backend)
    lap = laplacian_Ax(padded, geom.a1, geom.a2)
    core = lap.values[_LAPLACIAN_PAD:-_LAPLACIAN_PAD, _LAPLACIAN_PAD:-_LAPLACIAN_PAD, :]
    out = Volume(req.Nx, req.Lz, dx, dz, core * (-geom.a1 * geom.a2 / (2.0 * math.pi)))
    out.values = out.values * out.interior_mask(geom.a1, geom.a2)[:, :, None]
    return out


def reconstruct_ubp(d: DataGrid, req: ReconRequest, threads=1, backend=None) -> Volume:
    """Detector-normal weighted backprojection of radially filtered data."""
    _check_request(d, req, "ubp3d")
    geom = req.geometry
    filtered = DataGrid(geom, _ubp_filter_array(d.values, geom.dr))
    plan = ReconPlanGrid.for_reconstruction(geom, req.Nx)
    planes = _mys_planes(filtered, plan, threads, backend)
    return ubp_backprojection(planes, geom, req.Nx, req.Lz, plan,
                              threads=threads, backend=backend)


def reconstruct_circular(d: DataGrid, req: ReconRequest, threads=1, backend=None) -> Volume:
    """Circular-cylinder inversion: f = -1/(2 pi) stage2 d^2/ds^2 stage1 (r g)."""
    _check_request(d, req, "circular")
    geom = req.geometry
    weighted = multiply_radius_power(d, 1)
    plan = ReconPlanGrid.for_reconstruction(geom, req.Nx)
    planes = _mys_planes(weighted, plan, threads, backend)
    planes = _diff2_array(planes, plan.ds, axis=2)
    vol = mx_backprojection(planes, geom, req.Nx, req.Lz, plan,
                            threads=threads, backend=backend)
    vol.values = vol.values * (-1.0 / (2.0 * math.pi))
    return vol


def reconstruct(d: DataGrid, req: ReconRequest, threads=1, backend=None) -> Volume:
    fn = {
        "inv3d": reconstruct_inv3d,
        "ubp3d": reconstruct_ubp,
        "circular": reconstruct_circular,
    }[req.method]
    return fn(d, req, threads=threads, backend=backend)
