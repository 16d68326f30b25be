"""Containers shared by the whole pipeline: scan geometry, measurement grids,
reconstruction volumes, and the per-detector intermediate planes.

Index conventions
-----------------
* DataGrid values are indexed ``[k, m + L, l]`` for detector ``k`` in
  ``0..K-1``, height index ``m`` in ``-L..L`` and radius index ``l`` in
  ``0..M``.  Detector ``k`` sits at ``(a1 cos(2 pi k / K), a2 sin(2 pi k / K))``,
  the height samples are ``H m / L`` and the radii ``r0 l / M``.
* Volume values are indexed ``[n1 + Nx, n2 + Nx, n3 + Lz/2]`` with grid point
  ``(n1, n2, n3)`` at physical position ``(dx n1, dx n2, dz n3)``.

Containers are treated as immutable once constructed; pipeline stages always
allocate fresh outputs, which keeps them safe to share between worker threads.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError
from .geometry import EllipseBoundary

__all__ = ["ScanGeometry", "DataGrid", "Volume", "PlaneGrid"]


def _check_positive_finite(name, value):
    if not np.isfinite(value) or value <= 0:
        raise ValidationError(f"{name} must be positive and finite, got {value}")


def _as_finite_array(values, shape, what):
    arr = np.ascontiguousarray(values, dtype=np.float64)
    if arr.shape != shape:
        raise ValidationError(f"{what} has shape {arr.shape}, expected {shape}")
    if not np.all(np.isfinite(arr)):
        raise ValidationError(f"{what} contains non-finite values")
    return arr


@dataclass
class ScanGeometry:
    """Elliptical-cylinder scan: semi-axes a1, a2, half height H, maximum
    radius r0 and the sample counts K (detector angles), L (half the number
    of height steps) and M (radius steps)."""

    a1: float
    a2: float
    half_height: float
    max_radius: float
    K: int
    L: int
    M: int

    def __post_init__(self):
        for name in ("a1", "a2", "half_height", "max_radius"):
            _check_positive_finite(name, getattr(self, name))
        for name, lo in (("K", 4), ("L", 2), ("M", 2)):
            v = getattr(self, name)
            if not isinstance(v, (int, np.integer)) or v < lo:
                raise ValidationError(f"{name} must be an integer >= {lo}, got {v!r}")
            setattr(self, name, int(v))

    @property
    def boundary(self) -> EllipseBoundary:
        return EllipseBoundary(self.a1, self.a2)

    @property
    def detector_angles(self) -> np.ndarray:
        """(K,) detector angles 2 pi k / K."""
        return 2.0 * np.pi * np.arange(self.K) / self.K

    @property
    def detectors(self) -> np.ndarray:
        """(K, 2) horizontal detector positions."""
        return self.boundary.point(self.detector_angles)

    @property
    def heights(self) -> np.ndarray:
        """(2L+1,) height samples H m / L for m = -L..L."""
        return self.half_height * np.arange(-self.L, self.L + 1) / self.L

    @property
    def radii(self) -> np.ndarray:
        """(M+1,) radius samples r0 l / M for l = 0..M."""
        return self.max_radius * np.arange(self.M + 1) / self.M

    @property
    def dy(self) -> float:
        return self.half_height / self.L

    @property
    def dr(self) -> float:
        return self.max_radius / self.M

    def data_shape(self):
        return (self.K, 2 * self.L + 1, self.M + 1)


@dataclass
class DataGrid:
    """Measured (or simulated) spherical means g[k, m, l] on the detector
    lattice of a ScanGeometry.  Only radii r >= 0 are stored."""

    geometry: ScanGeometry
    values: np.ndarray

    def __post_init__(self):
        self.values = _as_finite_array(self.values, self.geometry.data_shape(), "data grid")

    @classmethod
    def zeros(cls, geometry: ScanGeometry) -> "DataGrid":
        return cls(geometry, np.zeros(geometry.data_shape()))


@dataclass
class Volume:
    """Scalar field on the uniform lattice (dx n1, dx n2, dz n3) with
    n1, n2 in -Nx..Nx and n3 in -Lz/2..Lz/2 (Lz must be even)."""

    Nx: int
    Lz: int
    dx: float
    dz: float
    values: np.ndarray

    def __post_init__(self):
        if not isinstance(self.Nx, (int, np.integer)) or self.Nx < 1:
            raise ValidationError(f"Nx must be an integer >= 1, got {self.Nx!r}")
        if not isinstance(self.Lz, (int, np.integer)) or self.Lz < 2 or self.Lz % 2:
            raise ValidationError(f"Lz must be an even integer >= 2, got {self.Lz!r}")
        self.Nx = int(self.Nx)
        self.Lz = int(self.Lz)
        _check_positive_finite("dx", self.dx)
        _check_positive_finite("dz", self.dz)
        self.values = _as_finite_array(self.values, self.shape(), "volume")

    def shape(self):
        n = 2 * self.Nx + 1
        return (n, n, self.Lz + 1)

    @classmethod
    def zeros(cls, Nx, Lz, dx, dz) -> "Volume":
        n = 2 * Nx + 1
        return cls(Nx, Lz, dx, dz, np.zeros((n, n, Lz + 1)))

    @property
    def x_coords(self) -> np.ndarray:
        """(2Nx+1,) horizontal coordinates, both axes."""
        return self.dx * np.arange(-self.Nx, self.Nx + 1)

    @property
    def z_coords(self) -> np.ndarray:
        """(Lz+1,) vertical coordinates."""
        return self.dz * np.arange(-self.Lz // 2, self.Lz // 2 + 1)

    def interior_mask(self, a1: float, a2: float) -> np.ndarray:
        """(2Nx+1, 2Nx+1) boolean mask of voxel columns strictly inside the ellipse."""
        x = self.x_coords
        return (x[:, None] / a1) ** 2 + (x[None, :] / a2) ** 2 < 1.0


@dataclass
class PlaneGrid:
    """Per-detector intermediate field q_k(y, s) on a (height, s) lattice with
    s >= 0; row iy sits at height y0 + iy*dy, column i at s = i*ds."""

    ny: int
    ns: int
    dy: float
    ds: float
    y0: float
    values: np.ndarray = field(default=None)

    def __post_init__(self):
        _check_positive_finite("dy", self.dy)
        _check_positive_finite("ds", self.ds)
        if not np.isfinite(self.y0):
            raise ValidationError("y0 must be finite")
        if self.values is None:
            self.values = np.zeros((self.ny, self.ns))
        self.values = _as_finite_array(self.values, (self.ny, self.ns), "plane grid")

    @property
    def heights(self) -> np.ndarray:
        return self.y0 + self.dy * np.arange(self.ny)

    @property
    def s_coords(self) -> np.ndarray:
        return self.ds * np.arange(self.ns)
