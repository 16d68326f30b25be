"""The two partial backprojections and the detector-normal weighted variant.

Stage 1 (height lines): for one detector k, smear each radius line over the
(y, s) lattice,

    q_k(y, s) = integral over y' of g_k(y', sqrt((y - y')^2 + s^2)) dy',

by the composite trapezoidal rule in y' and linear interpolation in the
radius.  Stage 2 (detector sum): for every voxel, sum the q_k over the
detectors at s = |x - x[k]| with linear interpolation in s.  Splitting the 3D
spherical backprojection this way costs O(K L (L + M)) + O(K Nx^2 Lz), i.e.
O(Nx^4) = O(N^{4/3}) for N = Theta(Nx^3) unknowns, instead of the O(N^{5/3})
naive sphere sweep.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .core import DataGrid, PlaneGrid, ScanGeometry, Volume
from .errors import ValidationError
from .kernels import get_backend

__all__ = [
    "ReconPlanGrid",
    "mys_backprojection",
    "mx_backprojection",
    "ubp_backprojection",
]


@dataclass
class ReconPlanGrid:
    """Target (y, s) lattice for the stage-1 planes of one reconstruction.

    The height rows reuse the 2L+1 data heights; the s axis starts at 0 with
    step ds = r0/M and covers [0, s_max], where s_max bounds |x - x[k]| over
    all evaluated grid points (at least the ellipse diameter 2 max(a1, a2)).
    Interpolation tables are precomputed once per plan: the radius argument
    sqrt((y_iy - y_m)^2 + s^2) depends on the height indices only through
    |iy - m|, so one (2L+1, ns) table serves every detector and row.
    """

    geometry: ScanGeometry
    ny: int
    ns: int
    dy: float
    ds: float
    y0: float
    s_max: float
    _lo: np.ndarray = field(default=None, repr=False)
    _w0: np.ndarray = field(default=None, repr=False)
    _w1: np.ndarray = field(default=None, repr=False)
    _wm: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        if self.ds <= 0 or self.dy <= 0:
            raise ValidationError("plan spacings must be positive")
        if self.s_max < 2.0 * max(self.geometry.a1, self.geometry.a2):
            raise ValidationError("plan s_max must cover the ellipse diameter")
        if self._lo is None:
            self._build_tables()

    def _build_tables(self):
        g = self.geometry
        dd = self.dy * np.arange(self.ny)  # |y_iy - y_m| values
        s = self.ds * np.arange(self.ns)
        r_eval = np.hypot(dd[:, None], s[None, :])
        t = r_eval / g.dr
        valid = t <= g.M
        lo = np.clip(np.floor(t), 0, g.M - 1)
        frac = t - lo
        self._lo = lo.astype(np.int32)
        self._w0 = (1.0 - frac) * valid
        self._w1 = frac * valid
        wm = np.full(self.ny, g.dy)
        wm[0] *= 0.5
        wm[-1] *= 0.5
        self._wm = wm

    @classmethod
    def for_geometry(cls, geom: ScanGeometry, s_max=None) -> "ReconPlanGrid":
        if s_max is None:
            s_max = 2.0 * max(geom.a1, geom.a2)
        ds = geom.dr
        ns = int(math.ceil(s_max / ds)) + 2
        return cls(geom, 2 * geom.L + 1, ns, geom.dy, ds, -geom.half_height, s_max)

    @classmethod
    def for_reconstruction(cls, geom: ScanGeometry, Nx: int, pad: int = 0) -> "ReconPlanGrid":
        """Plan whose s axis covers every point of the (optionally padded)
        reconstruction box [-a1 (1 + pad/Nx), a1 (1 + pad/Nx)]^2."""
        half = geom.a1 * (Nx + pad) / Nx
        corners = np.array([[sx * half, sy * half] for sx in (-1, 1) for sy in (-1, 1)])
        det = geom.detectors
        dmax = np.max(np.hypot(corners[:, None, 0] - det[None, :, 0],
                               corners[:, None, 1] - det[None, :, 1]))
        return cls.for_geometry(geom, max(dmax, 2.0 * max(geom.a1, geom.a2)))

    def interp_tables(self):
        return self._lo, self._w0, self._w1, self._wm


def _mys_planes(d: DataGrid, plan: ReconPlanGrid, threads=1, backend=None):
    """(K, ny, ns) stage-1 planes for all detectors."""
    lo, w0, w1, wm = plan.interp_tables()
    kern = get_backend(backend)
    return kern.mys_all(np.ascontiguousarray(d.values), lo, w0, w1, wm, threads)


def mys_backprojection(d: DataGrid, k: int, plan: ReconPlanGrid,
                       threads=1, backend=None) -> PlaneGrid:
    """Stage-1 plane q_k for detector k."""
    if not 0 <= k < d.geometry.K:
        raise ValidationError(f"detector index {k} out of range")
    lo, w0, w1, wm = plan.interp_tables()
    kern = get_backend(backend)
    vals = kern.mys_all(np.ascontiguousarray(d.values[k : k + 1]), lo, w0, w1, wm, threads)
    return PlaneGrid(plan.ny, plan.ns, plan.dy, plan.ds, plan.y0, vals[0])


def _stack_planes(planes, geom: ScanGeometry, plan: ReconPlanGrid):
    if isinstance(planes, np.ndarray):
        arr = planes
    else:
        if len(planes) != geom.K:
            raise ValidationError(f"expected {geom.K} planes, got {len(planes)}")
        for p in planes:
            if (p.ny, p.ns) != (plan.ny, plan.ns):
                raise ValidationError("plane extents do not match the plan")
        arr = np.stack([p.values for p in planes])
    if arr.shape != (geom.K, plan.ny, plan.ns):
        raise ValidationError(f"plane stack has shape {arr.shape}")
    return np.ascontiguousarray(arr.transpose(0, 2, 1))


def _height_row_map(geom: ScanGeometry, Lz: int) -> np.ndarray:
    """Plane row for each output height index n3 = -Lz/2 .. Lz/2.

    Output heights H n3 / Lz are snapped to the nearest data-height row; for
    the default Lz = L the mapping is exact."""
    n3 = np.arange(-(Lz // 2), Lz // 2 + 1)
    rows = np.floor(n3 * (geom.L / Lz) + 0.5).astype(np.int64) + geom.L
    return np.clip(rows, 0, 2 * geom.L).astype(np.int32)


def _grid_points(Nx: int, dx: float) -> np.ndarray:
    x = dx * np.arange(-Nx, Nx + 1)
    p = np.empty((x.size, x.size, 2))
    p[:, :, 0] = x[:, None]
    p[:, :, 1] = x[None, :]
    return p.reshape(-1, 2)


def _run_stage2(planes, geom, plan, Nx, Lz, dx, dz, mode, w_uniform, u1, u2,
                mask, threads, backend):
    if Lz > geom.L:
        raise ValidationError(f"Lz={Lz} exceeds the scanned height resolution L={geom.L}")
    if Lz % 2 or Lz < 2:
        raise ValidationError("Lz must be even and >= 2")
    planes_t = _stack_planes(planes, geom, plan)
    xs = _grid_points(Nx, dx)
    iy_map = _height_row_map(geom, Lz)
    kern = get_backend(backend)
    flat = kern.mx_accumulate(planes_t, xs, np.ascontiguousarray(geom.detectors),
                              iy_map, plan.ds, mode, w_uniform,
                              np.ascontiguousarray(u1), np.ascontiguousarray(u2), threads)
    n = 2 * Nx + 1
    vals = flat.reshape(n, n, Lz + 1)
    vol = Volume(Nx, Lz, dx, dz, vals)
    if mask:
        vol.values = vals * vol.interior_mask(geom.a1, geom.a2)[:, :, None]
    return vol


def mx_backprojection(planes, geom: ScanGeometry, Nx: int, Lz: int, plan: ReconPlanGrid,
                      *, dx=None, dz=None, mask=True, threads=1, backend=None) -> Volume:
    """Stage-2 detector sum with the uniform angle weight 2 pi / K:

        out(x, y) = (2 pi / K) sum_k q_k(y, |x - x[k]|).

    With ``mask`` set (default), voxel columns outside the open ellipse are
    zeroed; pipelines evaluate unmasked on a padded grid so that the
    Laplacian never sees the mask edge."""
    dx = geom.a1 / Nx if dx is None else dx
    dz = geom.half_height / Lz if dz is None else dz
    zeros = np.zeros(geom.K)
    return _run_stage2(planes, geom, plan, Nx, Lz, dx, dz, 0, 2.0 * np.pi / geom.K,
                       zeros, zeros, mask, threads, backend)


def ubp_backprojection(planes, geom: ScanGeometry, Nx: int, Lz: int, plan: ReconPlanGrid,
                       *, dx=None, dz=None, mask=True, threads=1, backend=None) -> Volume:
    """Stage-2 sum with the detector-normal weight of the universal
    backprojection formula:

        out(x, y) = (1 / 2 pi) (2 pi / K) sum_k nu_k . (x - x[k])
                    * |boundary'(theta_k)| * q_k(y, |x - x[k]|).
    """
    dx = geom.a1 / Nx if dx is None else dx
    dz = geom.half_height / Lz if dz is None else dz
    boundary = geom.boundary
    theta = geom.detector_angles
    normals = boundary.normal(theta)
    scale = boundary.arclength_element(theta) / geom.K
    u1 = normals[:, 0] * scale
    u2 = normals[:, 1] * scale
    return _run_stage2(planes, geom, plan, Nx, Lz, dx, dz, 1, 0.0, u1, u2,
                       mask, threads, backend)
