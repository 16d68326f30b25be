"""Noise injection, error metrics, slice export, and the scaling benchmark."""

import math
import os
import time
from dataclasses import dataclass

import numpy as np

from .core import DataGrid, ScanGeometry, Volume
from .errors import ValidationError
from .phantom import Ball, Phantom, forward_data
from .recon import ReconRequest, reconstruct_inv3d

__all__ = [
    "add_noise",
    "relative_l2",
    "pearson",
    "BenchResult",
    "fit_loglog_slope",
    "benchmark_scaling",
    "write_bench_csv",
    "export_slice_pgm",
]


def add_noise(d: DataGrid, level: float, seed: int, convention: str = "variance") -> DataGrid:
    """Additive i.i.d. zero-mean Gaussian noise.

    ``convention="variance"`` (default) reads "level" as
    variance = level * max|g|; ``convention="sigma"`` as
    sigma = level * max|g|.  Deterministic for a given seed: a Philox
    counter-based generator supplies uniforms, mapped through Box-Muller.
    """
    if not np.isfinite(level) or level < 0:
        raise ValidationError(f"noise level must be >= 0, got {level}")
    if convention not in ("variance", "sigma"):
        raise ValidationError(f"unknown noise convention {convention!r}")
    if level == 0.0:
        return DataGrid(d.geometry, d.values.copy())
    gmax = float(np.max(np.abs(d.values)))
    sigma = math.sqrt(level * gmax) if convention == "variance" else level * gmax
    rng = np.random.Generator(np.random.Philox(seed))
    n = d.values.size
    u1 = rng.random(n)
    u2 = rng.random(n)
    z = np.sqrt(-2.0 * np.log1p(-u1)) * np.cos(2.0 * np.pi * u2)
    return DataGrid(d.geometry, d.values + sigma * z.reshape(d.values.shape))


def _region_mask(v: Volume, mask: str, a1, a2) -> np.ndarray:
    a1 = v.Nx * v.dx if a1 is None else a1
    a2 = v.Nx * v.dx if a2 is None else a2
    x = v.x_coords
    ell = (x[:, None] / a1) ** 2 + (x[None, :] / a2) ** 2
    if mask == "interior":
        return np.broadcast_to((ell < 1.0)[:, :, None], v.shape())
    if mask == "shrunk":
        half_height = v.dz * (v.Lz // 2)
        zok = np.abs(v.z_coords) <= 0.8 * half_height
        return (ell < 0.95**2)[:, :, None] & zok[None, None, :]
    raise ValidationError(f"unknown mask {mask!r} (use 'interior' or 'shrunk')")


def relative_l2(v: Volume, ref: Volume, mask: str = "interior", a1=None, a2=None) -> float:
    """sqrt( sum_mask (v - ref)^2 / sum_mask ref^2 ).

    The ellipse semi-axes default to the grid half-width Nx*dx on both axes;
    pass a1/a2 explicitly for elliptical scans.
    """
    if v.shape() != ref.shape():
        raise ValidationError(f"volume shapes differ: {v.shape()} vs {ref.shape()}")
    m = _region_mask(ref, mask, a1, a2)
    denom = float(np.sum(ref.values[m] ** 2))
    if denom == 0.0:
        raise ValidationError("reference is zero on the mask")
    return float(math.sqrt(np.sum((v.values[m] - ref.values[m]) ** 2) / denom))


def pearson(v: Volume, ref: Volume, mask: str = "interior", a1=None, a2=None) -> float:
    """Pearson correlation of the two volumes over the masked voxels."""
    if v.shape() != ref.shape():
        raise ValidationError("volume shapes differ")
    m = _region_mask(ref, mask, a1, a2)
    a = v.values[m]
    b = ref.values[m]
    return float(np.corrcoef(a, b)[0, 1])


@dataclass
class BenchResult:
    """Per-size timings and the fitted log-log slope of time against the
    number of unknowns."""

    entries: list  # (Nx, N, datapoints, seconds)
    slope: float

    def __post_init__(self):
        ns = [e[1] for e in self.entries]
        if any(b <= a for a, b in zip(ns, ns[1:])):
            raise ValidationError("benchmark sizes must be strictly increasing")
        if not np.isfinite(self.slope):
            raise ValidationError("fitted slope is not finite")


def fit_loglog_slope(sizes, times) -> float:
    """Least-squares slope of log(time) against log(size)."""
    sizes = np.asarray(sizes, dtype=float)
    times = np.asarray(times, dtype=float)
    if sizes.size < 2 or sizes.size != times.size:
        raise ValidationError("need at least two (size, time) pairs")
    if np.any(sizes <= 0) or np.any(times <= 0):
        raise ValidationError("sizes and times must be positive")
    return float(np.polyfit(np.log(sizes), np.log(times), 1)[0])


def bench_geometry(nx: int) -> ScanGeometry:
    """Proportional scan sizes for the scaling runs: K = round(2.56 Nx),
    L = 2 Nx, M = 4 Nx on the reference elliptical scan (a1=1, a2=0.8,
    H=2, r0=4); at Nx=100 this is the K=256, L=200, M=400 setup."""
    return ScanGeometry(1.0, 0.8, 2.0, 4.0, round(2.56 * nx), 2 * nx, 4 * nx)


def benchmark_scaling(nx_sizes, single_thread: bool = True, runs: int = 3,
                      timer=None, backend=None) -> BenchResult:
    """Time the direct elliptical-cylinder reconstruction end to end
    (excluding I/O and the forward simulation) for each grid size and fit the
    log-log slope against the number of unknowns N = (2 Nx + 1)^2 (L + 1).

    Each size is timed ``runs`` times and the median is kept.  The fit is only
    meaningful single-threaded.  ``timer``, when given, replaces the real
    run with a callable (nx, N) -> seconds; used to validate the fit itself.
    """
    nx_sizes = [int(n) for n in nx_sizes]
    if len(nx_sizes) < 3:
        raise ValidationError("benchmark needs at least 3 sizes")
    if sorted(set(nx_sizes)) != nx_sizes:
        raise ValidationError("benchmark sizes must be strictly increasing")
    threads = 1 if single_thread else (os.cpu_count() or 1)
    entries = []
    for nx in nx_sizes:
        geom = bench_geometry(nx)
        n_unknowns = (2 * nx + 1) ** 2 * (geom.L + 1)
        n_data = geom.K * (2 * geom.L + 1) * (geom.M + 1)
        if timer is not None:
            seconds = float(timer(nx, n_unknowns))
        else:
            phantom = Phantom([Ball((0.0, 0.0, 0.0), 0.5, 1.0)])
            data = forward_data(phantom, geom)
            req = ReconRequest("inv3d", geom, nx)
            samples = []
            for _ in range(runs):
                t0 = time.perf_counter()
                reconstruct_inv3d(data, req, threads=threads, backend=backend)
                samples.append(time.perf_counter() - t0)
            seconds = float(np.median(samples))
        entries.append((nx, n_unknowns, n_data, seconds))
    slope = fit_loglog_slope([e[1] for e in entries], [e[3] for e in entries])
    return BenchResult(entries, slope)


def write_bench_csv(result: BenchResult, path) -> None:
    lines = ["Nx,N,datapoints,seconds"]
    for nx, n, nd, sec in result.entries:
        lines.append(f"{nx},{n},{nd},{sec!r}")
    lines.append(f"slope,{result.slope!r}")
    with open(path, "w", encoding="ascii") as fh:
        fh.write("\n".join(lines) + "\n")


def export_slice_pgm(v: Volume, axis: str, index: int, path) -> None:
    """8-bit binary PGM of one slice, min-max normalized; constant slices map
    to mid-gray 128.

    ``horizontal`` fixes the vertical grid index n3 = index (image rows run
    along -x2..x2 top to bottom, columns along x1); ``vertical`` fixes
    n2 = index (rows along z top to bottom, columns along x1).
    """
    if axis == "horizontal":
        if not -(v.Lz // 2) <= index <= v.Lz // 2:
            raise ValidationError(f"horizontal slice index {index} out of range")
        img = v.values[:, :, index + v.Lz // 2].T[::-1]
    elif axis == "vertical":
        if not -v.Nx <= index <= v.Nx:
            raise ValidationError(f"vertical slice index {index} out of range")
        img = v.values[:, index + v.Nx, :].T[::-1]
    else:
        raise ValidationError(f"axis must be 'horizontal' or 'vertical', got {axis!r}")
    lo = float(img.min())
    hi = float(img.max())
    if hi - lo < 1e-300:
        pix = np.full(img.shape, 128, dtype=np.uint8)
    else:
        pix = np.round((img - lo) / (hi - lo) * 255.0).astype(np.uint8)
    with open(path, "wb") as fh:
        fh.write(f"P5\n{pix.shape[1]} {pix.shape[0]}\n255\n".encode("ascii"))
        fh.write(pix.tobytes())
