"""Spherical Radon transform with centers on elliptical-cylinder surfaces:
exact forward simulation for ball phantoms, filtered-backprojection inversion
(direct, detector-normal weighted, and circular-cylinder variants), and a
scaling benchmark for the two-stage backprojection core.
"""

from .backprojection import (
    ReconPlanGrid,
    mx_backprojection,
    mys_backprojection,
    ubp_backprojection,
)
from .core import DataGrid, PlaneGrid, ScanGeometry, Volume
from .errors import (
    FileFormatError,
    HeaderError,
    NonFiniteError,
    TruncationError,
    ValidationError,
)
from .filters import (
    Ds_operator,
    SampledSignal,
    bs_operator,
    diff2_s,
    diff_s,
    hilbert,
    laplacian_Ax,
    multiply_radius_power,
    ubp_radial_filter,
)
from .geometry import EllipseBoundary, decomposition_constant, unit_sphere_area
from .harness import (
    BenchResult,
    add_noise,
    benchmark_scaling,
    export_slice_pgm,
    fit_loglog_slope,
    pearson,
    relative_l2,
    write_bench_csv,
)
from .io import read_data, read_volume, write_data, write_volume
from .kernels import active_backend, available_backends
from .phantom import (
    Ball,
    Phantom,
    arc_fraction,
    cap_fraction,
    demo_phantom,
    forward_data,
    load_phantom,
    rasterize,
    save_phantom,
)
from .quadrature import FieldFn, factorization_residual, spherical_mean_numeric
from .recon import (
    ReconRequest,
    reconstruct,
    reconstruct_circular,
    reconstruct_inv3d,
    reconstruct_ubp,
)

__version__ = "0.1.0"
