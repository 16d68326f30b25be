"""Filtration operators used by the inversion pipelines: radius weighting,
derivative stencils, the derivative-in-s^2 operator, an FFT Hilbert transform,
the composite radial filter, the anisotropic horizontal Laplacian, and the
radial filter of the weighted (detector-normal) backprojection formula.

All stencils are second order: central differences in the interior and
one-sided three/four point stencils at the ends.
"""

from dataclasses import dataclass

import numpy as np

from .core import DataGrid, Volume
from .errors import ValidationError

__all__ = [
    "SampledSignal",
    "multiply_radius_power",
    "diff_s",
    "diff2_s",
    "Ds_operator",
    "hilbert",
    "bs_operator",
    "laplacian_Ax",
    "ubp_radial_filter",
]


@dataclass
class SampledSignal:
    """Uniformly sampled 1D signal; index i sits at origin + i*spacing."""

    values: np.ndarray
    spacing: float
    origin: float = 0.0

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64).reshape(-1)
        if not np.isfinite(self.spacing) or self.spacing <= 0:
            raise ValidationError(f"spacing must be positive, got {self.spacing}")
        if not np.isfinite(self.origin):
            raise ValidationError("origin must be finite")

    @property
    def coords(self) -> np.ndarray:
        return self.origin + self.spacing * np.arange(self.values.size)

    def like(self, values) -> "SampledSignal":
        return SampledSignal(values, self.spacing, self.origin)


def _diff1_array(arr, h, axis=-1):
    """Second-order first derivative along axis (length >= 3)."""
    a = np.moveaxis(np.asarray(arr, dtype=float), axis, -1)
    if a.shape[-1] < 3:
        raise ValidationError("first derivative needs at least 3 samples")
    out = np.empty_like(a)
    out[..., 1:-1] = (a[..., 2:] - a[..., :-2]) / (2.0 * h)
    out[..., 0] = (-3.0 * a[..., 0] + 4.0 * a[..., 1] - a[..., 2]) / (2.0 * h)
    out[..., -1] = (3.0 * a[..., -1] - 4.0 * a[..., -2] + a[..., -3]) / (2.0 * h)
    return np.moveaxis(out, -1, axis)


def _diff2_array(arr, h, axis=-1):
    """Second-order second derivative along axis (length >= 3)."""
    a = np.moveaxis(np.asarray(arr, dtype=float), axis, -1)
    n = a.shape[-1]
    if n < 3:
        raise ValidationError("second derivative needs at least 3 samples")
    h2 = h * h
    out = np.empty_like(a)
    out[..., 1:-1] = (a[..., 2:] - 2.0 * a[..., 1:-1] + a[..., :-2]) / h2
    if n >= 4:
        out[..., 0] = (2.0 * a[..., 0] - 5.0 * a[..., 1] + 4.0 * a[..., 2] - a[..., 3]) / h2
        out[..., -1] = (2.0 * a[..., -1] - 5.0 * a[..., -2] + 4.0 * a[..., -3] - a[..., -4]) / h2
    else:
        out[..., 0] = out[..., 1]
        out[..., -1] = out[..., 1]
    return np.moveaxis(out, -1, axis)


def _extrapolate_to_zero(v1, v2, v3):
    """Quadratic through samples at h, 2h, 3h evaluated at 0."""
    return 3.0 * v1 - 3.0 * v2 + v3


def diff_s(sig: SampledSignal) -> SampledSignal:
    return sig.like(_diff1_array(sig.values, sig.spacing))


def diff2_s(sig: SampledSignal) -> SampledSignal:
    return sig.like(_diff2_array(sig.values, sig.spacing))


def Ds_operator(sig: SampledSignal, assume_even: bool = True) -> SampledSignal:
    """(2s)^{-1} d/ds, the derivative with respect to s^2, for a signal
    sampled on s >= 0 (origin must be 0).

    With ``assume_even`` the s = 0 sample is the even-function limit
    h''(0) / 2; otherwise it is filled by quadratic extrapolation.
    """
    if sig.origin != 0.0:
        raise ValidationError("Ds_operator expects a signal starting at s = 0")
    if sig.values.size < 4:
        raise ValidationError("Ds_operator needs at least 4 samples")
    s = sig.coords
    d1 = _diff1_array(sig.values, sig.spacing)
    out = np.empty_like(d1)
    out[1:] = d1[1:] / (2.0 * s[1:])
    if assume_even:
        out[0] = _diff2_array(sig.values, sig.spacing)[0] / 2.0
    else:
        out[0] = _extrapolate_to_zero(out[1], out[2], out[3])
    return sig.like(out)


def _next_pow2(n: int) -> int:
    return 1 << (int(n - 1).bit_length())


def hilbert(sig: SampledSignal) -> SampledSignal:
    """Discrete Hilbert transform, convention
    (H h)(s) = (1/pi) P.V. integral of h(s') / (s - s') ds',
    i.e. the Fourier multiplier -i sign(xi).

    The signal is zero-padded to twice the next power of two before the FFT to
    push the circular wrap-around below the accuracy of the multiplier itself,
    and the output is truncated back to the input support.
    """
    n = sig.values.size
    if n < 8:
        raise ValidationError("hilbert needs at least 8 samples")
    nfft = 2 * _next_pow2(n)
    spec = np.fft.fft(sig.values, n=nfft)
    mult = np.zeros(nfft, dtype=complex)
    mult[1 : nfft // 2] = -1.0j
    mult[nfft // 2 + 1 :] = 1.0j
    out = np.fft.ifft(spec * mult)[:n].real
    return sig.like(out)


def bs_operator(sig: SampledSignal, n: int) -> SampledSignal:
    """Composite radial filter of the elliptical-cylinder inversion formula
    for detector-surface dimension n in {2, 3}:

    * n = 2: minus the identity.
    * n = 3: -(s * Ds(Hilbert(h))) with h extended evenly through s = 0 for
      the Hilbert step.
    """
    if sig.origin != 0.0:
        raise ValidationError("bs_operator expects a signal starting at s = 0")
    if n == 2:
        return sig.like(-sig.values)
    if n != 3:
        raise ValidationError(f"bs_operator supports n in {{2, 3}}, got {n}")
    v = sig.values
    ext = SampledSignal(
        np.concatenate([v[:0:-1], v]), sig.spacing, -sig.spacing * (v.size - 1)
    )
    h_half = sig.like(hilbert(ext).values[v.size - 1 :])
    ds = Ds_operator(h_half, assume_even=False)
    return sig.like(-sig.coords * ds.values)


def multiply_radius_power(d: DataGrid, p: int) -> DataGrid:
    """Scale each radius sample by (r0 l / M)^p; for p >= 1 the l = 0 samples
    become exactly 0."""
    if not isinstance(p, (int, np.integer)) or p < 0:
        raise ValidationError(f"radius power must be an integer >= 0, got {p!r}")
    weights = d.geometry.radii ** int(p)
    return DataGrid(d.geometry, d.values * weights[None, None, :])


def laplacian_Ax(vol: Volume, a1: float, a2: float) -> Volume:
    """Anisotropic horizontal Laplacian (1/a1^2) d^2/dx1^2 + (1/a2^2) d^2/dx2^2;
    the vertical axis is untouched."""
    if vol.Nx < 2:
        raise ValidationError("laplacian needs Nx >= 2")
    if a1 <= 0 or a2 <= 0:
        raise ValidationError("semi-axes must be positive")
    out = _diff2_array(vol.values, vol.dx, axis=0) / (a1 * a1)
    out += _diff2_array(vol.values, vol.dx, axis=1) / (a2 * a2)
    return Volume(vol.Nx, vol.Lz, vol.dx, vol.dz, out)


def _ubp_filter_array(values, dr):
    """r^{-1} d/dr r^{-1} d/dr (r g) along the last axis; the r = 0 sample of
    each division is filled by quadratic extrapolation from the next three.

    Contributions from near-zero radii are geometrically negligible (spheres
    of tiny radius intersect almost nothing), so the extrapolation only has to
    keep the sample finite.
    """
    vals = np.asarray(values, dtype=float)
    n = vals.shape[-1]
    if n < 4:
        raise ValidationError("radial filter needs at least 4 samples")
    r = dr * np.arange(n)
    u = vals * r
    v = _diff1_array(u, dr)
    v[..., 1:] /= r[1:]
    v[..., 0] = _extrapolate_to_zero(v[..., 1], v[..., 2], v[..., 3])
    w = _diff1_array(v, dr)
    w[..., 1:] /= r[1:]
    w[..., 0] = _extrapolate_to_zero(w[..., 1], w[..., 2], w[..., 3])
    return w


def ubp_radial_filter(sig: SampledSignal) -> SampledSignal:
    if sig.origin != 0.0:
        raise ValidationError("ubp_radial_filter expects a signal starting at r = 0")
    return sig.like(_ubp_filter_array(sig.values, sig.spacing))
