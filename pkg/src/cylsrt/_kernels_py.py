"""Pure-numpy implementations of the two hot backprojection kernels.

These mirror the compiled extension in ``_kernels.pyx`` exactly: same call
signatures, same linear-interpolation semantics, and per-output-element
accumulation in a fixed order, so results are independent of the number of
worker threads.  The compiled module is preferred at import time; this one is
the fallback (and the reference the extension is tested against).
"""

from concurrent.futures import ThreadPoolExecutor

import numpy as np

BACKEND_NAME = "python"


def _mys_one(data_k, lo, w0, w1, wm):
    nm = data_k.shape[0]
    ns = lo.shape[1]
    lo1 = np.minimum(lo + 1, data_k.shape[1] - 1)
    out = np.empty((nm, ns))
    m_idx = np.arange(nm)
    for iy in range(nm):
        dd = np.abs(iy - m_idx)
        g0 = np.take_along_axis(data_k, lo[dd], axis=1)
        g1 = np.take_along_axis(data_k, lo1[dd], axis=1)
        out[iy] = wm @ (g0 * w0[dd] + g1 * w1[dd])
    return out


def mys_all(data, lo, w0, w1, wm, threads=1):
    """Height-line backprojection for every detector.

    data: (K, 2L+1, M+1) radius-weighted measurements.
    lo/w0/w1: (2L+1, ns) interpolation index and weights, indexed by the
        absolute height-index difference |iy - m| and the s index.
    wm: (2L+1,) trapezoid weights including the height step.
    Returns (K, 2L+1, ns).
    """
    K = data.shape[0]
    out = np.empty((K, data.shape[1], lo.shape[1]))
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            for k, plane in enumerate(pool.map(lambda kk: _mys_one(data[kk], lo, w0, w1, wm), range(K))):
                out[k] = plane
    else:
        for k in range(K):
            out[k] = _mys_one(data[k], lo, w0, w1, wm)
    return out


def _mx_block(planes_t, xs, det, iy_map, ds, mode, w_uniform, u1, u2):
    K, ns, _ = planes_t.shape
    nz = iy_map.shape[0]
    out = np.zeros((xs.shape[0], nz))
    for k in range(K):
        d1 = xs[:, 0] - det[k, 0]
        d2 = xs[:, 1] - det[k, 1]
        t = np.hypot(d1, d2) / ds
        l = t.astype(np.int64)
        ok = l + 1 <= ns - 1
        l = np.where(ok, l, 0)
        frac = np.where(ok, t - l, 0.0)
        wt = np.full(xs.shape[0], w_uniform) if mode == 0 else u1[k] * d1 + u2[k] * d2
        wt = wt * ok
        rows = planes_t[k][:, iy_map]  # (ns, nz)
        out += (wt * (1.0 - frac))[:, None] * rows[l] + (wt * frac)[:, None] * rows[l + 1]
    return out


def mx_accumulate(planes_t, xs, det, iy_map, ds, mode, w_uniform, u1, u2, threads=1):
    """Detector-sum backprojection onto a set of horizontal grid points.

    planes_t: (K, ns, 2L+1) per-detector planes, transposed so the height
        axis is contiguous.
    xs: (P, 2) horizontal grid points; det: (K, 2) detector positions.
    iy_map: (nz,) plane row for each output height index.
    mode 0 uses the constant weight w_uniform per detector; mode 1 uses
    u1[k]*(x1-det1) + u2[k]*(x2-det2) (detector-normal weighting).
    Returns (P, nz); the sum over detectors runs in index order for every
    output element regardless of the thread count.
    """
    P = xs.shape[0]
    if threads > 1:
        bounds = np.linspace(0, P, 4 * threads + 1).astype(int)
        blocks = [(b0, b1) for b0, b1 in zip(bounds[:-1], bounds[1:]) if b1 > b0]
        out = np.empty((P, iy_map.shape[0]))
        with ThreadPoolExecutor(max_workers=threads) as pool:
            futs = [
                pool.submit(_mx_block, planes_t, xs[b0:b1], det, iy_map, ds, mode, w_uniform, u1, u2)
                for b0, b1 in blocks
            ]
            for (b0, b1), fut in zip(blocks, futs):
                out[b0:b1] = fut.result()
        return out
    return _mx_block(planes_t, xs, det, iy_map, ds, mode, w_uniform, u1, u2)
