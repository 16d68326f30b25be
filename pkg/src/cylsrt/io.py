"""Bit-exact readers/writers for the two persisted binary formats.

SRTVOL (reconstruction volumes)::

    SRTVOL 1\n
    <Nx> <Lz> <dx> <dz>\n
    ... (2Nx+1)^2 (Lz+1) little-endian float64, n3 slowest, n1 fastest ...

SRTDAT (measurement grids)::

    SRTDAT 1\n
    <K> <L> <M> <a1> <a2> <H> <r0>\n
    ... K (2L+1) (M+1) little-endian float64, k slowest, l fastest ...

Floats in the header are written with ``repr`` so they round-trip exactly;
payloads are raw IEEE-754 doubles, so write-then-read is bit identical.
"""

import numpy as np

from .core import DataGrid, ScanGeometry, Volume
from .errors import HeaderError, NonFiniteError, TruncationError

__all__ = ["write_volume", "read_volume", "write_data", "read_data"]

_VOL_TAG = "SRTVOL"
_DAT_TAG = "SRTDAT"
_VERSION = 1


def _format_number(x) -> str:
    return repr(int(x)) if isinstance(x, (int, np.integer)) else repr(float(x))


def _read_line(fh, path):
    raw = bytearray()
    while True:
        b = fh.read(1)
        if not b:
            raise HeaderError(f"{path}: unexpected end of file inside header")
        if b == b"\n":
            break
        raw.extend(b)
        if len(raw) > 4096:
            raise HeaderError(f"{path}: header line too long")
    try:
        return raw.decode("ascii")
    except UnicodeDecodeError as exc:
        raise HeaderError(f"{path}: header is not ASCII") from exc


def _check_tag(line, tag, path):
    parts = line.split()
    if len(parts) != 2 or parts[0] != tag:
        raise HeaderError(f"{path}: expected '{tag} {_VERSION}' header, got {line!r}")
    if parts[1] != str(_VERSION):
        raise HeaderError(f"{path}: unsupported {tag} version {parts[1]!r}")


def _parse_fields(line, n_int, n_float, path):
    parts = line.split()
    if len(parts) != n_int + n_float:
        raise HeaderError(f"{path}: expected {n_int + n_float} header fields, got {len(parts)}")
    try:
        ints = [int(p) for p in parts[:n_int]]
        floats = [float(p) for p in parts[n_int:]]
    except ValueError as exc:
        raise HeaderError(f"{path}: malformed header field ({exc})") from exc
    return ints, floats


def _read_payload(fh, count, path):
    buf = fh.read(8 * count)
    if len(buf) < 8 * count:
        raise TruncationError(
            f"{path}: payload truncated, expected {8 * count} bytes, got {len(buf)}"
        )
    if fh.read(1):
        raise TruncationError(f"{path}: trailing bytes after payload")
    arr = np.frombuffer(buf, dtype="<f8").astype(np.float64)
    if not np.all(np.isfinite(arr)):
        raise NonFiniteError(f"{path}: payload contains non-finite values")
    return arr


def write_volume(v: Volume, path) -> None:
    header = (
        f"{_VOL_TAG} {_VERSION}\n"
        f"{v.Nx} {v.Lz} {_format_number(v.dx)} {_format_number(v.dz)}\n"
    )
    payload = np.ascontiguousarray(v.values.transpose(2, 1, 0), dtype="<f8")
    with open(path, "wb") as fh:
        fh.write(header.encode("ascii"))
        fh.write(payload.tobytes())


def read_volume(path) -> Volume:
    with open(path, "rb") as fh:
        _check_tag(_read_line(fh, path), _VOL_TAG, path)
        (nx, lz), (dx, dz) = _parse_fields(_read_line(fh, path), 2, 2, path)
        n = 2 * nx + 1
        arr = _read_payload(fh, n * n * (lz + 1), path)
    values = arr.reshape(lz + 1, n, n).transpose(2, 1, 0)
    return Volume(nx, lz, dx, dz, values)


def write_data(d: DataGrid, path) -> None:
    g = d.geometry
    header = (
        f"{_DAT_TAG} {_VERSION}\n"
        f"{g.K} {g.L} {g.M} {_format_number(g.a1)} {_format_number(g.a2)} "
        f"{_format_number(g.half_height)} {_format_number(g.max_radius)}\n"
    )
    payload = np.ascontiguousarray(d.values, dtype="<f8")
    with open(path, "wb") as fh:
        fh.write(header.encode("ascii"))
        fh.write(payload.tobytes())


def read_data(path) -> DataGrid:
    with open(path, "rb") as fh:
        _check_tag(_read_line(fh, path), _DAT_TAG, path)
        (k, l, m), (a1, a2, hh, r0) = _parse_fields(_read_line(fh, path), 3, 4, path)
        geom = ScanGeometry(a1, a2, hh, r0, k, l, m)
        arr = _read_payload(fh, k * (2 * l + 1) * (m + 1), path)
    return DataGrid(geom, arr.reshape(geom.data_shape()))
