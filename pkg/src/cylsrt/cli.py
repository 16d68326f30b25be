"""Command-line driver: phantom -> forward -> noise -> reconstruct ->
compare / slice / bench.

Exit codes: 0 success, 1 validation or usage error, 2 I/O or file-format
error.  Diagnostics go to stderr; results go to files or stdout.
"""

import argparse
import os
import sys

from .errors import FileFormatError, ValidationError
from .harness import add_noise, benchmark_scaling, export_slice_pgm, relative_l2, write_bench_csv
from .io import read_data, read_volume, write_data, write_volume
from .phantom import Ball, Phantom, demo_phantom, forward_data, load_phantom, save_phantom
from .core import ScanGeometry
from .recon import ReconRequest, reconstruct

__all__ = ["run", "main"]


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _build_parser() -> _Parser:
    p = _Parser(prog="cylsrt", description=__doc__, add_help=True)
    sub = p.add_subparsers(dest="command", metavar="command")

    ph = sub.add_parser("phantom", help="write a phantom description file")
    ph.add_argument("--out", required=True, help="output phantom text file")
    ph.add_argument("--demo", action="store_true",
                    help="use the built-in three-ball demo phantom (default when no --ball is given)")
    ph.add_argument("--ball", action="append", default=[], metavar="CX,CY,CZ,R,AMP",
                    help="add a ball: center (length units), radius, amplitude; repeatable")

    fw = sub.add_parser("forward", help="simulate measurement data for a phantom")
    fw.add_argument("--phantom", required=True, help="phantom text file")
    fw.add_argument("--a1", type=float, default=1.0, help="ellipse semi-axis along x1 (length units)")
    fw.add_argument("--a2", type=float, default=0.8, help="ellipse semi-axis along x2 (length units)")
    fw.add_argument("--H", type=float, default=2.0, help="half height of the detector cylinder")
    fw.add_argument("--r0", type=float, default=4.0, help="maximum recorded sphere radius")
    fw.add_argument("--K", type=int, default=256, help="number of detector angles")
    fw.add_argument("--L", type=int, default=200, help="half the number of height steps")
    fw.add_argument("--M", type=int, default=400, help="number of radius steps")
    fw.add_argument("--out", required=True, help="output .srtdat file")

    no = sub.add_parser("noise", help="add Gaussian noise to measurement data")
    no.add_argument("--in", dest="infile", required=True, help="input .srtdat file")
    no.add_argument("--level", type=float, required=True,
                    help="noise level (fraction of max |g|, see --convention)")
    no.add_argument("--seed", type=int, required=True, help="random seed")
    no.add_argument("--convention", choices=("variance", "sigma"), default="variance",
                    help="variance = level*max|g| (default) or sigma = level*max|g|")
    no.add_argument("--out", required=True, help="output .srtdat file")

    rc = sub.add_parser("reconstruct", help="reconstruct a volume from measurement data")
    rc.add_argument("--in", dest="infile", required=True, help="input .srtdat file")
    rc.add_argument("--method", required=True, choices=("inv3d", "ubp3d", "circular"),
                    help="inversion formula")
    rc.add_argument("--Nx", type=int, default=100, help="horizontal half-resolution")
    rc.add_argument("--Lz", type=int, default=None,
                    help="vertical half-resolution (default: the data's L)")
    rc.add_argument("--threads", type=int, default=os.cpu_count() or 1,
                    help="worker threads (results are identical for any count)")
    rc.add_argument("--out", required=True, help="output .srtvol file")

    cp = sub.add_parser("compare", help="print the relative L2 difference of two volumes")
    cp.add_argument("--a", required=True, help="volume to evaluate (.srtvol)")
    cp.add_argument("--b", required=True, help="reference volume (.srtvol)")
    cp.add_argument("--mask", choices=("interior", "shrunk"), default="interior",
                    help="voxel region used for the metric")
    cp.add_argument("--a1", type=float, default=None,
                    help="ellipse semi-axis along x1 (default: grid half-width)")
    cp.add_argument("--a2", type=float, default=None,
                    help="ellipse semi-axis along x2 (default: grid half-width)")

    sl = sub.add_parser("slice", help="export one volume slice as an 8-bit PGM image")
    sl.add_argument("--in", dest="infile", required=True, help="input .srtvol file")
    sl.add_argument("--axis", choices=("horizontal", "vertical"), required=True,
                    help="slice orientation")
    sl.add_argument("--index", type=int, default=0, help="signed grid index of the slice")
    sl.add_argument("--out", required=True, help="output .pgm file")

    be = sub.add_parser("bench", help="run the scaling benchmark and write a CSV")
    be.add_argument("--sizes", required=True,
                    help="comma-separated Nx values, e.g. 40,60,80,100")
    be.add_argument("--out", required=True, help="output CSV file")

    return p


def _parse_ball(text: str) -> Ball:
    parts = text.replace(",", " ").split()
    if len(parts) != 5:
        raise ValidationError(f"--ball needs 5 numbers (cx cy cz radius amplitude), got {text!r}")
    try:
        cx, cy, cz, rho, amp = (float(p) for p in parts)
    except ValueError as exc:
        raise ValidationError(f"malformed --ball value {text!r}") from exc
    return Ball((cx, cy, cz), rho, amp)


def _cmd_phantom(args) -> int:
    if args.ball:
        phantom = Phantom([_parse_ball(b) for b in args.ball])
    else:
        phantom = demo_phantom()
    save_phantom(phantom, args.out)
    return 0


def _cmd_forward(args) -> int:
    phantom = load_phantom(args.phantom)
    geom = ScanGeometry(args.a1, args.a2, args.H, args.r0, args.K, args.L, args.M)
    write_data(forward_data(phantom, geom), args.out)
    return 0


def _cmd_noise(args) -> int:
    data = read_data(args.infile)
    write_data(add_noise(data, args.level, args.seed, args.convention), args.out)
    return 0


def _cmd_reconstruct(args) -> int:
    data = read_data(args.infile)
    req = ReconRequest(args.method, data.geometry, args.Nx, args.Lz)
    vol = reconstruct(data, req, threads=max(1, args.threads))
    write_volume(vol, args.out)
    return 0


def _cmd_compare(args) -> int:
    va = read_volume(args.a)
    vb = read_volume(args.b)
    print(relative_l2(va, vb, args.mask, a1=args.a1, a2=args.a2))
    return 0


def _cmd_slice(args) -> int:
    vol = read_volume(args.infile)
    export_slice_pgm(vol, args.axis, args.index, args.out)
    return 0


def _cmd_bench(args) -> int:
    try:
        sizes = [int(s) for s in args.sizes.split(",") if s.strip()]
    except ValueError as exc:
        raise ValidationError(f"malformed --sizes value {args.sizes!r}") from exc
    result = benchmark_scaling(sizes, single_thread=True)
    write_bench_csv(result, args.out)
    print(f"slope {result.slope:.4f}")
    return 0


_COMMANDS = {
    "phantom": _cmd_phantom,
    "forward": _cmd_forward,
    "noise": _cmd_noise,
    "reconstruct": _cmd_reconstruct,
    "compare": _cmd_compare,
    "slice": _cmd_slice,
    "bench": _cmd_bench,
}


def run(argv) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(parser.format_usage(), file=sys.stderr, end="")
        print(f"cylsrt: error: {exc}", file=sys.stderr)
        return 1
    if args.command is None:
        print(parser.format_usage(), file=sys.stderr, end="")
        print("cylsrt: error: a command is required", file=sys.stderr)
        return 1
    try:
        return _COMMANDS[args.command](args)
    except ValidationError as exc:
        print(f"cylsrt: error: {exc}", file=sys.stderr)
        return 1
    except (FileFormatError, OSError) as exc:
        print(f"cylsrt: i/o error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
