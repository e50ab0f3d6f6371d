"""Command-line interface.

Exit codes: 0 success, 1 usage error, 2 data or format error.
"""

from __future__ import annotations

import argparse
import sys

from pmrecon import io
from pmrecon.grappa import DEFAULT_LAMBDA
from pmrecon.masking import apply_mask, default_acs_count, make_equidistant_mask
from pmrecon.pdhg import PdhgConfig
from pmrecon.phantom import add_noise, shepp_logan, simulate_coils
from pmrecon.pipeline import METHODS, compare, evaluate, reconstruct

EXIT_OK, EXIT_USAGE, EXIT_DATA = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _add_method_flags(p):
    g = p.add_argument_group("GRAPPA")
    g.add_argument("--kx", type=int, default=5, help="readout kernel taps (odd)")
    g.add_argument("--ky", type=int, default=2, help="phase kernel taps")
    g.add_argument("--lambda", dest="lam", type=float, default=DEFAULT_LAMBDA,
                   help="relative Tikhonov regularisation")
    g.add_argument("--calib-positions", dest="positions", choices=("lattice", "all"),
                   default="lattice", help="ACS positions used to fit the kernels")
    g = p.add_argument_group("PDHG")
    g.add_argument("--iters", type=int, default=25)
    g.add_argument("--alpha", type=float, default=None,
                   help="wavelet sparsity weight (default 1e-3 * max|A^H y|)")
    g.add_argument("--levels", type=int, default=3)
    g.add_argument("--tau", type=float, default=1.0)
    g.add_argument("--sigma", type=float, default=1.0)


def _method_kwargs(args):
    pdhg = PdhgConfig(n_iters=args.iters, alpha=args.alpha, levels=args.levels,
                      tau=args.tau, sigma=args.sigma)
    return {"kx": args.kx, "ky": args.ky, "lam": args.lam, "positions": args.positions, "pdhg": pdhg}


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="pmrecon", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("phantom", help="simulate multi-coil Shepp-Logan k-space")
    p.add_argument("--rows", type=int, required=True)
    p.add_argument("--cols", type=int, required=True)
    p.add_argument("--coils", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="KSPC k-space output")
    p.add_argument("--noise-sigma", type=float, default=0.0)
    p.add_argument("--truth", help="ground-truth magnitude image (.npy or .pgm)")

    p = sub.add_parser("mask", help="write an equidistant mask with ACS")
    p.add_argument("--cols", type=int, required=True)
    p.add_argument("--accel", type=int, required=True)
    p.add_argument("--acs", type=int, default=None,
                   help="ACS columns (default ~8%% of cols for R<=4, ~4%% above, at least 2R)")
    p.add_argument("--offset", type=int, default=0)
    p.add_argument("--out", required=True)

    p = sub.add_parser("undersample", help="apply a mask to k-space")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--mask", required=True)
    p.add_argument("--out", required=True)

    p = sub.add_parser("recon", help="reconstruct an image")
    p.add_argument("method", choices=METHODS)
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--mask", required=True)
    p.add_argument("--out-image", required=True)
    p.add_argument("--out-kspace")
    _add_method_flags(p)

    p = sub.add_parser("eval", help="score a reconstruction against a reference")
    p.add_argument("--recon", required=True)
    p.add_argument("--ref", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--method", default="recon", help="label stored in the report")

    p = sub.add_parser("compare", help="run all methods and write a combined report")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--mask", required=True)
    p.add_argument("--ref", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--timing", action="store_true",
                   help="record wall-clock runtimes (reports are then not byte-reproducible)")
    _add_method_flags(p)
    return parser


def _run(args) -> None:
    if args.command == "phantom":
        img = shepp_logan(args.rows, args.cols)
        kspace, _ = simulate_coils(img, args.coils, args.seed)
        if args.noise_sigma:
            kspace = add_noise(kspace, args.noise_sigma, args.seed)
        io.write_ksp(args.out, kspace)
        if args.truth:
            io.write_image(args.truth, img)
    elif args.command == "mask":
        acs = default_acs_count(args.cols, args.accel) if args.acs is None else args.acs
        io.write_mask(args.out, make_equidistant_mask(args.cols, args.accel, acs, args.offset))
    elif args.command == "undersample":
        mask = io.read_mask(args.mask)
        io.write_ksp(args.out, apply_mask(io.read_ksp(args.inp), mask))
    elif args.command == "recon":
        mask = io.read_mask(args.mask)
        image, kspace, _ = reconstruct(args.method, io.read_ksp(args.inp), mask, **_method_kwargs(args))
        io.write_image(args.out_image, image)
        if args.out_kspace:
            io.write_ksp(args.out_kspace, kspace)
    elif args.command == "eval":
        report = evaluate(args.method, io.read_image(args.recon), io.read_image(args.ref))
        io.write_report([report], args.out)
    elif args.command == "compare":
        mask = io.read_mask(args.mask)
        reports = compare(io.read_ksp(args.inp), mask, io.read_image(args.ref),
                          timing=args.timing, **_method_kwargs(args))
        io.write_report(reports, args.out)


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    try:
        _run(args)
    except (ValueError, OSError) as exc:
        print(f"pmrecon {args.command}: {exc}", file=sys.stderr)
        return EXIT_DATA
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
