"""Command line entry point.

Exit codes: 0 success, 1 verification failure, 2 usage or I/O error.
"""

from __future__ import annotations

import argparse
import logging
import sys

import numpy as np

from . import harness, kerdock, sketch
from .streaming import StreamParams, choose_params, transform

log = logging.getLogger("kerdock_fst")

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _write(out, text):
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        with open(out, "w") as fh:
            fh.write(text)


def cmd_gen_matrix(args):
    A = harness.gen_orthogonal(args.n, args.seed)
    sketch.save_matrix(args.out, A)
    log.info("wrote %dx%d orthogonal matrix to %s", args.n, args.n, args.out)
    return EXIT_OK


def cmd_gen_vector(args):
    A = sketch.load_matrix(args.matrix)
    if args.p is not None:
        x, truth = harness.gen_mixture(A, args.p, args.seed)
    else:
        x, truth = harness.gen_exact_sparse(A, args.s, args.seed)
    sketch.save_matrix(args.out, x)
    if args.truth_out:
        sketch.save_matrix(args.truth_out, truth)
    return EXIT_OK


def cmd_preprocess(args):
    A = sketch.load_matrix(args.matrix)
    sk = sketch.preprocess(A, k=args.k, path=args.out_sketch)
    log.info("sketch m=%d n=%d k=%d L=%d -> %s", sk.m, sk.n, sk.k, sk.L, args.out_sketch)
    return EXIT_OK


def cmd_transform(args):
    sk = sketch.load(args.sketch)
    x = sketch.load_matrix(args.vector)
    if x.shape[0] != 1 or x.shape[1] != sk.n:
        raise UsageError(f"--vector has shape {x.shape}, sketch expects a 1x{sk.n} vector")
    x = x[0]
    J, K = args.J, args.K
    if J is None or K is None:
        gamma = args.gamma if args.gamma is not None else (args.epsilon - args.delta) / 2
        J0, K0 = choose_params(sk.row_norm_max, gamma, args.eta, sk.m)
        J = J0 if J is None else J
        K = K0 if K is None else K
    try:
        p = StreamParams(args.epsilon, args.delta, args.s, J, K, args.widen, args.seed)
    except (ValueError, OverflowError) as e:
        raise UsageError(str(e)) from None
    res = transform(sk, x, p, keep_estimate=False)
    _write(args.out, "index,value\n" + res.to_csv())
    return EXIT_OK


def cmd_verify(args):
    params = kerdock.DesignParams(args.k)
    mub = kerdock.verify_mub(params, cap=args.cap)
    m1, m2 = kerdock.verify_design_moments(params, cap=args.cap)
    c1, c2 = kerdock.c_dk(params.d, 1), kerdock.c_dk(params.d, 2)
    ok_m = kerdock.moments_pass(m1, m2, params.d, args.tol)
    ok_mub = mub.passed(args.tol)
    print(f"k={params.k} d={params.d} L={params.L}")
    print(f"m1={m1:.12g} (c_d1={c1:.12g})")
    print(f"m2={m2:.12g} (c_d2={c2:.12g})")
    print(f"mub within_dev={mub.within_dev:.3g} cross_dev={mub.cross_dev:.3g} "
          f"pairs={mub.pairs_checked} exhaustive={mub.exhaustive}")
    print("PASS" if ok_m and ok_mub else "FAIL")
    return EXIT_OK if ok_m and ok_mub else EXIT_FAIL


def cmd_bench(args):
    cfg = harness.load_config(args.config)
    if args.sketch:
        sk = sketch.load(args.sketch)
    else:
        A = harness.gen_orthogonal(cfg.n, cfg.matrix_seed)
        sk = sketch.preprocess(A)
    rows = harness.run_experiment(cfg, sk)
    _write(args.out, harness.rows_to_csv(rows))
    return EXIT_OK


def cmd_scaling(args):
    rows = harness.scaling_benchmark(args.n, args.N, args.s, args.K, args.widen, args.seed)
    _write(args.out, harness.rows_to_csv(rows, harness.SCALING_HEADER))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="kerdock-fst", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("gen-matrix", help="random orthogonal matrix (FSTM file)")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen_matrix)

    p = sub.add_parser("gen-vector", help="unit x with sparse A x (needs orthogonal A)")
    p.add_argument("--matrix", required=True)
    p.add_argument("--s", type=int, default=20)
    p.add_argument("--p", type=float, default=None, help="use the Gaussian mixture with rate p")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--truth-out")
    p.set_defaults(func=cmd_gen_vector)

    p = sub.add_parser("preprocess", help="compute and store the sketch")
    p.add_argument("--matrix", required=True)
    p.add_argument("--out-sketch", required=True)
    p.add_argument("--k", type=int, default=None)
    p.set_defaults(func=cmd_preprocess)

    p = sub.add_parser("transform", help="estimate h_eps(A x); prints index,value CSV")
    p.add_argument("--sketch", required=True)
    p.add_argument("--vector", required=True)
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--delta", type=float, default=0.0)
    p.add_argument("--s", type=int, required=True)
    p.add_argument("--J", type=int, default=None)
    p.add_argument("--K", type=int, default=None)
    p.add_argument("--gamma", type=float, default=None,
                   help="deviation target for choosing J,K (default (eps-delta)/2)")
    p.add_argument("--eta", type=float, default=0.01)
    p.add_argument("--widen", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_transform)

    p = sub.add_parser("verify", help="check the design's MUB structure and moments")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--cap", type=int, default=kerdock.DEFAULT_VERIFY_CAP)
    p.add_argument("--tol", type=float, default=1e-9)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("bench", help="(J, K) grid experiment from a key=value config")
    p.add_argument("--config", required=True)
    p.add_argument("--sketch", help="existing sketch (default: build one from matrix_seed)")
    p.add_argument("--out")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("scaling", help="streaming time versus n at fixed N")
    p.add_argument("--n", type=int, nargs="+", default=[256, 1024])
    p.add_argument("--N", type=int, default=1000)
    p.add_argument("--s", type=int, default=20)
    p.add_argument("--K", type=int, default=2)
    p.add_argument("--widen", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_scaling)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (UsageError, sketch.SketchFormatError, OSError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
