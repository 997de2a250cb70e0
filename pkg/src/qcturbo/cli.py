"""Command-line interface: ``qcturbo <subcommand> ...``.

Exit codes: 0 success, 2 validation error, 3 construction failure,
4 resource limit.
"""

from __future__ import annotations

import argparse
import sys

from . import analysis, permutation, rsc, simulation
from .errors import ConstructionError, ResourceLimitError, ValidationError
from .turbo import TurboCode

EXIT_CODES = """exit codes:
  0  success
  2  validation error (bad flags, malformed files, unsupported block length)
  3  construction failure (S-random gave up)
  4  resource limit (enumeration too large)
"""


def _parser() -> argparse.ArgumentParser:
    fmt = argparse.RawDescriptionHelpFormatter
    p = argparse.ArgumentParser(prog="qcturbo", description=__doc__, epilog=EXIT_CODES, formatter_class=fmt)
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate an interleaver file", epilog=EXIT_CODES, formatter_class=fmt)
    g.add_argument("--kind", choices=["qc", "uniform", "srandom"], required=True)
    g.add_argument("--n1", type=int, help="rows (qc)")
    g.add_argument("--n2", type=int, help="columns / period (qc)")
    g.add_argument("--n", type=int, help="size (uniform, srandom)")
    g.add_argument("--s", type=int, help="spread constraint S (srandom)")
    g.add_argument("--max-attempts", type=int, default=100, help="S-random restarts (default 100)")
    g.add_argument("--seed", type=int, default=0, help="random seed (default 0)")
    g.add_argument("--out", required=True, help="output interleaver file")

    i = sub.add_parser("inspect", help="report on an interleaver file", epilog=EXIT_CODES, formatter_class=fmt)
    i.add_argument("--perm", required=True, help="interleaver file")
    i.add_argument("--s", type=int, help="also check the S-random constraint for this S")

    lam = sub.add_parser("lambda", help="weight-to-length parameter of an RSC code", epilog=EXIT_CODES,
                         formatter_class=fmt)
    lam.add_argument("--gens", required=True, help="octal generators, e.g. 13,15")
    lam.add_argument("--horizon", type=int, help="certificate horizon (default 4 * states)")

    d = sub.add_parser("distance", help="minimum distance search", epilog=EXIT_CODES, formatter_class=fmt)
    d.add_argument("--perm", required=True, help="interleaver file")
    d.add_argument("--gens", required=True, help="octal generators, e.g. 13,15")
    d.add_argument("--method", choices=["exhaustive", "low-weight"], default="low-weight")
    d.add_argument("--max-weight", type=int, default=3, help="max input weight (low-weight, default 3)")
    d.add_argument("--puncture", choices=["none", "alternate"], default="none")

    z = sub.add_parser("zstat", help="M-cycling counts over random QC interleavers", epilog=EXIT_CODES,
                       formatter_class=fmt)
    z.add_argument("--n1", type=int, required=True)
    z.add_argument("--n2", type=int, required=True)
    z.add_argument("--M", type=int, required=True, dest="m")
    z.add_argument("--trials", type=int, default=100)
    z.add_argument("--seed", type=int, default=0)

    s = sub.add_parser("simulate", help="Monte Carlo WER/BER sweep to CSV", epilog=EXIT_CODES, formatter_class=fmt)
    s.add_argument("--perm", required=True, help="interleaver file")
    s.add_argument("--gens", required=True, help="octal generators, e.g. 13,15")
    s.add_argument("--snr", required=True, help="comma-separated Eb/N0 values in dB")
    s.add_argument("--iters", type=int, default=8, help="decoding iterations (default 8)")
    s.add_argument("--stop-blocks", type=int, default=100, help="block errors to stop (default 100)")
    s.add_argument("--stop-bits", type=int, default=500, help="bit errors to stop (default 500)")
    s.add_argument("--max-frames", type=int, default=10_000_000, help="frame cap per point (default 1e7)")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("--puncture", choices=["none", "alternate"], default="alternate")
    s.add_argument("--termination", choices=["tail_biting", "open"], default="tail_biting")
    s.add_argument("--wraps", type=int, default=2, help="circular BCJR wraps (default 2)")
    s.add_argument("--out", help="CSV output path (default stdout)")
    return p


def _turbo(args) -> TurboCode:
    perm = permutation.read_interleaver(args.perm)
    code = rsc.RscCode.from_octal(args.gens)
    return TurboCode(code, perm, args.puncture, getattr(args, "termination", "tail_biting"))


def _need(args, *names):
    missing = [f"--{n.replace('_', '-')}" for n in names if getattr(args, n) is None]
    if missing:
        raise ValidationError(f"--kind {args.kind} requires {', '.join(missing)}")


def cmd_gen(args, out):
    if args.kind == "qc":
        _need(args, "n1", "n2")
        perm = permutation.build_qc_permutation(permutation.sample_qc(args.n1, args.n2, args.seed))
    elif args.kind == "uniform":
        _need(args, "n")
        perm = permutation.sample_uniform(args.n, args.seed)
    else:
        _need(args, "n", "s")
        perm = permutation.sample_s_random(args.n, args.s, args.seed, args.max_attempts)
    permutation.write_interleaver(perm, args.out)
    print(f"wrote {args.out}", file=out)
    _report(perm, out, s=args.s if args.kind == "srandom" else None)


def _report(perm, out, s=None):
    n = perm.n
    if perm.qc is not None:
        print(f"kind qc {perm.qc.n1} {perm.qc.n2}", file=out)
    else:
        print(f"kind table {n}", file=out)
    print(f"N {n}", file=out)
    print(f"spread {permutation.spread(perm) if n >= 2 else 0}", file=out)
    if perm.qc is not None:
        flag = permutation.is_quasi_cyclic(perm, perm.qc.n2)
        print(f"quasi_cyclic {str(flag).lower()} period {perm.qc.n2}", file=out)
    else:
        periods = permutation.quasi_cyclic_periods(perm)
        if periods:
            print(f"quasi_cyclic true period {periods[0]}", file=out)
        else:
            print("quasi_cyclic false", file=out)
    print(f"storage_integers {permutation.storage_size(perm)}", file=out)
    if s is not None:
        print(f"s_constraint {s} {str(permutation.satisfies_s_constraint(perm, s)).lower()}", file=out)


def cmd_inspect(args, out):
    perm = permutation.read_interleaver(args.perm)
    _report(perm, out, s=args.s)


def cmd_lambda(args, out):
    code = rsc.RscCode.from_octal(args.gens)
    print(rsc.lambda_parameter(code, args.horizon), file=out)


def cmd_distance(args, out):
    tc = _turbo(args)
    if args.method == "exhaustive":
        report = analysis.min_distance_exhaustive(tc)
    else:
        report = analysis.min_distance_low_weight(tc, args.max_weight)
    out.write(report.to_record())


def cmd_zstat(args, out):
    stats = analysis.z_statistics(args.n1, args.n2, args.m, args.trials, args.seed)
    print(f"trials {args.trials}", file=out)
    print(f"M {args.m}", file=out)
    print(f"mean_z {stats.mean:.6g}", file=out)
    print(f"bound {stats.bound:.6g}", file=out)
    print(f"within_bound {str(stats.within_bound).lower()}", file=out)
    print(f"divisibility_violations {stats.divisibility_violations}", file=out)


def cmd_simulate(args, out):
    tc = _turbo(args)
    try:
        snrs = tuple(float(v) for v in args.snr.split(","))
    except ValueError as exc:
        raise ValidationError(f"bad --snr list {args.snr!r}") from exc
    config = simulation.SimConfig(
        tc,
        snrs,
        iterations=args.iters,
        min_block_errors=args.stop_blocks,
        min_bit_errors=args.stop_bits,
        max_frames=args.max_frames,
        seed=args.seed,
        workers=args.workers,
        wraps=args.wraps,
    )
    result = simulation.run(config)
    if args.out:
        simulation.write_csv(result.points, args.out)
    else:
        out.write(result.to_csv())


COMMANDS = {
    "gen": cmd_gen,
    "inspect": cmd_inspect,
    "lambda": cmd_lambda,
    "distance": cmd_distance,
    "zstat": cmd_zstat,
    "simulate": cmd_simulate,
}


def main(argv=None, out=None) -> int:
    out = sys.stdout if out is None else out
    args = _parser().parse_args(argv)
    try:
        COMMANDS[args.command](args, out)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ConstructionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except ResourceLimitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    return 0


if __name__ == "__main__":
    sys.exit(main())
