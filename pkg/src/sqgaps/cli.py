"""Command-line front end: scan, gaps, construct, verify, constants.

Exit codes: 0 success, 1 internal error, 2 usage/domain error, 3 construction
infeasible, 4 malformed input, 5 certificate rejected.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from . import analysis, construct, membership
from .arith import PrimeClass

EXIT_OK, EXIT_INTERNAL, EXIT_USAGE, EXIT_INFEASIBLE, EXIT_MALFORMED, EXIT_REJECTED = range(6)


def _fmt17(v) -> str:
    if isinstance(v, float):
        return format(v, ".17g")
    return json.dumps(v)


def dumps17(d: dict) -> str:
    """JSON object with floats printed to 17 significant digits."""
    return "{" + ", ".join(f"{json.dumps(k)}: {_fmt17(v)}" for k, v in d.items()) + "}"


def _positive_limit(text: str) -> int:
    v = int(text)
    if v < 2:
        raise argparse.ArgumentTypeError("limit must be >= 2")
    return v


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="sqgaps", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="subcommand", required=True)

    scan = sub.add_parser("scan", help="classify [start, limit] into R and S")
    scan.add_argument("--start", type=int, default=1)
    scan.add_argument("--limit", type=_positive_limit, required=True)
    scan.add_argument("--out", type=Path)
    scan.add_argument("--format", choices=("csv", "json"), default="csv")

    gaps = sub.add_parser("gaps", help="maximal gap G(N) of R, S or the pair-good set")
    gaps.add_argument("--set", dest="set_name", choices=("R", "S", "good"), default="R")
    gaps.add_argument("--limit", type=_positive_limit, required=True)
    gaps.add_argument("--a", type=int)
    gaps.add_argument("--b", type=int)
    gaps.add_argument("--threads", type=int, default=os.cpu_count() or 1)
    gaps.add_argument("--out", type=Path, help="write the member,next,gap table here")
    gaps.add_argument("--format", choices=("csv", "json"), default="json")

    con = sub.add_parser("construct", help="build and verify a covering certificate")
    con.add_argument("--a", type=int, default=2)
    con.add_argument("--b", type=int, default=1)
    con.add_argument("--delta", type=float, default=construct.DEFAULT_DELTA)
    con.add_argument("--x", type=int, default=5000)
    con.add_argument("--y", type=int)
    con.add_argument("--z", type=int)
    con.add_argument("--K", type=float, default=4.0)
    con.add_argument("--M", type=float, default=6.5)
    con.add_argument("--xi", type=float, default=1.5)
    con.add_argument("--epsilon", type=float)
    con.add_argument("--N", type=int)
    con.add_argument("--seed", type=int, default=0)
    con.add_argument("--mode", choices=("free", "paper"), default="free")
    con.add_argument("--strategy", choices=("greedy", "randomized"), default="greedy")
    con.add_argument("--threads", type=int, default=os.cpu_count() or 1, help="accepted for symmetry; construction is single-threaded")
    con.add_argument("--out", type=Path, default=Path("certificate.json"))

    ver = sub.add_parser("verify", help="re-check a certificate file")
    ver.add_argument("path", type=Path)

    const = sub.add_parser("constants", help="f_rho(delta), C(rho) and the margin")
    const.add_argument("--rho", type=float, default=0.5)
    const.add_argument("--delta", type=float, default=construct.DEFAULT_DELTA)
    const.add_argument("--a", type=int, default=2)
    const.add_argument("--b", type=int, default=1)
    const.add_argument("--x", type=int, default=5000, help="upper end for sigma(x) and sigma(z, x)")
    const.add_argument("--z", type=int, default=20)
    return ap


def cmd_scan(args) -> int:
    mask_rows = []
    lo = args.start
    if lo < 1 or lo > args.limit:
        print("error: need 1 <= start <= limit", file=sys.stderr)
        return EXIT_USAGE
    while lo <= args.limit:
        hi = min(args.limit, lo + membership.SEGMENT_SIZE - 1)
        m = membership.classify_range(lo, hi)
        mask_rows += [(lo + i, int(r), int(s)) for i, (r, s) in enumerate(zip(m.in_R, m.in_S))]
        lo = hi + 1
    if args.format == "json":
        text = json.dumps([{"n": n, "in_R": bool(r), "in_S": bool(s)} for n, r, s in mask_rows])
    else:
        text = "n,in_R,in_S\n" + "".join(f"{n},{r},{s}\n" for n, r, s in mask_rows)
    if args.out:
        args.out.write_text(text)
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
    return EXIT_OK


def cmd_gaps(args) -> int:
    if args.set_name == "good" and (args.a is None or args.b is None):
        print("error: --set good needs --a and --b", file=sys.stderr)
        return EXIT_USAGE
    try:
        report = membership.max_gap(args.set_name, args.limit, a=args.a, b=args.b, threads=args.threads)
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    if args.out:
        with open(args.out, "w", newline="") as fh:
            report.to_csv(fh)
    if args.format == "csv" and not args.out:
        sys.stdout.write(report.to_csv())
    else:
        print(json.dumps(report.summary()))
    return EXIT_OK


def cmd_construct(args) -> int:
    try:
        params = construct.derive_params(
            args.a,
            args.b,
            args.x,
            delta=args.delta,
            K=args.K,
            M=args.M,
            xi=args.xi,
            epsilon=args.epsilon,
            N=args.N,
            seed=args.seed,
            mode=args.mode,
            y=args.y if args.y is not None else (None if args.mode == "paper" else 200),
            z=args.z if args.z is not None else (None if args.mode == "paper" else 20),
        )
    except construct.ParameterError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    try:
        run = construct.run_pipeline(params, strategy=args.strategy)
    except construct.ConstructionError as e:
        print(f"{e.stage}: {e}", file=sys.stderr)
        diag = {k: (v if isinstance(v, (int, float, str, bool)) else str(v)) for k, v in e.diagnostics.items()}
        print(json.dumps({"stage": e.stage, **diag}), file=sys.stderr)
        return EXIT_INFEASIBLE
    args.out.write_text(run.certificate.dumps())
    # Verify what was written, not the in-memory object.
    ok, violations = construct.verify_certificate(construct.CoverCertificate.loads(args.out.read_text()))
    cert = run.certificate
    print(f"certificate written to {args.out}")
    print(f"  y = {params.y}, intervals of length {params.y}, centred strings of length {2 * cert.m + 1}")
    print(f"  survivors after stage 1: {len(run.stage1.primed)} / {len(run.stage1.doubleprimed)}")
    print(f"  leftovers after stage 2: {len(run.stage2.leftovers['primed'])} / {len(run.stage2.leftovers['doubleprimed'])}")
    print(f"  N has {len(str(params.N))} digits; verification {'passed' if ok else 'FAILED'}")
    for v in violations[:20]:
        print(f"  violation: {v}", file=sys.stderr)
    return EXIT_OK if ok else EXIT_REJECTED


def cmd_verify(args) -> int:
    try:
        cert = construct.CoverCertificate.loads(args.path.read_text())
    except (OSError, ValueError, KeyError, TypeError) as e:
        print(f"malformed certificate: {e}", file=sys.stderr)
        return EXIT_MALFORMED
    ok, violations = construct.verify_certificate(cert)
    for v in violations:
        print(v, file=sys.stderr)
    if ok:
        print(f"ok: {len(cert.witnesses)} witnesses checked")
    return EXIT_OK if ok else EXIT_REJECTED


def cmd_constants(args) -> int:
    try:
        f = analysis.f_rho(args.delta)
        c = analysis.compute_C(args.rho)
        f_hp = analysis.f_rho_mp(args.delta)
        c_hp = analysis.compute_C(args.rho, high_precision=True)
        if not 1 <= args.z <= args.x:
            raise ValueError("need 1 <= z <= x")
        pc = PrimeClass.for_form(args.a, args.b)
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    import mpmath

    out = {
        "rho": args.rho,
        "delta": args.delta,
        "f_rho": f,
        "C_rho": c,
        "margin": args.rho - f,
        "f_rho_hp": mpmath.nstr(f_hp, 60),
        "C_rho_hp": mpmath.nstr(c_hp, 60),
        "margin_hp": mpmath.nstr(mpmath.mpf(args.rho) - f_hp, 60),
        "sigma_z": analysis.sigma_product(args.z, pc),
        "sigma_x": analysis.sigma_product(args.x, pc),
        "sigma_z_x": analysis.sigma_range(args.z, args.x, pc),
    }
    print(dumps17(out))
    return EXIT_OK


COMMANDS = {
    "scan": cmd_scan,
    "gaps": cmd_gaps,
    "construct": cmd_construct,
    "verify": cmd_verify,
    "constants": cmd_constants,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
    try:
        return COMMANDS[args.subcommand](args)
    except Exception as e:  # pragma: no cover - last-resort guard
        print(f"internal error: {e!r}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
