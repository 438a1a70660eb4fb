"""Command-line frontend.

Subcommands: sample, cdf, quantile, classify, tetrad-test, verify, moments.
All output is plain TSV/CSV text so results feed scripts and plotting tools
directly; the seed and version are logged to stderr so the data channel
stays byte-stable.  Exit codes: 0 success, 1 failed theorem-tier
verification, 2 usage or input error.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import __version__
from .classify import classify
from .errors import WaldError
from .gaussian import load_matrix, validate_covariance
from .laws import parse_law
from .poly import load_polynomial
from .sampler import WaldSampleConfig, sample_wald
from .tetrad import TetradIndex, all_tetrads, load_data_csv, wald_tetrad_test
from .verify import format_report, run_suite


def _default_seed() -> int:
    env = os.environ.get("WALD_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            print(f"error: WALD_SEED must be an integer, got {env!r}", file=sys.stderr)
            raise SystemExit(2) from None
    return 42


def _parse_grid(spec: str) -> np.ndarray:
    try:
        start, stop, step = (float(tok) for tok in spec.split(":"))
    except ValueError:
        print(f"error: grid must be start:stop:step, got {spec!r}", file=sys.stderr)
        raise SystemExit(2) from None
    if step <= 0 or stop < start:
        print(f"error: bad grid {spec!r}", file=sys.stderr)
        raise SystemExit(2)
    count = int(np.floor((stop - start) / step + 1e-9)) + 1
    return start + step * np.arange(count)


def _add_global_options(parser: argparse.ArgumentParser, suppress: bool) -> None:
    # Global options are registered on the main parser and again on every
    # subparser (with SUPPRESS defaults), so they parse in either position.
    d = argparse.SUPPRESS if suppress else None
    parser.add_argument(
        "--seed", type=int, default=d,
        help="RNG seed (default: WALD_SEED env var or 42)",
    )
    parser.add_argument(
        "--threads", type=int, default=d,
        help="worker threads (default: available parallelism); "
        "--threads 1 guarantees bitwise-reproducible output",
    )
    parser.add_argument(
        "--out", default=argparse.SUPPRESS if suppress else "-",
        help="output file (default: stdout)",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wald",
        description=(
            "Limit distributions of Wald statistics at singular hypothesis "
            "points: Monte Carlo sampling, closed-form laws, quadratic-form "
            "classification, tetrad testing, and a numerical verification "
            "suite."
        ),
    )
    _add_global_options(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_sub(name: str, **kwargs) -> argparse.ArgumentParser:
        p = sub.add_parser(name, **kwargs)
        _add_global_options(p, suppress=True)
        return p

    p = add_sub("sample", help="draw Wald-ratio samples by Monte Carlo")
    p.add_argument("--poly", required=True, help="polynomial file (one term per line)")
    p.add_argument("--sigma", required=True, help="covariance matrix file")
    p.add_argument("--n", type=int, required=True, help="number of draws")

    p = add_sub("cdf", help="tabulate a limit-law CDF on a grid")
    p.add_argument("law", help="law spec, e.g. scaled-chisq:0.25:1, mix2:0.25:0.2, beta-fold:2:2, tetrad")
    p.add_argument("--grid", required=True, help="start:stop:step over t")

    p = add_sub("quantile", help="tabulate limit-law quantiles")
    p.add_argument("law", help="law spec string")
    p.add_argument("--grid", help="start:stop:step over probabilities")
    p.add_argument("--probs", help="comma-separated probabilities")

    p = add_sub("classify", help="limit law of a quadratic form under a covariance")
    p.add_argument("--quad", required=True, help="degree-2 polynomial file")
    p.add_argument("--sigma", required=True, help="covariance matrix file")

    p = add_sub("tetrad-test", help="Wald tetrad test on CSV data")
    p.add_argument("--data", required=True, help="CSV file, optional header row")
    p.add_argument("--indices", help="i,j,k,l zero-based column indices")
    p.add_argument("--all", action="store_true", help="test every tetrad")

    p = add_sub("verify", help="run the numerical verification suite")
    p.add_argument(
        "--suite", choices=("all", "theorems", "conjectures"), default="all"
    )
    p.add_argument("--n", type=int, default=10**6, help="draws per check")

    p = add_sub("moments", help="angular moment table of the bivariate ratio")
    p.add_argument("--sigma", type=float, required=True, help="exponent ratio parameter")
    p.add_argument("--phi", default="0,0.3,0.7,1.2,1.5", help="comma-separated angles in [0, pi/2)")
    p.add_argument("--m", default="1,2,3,4", help="comma-separated moment orders")
    return parser


def _open_out(path: str):
    if path == "-":
        return sys.stdout, False
    return open(path, "w", encoding="utf-8"), True


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    seed = args.seed if args.seed is not None else _default_seed()
    threads = args.threads if args.threads is not None else (os.cpu_count() or 1)
    print(f"# wald {__version__} command={args.command} seed={seed} threads={threads}",
          file=sys.stderr)

    out, close = _open_out(args.out)
    try:
        return _dispatch(args, seed, threads, out)
    except (WaldError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    finally:
        if close:
            out.close()


def _dispatch(args, seed: int, threads: int, out) -> int:
    if args.command == "sample":
        poly = load_polynomial(args.poly)
        sigma = validate_covariance(load_matrix(args.sigma))
        cfg = WaldSampleConfig(n=args.n, seed=seed, threads=threads)
        emp = sample_wald(poly, sigma, cfg)
        for v in emp.values:
            out.write(format(v, ".17g") + "\n")
        return 0

    if args.command == "cdf":
        law = parse_law(args.law)
        grid = _parse_grid(args.grid)
        vals = np.asarray(law.cdf(grid))
        out.write("t\tF\n")
        for t, v in zip(grid, vals):
            out.write(f"{t:.12g}\t{v:.12g}\n")
        return 0

    if args.command == "quantile":
        law = parse_law(args.law)
        if args.probs:
            probs = [float(tok) for tok in args.probs.split(",")]
        elif args.grid:
            probs = list(_parse_grid(args.grid))
        else:
            print("error: provide --probs or --grid", file=sys.stderr)
            return 2
        out.write("p\tQ\n")
        for p in probs:
            out.write(f"{p:.12g}\t{law.quantile(p):.12g}\n")
        return 0

    if args.command == "classify":
        poly = load_polynomial(args.quad)
        sigma = validate_covariance(load_matrix(args.sigma))
        result = classify(poly.to_quadratic_form(), sigma)
        out.write(f"form: {poly}\n")
        out.write(result.describe() + "\n")
        out.write(result.machine_line() + "\n")
        return 0

    if args.command == "tetrad-test":
        data = load_data_csv(args.data)
        if args.all:
            indices = list(all_tetrads(data.p))
        elif args.indices:
            try:
                i, j, k, l = (int(tok) for tok in args.indices.split(","))
            except ValueError:
                print("error: --indices must be i,j,k,l", file=sys.stderr)
                return 2
            indices = [TetradIndex(i, j, k, l)]
        else:
            print("error: provide --indices or --all", file=sys.stderr)
            return 2
        out.write("i\tj\tk\tl\tgamma\tt\tp_regular\tp_singular\tregime\n")
        for idx in indices:
            rep = wald_tetrad_test(data, idx)
            out.write(
                f"{idx.i}\t{idx.j}\t{idx.k}\t{idx.l}\t{rep.gamma_hat:.10g}\t"
                f"{rep.t_stat:.10g}\t{rep.p_regular:.10g}\t{rep.p_singular:.10g}\t"
                f"{rep.regime_hint}\n"
            )
        return 0

    if args.command == "verify":
        results = run_suite(args.suite, n=args.n, seed=seed, threads=threads)
        out.write(format_report(results))
        failed = [r for r in results if r.tier == "theorem" and not r.passed]
        for r in failed:
            print(f"FAILED theorem-tier check: {r.name}", file=sys.stderr)
        return 1 if failed else 0

    if args.command == "moments":
        from .verify import moment_invariance_check

        phis = [float(tok) for tok in args.phi.split(",")]
        ms = [int(tok) for tok in args.m.split(",")]
        table = moment_invariance_check(args.sigma, phis, ms)
        out.write("m\\phi\t" + "\t".join(f"{p:.12g}" for p in phis) + "\n")
        for r, m in enumerate(ms):
            out.write(
                f"{m}\t" + "\t".join(f"{v:.12g}" for v in table[r]) + "\n"
            )
        return 0

    raise AssertionError(f"unhandled command {args.command}")


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
