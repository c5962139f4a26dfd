"""``hjlab`` command line entry point.

Exit status: 0 when every check passes, 1 when a check fails, 2 for usage
or configuration errors (bad flags, unreadable input files).
"""

from __future__ import annotations

import argparse
import os
import sys

from .grid import GridError
from .interval import DEFAULT_PRECISION
from .report import emit_report
from .suites import RunConfig, run_suite

EXIT_PASS, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _default_workers() -> int:
    raw = os.environ.get("HJLAB_WORKERS")
    if raw is None:
        return 1
    try:
        return int(raw)
    except ValueError:
        return -1  # rejected by RunConfig


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--workers", type=int, default=None, help="worker threads (default $HJLAB_WORKERS or 1)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--precision", type=int, default=DEFAULT_PRECISION, help="interval precision in bits (>= 32)")
    p.add_argument("--out", default=None, help="report path (default stdout)")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = _Parser(prog="hjlab", description="Verification workbench for two-color Hales-Jewett bounds on [4]^n.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("lemma1", parents=[common], help="chain bound on [2]^n")
    p.add_argument("--n", type=int)
    p.add_argument("--kappa", type=int)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--exhaustive", action="store_true")
    g.add_argument("--samples", type=int)

    p = sub.add_parser("lemma2", parents=[common], help="lifted bound on [4]^n and density identities")
    p.add_argument("--n", type=int)
    p.add_argument("--kappa", type=int)
    p.add_argument("--samples", type=int)

    p = sub.add_parser("gadget", parents=[common], help="15-line parity gadget")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--check-incidence", action="store_true")
    g.add_argument("--exhaustive", action="store_true")
    p.add_argument("--checkpoint")

    p = sub.add_parser("lemma4", parents=[common], help="odd-line bound via embeddings")
    p.add_argument("--n", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--seeds", type=int, nargs="+")

    p = sub.add_parser("multiplicity", parents=[common], help="line multiplicities under embeddings")
    p.add_argument("--n", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--oracle", action="store_true", help="cross-check against brute-force composition")
    p.add_argument("--sample", type=int, help="oracle-check only this many random lines")

    p = sub.add_parser("bound", parents=[common], help="certified final margin")
    bsub = p.add_subparsers(dest="action", parser_class=_Parser)
    b = bsub.add_parser("certify", parents=[common])
    b.add_argument("--n", type=int, required=True)
    b.add_argument("--kappa", type=int, required=True)
    b = bsub.add_parser("search", parents=[common])
    b.add_argument("--kappa-min", type=int, default=4)
    b.add_argument("--kappa-max", type=int, default=400)
    b.add_argument("--kappa-step", type=int, default=4)

    p = sub.add_parser("lower", parents=[common], help="line-free colorings")
    lsub = p.add_subparsers(dest="action", parser_class=_Parser)
    b = lsub.add_parser("ap-free", parents=[common])
    b.add_argument("--N", type=int, default=34)
    b.add_argument("--t", type=int, default=4)
    b.add_argument("--save", help="write the witness as a 0/1 string")
    b = lsub.add_parser("lift", parents=[common])
    b.add_argument("--t", type=int, default=4)
    b.add_argument("--n", type=int, default=11)
    b.add_argument("--N", type=int, help="search a base of this length when --base is absent")
    b.add_argument("--base", help="0/1 string file with the base coloring")
    b.add_argument("--save", help="write the lifted coloring (HJC1)")
    b.add_argument("--checkpoint")
    b = lsub.add_parser("verify", parents=[common])
    b.add_argument("--coloring", required=True, help="HJC1 coloring file")
    b.add_argument("--checkpoint")

    sub.add_parser("all", parents=[common], help="every acceptance check")
    return parser


_GLOBAL = ("command", "workers", "seed", "precision", "out")


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    options = {k: v for k, v in vars(ns).items() if k not in _GLOBAL and v not in (None, False)}
    workers = ns.workers if ns.workers is not None else _default_workers()
    return RunConfig(ns.command, options, workers, ns.seed, ns.precision, ns.out)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        cfg = config_from_args(ns)
        report = run_suite(cfg)
    except (GridError, OSError) as e:
        print(f"hjlab: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    try:
        emit_report(report, cfg.out)
    except OSError as e:
        print(f"hjlab: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    for rec in report.records:
        print(f"{'PASS' if rec.passed else 'FAIL'}  {rec.name}  ({rec.elapsed:.2f}s)", file=sys.stderr)
    return EXIT_PASS if report.passed else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
