"""Command line front end.

Exit codes: ``solve`` 10 (true) / 20 (false); ``validate`` 0 (valid) / 3
(invalid); ``fuzz`` 0 (agreement) / 4 (divergence).  Usage, IO and parse
errors give 1 and internal invariant failures give 2.
"""

from __future__ import annotations

import argparse
import logging
import sys
from typing import List, Optional

from . import certify, oracle
from .engine import Config, InvariantError, solve
from .formula import DQDimacsError, parse_dqdimacs
from .fuzz import fuzz, reproducer_text

EXIT_TRUE, EXIT_FALSE = 10, 20
EXIT_ERROR, EXIT_INTERNAL, EXIT_INVALID, EXIT_DIVERGENCE = 1, 2, 3, 4


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def _bool(text: str) -> bool:
    low = text.lower()
    if low in ("true", "1", "yes"):
        return True
    if low in ("false", "0", "no"):
        return False
    raise argparse.ArgumentTypeError(f"expected true/false, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="dqdef", description="DQBF solving by definition extraction.")
    p.add_argument("-v", "--verbose", action="count", default=0, help="more logging (repeatable)")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("solve", help="decide a DQDIMACS formula")
    s.add_argument("formula")
    s.add_argument("--mode", choices=("cegis", "basic", "oracle"), default="cegis")
    s.add_argument("--default", type=_bool, default=False, metavar="BOOL",
                   help="value assumed for undefined existentials (default: false)")
    s.add_argument("--unates", choices=("off", "syntactic", "semantic"), default="syntactic")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--max-iterations", type=int, default=10 ** 6)
    s.add_argument("--model", metavar="PATH", help="write the model here when the formula is true")
    s.add_argument("--stats", action="store_true", help="print run statistics as comment lines")
    s.add_argument("--debug", action="store_true", help="re-verify interpolants and definitions")

    v = sub.add_parser("validate", help="check a model file against a formula")
    v.add_argument("formula")
    v.add_argument("model")

    e = sub.add_parser("expand", help="print the full universal expansion as DIMACS")
    e.add_argument("formula")

    f = sub.add_parser("fuzz", help="differential test of both engines against the oracle")
    f.add_argument("--profile", choices=sorted(oracle.PROFILES), default="small")
    f.add_argument("--seed", type=int, default=1)
    f.add_argument("--count", type=int, default=100)
    f.add_argument("--reproducer", default="fuzz-repro.dqdimacs", metavar="PATH")
    return p


def _read(path: str) -> str:
    with open(path, "r", encoding="ascii") as fh:
        return fh.read()


def _load(path: str):
    return parse_dqdimacs(_read(path))


def cmd_solve(args, out) -> int:
    dqbf = _load(args.formula)
    if args.mode == "oracle":
        verdict = oracle.brute_solve(dqbf)
        value = verdict.value
        model = oracle.model_from_tables(dqbf, verdict) if value else None
        stats = {}
    else:
        cfg = Config(mode=args.mode, default=args.default, unates=args.unates, seed=args.seed,
                     max_iterations=args.max_iterations, debug=args.debug)
        result = solve(dqbf, cfg)
        value, model, stats = result.value, result.model, result.stats
    if args.stats:
        for key in ("arbiters", "forcing", "iterations", "arbiter_clauses", "definitions"):
            if key in stats:
                out.write(f"c {key}={stats[key]}\n")
    out.write("s TRUE\n" if value else "s FALSE\n")
    if value and args.model:
        with open(args.model, "w", encoding="ascii") as fh:
            fh.write(certify.emit_model(dqbf, model))
    return EXIT_TRUE if value else EXIT_FALSE


def cmd_validate(args, out) -> int:
    dqbf = _load(args.formula)
    report = certify.validate_model(dqbf, _read(args.model))
    if report.valid:
        out.write("s VALID\n")
        return 0
    out.write(f"c {report.reason}\n")
    if report.failing_clause is not None:
        out.write(f"c failing clause {report.failing_clause}: {' '.join(map(str, report.clause))} 0\n")
        witness = " ".join(str(v if val else -v) for v, val in sorted(report.witness.items()))
        out.write(f"c witness {witness}\n")
    out.write("s INVALID\n")
    return EXIT_INVALID


def cmd_expand(args, out) -> int:
    dqbf = _load(args.formula)
    clauses = oracle.expand(dqbf)
    ids = {}
    for c in clauses:
        for v, _ in c:
            ids.setdefault(v, len(ids) + 1)
    for v, i in ids.items():
        ann = " ".join(f"{u}={int(val)}" for u, val in v.annotation)
        out.write(f"c {i} = {v.base}[{ann}]\n")
    out.write(f"p cnf {len(ids)} {len(clauses)}\n")
    for c in clauses:
        out.write(" ".join(str(ids[v] if pol else -ids[v]) for v, pol in c) + " 0\n")
    return 0


def cmd_fuzz(args, out) -> int:
    if args.count <= 0:
        out.write("c no instances requested\n")
        return 0
    report = fuzz(oracle.PROFILES[args.profile], args.seed, args.count)
    out.write(f"c instances={report.count} true={report.true} false={report.false} "
              f"models={report.models_checked}\n")
    if report.ok:
        out.write("s AGREE\n")
        return 0
    d = report.divergences[0]
    with open(args.reproducer, "w", encoding="ascii") as fh:
        fh.write(reproducer_text(d))
    out.write(f"c seed {d.seed}: {d.reason}\nc reproducer written to {args.reproducer}\n")
    out.write("s DIVERGE\n")
    return EXIT_DIVERGENCE


COMMANDS = {"solve": cmd_solve, "validate": cmd_validate, "expand": cmd_expand, "fuzz": cmd_fuzz}


def main(argv: Optional[List[str]] = None, out=None) -> int:
    out = sys.stdout if out is None else out
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2), format="c %(levelname)s %(message)s")
    try:
        return COMMANDS[args.command](args, out)
    except (OSError, UnicodeDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except (DQDimacsError, certify.ModelFormatError, oracle.OracleCapError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except (InvariantError, certify.ModelSupportError) as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
