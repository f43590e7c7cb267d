"""Command-line interface.

Exit codes: 0 ok, 1 usage, 2 parse, 3 validation, 4 enumeration budget,
5 internal invariant (including an oracle disagreement).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import __version__
from .documents import dumps, emit_instance, parse_document, parse_policy
from .errors import (
    BudgetExceeded,
    DimensionMismatch,
    DocumentError,
    InvariantViolation,
    LexiplanError,
    ValidationFailed,
)
from .evaluation import check_policy
from .generators import generate_hazard_grid, generate_random, random_rewards, random_taus
from .lex import flmdp_solve
from .model import LEX_EPS
from .quantile import QuantileObjective, mqo_solve
from .reports import eval_report, lex_report, mqo_report, oracle_report

EXIT_OK, EXIT_USAGE, EXIT_PARSE, EXIT_VALIDATION, EXIT_BUDGET, EXIT_INTERNAL = range(6)


class UsageError(LexiplanError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise DocumentError(exc.strerror or str(exc), path) from None


def _write(text: str, out: str | None):
    if out and out != "-":
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def cmd_validate(args) -> int:
    doc = parse_document(_read(args.file))
    inst = doc.instance
    print(
        f"OK {inst.name}: {inst.num_states} states, {inst.num_actions} actions, "
        f"horizon {inst.horizon}, {inst.num_ends} end states"
    )
    return EXIT_OK


def cmd_solve_lex(args) -> int:
    doc = parse_document(_read(args.file))
    if doc.rewards is None:
        raise UsageError("solve-lex needs a document with rewards")
    sol = flmdp_solve(doc.instance, doc.rewards, args.eps)
    _write(dumps(lex_report(doc.instance, sol, args.eps, args.timings)), args.output)
    return EXIT_OK


def cmd_solve_mqo(args) -> int:
    doc = parse_document(_read(args.file))
    objective = QuantileObjective(tuple(args.tau)) if args.tau else doc.objective
    if objective is None:
        raise UsageError("solve-mqo needs objective taus in the document or via --tau")
    rep = mqo_solve(doc.instance, objective, args.eps)
    _write(dumps(mqo_report(doc.instance, rep, args.eps, args.timings)), args.output)
    return EXIT_OK


def cmd_eval(args) -> int:
    doc = parse_document(_read(args.file))
    policy = check_policy(doc.instance, parse_policy(_read(args.policy)))
    taus = args.tau or (doc.objective.taus if doc.objective else ())
    _write(dumps(eval_report(doc.instance, policy, taus, doc.rewards)), args.output)
    return EXIT_OK


def cmd_oracle(args) -> int:
    doc = parse_document(_read(args.file))
    if doc.rewards is None and doc.objective is None:
        raise UsageError("oracle needs rewards or objective taus in the document")
    rep = oracle_report(doc.instance, doc.rewards, doc.objective, args.scheme, args.budget, args.eps)
    _write(dumps(rep), args.output)
    return EXIT_OK if rep["verdict"] == "AGREE" else EXIT_INTERNAL


def cmd_gen(args) -> int:
    if args.family == "random":
        inst = generate_random(
            args.states, args.actions, args.horizon, args.ends, args.density, args.seed, args.name
        )
    else:
        hazards = args.hazards
        if args.hazard_cell:
            hazards = [tuple(c) for c in args.hazard_cell]
        inst = generate_hazard_grid(
            args.width, args.height, args.horizon, hazards, args.slip, args.seed, name=args.name
        )
    rewards = random_rewards(inst, args.levels, args.seed) if args.levels else None
    objective = None
    if args.tau:
        objective = QuantileObjective(tuple(args.tau))
    elif args.taus:
        objective = QuantileObjective(random_taus(args.taus, args.seed))
    _write(emit_instance(inst, rewards, objective), args.output)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="lexiplan", description="Lexicographic and multi-quantile MDP planning.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    v = sub.add_parser("validate", help="check an instance document")
    v.add_argument("file")
    v.set_defaults(func=cmd_validate)

    def solver_opts(sp):
        sp.add_argument("file")
        sp.add_argument("--eps", type=float, default=LEX_EPS)
        sp.add_argument("-o", "--output")
        sp.add_argument("--timings", action="store_true", help="include wall-clock timings")

    s = sub.add_parser("solve-lex", help="solve with the document's reward levels")
    solver_opts(s)
    s.set_defaults(func=cmd_solve_lex)

    m = sub.add_parser("solve-mqo", help="optimize the document's quantile objective")
    solver_opts(m)
    m.add_argument("--tau", type=float, action="append", help="override the objective")
    m.set_defaults(func=cmd_solve_mqo)

    e = sub.add_parser("eval", help="evaluate a fixed policy")
    e.add_argument("file")
    e.add_argument("--policy", required=True, help="policy document or solve report")
    e.add_argument("--tau", type=float, action="append")
    e.add_argument("-o", "--output")
    e.set_defaults(func=cmd_eval)

    o = sub.add_parser("oracle", help="compare the solvers with brute-force enumeration")
    o.add_argument("file")
    o.add_argument("--scheme", type=int, choices=(1, 2))
    o.add_argument("--budget", type=int, help="max policies (default $LEXIPLAN_BUDGET or 1e7)")
    o.add_argument("--eps", type=float, default=LEX_EPS)
    o.add_argument("-o", "--output")
    o.set_defaults(func=cmd_oracle)

    g = sub.add_parser("gen", help="generate an instance document")
    g.add_argument("family", choices=("random", "grid"))
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--horizon", type=int, default=3)
    g.add_argument("--name")
    g.add_argument("--states", type=int, default=5)
    g.add_argument("--actions", type=int, default=2)
    g.add_argument("--ends", type=int, default=2)
    g.add_argument("--density", type=float, default=1.0)
    g.add_argument("--width", type=int, default=3)
    g.add_argument("--height", type=int, default=3)
    g.add_argument("--slip", type=float, default=0.0)
    g.add_argument("--hazards", type=int, default=0, help="number of random hazard cells")
    g.add_argument("--hazard-cell", type=int, nargs=2, action="append", metavar=("X", "Y"))
    g.add_argument("--levels", type=int, default=0, help="random {0,1} reward levels to attach")
    g.add_argument("--taus", type=int, default=0, help="random objective taus to attach")
    g.add_argument("--tau", type=float, action="append", help="explicit objective tau")
    g.add_argument("-o", "--output")
    g.set_defaults(func=cmd_gen)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except DocumentError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except ValidationFailed as exc:
        print(f"validation failed: {exc.context}", file=sys.stderr)
        for v in exc.violations:
            print(f"  {v}", file=sys.stderr)
        return EXIT_VALIDATION
    except DimensionMismatch as exc:
        print(f"validation failed: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except BudgetExceeded as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except InvariantViolation as exc:
        print(f"internal invariant violated: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except LexiplanError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
