"""Command-line front end.

Everything goes to stdout as JSON; diagnostics go to stderr.  Exit codes:
0 stable/found, 1 unstable/none, 2 error (including an exceeded budget).
"""

from __future__ import annotations

import argparse
import json
import sys

from . import construct, fpt, generators, marriage, oracle
from .model import (
    DEFAULT_BUDGET,
    BudgetExceeded,
    ModelError,
    _load_json,
    classify,
    instance_from_json,
    instance_to_json,
    outcome_from_json,
    validate_outcome,
)
from .verify import Concept, find_witness

CONCEPT_NAMES = [c.value for c in Concept]
METHODS = ("auto", "ilp", "oracle", "construct")


class UsageError(Exception):
    pass


def _emit(data: dict) -> None:
    sys.stdout.write(json.dumps(data, indent=2) + "\n")


def _read(path: str) -> dict:
    if path == "-":
        return _load_json(sys.stdin.read())
    try:
        with open(path, encoding="utf-8") as fh:
            return _load_json(fh.read())
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def load_any(path: str):
    """A roommate or a marriage instance, depending on the file's ``kind``."""
    data = _read(path)
    if data.get("kind") == "marriage":
        return marriage.marriage_from_json(data)
    return instance_from_json(data)


def _outcome_json(outcome) -> dict | None:
    return None if outcome is None else outcome.to_json()


# -- commands ----------------------------------------------------------------------

def cmd_check(args) -> int:
    inst = load_any(args.instance)
    outcome = outcome_from_json(_read(args.outcome))
    concept = Concept(args.concept)
    if isinstance(inst, marriage.MarriageInstance):
        if concept not in marriage.CONCEPTS:
            raise UsageError(f"{concept.value} is not defined for marriage instances")
        witness = marriage.marriage_witness(inst, outcome, concept)
    else:
        validate_outcome(inst, outcome)
        witness = find_witness(inst, outcome, concept, args.max_outcomes)
    _emit({
        "concept": concept.value,
        "status": "stable" if witness is None else "unstable",
        "witness": None if witness is None else witness.to_json(),
    })
    return 0 if witness is None else 1


def _solve_roommate(inst, concept: Concept, method: str, budget: int):
    if method == "auto":
        method = "construct" if construct.constructor_for(inst, concept) else "ilp"
    if method == "construct":
        if construct.constructor_for(inst, concept) is None:
            raise UsageError(f"no direct construction for {concept.value} on this instance")
        return method, construct.construct(inst, concept, budget)
    if method == "ilp":
        if concept not in fpt.SUPPORTED:
            raise UsageError(f"the ILP method does not handle {concept.value}; use construct or oracle")
        return method, fpt.solve_existence(inst, concept)
    return method, oracle.oracle_exists(inst, concept, budget)


def _solve_marriage(inst, concept: Concept, method: str, budget: int):
    if concept not in marriage.CONCEPTS:
        raise UsageError(f"{concept.value} is not defined for marriage instances")
    if method == "construct":
        raise UsageError("there is no direct construction for marriage instances")
    if method == "oracle":
        return method, oracle.marriage_oracle_exists(inst, concept, budget)
    return "ilp", marriage.solve_marriage_existence(inst, concept)


def cmd_solve(args) -> int:
    inst = load_any(args.instance)
    concept = Concept(args.concept)
    if isinstance(inst, marriage.MarriageInstance):
        method, outcome = _solve_marriage(inst, concept, args.method, args.max_outcomes)
    else:
        method, outcome = _solve_roommate(inst, concept, args.method, args.max_outcomes)
    _emit({
        "concept": concept.value,
        "method": method,
        "status": "found" if outcome is not None else "none exists",
        "outcome": _outcome_json(outcome),
    })
    return 0 if outcome is not None else 1


def cmd_enumerate(args) -> int:
    inst = load_any(args.instance)
    if isinstance(inst, marriage.MarriageInstance):
        outs = list(oracle.enumerate_marriage_outcomes(inst, args.max_outcomes))
    else:
        outs = list(oracle.enumerate_outcomes(inst, args.max_outcomes))
    _emit({"count": len(outs), "outcomes": [o.to_json() for o in outs]})
    return 0


def cmd_classify(args) -> int:
    inst = load_any(args.instance)
    flags = classify(inst.roommate if isinstance(inst, marriage.MarriageInstance) else inst)
    _emit({"strict": flags.strict, "single_peaked": flags.single_peaked, "dichotomous": flags.dichotomous})
    return 0


def cmd_generate(args) -> int:
    kind = args.kind
    if kind == "random":
        if args.marriage:
            inst = generators.random_marriage_instance(args.s, args.k, args.pref_class, args.red_share, args.seed)
            _emit(marriage.marriage_to_json(inst))
            return 0
        reds = args.reds if args.reds is not None else (args.s * args.k) // 2
        inst = generators.random_instance(args.s, args.k, args.pref_class, reds, args.seed)
    elif kind in ("anon-core", "anon-nash"):
        if not args.input:
            raise UsageError(f"generate {kind} needs an anonymous game file")
        game = oracle.AnonymousGame.from_json(_read(args.input))
        inst = generators.reduce_anon_core(game) if kind == "anon-core" else generators.reduce_anon_nash(game)
    else:
        if not args.input:
            raise UsageError("generate x3c needs an X3C file")
        inst = generators.reduce_x3c(generators.X3CInstance.from_json(_read(args.input)))
    if args.break_ties:
        inst = generators.break_ties(inst)
    _emit(instance_to_json(inst))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="roomdiv", description="Stable outcomes for diversity-driven room assignment.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--max-outcomes", type=int, default=DEFAULT_BUDGET,
                        help="budget for exhaustive enumeration (default %(default)s)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", parents=[common], help="check an outcome against a stability notion")
    p.add_argument("instance")
    p.add_argument("outcome")
    p.add_argument("concept", choices=CONCEPT_NAMES)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("solve", parents=[common], help="find a stable outcome or report that none exists")
    p.add_argument("instance")
    p.add_argument("concept", choices=CONCEPT_NAMES)
    p.add_argument("--method", choices=METHODS, default="auto")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("enumerate", parents=[common], help="list all outcomes up to interchangeable agents")
    p.add_argument("instance")
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("classify", parents=[common], help="report the preference classes of an instance")
    p.add_argument("instance")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("generate", help="emit a generated instance")
    p.add_argument("kind", choices=("anon-core", "anon-nash", "x3c", "random"))
    p.add_argument("input", nargs="?", help="anonymous game or X3C file")
    p.add_argument("--s", type=int, default=2)
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--pref-class", choices=generators.PREF_CLASSES, default="unrestricted")
    p.add_argument("--reds", type=int, default=None, help="number of red agents (default: half)")
    p.add_argument("--marriage", action="store_true", help="random marriage instance instead")
    p.add_argument("--red-share", type=float, default=0.5, help="red probability for --marriage")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--break-ties", action="store_true", help="linearise indifference classes")
    p.set_defaults(func=cmd_generate)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ModelError, UsageError, ValueError) as exc:
        print(f"roomdiv: error: {exc}", file=sys.stderr)
    except BudgetExceeded as exc:
        print(f"roomdiv: budget exceeded: {exc}", file=sys.stderr)
    return 2


if __name__ == "__main__":
    sys.exit(main())
