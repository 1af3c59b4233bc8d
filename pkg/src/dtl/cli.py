"""Command line front-end: ``dtl sat``, ``dtl check``, ``dtl export``.

Exit codes: 0 success (SAT / both verdicts positive / export written),
1 negative answer (UNSAT / both verdicts negative), 2 usage, parse or
input error (including unfair words), 3 resource limit, 4 internal
disagreement between the semantic and the automaton verdict.
"""

from __future__ import annotations

import argparse
import json
import sys

from .errors import DtlError, ParseError, ResourceLimitExceeded, SignatureError
from .export import graph_of_automaton, graph_of_product, letter_formatter, to_dot, to_json
from .formula import Not, render
from .io import read_spec, read_word, word_to_json
from .product import (
    build_product,
    decide,
    dnba_lasso_accepts,
    dtl_automaton,
    ExplicitProduct,
    explore_product,
    used_signature,
)
from .semantics import derive_structure, sat_global
from .tableau import build_local_gnba
from .words import starved_agents

EXIT_OK, EXIT_NO, EXIT_USAGE, EXIT_RESOURCE, EXIT_INTERNAL = 0, 1, 2, 3, 4
DEFAULT_MAX_STATES = 200_000
DEFAULT_TIMEOUT = 600.0


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _format_word(w, sig) -> str:
    fmt = letter_formatter(sig)
    pre = " ".join(fmt(a) for a in w.prefix)
    loop = " ".join(fmt(a) for a in w.loop)
    return (pre + " " if pre else "") + f"({loop})^ω"


def _need_formula(spec):
    if spec.formula is None:
        raise ParseError("this command needs a 'formula:' line", 1, 1)
    return spec.formula


def cmd_sat(args) -> int:
    spec = read_spec(args.spec)
    alpha = _need_formula(spec)
    if args.negate:
        alpha = Not(alpha)
    report = decide(alpha, spec.sig, method=args.method, max_states=args.max_states,
                    timeout=args.timeout, verify=True)
    result = {"formula": render(alpha), "satisfiable": report.satisfiable}
    if report.satisfiable:
        w = report.witness.word
        if args.verify and not sat_global(derive_structure(w, spec.sig), alpha):
            print("internal error: witness is not a model", file=sys.stderr)
            return EXIT_INTERNAL
        result["witness"] = json.loads(word_to_json(w, spec.sig))
        if args.witness:
            with open(args.witness, "w", encoding="utf-8") as fh:
                fh.write(word_to_json(w, spec.sig))
    if args.json:
        print(json.dumps(result, indent=2, sort_keys=True))
    elif report.satisfiable:
        print("SAT")
        print("witness:", _format_word(report.witness.word, spec.sig))
    else:
        print("UNSAT")
    return EXIT_OK if report.satisfiable else EXIT_NO


def cmd_check(args) -> int:
    spec = read_spec(args.spec)
    alpha = _need_formula(spec)
    w = read_word(args.word, spec.sig)
    starved = starved_agents(w, spec.sig.agents)
    if starved:
        print(
            f"error: word is not fair: agent(s) {', '.join(starved)} never participate in the loop",
            file=sys.stderr,
        )
        return EXIT_USAGE
    semantic = sat_global(derive_structure(w, spec.sig), alpha)
    small = used_signature(alpha, spec.sig)
    restricted = w.map(lambda a: type(a)({x: a[x] & small.props[x] for x in a}))
    verdict = dnba_lasso_accepts(dtl_automaton(alpha, small, degeneralized=False), restricted)
    agree = semantic == bool(verdict)
    result = {
        "formula": render(alpha),
        "model": semantic,
        "accepted": bool(verdict),
        "agree": agree,
    }
    if args.json:
        print(json.dumps(result, indent=2, sort_keys=True))
    else:
        print(f"model:    {'yes' if semantic else 'no'}")
        print(f"accepted: {'yes' if verdict else 'no'}")
    if not agree:
        print("internal error: semantic and automaton verdicts disagree", file=sys.stderr)
        return EXIT_INTERNAL
    return EXIT_OK if semantic else EXIT_NO


def cmd_export(args) -> int:
    spec = read_spec(args.spec)
    stage = args.stage
    if stage.startswith("local:"):
        agent = stage.split(":", 1)[1]
        if agent not in spec.sig.agents:
            raise SignatureError(f"unknown agent {agent!r}")
        if agent in spec.automata and spec.formula is None:
            A = spec.automata[agent]
            g = graph_of_automaton(A)
        else:
            alpha = _need_formula(spec)
            small = used_signature(alpha, spec.sig)
            g = graph_of_automaton(build_local_gnba(alpha, agent, small), letter_formatter(small, agent))
    elif stage in ("product", "constrained"):
        if stage == "product" and spec.automata:
            if set(spec.automata) != set(spec.sig.agents):
                raise SignatureError("every agent needs an 'nba' line for a product export")
            D = build_product(spec.automata, spec.sig.agents)
            fmt = letter_formatter()
            g = graph_of_product(D, _all_states(D), fmt, D.alphabet)
        else:
            alpha = _need_formula(spec)
            small = used_signature(alpha, spec.sig)
            D = dtl_automaton(alpha, small, degeneralized=True)
            if stage == "product":
                # the same components without the communication constraints
                D = build_product(D.components, D.agents, disjoint_alphabets=False)
            explicit = explore_product(D, args.max_states, trim=(stage == "constrained"))
            g = graph_of_product(D, explicit, letter_formatter(small))
    else:
        raise SignatureError(f"unknown stage {stage!r} (use local:<agent>, product or constrained)")
    text = to_json(g) if args.format == "json" else to_dot(g)
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(text)
    print(f"wrote {len(g.states)} states, {len(g.edges)} edges to {args.out}")
    return EXIT_OK


def _all_states(D):
    """Every product state (not only reachable ones), with all edges."""
    states = D.states
    index = {q: k for k, q in enumerate(states)}
    initial = [index[q] for q in D.initial_states]
    edges = [(index[q], lab, index[q2]) for q in states for lab, q2 in D.transitions(q)]
    return ExplicitProduct(states, initial, edges)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="dtl", description="Satisfiability and model checking for anchored DTL.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("sat", help="decide satisfiability of the formula of the input file")
    s.add_argument("spec")
    s.add_argument("--negate", action="store_true", help="check the negated formula")
    s.add_argument("--witness", metavar="PATH", help="write the witness word as JSON")
    s.add_argument("--verify", action="store_true", help="re-check the witness semantically")
    s.add_argument("--max-states", type=int, default=DEFAULT_MAX_STATES)
    s.add_argument("--timeout", type=float, default=DEFAULT_TIMEOUT, help="seconds")
    s.add_argument("--method", choices=("scc", "ndfs"), default="scc")
    s.add_argument("--json", action="store_true")
    s.set_defaults(func=cmd_sat)

    c = sub.add_parser("check", help="check a lasso word against the formula of the input file")
    c.add_argument("spec")
    c.add_argument("--word", required=True)
    c.add_argument("--json", action="store_true")
    c.set_defaults(func=cmd_check)

    e = sub.add_parser("export", help="write an automaton as DOT or JSON")
    e.add_argument("spec")
    e.add_argument("--stage", required=True, help="local:<agent>, product or constrained")
    e.add_argument("--format", choices=("dot", "json"), default="dot")
    e.add_argument("--out", required=True)
    e.add_argument("--max-states", type=int, default=DEFAULT_MAX_STATES)
    e.set_defaults(func=cmd_export)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ResourceLimitExceeded as exc:
        print(f"resource limit: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except (DtlError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
