"""Structure-only DOT and canonical JSON rendering of automata."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable

from .automata import CounterState
from .formula import DistributedSignature, format_valuation
from .words import GlobalLetter


@dataclass
class AutomatonGraph:
    """Automaton flattened to strings: what both export formats print."""

    states: list = field(default_factory=list)  # dicts: id, label, initial, accepting
    edges: list = field(default_factory=list)  # dicts: from, letter, to
    alphabet: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"states": self.states, "edges": self.edges, "alphabet": self.alphabet}


def letter_formatter(sig: DistributedSignature | None = None, agent: str | None = None) -> Callable:
    """Render local valuations and global letters; other letters use ``str``."""

    def fmt(letter) -> str:
        if isinstance(letter, GlobalLetter):
            parts = [f"{a}:{fmt_local(letter[a], a)}" for a in letter]
            return "{" + ", ".join(parts) + "}"
        return fmt_local(letter, agent)

    def fmt_local(symbol, who) -> str:
        if isinstance(symbol, frozenset):
            if sig is not None and who is not None:
                return format_valuation(symbol, who, sig)
            return "{" + ",".join(sorted(symbol)) + "}"
        return str(symbol)

    return fmt


def state_text(s) -> str:
    if isinstance(s, CounterState):
        return f"{state_text(s.state)} #{s.counter}"
    if isinstance(s, tuple):
        return "⟨" + ", ".join(state_text(x) for x in s) + "⟩"
    label = getattr(s, "label", None)
    return label() if callable(label) else str(s)


def graph_of_automaton(A, fmt: Callable = str) -> AutomatonGraph:
    """Explicit NBA or GNBA (anything with ``states`` and ``acceptance_sets``)."""
    sets = A.acceptance_sets()
    names = list(getattr(A, "acceptance_names", None) or ["F"] * len(sets))
    ids = {q: f"s{k}" for k, q in enumerate(A.states)}
    initial = set(A.initial_states)
    g = AutomatonGraph(alphabet=[fmt(a) for a in A.alphabet])
    for q in A.states:
        g.states.append(
            {
                "id": ids[q],
                "label": state_text(q),
                "initial": q in initial,
                "accepting": [n for n, F in zip(names, sets) if q in F],
            }
        )
    for q in A.states:
        for a, q2 in A.transitions(q):
            g.edges.append({"from": ids[q], "letter": fmt(a), "to": ids[q2]})
    return g


def graph_of_product(D, explicit, fmt: Callable = str, alphabet=None) -> AutomatonGraph:
    """Explored part of a product (see :func:`dtl.product.explore_product`)."""
    obligations = D.obligations()
    multi = len(obligations) != len(D.agents)
    names = [f"{a}:{n}" if multi else f"F_{a}" for a, n, _ in obligations]
    letters = alphabet if alphabet is not None else sorted(
        {lab for _, lab, _ in explicit.edges}, key=lambda x: (len(x), fmt(x))
    )
    g = AutomatonGraph(alphabet=[fmt(a) for a in letters])
    initial = set(explicit.initial)
    for k, q in enumerate(explicit.states):
        g.states.append(
            {
                "id": f"s{k}",
                "label": state_text(q),
                "initial": k in initial,
                "accepting": [n for n, (_, _, f) in zip(names, obligations) if f(q)],
            }
        )
    for u, lab, v in explicit.edges:
        g.edges.append({"from": f"s{u}", "letter": fmt(lab), "to": f"s{v}"})
    return g


def to_json(g: AutomatonGraph) -> str:
    return json.dumps(g.to_dict(), indent=2, ensure_ascii=False) + "\n"


def from_json(text: str) -> AutomatonGraph:
    data = json.loads(text)
    for key in ("states", "edges", "alphabet"):
        if key not in data:
            raise ValueError(f"automaton JSON lacks {key!r}")
    return AutomatonGraph(data["states"], data["edges"], data["alphabet"])


def _quote(text: str) -> str:
    return '"' + text.replace('"', '\\"') + '"'


def to_dot(g: AutomatonGraph, name: str = "automaton") -> str:
    lines = [f"digraph {_quote(name)} {{"]
    for s in g.states:
        shape = "doublecircle" if s["accepting"] else "circle"
        extra = ", ".join(s["accepting"])
        label = s["label"] + (f"\\n[{extra}]" if extra else "")
        lines.append(f"  {s['id']} [shape={shape}, label={_quote(label)}];")
    for s in g.states:
        if s["initial"]:
            lines.append(f"  start_{s['id']} [shape=point];")
            lines.append(f"  start_{s['id']} -> {s['id']};")
    for e in g.edges:
        lines.append(f"  {e['from']} -> {e['to']} [label={_quote(e['letter'])}];")
    lines.append("}")
    return "\n".join(lines) + "\n"
