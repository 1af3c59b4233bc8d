"""Spec files and word files.

Spec file (one declaration per line, ``#`` starts a comment)::

    agents: i, j
    props i: p, r
    props j: q
    formula: @i[G p] & @j[F q]

Optionally explicit Büchi automata per agent (letters are bare tokens)::

    nba 1: init q0; accept q1; q0 -0-> q1; q0 -1-> q0

Word file (JSON)::

    {"prefix": [{"i": {"p": true, "r": false}}],
     "loop":   [{"i": {"p": false, "r": false}, "j": {"q": true}}]}
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field

from .automata import Nba
from .errors import ParseError, SignatureError
from .formula import DistributedSignature, Formula
from .parser import parse_global
from .words import GlobalLetter, LassoWord

_LINE = re.compile(r"\s*(agents|props|formula|nba)\b\s*([A-Za-z0-9_]*)\s*:(.*)\Z")
_EDGE = re.compile(r"\s*([A-Za-z0-9_]+)\s*-([^->\s]+)->\s*([A-Za-z0-9_]+)\s*\Z")


@dataclass
class SpecFile:
    sig: DistributedSignature
    formula: Formula | None
    automata: dict = field(default_factory=dict)  # agent -> Nba


def _names(text: str, line: int, col: int) -> list[str]:
    out = [n.strip() for n in text.split(",")] if text.strip() else []
    for n in out:
        if not re.fullmatch(r"[A-Za-z0-9_]+", n):
            raise ParseError(f"invalid identifier {n!r}", line, col)
    return out


def parse_spec(text: str) -> SpecFile:
    agents = None
    props: dict[str, list[str]] = {}
    formula_src = None
    nba_src: dict[str, tuple[str, int, int]] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        if not line.strip():
            continue
        m = _LINE.match(line)
        if m is None:
            raise ParseError("expected 'agents:', 'props <agent>:', 'formula:' or 'nba <agent>:'",
                             lineno, len(line) - len(line.lstrip()) + 1)
        kind, who, body = m.group(1), m.group(2), m.group(3)
        col = m.start(3) + 1
        if kind == "agents":
            if agents is not None:
                raise ParseError("agents declared twice", lineno, 1)
            agents = _names(body, lineno, col)
        elif kind == "props":
            if not who:
                raise ParseError("props needs an agent: 'props <agent>: ...'", lineno, 1)
            if who in props:
                raise ParseError(f"props of {who!r} declared twice", lineno, 1)
            props[who] = _names(body, lineno, col)
        elif kind == "formula":
            if formula_src is not None:
                raise ParseError("formula declared twice", lineno, 1)
            formula_src = (body, lineno, col)
        else:
            if not who:
                raise ParseError("nba needs an agent: 'nba <agent>: ...'", lineno, 1)
            nba_src[who] = (body, lineno, col)
    if agents is None:
        raise ParseError("missing 'agents:' line", 1, 1)
    try:
        sig = DistributedSignature(agents, props)
    except SignatureError as exc:
        raise ParseError(str(exc), 1, 1) from exc
    formula = None
    if formula_src is not None:
        body, lineno, col = formula_src
        try:
            formula = parse_global(body, sig)
        except ParseError as exc:
            column = exc.column + (col - 1 if exc.line == 1 else 0)
            raise ParseError(exc.message, lineno + exc.line - 1, column) from exc
    automata = {}
    for who, (body, lineno, col) in nba_src.items():
        if who not in sig.agents:
            raise ParseError(f"nba for undeclared agent {who!r}", lineno, 1)
        automata[who] = _parse_nba(body, who, lineno, col)
    if formula is None and not automata:
        raise ParseError("missing 'formula:' line", 1, 1)
    return SpecFile(sig, formula, automata)


def _parse_nba(body: str, agent: str, lineno: int, col: int) -> Nba:
    initial, accepting, edges = [], [], []
    for part in body.split(";"):
        part = part.strip()
        if not part:
            continue
        if part.startswith("init "):
            initial += [s.strip() for s in part[5:].split(",")]
        elif part.startswith("accept "):
            accepting += [s.strip() for s in part[7:].split(",")]
        else:
            m = _EDGE.match(part)
            if m is None:
                raise ParseError(f"cannot read automaton item {part!r}", lineno, col)
            edges.append(m.groups())
    states = list(dict.fromkeys(initial + accepting + [e[0] for e in edges] + [e[2] for e in edges]))
    alphabet = list(dict.fromkeys(e[1] for e in edges))
    delta: dict = {}
    for q, a, q2 in edges:
        delta.setdefault(q, {}).setdefault(a, []).append(q2)
    if not initial:
        raise ParseError(f"automaton of {agent!r} has no initial state", lineno, col)
    return Nba(states, alphabet, delta, initial, accepting, name=agent)


def read_spec(path) -> SpecFile:
    with open(path, encoding="utf-8") as fh:
        return parse_spec(fh.read())


# ---------------------------------------------------------------------------
# words


def letter_from_json(obj, sig: DistributedSignature, where: str) -> GlobalLetter:
    if not isinstance(obj, dict) or not obj:
        raise SignatureError(f"{where}: a letter is a nonempty object agent -> valuation")
    items = {}
    for agent, val in obj.items():
        if agent not in sig.agents:
            raise SignatureError(f"{where}: unknown agent {agent!r}")
        if not isinstance(val, dict):
            raise SignatureError(f"{where}: valuation of {agent!r} must be an object")
        expected = sig.props[agent]
        if set(val) != set(expected):
            missing = sorted(expected - set(val))
            extra = sorted(set(val) - expected)
            raise SignatureError(
                f"{where}: valuation of {agent!r} must cover exactly its propositions"
                f" (missing {missing}, foreign {extra})"
            )
        for name, b in val.items():
            if not isinstance(b, bool):
                raise SignatureError(f"{where}: value of {name!r} must be true or false")
        items[agent] = frozenset(n for n, b in val.items() if b)
    return GlobalLetter(items)


def letter_to_json(letter: GlobalLetter, sig: DistributedSignature) -> dict:
    return {a: {p: p in letter[a] for p in sig.sorted_props(a)} for a in letter}


def parse_word(text: str, sig: DistributedSignature) -> LassoWord:
    data = json.loads(text)
    if not isinstance(data, dict) or "loop" not in data:
        raise SignatureError("word file needs a 'loop' list (and optionally 'prefix')")
    prefix = data.get("prefix", [])
    loop = data["loop"]
    if not loop:
        raise SignatureError("the loop of a word must be nonempty")
    return LassoWord(
        tuple(letter_from_json(x, sig, f"prefix[{k}]") for k, x in enumerate(prefix)),
        tuple(letter_from_json(x, sig, f"loop[{k}]") for k, x in enumerate(loop)),
    )


def read_word(path, sig: DistributedSignature) -> LassoWord:
    with open(path, encoding="utf-8") as fh:
        return parse_word(fh.read(), sig)


def word_to_json(w: LassoWord, sig: DistributedSignature) -> str:
    data = {
        "prefix": [letter_to_json(a, sig) for a in w.prefix],
        "loop": [letter_to_json(a, sig) for a in w.loop],
    }
    return json.dumps(data, indent=2) + "\n"
