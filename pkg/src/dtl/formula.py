"""Distributed signatures, formula ASTs, subformulas and closures.

Local formulas belong to one agent (their ``owner``); global formulas have
``owner is None``.  A single :class:`Not` and :class:`Imp` class serve both
levels.  Double negation is removed at construction, so ``Not(Not(f)) is f``
and set membership over closures is purely structural.
"""

from __future__ import annotations

import itertools
import keyword
import re
from typing import Iterable, Iterator, Mapping

from .errors import SignatureError

RESERVED = frozenset({"X", "G", "F", "C", "true", "false"})
_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")
_AGENT = re.compile(r"[A-Za-z0-9_]+\Z")


class DistributedSignature:
    """Agents in a fixed order plus pairwise-disjoint proposition sets."""

    __slots__ = ("agents", "props", "_owner")

    def __init__(self, agents: Iterable[str], props: Mapping[str, Iterable[str]] | None = None):
        agents = tuple(agents)
        if not agents:
            raise SignatureError("a signature needs at least one agent")
        for agent in agents:
            if not isinstance(agent, str) or not _AGENT.match(agent) or agent in RESERVED:
                raise SignatureError(f"invalid agent identifier {agent!r}")
        if len(set(agents)) != len(agents):
            raise SignatureError(f"duplicate agent identifiers in {agents}")
        props = dict(props or {})
        unknown = set(props) - set(agents)
        if unknown:
            raise SignatureError(f"propositions declared for unknown agent(s) {sorted(unknown)}")
        owner: dict[str, str] = {}
        table = {}
        for agent in agents:
            names = frozenset(props.get(agent, ()))
            for name in names:
                if not _IDENT.match(name) or name in RESERVED or keyword.iskeyword(name):
                    raise SignatureError(f"invalid proposition name {name!r}")
                if name in owner:
                    raise SignatureError(
                        f"proposition {name!r} declared for both {owner[name]!r} and {agent!r}"
                    )
                owner[name] = agent
            table[agent] = names
        object.__setattr__(self, "agents", agents)
        object.__setattr__(self, "props", table)
        object.__setattr__(self, "_owner", owner)

    def __setattr__(self, name, value):
        raise AttributeError("DistributedSignature is immutable")

    def __eq__(self, other):
        return (
            isinstance(other, DistributedSignature)
            and self.agents == other.agents
            and self.props == other.props
        )

    def __hash__(self):
        return hash((self.agents, tuple(self.props[a] for a in self.agents)))

    def __repr__(self):
        body = ", ".join(f"{a}: {sorted(self.props[a])}" for a in self.agents)
        return f"DistributedSignature({body})"

    def owner_of(self, prop: str) -> str | None:
        return self._owner.get(prop)

    def sorted_props(self, agent: str) -> tuple[str, ...]:
        return tuple(sorted(self.props[agent]))

    def check_agent(self, agent: str) -> None:
        if agent not in self.props:
            raise SignatureError(f"unknown agent {agent!r}")

    def restrict(self, keep: Iterable[str]) -> "DistributedSignature":
        """Same agents, propositions cut down to ``keep``."""
        keep = set(keep)
        return DistributedSignature(
            self.agents, {a: self.props[a] & keep for a in self.agents}
        )


# ---------------------------------------------------------------------------
# AST

class Formula:
    """Base class; subclasses are immutable and hash-consed by value."""

    __slots__ = ("owner", "_hash", "_size")

    def _key(self) -> tuple:
        raise NotImplementedError

    def _init(self, owner):
        object.__setattr__(self, "owner", owner)
        object.__setattr__(self, "_hash", hash((type(self).__name__,) + self._key()))
        object.__setattr__(self, "_size", 1 + sum(c._size for c in self.children()))

    def __setattr__(self, name, value):
        raise AttributeError(f"{type(self).__name__} is immutable")

    def __eq__(self, other):
        if self is other:
            return True
        return (
            type(self) is type(other)
            and self._hash == other._hash
            and self._key() == other._key()
        )

    def __ne__(self, other):
        return not self == other

    def __hash__(self):
        return self._hash

    def __reduce__(self):
        return (type(self)._rebuild, self._key())

    @classmethod
    def _rebuild(cls, *args):
        return cls(*args)

    @property
    def is_global(self) -> bool:
        return self.owner is None

    @property
    def size(self) -> int:
        return self._size

    def children(self) -> tuple["Formula", ...]:
        return ()

    def __str__(self):
        return render(self)

    def __repr__(self):
        where = "global" if self.owner is None else self.owner
        return f"<{where}: {render(self)}>"


class Prop(Formula):
    __slots__ = ("name",)

    def __init__(self, agent: str, name: str):
        object.__setattr__(self, "name", name)
        self._init(agent)

    def _key(self):
        return (self.owner, self.name)


class Top(Formula):
    """Local truth constant of one agent."""

    __slots__ = ()

    def __init__(self, agent: str):
        self._init(agent)

    def _key(self):
        return (self.owner,)


class Not(Formula):
    __slots__ = ("body",)

    def __new__(cls, body: Formula):
        if isinstance(body, Not):
            return body.body
        return super().__new__(cls)

    def __init__(self, body: Formula):
        if isinstance(body, Not):
            # __new__ already returned the unwrapped formula; nothing to do.
            return
        object.__setattr__(self, "body", body)
        self._init(body.owner)

    def _key(self):
        return (self.body,)

    def children(self):
        return (self.body,)


class Imp(Formula):
    __slots__ = ("left", "right")

    def __init__(self, left: Formula, right: Formula):
        if left.owner != right.owner:
            raise SignatureError(
                f"implication mixes formulas of {left.owner or 'global'} and {right.owner or 'global'}"
            )
        object.__setattr__(self, "left", left)
        object.__setattr__(self, "right", right)
        self._init(left.owner)

    def _key(self):
        return (self.left, self.right)

    def children(self):
        return (self.left, self.right)


class Next(Formula):
    __slots__ = ("body",)

    def __init__(self, body: Formula):
        if body.owner is None:
            raise SignatureError("X applies to local formulas only")
        object.__setattr__(self, "body", body)
        self._init(body.owner)

    def _key(self):
        return (self.body,)

    def children(self):
        return (self.body,)


class Always(Formula):
    __slots__ = ("body",)

    def __init__(self, body: Formula):
        if body.owner is None:
            raise SignatureError("G applies to local formulas only")
        object.__setattr__(self, "body", body)
        self._init(body.owner)

    def _key(self):
        return (self.body,)

    def children(self):
        return (self.body,)


class Comm(Formula):
    """``C target[body]`` owned by ``agent``: last event was shared with target."""

    __slots__ = ("target", "body")

    def __init__(self, agent: str, target: str, body: Formula):
        if body.owner != target:
            raise SignatureError(
                f"body of C {target}[...] must be a local formula of {target}, got {body.owner or 'global'}"
            )
        object.__setattr__(self, "target", target)
        object.__setattr__(self, "body", body)
        self._init(agent)

    def _key(self):
        return (self.owner, self.target, self.body)

    def children(self):
        return (self.body,)


class At(Formula):
    """Global atom ``@agent[body]``."""

    __slots__ = ("agent", "body")

    def __init__(self, agent: str, body: Formula):
        if body.owner != agent:
            raise SignatureError(f"@{agent}[...] needs a local formula of {agent}")
        object.__setattr__(self, "agent", agent)
        object.__setattr__(self, "body", body)
        self._init(None)

    def _key(self):
        return (self.agent, self.body)

    def children(self):
        return (self.body,)


# derived connectives -------------------------------------------------------

def And(left: Formula, right: Formula) -> Formula:
    return Not(Imp(left, Not(right)))


def Or(left: Formula, right: Formula) -> Formula:
    return Imp(Not(left), right)


def Eventually(body: Formula) -> Formula:
    return Not(Always(Not(body)))


def Bottom(agent: str) -> Formula:
    return Not(Top(agent))


def is_literal(f: Formula) -> bool:
    return isinstance(f, Prop) or (isinstance(f, Not) and isinstance(f.body, Prop))


def positive(f: Formula) -> Formula:
    """Strip one top-level negation."""
    return f.body if isinstance(f, Not) else f


def walk(f: Formula) -> Iterator[Formula]:
    """Every node of ``f`` including communication bodies."""
    stack = [f]
    while stack:
        node = stack.pop()
        yield node
        stack.extend(node.children())


def check_formula(f: Formula, sig: DistributedSignature) -> None:
    """Raise :class:`SignatureError` if ``f`` mentions undeclared agents or props."""
    for node in walk(f):
        if node.owner is not None:
            sig.check_agent(node.owner)
        if isinstance(node, Prop):
            owner = sig.owner_of(node.name)
            if owner is None:
                raise SignatureError(f"undeclared proposition {node.name!r}")
            if owner != node.owner:
                raise SignatureError(
                    f"proposition {node.name!r} belongs to {owner!r}, used in the scope of {node.owner!r}"
                )
        elif isinstance(node, Comm):
            sig.check_agent(node.target)
        elif isinstance(node, At):
            sig.check_agent(node.agent)


# ---------------------------------------------------------------------------
# rendering

def _wrap(f: Formula, text: str) -> str:
    return f"({text})" if isinstance(f, Imp) else text


def render(f: Formula) -> str:
    """Concrete ASCII syntax accepted by :func:`dtl.parser.parse_global`."""
    if isinstance(f, Prop):
        return f.name
    if isinstance(f, Top):
        return "true"
    if isinstance(f, Not):
        if isinstance(f.body, Top):
            return "false"
        return "!" + _wrap(f.body, render(f.body))
    if isinstance(f, Imp):
        return f"{_wrap(f.left, render(f.left))} -> {render(f.right)}"
    if isinstance(f, Next):
        return "X " + _wrap(f.body, render(f.body))
    if isinstance(f, Always):
        return "G " + _wrap(f.body, render(f.body))
    if isinstance(f, Comm):
        return f"C {f.target}[{render(f.body)}]"
    if isinstance(f, At):
        return f"@{f.agent}[{render(f.body)}]"
    raise TypeError(f"not a formula: {f!r}")


def pretty(f: Formula) -> str:
    """Unicode rendering used in automaton labels."""
    wrap = lambda g: f"({pretty(g)})" if isinstance(g, Imp) else pretty(g)
    if isinstance(f, Prop):
        return f.name
    if isinstance(f, Top):
        return "⊤"
    if isinstance(f, Not):
        return "¬" + wrap(f.body)
    if isinstance(f, Imp):
        return f"{wrap(f.left)}→{pretty(f.right)}"
    if isinstance(f, Next):
        return "○" + wrap(f.body)
    if isinstance(f, Always):
        return "□" + wrap(f.body)
    if isinstance(f, Comm):
        return f"©{f.target}[{pretty(f.body)}]"
    if isinstance(f, At):
        return f"@{f.agent}[{pretty(f.body)}]"
    raise TypeError(f"not a formula: {f!r}")


def sort_key(f: Formula):
    return (f.size, f.owner or "", render(f))


# ---------------------------------------------------------------------------
# formula sets

class FormulaSet:
    """Immutable, canonically ordered set of formulas, optionally tied to an agent."""

    __slots__ = ("owner", "members", "_order")

    def __init__(self, members: Iterable[Formula] = (), owner: str | None = None):
        members = frozenset(members)
        object.__setattr__(self, "owner", owner)
        object.__setattr__(self, "members", members)
        object.__setattr__(self, "_order", None)

    def __setattr__(self, name, value):
        raise AttributeError("FormulaSet is immutable")

    def ordered(self) -> tuple[Formula, ...]:
        if self._order is None:
            object.__setattr__(self, "_order", tuple(sorted(self.members, key=sort_key)))
        return self._order

    def __iter__(self):
        return iter(self.ordered())

    def __len__(self):
        return len(self.members)

    def __contains__(self, f):
        return f in self.members

    def __eq__(self, other):
        if isinstance(other, FormulaSet):
            return self.members == other.members
        if isinstance(other, (set, frozenset)):
            return self.members == other
        return NotImplemented

    def __hash__(self):
        return hash(self.members)

    def __or__(self, other):
        return FormulaSet(self.members | set(other), self.owner)

    def __le__(self, other):
        return self.members <= set(other)

    def __repr__(self):
        return "{" + ", ".join(pretty(f) for f in self) + "}"

    def label(self) -> str:
        return repr(self)


# ---------------------------------------------------------------------------
# subformulas and closure

def subformulas_local(phi: Formula, agent: str | None = None) -> FormulaSet:
    """``agent``-subformulas of a local formula; communication formulas are atomic."""
    agent = phi.owner if agent is None else agent
    if phi.owner != agent:
        raise SignatureError(f"{render(phi)} is not a local formula of {agent!r}")
    out = set()
    stack = [phi]
    while stack:
        node = stack.pop()
        if node in out:
            continue
        out.add(node)
        if not isinstance(node, Comm):
            stack.extend(node.children())
    return FormulaSet(out, agent)


def subformulas_global(alpha: Formula, include_comm_bodies: bool = True) -> FormulaSet:
    """Subformulas of a global formula.

    With ``include_comm_bodies`` (the default, used by every automaton
    construction) the body ``phi`` of each ``C j[phi]`` contributes its
    ``j``-subformulas too; without them communication could never be
    witnessed by the target's state.
    """
    if alpha.owner is not None:
        raise SignatureError(f"{render(alpha)} is not a global formula")
    out = set()
    stack = [alpha]
    while stack:
        node = stack.pop()
        if node in out:
            continue
        if node.owner is None:
            out.add(node)
            stack.extend(node.children())
            continue
        for sub in subformulas_local(node).members:
            if sub in out:
                continue
            out.add(sub)
            if include_comm_bodies and isinstance(sub, Comm):
                stack.append(sub.body)
    return FormulaSet(out)


def closure(alpha: Formula, include_comm_bodies: bool = True) -> FormulaSet:
    """Subformulas of ``alpha`` and their negations (double negation removed)."""
    sub = subformulas_global(alpha, include_comm_bodies).members
    return FormulaSet(sub | {Not(b) for b in sub})


def project_down(B: Iterable[Formula], agent: str) -> FormulaSet:
    """Keep global formulas and local formulas of ``agent``."""
    return FormulaSet((f for f in B if f.owner is None or f.owner == agent), agent)


# ---------------------------------------------------------------------------
# valuations

Valuation = frozenset  # frozenset of the proposition names that are true


def valuations(sig: DistributedSignature, agent: str) -> list[Valuation]:
    """All ``2**|Prop_agent|`` valuations in a fixed order."""
    sig.check_agent(agent)
    props = sig.sorted_props(agent)
    out = []
    for bits in itertools.product((False, True), repeat=len(props)):
        out.append(frozenset(p for p, b in zip(props, bits) if b))
    return out


def valuation_literals(v: Valuation, agent: str, sig: DistributedSignature) -> frozenset[Formula]:
    """The literal set ``{p | p in v} ∪ {¬p | p not in v}`` for ``agent``."""
    return frozenset(
        Prop(agent, p) if p in v else Not(Prop(agent, p)) for p in sig.sorted_props(agent)
    )


def format_valuation(v: Valuation, agent: str, sig: DistributedSignature) -> str:
    return "{" + ",".join(p if p in v else "!" + p for p in sig.sorted_props(agent)) + "}"
