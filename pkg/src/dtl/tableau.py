"""Elementary sets over the closure of a global formula and the per-agent
tableau automata ``G_i``."""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .automata import Gnba, gnba_lasso_accepts
from .formula import (
    Always,
    At,
    Comm,
    DistributedSignature,
    Formula,
    FormulaSet,
    Imp,
    Next,
    Not,
    Prop,
    Top,
    closure,
    pretty,
    sort_key,
    subformulas_global,
    valuations,
)
from .words import LassoWord


@dataclass(frozen=True)
class ElementarySet:
    """A projected elementary set ``B↓i``, the state type of ``G_i``."""

    agent: str
    formulas: FormulaSet

    def __contains__(self, f):
        return f in self.formulas

    def __iter__(self):
        return iter(self.formulas)

    def __len__(self):
        return len(self.formulas)

    def __repr__(self):
        return repr(self.formulas)

    def label(self) -> str:
        return repr(self.formulas)


def _relevant(f: Formula, agent: str) -> bool:
    return f.owner is None or f.owner == agent


class TableauContext:
    """Everything about ``closure(alpha)`` that agent ``i``'s automaton needs."""

    def __init__(self, alpha: Formula, agent: str, include_comm_bodies: bool = True):
        self.alpha = alpha
        self.agent = agent
        sub = subformulas_global(alpha, include_comm_bodies).members
        self.closure = closure(alpha, include_comm_bodies)
        view = [f for f in sub if _relevant(f, agent) and not isinstance(f, Not)]
        self.positives: tuple[Formula, ...] = tuple(sorted(view, key=sort_key))
        self.index = {f: k for k, f in enumerate(self.positives)}
        self.props = tuple(f for f in self.positives if isinstance(f, Prop))
        self.nexts = tuple(f for f in self.positives if isinstance(f, Next))
        self.boxes = tuple(f for f in self.positives if isinstance(f, Always))
        self.comms = tuple(f for f in self.positives if isinstance(f, Comm))
        # every communication formula of the closure (any owner), for initial states
        self.all_comms = tuple(
            sorted((f for f in sub if isinstance(f, Comm)), key=sort_key)
        )

    def view(self) -> FormulaSet:
        """Closure members relevant to the agent (global and own local ones)."""
        return FormulaSet((f for f in self.closure if _relevant(f, self.agent)), self.agent)

    def truth_of(self, B, f: Formula) -> bool:
        if isinstance(f, Not):
            return f.body not in B
        return f in B

    def make_set(self, truth: tuple[bool, ...]) -> ElementarySet:
        members = [f if t else Not(f) for f, t in zip(self.positives, truth)]
        return ElementarySet(self.agent, FormulaSet(members, self.agent))


def _value(f: Formula, truth: dict) -> bool:
    return (not truth[f.body]) if isinstance(f, Not) else truth[f]


def is_elementary(B, ctx: TableauContext) -> bool:
    """The four elementary predicates on a subset of the agent's closure view."""
    B = set(B)
    view = ctx.view()
    if not B <= set(view):
        return False
    for f in ctx.positives:
        # consistency and maximality
        if (f in B) == (Not(f) in B):
            return False
    for f in ctx.positives:
        inside = f in B
        if isinstance(f, Top) and not inside:
            return False
        if isinstance(f, Imp):
            left = ctx.truth_of(B, f.left)
            right = ctx.truth_of(B, f.right)
            if inside != ((not left) or right):
                return False
        if isinstance(f, Always) and inside and not ctx.truth_of(B, f.body):
            return False
        if isinstance(f, At) and f.agent == ctx.agent:
            if inside != ctx.truth_of(B, f.body):
                return False
    return True


def enumerate_elementary(
    alpha: Formula, agent: str, include_comm_bodies: bool = True
) -> list[ElementarySet]:
    """All ``B↓i`` for ``i``-elementary ``B``, by propagation over positives."""
    ctx = TableauContext(alpha, agent, include_comm_bodies)
    return _enumerate(ctx)


def _enumerate(ctx: TableauContext) -> list[ElementarySet]:
    order = ctx.positives  # children precede parents (sorted by size)
    results = []
    truth: dict = {}

    def options(f):
        if isinstance(f, Top):
            return (True,)
        if isinstance(f, Imp):
            return ((not _value(f.left, truth)) or _value(f.right, truth),)
        if isinstance(f, At) and f.agent == ctx.agent:
            return (_value(f.body, truth),)
        if isinstance(f, Always) and not _value(f.body, truth):
            return (False,)
        return (True, False)

    def rec(k):
        if k == len(order):
            results.append(tuple(truth[f] for f in order))
            return
        f = order[k]
        for t in options(f):
            truth[f] = t
            rec(k + 1)
        del truth[f]

    rec(0)
    results.sort(key=lambda t: tuple(not x for x in t))
    return [ctx.make_set(t) for t in results]


def brute_force_elementary(
    alpha: Formula, agent: str, include_comm_bodies: bool = True
) -> list[ElementarySet]:
    """Oracle: filter every subset of the agent's closure view."""
    ctx = TableauContext(alpha, agent, include_comm_bodies)
    view = list(ctx.view())
    out = []
    for bits in itertools.product((False, True), repeat=len(view)):
        B = [f for f, b in zip(view, bits) if b]
        if is_elementary(B, ctx):
            out.append(ElementarySet(agent, FormulaSet(B, agent)))
    return out


def set_literals(B: ElementarySet, ctx: TableauContext) -> frozenset:
    """Valuation (names of true propositions) fixed by ``B`` on closure props."""
    return frozenset(p.name for p in ctx.props if p in B)


def build_local_gnba(
    alpha: Formula,
    agent: str,
    sig: DistributedSignature,
    include_comm_bodies: bool = True,
) -> Gnba:
    """``G_i = ⟨Q_i, Val_i, δ_i, Q_0i, ℱ_i⟩``; states are :class:`ElementarySet`."""
    ctx = TableauContext(alpha, agent, include_comm_bodies)
    states = _enumerate(ctx)
    alphabet = valuations(sig, agent)
    closure_props = {p.name for p in ctx.props}

    def agrees(B, v):
        lits = set_literals(B, ctx)
        return lits == (frozenset(v) & closure_props)

    # successors depend only on the obligations a state imposes on the next one
    def requirement(B):
        req = [(f.body, f in B) for f in ctx.nexts]
        for f in ctx.boxes:
            if f in B:
                req.append((f, True))
            elif ctx.truth_of(B, f.body):
                req.append((f, False))
        return req

    def meets(B2, req):
        return all(ctx.truth_of(B2, f) == t for f, t in req)

    delta = {}
    for B in states:
        req = requirement(B)
        nxt = [B2 for B2 in states if meets(B2, req)]
        row = {v: nxt for v in alphabet if agrees(B, v)}
        if row and nxt:
            delta[B] = row
    initial = [
        B
        for B in states
        if alpha in B and not any(c in B for c in ctx.all_comms)
    ]
    family, names = [], []
    for box in ctx.boxes:
        family.append([B for B in states if box in B or not ctx.truth_of(B, box.body)])
        names.append(pretty(box))
    g = Gnba(states, alphabet, delta, initial, family, names, name=agent)
    g.context = ctx
    return g


def local_language_check(
    alpha: Formula, agent: str, w: LassoWord, sig: DistributedSignature
) -> bool:
    """Whether the local word ``w`` over ``Val_agent`` is in ``L(G_agent)``."""
    return gnba_lasso_accepts(build_local_gnba(alpha, agent, sig), w.map(frozenset)) is not None
