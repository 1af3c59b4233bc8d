"""Translations between fair words and interpretation structures, the
canonical accepting run of a model, and structure isomorphism."""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd
from typing import Mapping, Sequence

from .automata import LassoRun
from .errors import LabelMismatch, PreconditionFailed, SignatureError
from .formula import DistributedSignature, Formula, Not, Prop, closure
from .product import tableau_set
from .semantics import LassoStructure, derive_structure
from .tableau import ElementarySet, TableauContext
from .words import GlobalLetter, LassoWord


# ---------------------------------------------------------------------------
# words to structures


def word_to_structure(
    w: LassoWord, sig: DistributedSignature, run: LassoRun | None = None
) -> LassoStructure:
    """Structure induced by ``w``; a supplied product run must carry the
    same literals as the letters it reads."""
    mu = derive_structure(w, sig)
    if run is not None:
        _check_run_labels(w, run, sig)
    return mu


def _check_run_labels(w: LassoWord, run: LassoRun, sig: DistributedSignature) -> None:
    if not run.word.omega_equal(w):
        raise LabelMismatch("run belongs to a different word")
    states = run.prefix + run.loop
    for k, q in enumerate(states):
        letter = run.word[k]
        for pos, agent in enumerate(sig.agents):
            if agent not in letter.agents:
                continue
            B = tableau_set(q[pos])
            v = letter[agent]
            for f in B:
                atom = f.body if isinstance(f, Not) else f
                if isinstance(atom, Prop) and (atom.name in v) != (f is atom):
                    raise LabelMismatch(
                        f"state {B!r} of {agent!r} disagrees with letter {letter!r} at position {k}"
                    )


# ---------------------------------------------------------------------------
# linearizations


@dataclass(frozen=True)
class Linearization:
    """Enumeration of events: position ``k`` (1-based) holds event
    ``order[k-1]`` for ``k <= len(order)`` and ``e_k`` afterwards.

    ``order`` must be a permutation of ``1..len(order)``.
    """

    order: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "order", tuple(self.order))
        if sorted(self.order) != list(range(1, len(self.order) + 1)):
            raise ValueError("a linearization prefix must permute 1..n")

    def __call__(self, k: int) -> int:
        if k < 1:
            raise ValueError("positions are numbered from 1")
        return self.order[k - 1] if k <= len(self.order) else k

    def is_valid_for(self, mu: LassoStructure) -> bool:
        """Order preservation: no event is enumerated after one it precedes."""
        n = len(self.order)
        for a in range(1, n + 1):
            for b in range(a + 1, n + 1):
                e1, e2 = self(a), self(b)
                if e2 != e1 and mu.causally_precedes(e2, e1):
                    return False
        return True


def default_linearization(mu: LassoStructure | None = None) -> Linearization:
    """``ℓ(k) = e_k``."""
    return Linearization(())


def _identity_word(mu: LassoStructure) -> LassoWord:
    """``w^{μ,ℓ}`` for the index order.  Keeps the lasso shape of the event
    sequence when the labels repeat with it (always so for word-derived
    structures), otherwise uses the folded timeline."""
    ev = mu.event_ids
    p, n = len(ev.prefix), ev.span
    counts = {a: 0 for a in mu.agents}
    letters, marks = [], {}
    for k in range(n + len(ev.loop)):
        if k in (p, n):
            marks[k] = tuple(mu.labels[a].canonical(counts[a]) for a in mu.agents)
        if k < n:
            letters.append(GlobalLetter({a: mu.label(a, counts[a]) for a in sorted(ev[k])}))
        for a in ev[k]:
            counts[a] += 1
    if marks[p] == marks[n]:
        return LassoWord(tuple(letters[:p]), tuple(letters[p:]))

    def letter(frame):
        return GlobalLetter({a: frame.vals[a] for a in sorted(frame.movers)})

    return mu.timeline.map(letter)


def structure_to_word(mu: LassoStructure, lin: Linearization | None = None) -> LassoWord:
    """``w^{μ,ℓ}``: letter ``k`` gives every agent of ``ℓ(k+1)`` its valuation at ``ξ^k``."""
    lin = lin or default_linearization(mu)
    if not lin.is_valid_for(mu):
        raise PreconditionFailed("linearization is not order preserving")
    base = _identity_word(mu)
    n = len(lin.order)
    if n == 0:
        return base
    counts = {a: 0 for a in mu.agents}
    head = []
    for k in range(n):
        ids = mu.ids(lin(k + 1))
        head.append(GlobalLetter({a: mu.label(a, counts[a]) for a in sorted(ids)}))
        for a in ids:
            counts[a] += 1
    while len(base.prefix) < n:
        base = base.rotate()
    return LassoWord(tuple(head) + base.prefix[n:], base.loop)


# ---------------------------------------------------------------------------
# canonical run


def _global_positives(ctx: TableauContext):
    return [f for f in ctx.positives if f.owner is None]


def build_canonical_run(
    mu: LassoStructure, alpha: Formula, lin: Linearization | None = None
) -> LassoRun:
    """Tuples of elementary sets ``x^i_k ∪ y^i_k`` read along ``w^{μ,ℓ}``.

    ``y^i_k`` holds the local closure formulas true at ``ξ^k|_i``; ``x^i_k``
    the global ones true at ``ξ^k``, refreshed only when ``i`` takes part in
    the last event.  Computed over the prefix and two loop unrollings of the
    word, then folded (the second unrolling repeats the first).
    """
    lin = lin or default_linearization(mu)
    if not mu.holds_global(alpha):
        raise PreconditionFailed("the structure is not a model of the formula")
    word = structure_to_word(mu, lin)
    agents = mu.agents
    contexts = {a: TableauContext(alpha, a) for a in agents}
    start = max(len(word.prefix), len(lin.order))
    p = start + len(word.loop)
    total = p + len(word.loop)
    counts = {a: 0 for a in agents}
    x = {}
    seq = []
    for k in range(total + 1):
        state = dict(counts)
        movers = word[k - 1].agents if k > 0 else frozenset(agents)
        row = []
        for a in agents:
            ctx = contexts[a]
            if a in movers:
                x[a] = [
                    f if mu.holds_global(f, state) else Not(f) for f in _global_positives(ctx)
                ]
            y = [
                f if mu.holds_local(a, state[a], f) else Not(f)
                for f in ctx.positives
                if f.owner == a
            ]
            row.append(_elementary(a, x[a] + y))
        seq.append(tuple(row))
        if k < total:
            for a in word[k].agents:
                counts[a] += 1
    if seq[p] != seq[total]:
        raise AssertionError("canonical run did not become periodic")  # pragma: no cover
    letters = [word[k] for k in range(total)]
    unrolled = LassoWord(tuple(letters[:p]), tuple(letters[p:total]))
    return LassoRun(unrolled, tuple(seq[:p]), tuple(seq[p:total]))


def _elementary(agent: str, members) -> ElementarySet:
    from .formula import FormulaSet

    return ElementarySet(agent, FormulaSet(members, agent))


# ---------------------------------------------------------------------------
# isomorphism


def _event_tuples(mu: LassoStructure, upto_loops: int):
    """Events as ``(participants, local indices)`` over prefix + loop unrollings."""
    tl = mu.timeline
    counts = {a: 0 for a in mu.agents}
    out = []
    n = len(tl.prefix) + upto_loops * len(tl.loop)
    for k in range(n):
        movers = tl[k].movers
        out.append((frozenset(movers), tuple(counts[a] for a in sorted(movers))))
        for a in movers:
            counts[a] += 1
    return out


def _loop_shift(mu: LassoStructure) -> dict:
    return {a: sum(1 for fr in mu.timeline.loop if a in fr.movers) for a in mu.agents}


@dataclass(frozen=True)
class IsomorphismWitness:
    """Order- and label-preserving event bijection, given by local indices:
    the ``m``-th event of agent ``i`` in ``μ₁`` maps to the ``m``-th event of
    ``i`` in ``μ₂``."""

    left: LassoStructure
    right: LassoStructure

    def __call__(self, k: int) -> int:
        """Index in ``μ₂`` of the image of event ``e_k`` of ``μ₁``."""
        ids = self.left.ids(k)
        agent = sorted(ids)[0]
        m = len(self.left.local_events(agent, k))
        j = 0
        seen = 0
        while seen < m:
            j += 1
            if agent in self.right.ids(j):
                seen += 1
        return j


def iso_check(mu1: LassoStructure, mu2: LassoStructure) -> IsomorphismWitness | None:
    """Isomorphism of two lasso structures, or ``None``.

    Both life-cycles are compared as sets of events, an event being its
    participant set with each participant's local index.  Past the prefixes
    each set is invariant under its own loop shift; a common multiple of the
    two shifts exists when the sets agree, and agreement on a window of two
    common periods then extends to everything.
    """
    if mu1.agents != mu2.agents:
        return None
    for a in mu1.agents:
        if not mu1.labels[a].omega_equal(mu2.labels[a]):
            return None
    c1, c2 = _loop_shift(mu1), _loop_shift(mu2)
    # common shift t1*c1 = t2*c2 (rates must be proportional)
    a0 = mu1.agents[0]
    g = gcd(c1[a0], c2[a0])
    t1, t2 = c2[a0] // g, c1[a0] // g
    if any(t1 * c1[a] != t2 * c2[a] for a in mu1.agents):
        return _component_iso(mu1, mu2)
    loops1 = 2 + 3 * t1
    loops2 = 2 + 3 * t2
    ev1 = _event_tuples(mu1, loops1)
    ev2 = _event_tuples(mu2, loops2)
    # compare events whose local indices all lie below a bound both unrollings cover
    bound = {
        a: min(
            sum(1 for s, _ in ev1 if a in s),
            sum(1 for s, _ in ev2 if a in s),
        )
        for a in mu1.agents
    }
    limit = {a: bound[a] - t1 * c1[a] for a in mu1.agents}

    def window(ev):
        return {
            (s, idx)
            for s, idx in ev
            if all(m < limit[a] for a, m in zip(sorted(s), idx))
        }

    if window(ev1) != window(ev2):
        return None
    return IsomorphismWitness(mu1, mu2)


def _component_iso(mu1, mu2):
    """Fallback for non-proportional loop shifts: agents that never share an
    event past the prefix evolve independently, so compare each group of
    communicating agents on its own."""
    groups = _groups(mu1)
    if groups != _groups(mu2) or len(groups) == 1:
        return None
    for group in groups:
        r1, r2 = _restrict(mu1, group), _restrict(mu2, group)
        if r1 is None or r2 is None or iso_check(r1, r2) is None:
            return None
    return IsomorphismWitness(mu1, mu2)


def _groups(mu):
    parent = {a: a for a in mu.agents}

    def find(a):
        while parent[a] != a:
            a = parent[a]
        return a

    for s in mu.event_ids.letters():
        s = sorted(s)
        for b in s[1:]:
            parent[find(b)] = find(s[0])
    out = {}
    for a in mu.agents:
        out.setdefault(find(a), []).append(a)
    return sorted(tuple(g) for g in out.values())


def _restrict(mu, group):
    keep = set(group)
    pre = [s for s in mu.event_ids.prefix if s & keep]
    loop = [s for s in mu.event_ids.loop if s & keep]
    if not loop:
        return None
    sig = DistributedSignature(group, {a: mu.sig.props[a] for a in group})
    return LassoStructure(sig, LassoWord(pre, loop), {a: mu.labels[a] for a in group})
