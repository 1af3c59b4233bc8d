"""Interpretation structures of lasso shape and the satisfaction relations.

A :class:`LassoStructure` stores a distributed life-cycle by the agent sets
``Ids(e_1), Ids(e_2), ...`` of its events (an ultimately periodic sequence;
the index order is one linearization) together with one ultimately periodic
labeling sequence per agent, ``labels[i][m]`` being the valuation of agent
``i``'s ``m``-th local state.

Evaluation is exact.  Internally the structure is unrolled into a *timeline*
of frames ``k = 0, 1, ...`` (global state ``ξ^k``) until it closes into a
lasso; a local state of agent ``i`` is then identified either with the
initial state or with the canonical frame of the event that produced it.
Every formula is memoised over these finitely many keys.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

from .errors import SignatureError, UnfairWordError
from .formula import (
    Always,
    At,
    Comm,
    DistributedSignature,
    Formula,
    Imp,
    Next,
    Not,
    Prop,
    Top,
    Valuation,
    check_formula,
)
from .words import LassoWord, check_fair, project_word

INIT = -1  # key of every agent's initial (empty) local state
_MAX_UNROLL = 1_000_000


@dataclass(frozen=True)
class Frame:
    """Global state ``ξ^k``: who takes part in ``e_{k+1}`` and every agent's label."""

    movers: frozenset
    vals: Mapping[str, Valuation]
    local_index: Mapping[str, int]


class LassoStructure:
    """Ultimately periodic interpretation structure ``μ``."""

    def __init__(
        self,
        sig: DistributedSignature,
        event_ids: LassoWord,
        labels: Mapping[str, LassoWord],
    ):
        self.sig = sig
        self.event_ids = event_ids.map(frozenset)
        self.labels = {a: labels[a].map(frozenset) for a in sig.agents}
        for ids in self.event_ids.letters():
            if not ids:
                raise SignatureError("every event needs at least one agent")
            for a in ids:
                sig.check_agent(a)
        starved = [a for a in sig.agents if not any(a in ids for ids in self.event_ids.loop)]
        if starved:
            raise UnfairWordError(starved)
        for a, lab in self.labels.items():
            for v in lab.letters():
                if not v <= sig.props[a]:
                    raise SignatureError(f"label {sorted(v)} of {a!r} uses foreign propositions")
        self._build_timeline()
        self._memo: dict = {}
        self._reach: dict = {}

    # ------------------------------------------------------------------
    # structure

    def _build_timeline(self):
        agents = self.sig.agents
        counts = {a: 0 for a in agents}
        frames = []
        seen: dict = {}
        pe = len(self.event_ids.prefix)
        for k in range(_MAX_UNROLL):
            if k >= pe:
                # the future from frame k is fixed by these canonical positions
                key = (self.event_ids.canonical(k),) + tuple(
                    self.labels[a].canonical(counts[a]) for a in agents
                )
                if key in seen:
                    k1 = seen[key]
                    self.timeline = LassoWord(tuple(frames[:k1]), tuple(frames[k1:]))
                    return
                seen[key] = k
            movers = self.event_ids[k]
            vals = {a: self.labels[a][counts[a]] for a in agents}
            frames.append(Frame(movers, vals, dict(counts)))
            for a in movers:
                counts[a] += 1
        raise RuntimeError("structure does not close into a lasso")  # pragma: no cover

    @property
    def agents(self) -> tuple[str, ...]:
        return self.sig.agents

    def ids(self, k: int) -> frozenset:
        """``Ids(e_k)`` for the 1-based event index ``k``."""
        if k < 1:
            raise ValueError("events are numbered from 1")
        return self.event_ids[k - 1]

    def local_events(self, agent: str, upto: int) -> list[int]:
        """Indices ``k <= upto`` with ``e_k`` in ``Ev_agent``."""
        return [k for k in range(1, upto + 1) if agent in self.ids(k)]

    def global_state(self, k: int) -> frozenset[int]:
        """``ξ^k = {e_1, ..., e_k}`` under the index linearization."""
        return frozenset(range(1, k + 1))

    def local_state_of(self, agent: str, k: int) -> int:
        """Cardinality of ``ξ^k|_agent`` (the agent's local state index)."""
        return sum(1 for j in range(k) if agent in self.event_ids[j])

    def causally_precedes(self, k1: int, k2: int) -> bool:
        """``e_k1 <= e_k2`` in the global causality order (reflexive)."""
        if k1 == k2:
            return True
        if k1 > k2:
            return False
        # forward closure of local successor steps starting at e_k1
        frontier = set(self.ids(k1))
        for k in range(k1 + 1, k2 + 1):
            ids = self.ids(k)
            if ids & frontier:
                if k == k2:
                    return True
                frontier |= ids
        return False

    def label(self, agent: str, m: int) -> Valuation:
        return self.labels[agent][m]

    def __eq__(self, other):
        return (
            isinstance(other, LassoStructure)
            and self.sig == other.sig
            and self.event_ids == other.event_ids
            and self.labels == other.labels
        )

    def __hash__(self):
        return hash((self.event_ids, tuple(self.labels[a] for a in self.agents)))

    def __repr__(self):
        return f"LassoStructure(events={self.event_ids!r}, labels={self.labels!r})"

    # ------------------------------------------------------------------
    # keys

    def key_of(self, agent: str, m: int) -> int:
        """Canonical key of agent's ``m``-th local state."""
        if m < 0:
            raise ValueError("local state indices are non-negative")
        if m == 0:
            return INIT
        tl = self.timeline
        pre = [f for f in range(len(tl.prefix)) if agent in tl.prefix[f].movers]
        if m <= len(pre):
            return pre[m - 1]
        loop = [len(tl.prefix) + f for f, fr in enumerate(tl.loop) if agent in fr.movers]
        idx = m - len(pre) - 1
        return loop[idx % len(loop)]

    def _next_key(self, agent: str, key: int) -> int:
        tl = self.timeline
        f = 0 if key == INIT else tl.successor(key)
        for _ in range(tl.span + 1):
            if agent in tl[f].movers:
                return f
            f = tl.successor(f)
        raise UnfairWordError([agent])  # pragma: no cover - excluded by fairness

    def _vals_at(self, agent: str, key: int) -> Valuation:
        tl = self.timeline
        frame = 0 if key == INIT else tl.successor(key)
        return tl[frame].vals[agent]

    def _reachable(self, agent: str, key: int) -> frozenset:
        cached = self._reach.get((agent, key))
        if cached is not None:
            return cached
        out = [key]
        seen = {key}
        cur = key
        while True:
            cur = self._next_key(agent, cur)
            if cur in seen:
                break
            seen.add(cur)
            out.append(cur)
        result = frozenset(out)
        self._reach[(agent, key)] = result
        return result

    # ------------------------------------------------------------------
    # evaluation

    def _eval(self, agent: str, key: int, phi: Formula) -> bool:
        memo_key = (agent, key, phi)
        hit = self._memo.get(memo_key)
        if hit is not None:
            return hit
        if isinstance(phi, Prop):
            value = phi.name in self._vals_at(agent, key)
        elif isinstance(phi, Top):
            value = True
        elif isinstance(phi, Not):
            value = not self._eval(agent, key, phi.body)
        elif isinstance(phi, Imp):
            value = (not self._eval(agent, key, phi.left)) or self._eval(agent, key, phi.right)
        elif isinstance(phi, Next):
            value = self._eval(agent, self._next_key(agent, key), phi.body)
        elif isinstance(phi, Always):
            value = all(self._eval(agent, k, phi.body) for k in self._reachable(agent, key))
        elif isinstance(phi, Comm):
            value = (
                key != INIT
                and phi.target in self.timeline[key].movers
                and self._eval(phi.target, key, phi.body)
            )
        else:
            raise SignatureError(f"not a local formula: {phi!r}")
        self._memo[memo_key] = value
        return value

    def holds_local(self, agent: str, m: int, phi: Formula) -> bool:
        if phi.owner != agent:
            raise SignatureError(f"{phi} is not a local formula of {agent!r}")
        return self._eval(agent, self.key_of(agent, m), phi)

    def holds_global(self, alpha: Formula, local_states: Mapping[str, int] | None = None) -> bool:
        """Truth of a global formula at the global state whose restriction to
        each agent ``i`` is local state ``local_states[i]`` (default: ``∅``)."""
        states = local_states or {}
        if isinstance(alpha, Not):
            return not self.holds_global(alpha.body, states)
        if isinstance(alpha, Imp):
            return (not self.holds_global(alpha.left, states)) or self.holds_global(
                alpha.right, states
            )
        if isinstance(alpha, At):
            return self.holds_local(alpha.agent, states.get(alpha.agent, 0), alpha.body)
        raise SignatureError(f"not a global formula: {alpha!r}")


def derive_structure(w: LassoWord, sig: DistributedSignature) -> LassoStructure:
    """Structure induced by a fair global word over valuations.

    ``Ev_i`` collects the events whose letter involves ``i``; the label of
    ``i``'s ``m``-th local state is the valuation in ``i``'s ``(m+1)``-th letter.
    """
    check_fair(w, sig.agents)
    for letter in w.letters():
        for a in letter:
            sig.check_agent(a)
    labels = {a: project_word(w, a) for a in sig.agents}
    return LassoStructure(sig, w.map(lambda letter: letter.agents), labels)


def sat_local(mu: LassoStructure, agent: str, m: int, phi: Formula) -> bool:
    """``μ_agent, ξ_agent^m ⊨ phi``."""
    return mu.holds_local(agent, m, phi)


def sat_global(mu: LassoStructure, alpha: Formula) -> bool:
    """``μ ⊨ alpha`` (anchored at the empty global state)."""
    check_formula(alpha, mu.sig)
    return mu.holds_global(alpha)


def always_fixpoint_check(mu: LassoStructure, agent: str, m: int, phi: Formula) -> bool:
    """Whether ``G phi`` at ``m`` equals ``phi`` at ``m`` and ``G phi`` at ``m+1``."""
    box = Always(phi)
    return mu.holds_local(agent, m, box) == (
        mu.holds_local(agent, m, phi) and mu.holds_local(agent, m + 1, box)
    )


def models_of(words: Iterable[LassoWord], sig: DistributedSignature, alpha: Formula):
    """Yield the words whose induced structure satisfies ``alpha``."""
    for w in words:
        if sat_global(derive_structure(w, sig), alpha):
            yield w
