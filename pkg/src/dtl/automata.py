"""Büchi automata over opaque letters: lasso acceptance, degeneralization,
emptiness with witness extraction.

All acceptance procedures are duck-typed over objects exposing
``initial_states``, ``successors(q, letter)`` and ``transitions(q)``, so the
same code serves explicit automata and the lazily built products.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Hashable, Iterable, Mapping, NamedTuple, Sequence

from .graphs import find_generalized_lasso, nested_dfs
from .words import LassoWord


class _Explicit:
    """Shared storage of an explicit automaton."""

    def __init__(
        self,
        states: Iterable[Hashable],
        alphabet: Iterable[Hashable],
        delta: Mapping,
        initial: Iterable[Hashable],
        name: str | None = None,
    ):
        self.states = tuple(dict.fromkeys(states))
        self.alphabet = tuple(dict.fromkeys(alphabet))
        known = set(self.states)
        if not self.states:
            raise ValueError("an automaton needs at least one state")
        self.initial = tuple(dict.fromkeys(initial))
        if not set(self.initial) <= known:
            raise ValueError("initial states must be states")
        letters = set(self.alphabet)
        table: dict = {}
        for q, row in delta.items():
            if q not in known:
                raise ValueError(f"transition from unknown state {q!r}")
            for a, targets in row.items():
                if a not in letters:
                    raise ValueError(f"letter {a!r} not in the alphabet")
                targets = tuple(dict.fromkeys(targets))
                if not set(targets) <= known:
                    raise ValueError(f"transition into unknown state from {q!r}")
                if targets:
                    table.setdefault(q, {})[a] = targets
        self.delta = table
        self.name = name

    @property
    def initial_states(self) -> tuple:
        return self.initial

    def successors(self, q, letter) -> tuple:
        return self.delta.get(q, {}).get(letter, ())

    def transitions(self, q):
        row = self.delta.get(q, {})
        for a in self.alphabet:
            for q2 in row.get(a, ()):
                yield a, q2

    def edges(self):
        for q in self.states:
            for a, q2 in self.transitions(q):
                yield q, a, q2


class Nba(_Explicit):
    """``⟨Q, Σ, δ, Q₀, F⟩`` with ``delta[q][a]`` the tuple of successors."""

    def __init__(self, states, alphabet, delta, initial, accepting, name=None):
        super().__init__(states, alphabet, delta, initial, name)
        self.accepting = frozenset(accepting)
        if not self.accepting <= set(self.states):
            raise ValueError("accepting states must be states")

    def is_accepting(self, q) -> bool:
        return q in self.accepting

    def acceptance_sets(self) -> tuple[frozenset, ...]:
        return (self.accepting,)

    def __repr__(self):
        return f"Nba({len(self.states)} states, {len(self.alphabet)} letters)"


class Gnba(_Explicit):
    """Generalized variant with an ordered family of acceptance sets."""

    def __init__(self, states, alphabet, delta, initial, acceptance: Sequence[Iterable], names=None, name=None):
        super().__init__(states, alphabet, delta, initial, name)
        self.acceptance = tuple(frozenset(F) for F in acceptance)
        for F in self.acceptance:
            if not F <= set(self.states):
                raise ValueError("acceptance sets must contain states only")
        self.acceptance_names = tuple(names) if names is not None else tuple(
            f"F{k}" for k in range(len(self.acceptance))
        )

    def acceptance_sets(self) -> tuple[frozenset, ...]:
        return self.acceptance

    def __repr__(self):
        return f"Gnba({len(self.states)} states, {len(self.acceptance)} acceptance sets)"


@dataclass(frozen=True)
class LassoRun:
    """States aligned with ``word``: ``states[k]`` is the state before letter ``k``.

    ``word`` may be an unrolling of the word the run was requested for (the
    same ω-word with a longer prefix or loop).
    """

    word: LassoWord
    prefix: tuple
    loop: tuple

    def __post_init__(self):
        if len(self.prefix) != len(self.word.prefix) or len(self.loop) != len(self.word.loop):
            raise ValueError("run and word are not aligned")

    def states(self) -> LassoWord:
        return LassoWord(self.prefix, self.loop)

    def __getitem__(self, k: int):
        return self.states()[k]

    def is_run_of(self, automaton) -> bool:
        seq = self.prefix + self.loop
        if not seq or seq[0] not in set(automaton.initial_states):
            return False
        for k, q in enumerate(seq):
            nxt = seq[k + 1] if k + 1 < len(seq) else self.loop[0]
            if nxt not in automaton.successors(q, self.word[k]):
                return False
        return True


def _lasso_product_search(A, w: LassoWord, obligations) -> LassoRun | None:
    """Search the product of ``A`` with the positions of ``w``."""
    p = len(w.prefix)
    initials = [(q, 0) for q in A.initial_states]

    def succ(node):
        q, pos = node
        letter = w[pos]
        nxt = w.successor(pos)
        return [(letter, (q2, nxt)) for q2 in A.successors(q, letter)]

    lifted = [lambda node, pred=pred: node[1] >= p and pred(node[0]) for pred in obligations]
    if not lifted:
        lifted = [lambda node: node[1] >= p]
    found = find_generalized_lasso(initials, succ, lifted)
    if found is None:
        return None
    word = LassoWord(found.stem_labels, found.cycle_labels)
    return LassoRun(
        word, tuple(n[0] for n in found.stem_nodes), tuple(n[0] for n in found.cycle_nodes)
    )


def nba_lasso_accepts(A, w: LassoWord) -> LassoRun | None:
    """Accepting lasso run of ``A`` on ``w`` (truthy) or ``None``."""
    return _lasso_product_search(A, w, [A.is_accepting])


def gnba_lasso_accepts(G, w: LassoWord) -> LassoRun | None:
    """Some run visits every acceptance set infinitely often."""
    preds = [lambda q, F=F: q in F for F in G.acceptance_sets()]
    return _lasso_product_search(G, w, preds)


class CounterState(NamedTuple):
    """Degeneralized state: underlying GNBA state plus the acceptance-set counter."""

    state: Hashable
    counter: int

    def __repr__(self):
        return f"({self.state!r}, {self.counter})"


def degeneralize(G: Gnba) -> Nba:
    """Counter construction; counters follow the order of ``G.acceptance``."""
    family = G.acceptance
    k = len(family)
    if k == 0:
        states = [CounterState(q, 0) for q in G.states]
        delta = {
            CounterState(q, 0): {a: [CounterState(t, 0) for t in ts] for a, ts in row.items()}
            for q, row in G.delta.items()
        }
        return Nba(states, G.alphabet, delta, [CounterState(q, 0) for q in G.initial], states, G.name)
    states = [CounterState(q, c) for c in range(k) for q in G.states]
    delta = {}
    for q, row in G.delta.items():
        for c in range(k):
            c2 = (c + 1) % k if q in family[c] else c
            delta[CounterState(q, c)] = {
                a: [CounterState(t, c2) for t in ts] for a, ts in row.items()
            }
    accepting = [CounterState(q, 0) for q in G.states if q in family[0]]
    initial = [CounterState(q, 0) for q in G.initial]
    return Nba(states, G.alphabet, delta, initial, accepting, G.name)


def find_accepting_lasso(A, max_states: int | None = None) -> tuple[LassoWord, LassoRun] | None:
    """Nested-DFS emptiness check; the witness is re-verified before return."""

    def succ(q):
        return list(A.transitions(q))

    found = nested_dfs(A.initial_states, succ, A.is_accepting, max_states)
    if found is None:
        return None
    word = LassoWord(found.stem_labels, found.cycle_labels)
    run = LassoRun(word, found.stem_nodes, found.cycle_nodes)
    if not run.is_run_of(A) or not any(A.is_accepting(q) for q in run.loop):
        raise AssertionError("emptiness check produced an invalid witness")  # pragma: no cover
    if nba_lasso_accepts(A, word) is None:
        raise AssertionError("emptiness witness rejected by lasso acceptance")  # pragma: no cover
    return word, run
