"""Distributed Büchi automata: products of per-agent automata over global
letters, fairness, projections, the DTL constraints and satisfiability."""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field
from typing import Callable, Hashable, Iterable, Mapping, NamedTuple, Sequence

from .automata import CounterState, LassoRun, degeneralize, find_accepting_lasso
from .errors import PreconditionFailed, ResourceLimitExceeded, SignatureError
from .formula import Comm, DistributedSignature, Formula, Not, Prop, check_formula, walk
from .graphs import explore, find_generalized_lasso, tarjan
from .tableau import ElementarySet, TableauContext, build_local_gnba
from .words import GlobalLetter, LassoWord, is_fair, project_word, starved_agents

# ---------------------------------------------------------------------------
# plain product


def _subsets(agents: Sequence[str]):
    """Nonempty agent subsets, smallest first, then in agent order."""
    for r in range(1, len(agents) + 1):
        yield from itertools.combinations(agents, r)


class Dnba:
    """Product ``⊗_i A_i`` of agent-indexed automata read over global letters.

    States are tuples in agent order; agents absent from a letter keep their
    component state.  Components may be NBAs (one acceptance set each) or
    GNBAs (``acceptance_sets()`` of any length).
    """

    def __init__(self, components: Mapping[str, object], agents: Sequence[str] | None = None):
        self.agents = tuple(agents) if agents is not None else tuple(components)
        if set(self.agents) != set(components):
            raise SignatureError("components must be given for exactly the listed agents")
        self.components = {a: components[a] for a in self.agents}
        self.position = {a: k for k, a in enumerate(self.agents)}
        self._moves: dict = {}

    # automaton interface -------------------------------------------------
    @property
    def initial_states(self) -> list[tuple]:
        return list(itertools.product(*(self.components[a].initial_states for a in self.agents)))

    @property
    def alphabet(self) -> list[GlobalLetter]:
        out = []
        for subset in _subsets(self.agents):
            for symbols in itertools.product(*(self.components[a].alphabet for a in subset)):
                out.append(GlobalLetter(zip(subset, symbols)))
        return out

    @property
    def states(self) -> list[tuple]:
        return list(itertools.product(*(self.components[a].states for a in self.agents)))

    def _component_moves(self, agent: str, s) -> list:
        key = (agent, s)
        hit = self._moves.get(key)
        if hit is None:
            hit = list(self.components[agent].transitions(s))
            self._moves[key] = hit
        return hit

    def successors(self, q: tuple, letter: GlobalLetter) -> list[tuple]:
        choices = []
        for a, s in zip(self.agents, q):
            if a in letter.agents:
                choices.append(self.components[a].successors(s, letter[a]))
            else:
                choices.append((s,))
        return [t for t in itertools.product(*choices) if self.allowed(q, letter, t)]

    def transitions(self, q: tuple):
        for subset in _subsets(self.agents):
            moves = [self._component_moves(a, q[self.position[a]]) for a in subset]
            for combo in itertools.product(*moves):
                target = list(q)
                for a, (_, s2) in zip(subset, combo):
                    target[self.position[a]] = s2
                target = tuple(target)
                letter = GlobalLetter({a: sym for a, (sym, _) in zip(subset, combo)})
                if self.allowed(q, letter, target):
                    yield letter, target

    def allowed(self, q, letter, target) -> bool:
        return True

    # acceptance ----------------------------------------------------------
    def obligations(self) -> list[tuple[str, str, Callable]]:
        """``(agent, set name, predicate on product states)`` for every ``ℱ_i`` member."""
        out = []
        for a in self.agents:
            comp = self.components[a]
            k = self.position[a]
            names = getattr(comp, "acceptance_names", None)
            for n, F in enumerate(comp.acceptance_sets()):
                name = names[n] if names else f"F_{a}"
                out.append((a, name, lambda q, F=F, k=k: q[k] in F))
        return out

    def accepting_for(self, agent: str, q: tuple) -> bool:
        """Whether ``q ∈ ℱ_agent`` (all of the agent's sets when it has several)."""
        comp = self.components[agent]
        s = q[self.position[agent]]
        return all(s in F for F in comp.acceptance_sets())

    def __repr__(self):
        return f"Dnba(agents={self.agents})"


def build_product(components: Mapping[str, object], agents: Sequence[str] | None = None,
                  disjoint_alphabets: bool = True) -> Dnba:
    """Product of agent-indexed automata.

    With ``disjoint_alphabets`` the component alphabets must not share letters
    (global letters would be ambiguous otherwise).  DTL components read
    valuations, which global letters already tag with their agent, so the
    tableau pipeline switches the check off.
    """
    if disjoint_alphabets:
        seen: dict = {}
        for a, comp in components.items():
            for letter in comp.alphabet:
                if letter in seen and seen[letter] != a:
                    raise SignatureError(
                        f"letter {letter!r} belongs to the alphabets of {seen[letter]!r} and {a!r}"
                    )
                seen[letter] = a
    return Dnba(components, agents)


# ---------------------------------------------------------------------------
# runs and acceptance


def project_run(run: LassoRun, agent: str, agents: Sequence[str]) -> LassoRun:
    """Local run of ``agent``: component states before each of its letters."""
    k = list(agents).index(agent)
    w = run.word
    if not all(isinstance(x, tuple) and len(x) == len(agents) for x in run.prefix + run.loop):
        raise PreconditionFailed("run states are not product tuples")
    pre = tuple(q[k] for q, a in zip(run.prefix, w.prefix) if agent in a.agents)
    loop = tuple(q[k] for q, a in zip(run.loop, w.loop) if agent in a.agents)
    return LassoRun(project_word(w, agent), pre, loop)


@dataclass(frozen=True)
class AcceptanceVerdict:
    accepted: bool
    run: LassoRun | None = None
    reason: str = ""

    def __bool__(self):
        return self.accepted


def dnba_lasso_accepts(D: Dnba, w: LassoWord) -> AcceptanceVerdict:
    """Lasso acceptance for fair words; unfair words are rejected outright."""
    for letter in w.letters():
        unknown = set(letter.agents) - set(D.agents)
        if unknown:
            raise SignatureError(f"letter {letter!r} names unknown agent(s) {sorted(unknown)}")
    starved = starved_agents(w, D.agents)
    if starved:
        return AcceptanceVerdict(
            False, None, f"word is not fair: agent(s) {', '.join(starved)} never participate in the loop"
        )
    p = len(w.prefix)

    def succ(node):
        q, pos = node
        letter = w[pos]
        nxt = w.successor(pos)
        return [(letter, (q2, nxt)) for q2 in D.successors(q, letter)]

    preds = [lambda n, f=f: n[1] >= p and f(n[0]) for _, _, f in D.obligations()]
    preds.append(lambda n: n[1] >= p)
    found = find_generalized_lasso([(q, 0) for q in D.initial_states], succ, preds)
    if found is None:
        return AcceptanceVerdict(False, None, "no accepting run")
    word = LassoWord(found.stem_labels, found.cycle_labels)
    run = LassoRun(word, tuple(n[0] for n in found.stem_nodes), tuple(n[0] for n in found.cycle_nodes))
    return AcceptanceVerdict(True, run, "accepted")


# ---------------------------------------------------------------------------
# DTL constraints


def tableau_set(s) -> ElementarySet:
    """Elementary set underlying a (possibly degeneralized) component state."""
    return s.state if isinstance(s, CounterState) else s


def _holds(B: ElementarySet, f: Formula) -> bool:
    return (f.body not in B) if isinstance(f, Not) else (f in B)


class ConstrainedDnba(Dnba):
    """The product pruned by the communication constraints.

    * SC1: a participating agent asserting ``C j[φ]`` needs ``j`` in the letter.
    * SC2: when ``i`` and ``j`` share the letter and ``φ`` holds for ``j``
      afterwards, ``C j[φ]`` holds for ``i``.
    * LC: ``C j[φ]`` in ``i``'s state needs ``φ`` in ``j``'s state.  Checked
      on the target of every transition in which ``i`` takes part
      (``lc_mode="transition"``, the default) or on every product state
      (``lc_mode="state"``, the literal reading, which loses models where
      ``j`` moves on alone after the shared event).
    * Initial states must agree on every global formula of the closure.
    """

    def __init__(self, base: Dnba, alpha: Formula, contexts: Mapping[str, TableauContext],
                 lc_mode: str = "transition"):
        if lc_mode not in ("transition", "state"):
            raise ValueError("lc_mode must be 'transition' or 'state'")
        super().__init__(base.components, base.agents)
        self.alpha = alpha
        self.contexts = dict(contexts)
        self.lc_mode = lc_mode
        self.global_formulas = tuple(
            f for f in self.contexts[self.agents[0]].positives if f.owner is None
        )
        self._comm_cache: dict = {}

    def _comms(self, agent: str, s):
        key = (agent, s)
        hit = self._comm_cache.get(key)
        if hit is None:
            B = tableau_set(s)
            hit = tuple((c.target, c.body, c in B) for c in self.contexts[agent].comms)
            self._comm_cache[key] = hit
        return hit

    def _lc_state(self, q) -> bool:
        for a, s in zip(self.agents, q):
            for target, body, inside in self._comms(a, s):
                if inside and not _holds(tableau_set(q[self.position[target]]), body):
                    return False
        return True

    @property
    def initial_states(self) -> list[tuple]:
        out = []
        for q in super().initial_states:
            sets = [tableau_set(s) for s in q]
            if any(
                len({f in B for B in sets}) > 1 for f in self.global_formulas
            ):
                continue
            if self.lc_mode == "state" and not self._lc_state(q):
                continue
            out.append(q)
        return out

    def allowed(self, q, letter, target) -> bool:
        movers = letter.agents
        for a in movers:
            for j, body, inside in self._comms(a, target[self.position[a]]):
                if inside:
                    if j not in movers:
                        return False  # SC1
                    if self.lc_mode == "transition" and not _holds(
                        tableau_set(target[self.position[j]]), body
                    ):
                        return False  # LC
                elif j in movers and _holds(tableau_set(target[self.position[j]]), body):
                    return False  # SC2
        if self.lc_mode == "state" and not self._lc_state(target):
            return False
        return True


def constrain_dtl(D: Dnba, alpha: Formula, lc_mode: str = "transition",
                  include_comm_bodies: bool = True) -> ConstrainedDnba:
    contexts = {}
    for a in D.agents:
        ctx = getattr(D.components[a], "context", None)
        contexts[a] = ctx if ctx is not None else TableauContext(alpha, a, include_comm_bodies)
    return ConstrainedDnba(D, alpha, contexts, lc_mode)


def dtl_automaton(alpha: Formula, sig: DistributedSignature, degeneralized: bool = True,
                  lc_mode: str = "transition", include_comm_bodies: bool = True) -> ConstrainedDnba:
    """``D_α`` from the (optionally degeneralized) tableau automata."""
    check_formula(alpha, sig)
    comps = {}
    for a in sig.agents:
        g = build_local_gnba(alpha, a, sig, include_comm_bodies)
        if degeneralized:
            n = degeneralize(g)
            n.context = g.context
            comps[a] = n
        else:
            comps[a] = g
    base = build_product(comps, sig.agents, disjoint_alphabets=False)
    return constrain_dtl(base, alpha, lc_mode, include_comm_bodies)


# ---------------------------------------------------------------------------
# explicit view (export and trimming)


@dataclass
class ExplicitProduct:
    states: list
    initial: list
    edges: list  # (source index, letter, target index)
    productive: set = field(default_factory=set)


def explore_product(D: Dnba, max_states: int | None = None, trim: bool = False) -> ExplicitProduct:
    """Reachable part of ``D``; with ``trim`` only states that can reach a fair
    cycle meeting every acceptance obligation are kept."""
    g = explore(D.initial_states, lambda q: list(D.transitions(q)), max_states)
    edges = [(u, lab, v) for u in range(len(g.nodes)) for lab, v in g.edges[u]]
    keep = set(range(len(g.nodes)))
    if trim:
        obligations = [f for _, _, f in D.obligations()]
        good = set()
        for comp in tarjan(g):
            members = set(comp)
            inner = [(u, lab, v) for u in comp for lab, v in g.edges[u] if v in members]
            if not inner:
                continue
            if not all(any(f(g.nodes[u]) for u in comp) for f in obligations):
                continue
            if not all(any(a in lab.agents for _, lab, _ in inner) for a in D.agents):
                continue
            good |= members
        back: dict = {}
        for u, _, v in edges:
            back.setdefault(v, []).append(u)
        keep = set(good)
        stack = list(good)
        while stack:
            v = stack.pop()
            for u in back.get(v, ()):
                if u not in keep:
                    keep.add(u)
                    stack.append(u)
    remap = {}
    states = []
    for u in range(len(g.nodes)):
        if u in keep:
            remap[u] = len(states)
            states.append(g.nodes[u])
    kept_edges = [(remap[u], lab, remap[v]) for u, lab, v in edges if u in keep and v in keep]
    initial = [remap[u] for u in g.initial if u in keep]
    return ExplicitProduct(states, initial, kept_edges, set(range(len(states))))


# ---------------------------------------------------------------------------
# satisfiability


class Witness(NamedTuple):
    word: LassoWord
    run: LassoRun


@dataclass
class SatReport:
    satisfiable: bool
    witness: Witness | None
    method: str
    states: int


class _FairnessCounter:
    """``D`` as one NBA: states ``(q, last movers, counter)``; the counter walks
    through ``ℱ_1 .. ℱ_n`` and then "agent i moved last" for every agent."""

    def __init__(self, D: Dnba, deadline: float | None):
        self.D = D
        self.deadline = deadline
        obligations = [f for _, _, f in D.obligations()]
        fair = [lambda q, last, a=a: a in last for a in D.agents]
        self.checks = [lambda q, last, f=f: f(q) for f in obligations] + fair
        self.m = len(self.checks)

    @property
    def initial_states(self):
        return [(q, frozenset(), 0) for q in self.D.initial_states]

    def _advance(self, node):
        q, last, c = node
        return (c + 1) % self.m if self.checks[c](q, last) else c

    def is_accepting(self, node) -> bool:
        q, last, c = node
        return c == 0 and self.checks[0](q, last)

    def transitions(self, node):
        if self.deadline is not None and time.monotonic() > self.deadline:
            raise ResourceLimitExceeded("time limit exceeded")
        c2 = self._advance(node)
        for letter, q2 in self.D.transitions(node[0]):
            yield letter, (q2, letter.agents, c2)

    def successors(self, node, letter):
        c2 = self._advance(node)
        return [(q2, letter.agents, c2) for q2 in self.D.successors(node[0], letter)]


def used_signature(alpha: Formula, sig: DistributedSignature) -> DistributedSignature:
    """Signature cut down to the propositions that occur in ``alpha``."""
    used = {n.name for n in walk(alpha) if isinstance(n, Prop)}
    return sig.restrict(used)


def decide(alpha: Formula, sig: DistributedSignature, method: str = "scc",
           max_states: int | None = None, timeout: float | None = None,
           verify: bool = True) -> SatReport:
    """Fair emptiness of ``D_α``.

    ``method="ndfs"`` degeneralizes every tableau automaton, folds the
    acceptance sets and the fairness obligations into one counter and runs
    nested DFS.  ``method="scc"`` keeps the generalized components and looks
    for a strongly connected component meeting every obligation directly.
    Propositions absent from ``alpha`` are left out of the alphabet; the
    witness makes them false.
    """
    check_formula(alpha, sig)
    small = used_signature(alpha, sig)
    deadline = None if timeout is None else time.monotonic() + timeout
    if method == "ndfs":
        D = dtl_automaton(alpha, small, degeneralized=True)
        aug = _FairnessCounter(D, deadline)
        found = find_accepting_lasso(aug, max_states)
        explored = -1
        if found is None:
            return SatReport(False, None, method, explored)
        word, arun = found
        run = LassoRun(word, tuple(n[0] for n in arun.prefix), tuple(n[0] for n in arun.loop))
    elif method == "scc":
        D = dtl_automaton(alpha, small, degeneralized=False)

        def succ(q):
            if deadline is not None and time.monotonic() > deadline:
                raise ResourceLimitExceeded("time limit exceeded")
            return list(D.transitions(q))

        g = explore(D.initial_states, succ, max_states)
        explored = len(g.nodes)
        preds = [f for _, _, f in D.obligations()]
        fair = [lambda u, lab, v, a=a: a in lab.agents for a in D.agents]
        lasso = find_generalized_lasso((), succ, preds, fair, graph=g)
        if lasso is None:
            return SatReport(False, None, method, explored)
        word = LassoWord(lasso.stem_labels, lasso.cycle_labels)
        run = LassoRun(word, lasso.stem_nodes, lasso.cycle_nodes)
    else:
        raise ValueError(f"unknown method {method!r}")
    if verify:
        _verify_witness(alpha, sig, D, word)
    return SatReport(True, Witness(word, run), method, explored)


def _verify_witness(alpha, sig, D, word):
    from .semantics import derive_structure, sat_global

    if not is_fair(word, sig.agents):
        raise AssertionError(f"witness {word!r} is not fair")  # pragma: no cover
    if not dnba_lasso_accepts(D, word):
        raise AssertionError(f"witness {word!r} rejected by the automaton")  # pragma: no cover
    if not sat_global(derive_structure(word, sig), alpha):
        raise AssertionError(f"witness {word!r} is not a model")


def satisfiable(alpha: Formula, sig: DistributedSignature, method: str = "scc",
                max_states: int | None = None, timeout: float | None = None) -> Witness | None:
    """A verified fair witness ``(word, run)`` of ``alpha``, or ``None``."""
    return decide(alpha, sig, method, max_states, timeout).witness
