"""Independent reference procedures used by the test-suite.

Nothing here calls the automata pipeline; the procedures either enumerate
or hand the problem to an off-the-shelf SAT solver.
"""

from __future__ import annotations

import itertools
import random

from pysat.formula import IDPool
from pysat.solvers import Minisat22

from dtl.formula import (
    Always,
    And,
    At,
    Comm,
    DistributedSignature,
    Eventually,
    Imp,
    Next,
    Not,
    Or,
    Prop,
    Top,
    closure,
    walk,
)
from dtl.words import GlobalLetter, LassoWord

# ---------------------------------------------------------------------------
# random formulas


def temporal_depth(f) -> int:
    own = 1 if isinstance(f, (Next, Always, Comm)) else 0
    return own + max((temporal_depth(c) for c in f.children()), default=0)


def random_local(rng: random.Random, sig: DistributedSignature, agent: str, depth: int,
                 temporal: int, allow_comm: bool = True):
    props = sig.sorted_props(agent)
    others = [a for a in sig.agents if a != agent]
    if depth <= 0 or rng.random() < 0.15:
        if props and rng.random() < 0.9:
            return Prop(agent, rng.choice(props))
        return Top(agent)
    choices = ["not", "and", "or", "imp"]
    if temporal > 0:
        choices += ["X", "G", "F", "X", "G", "F"]
        if allow_comm and others:
            choices += ["C", "C", "C"]
    op = rng.choice(choices)
    sub = lambda t=temporal: random_local(rng, sig, agent, depth - 1, t, allow_comm)
    if op == "not":
        return Not(sub())
    if op == "and":
        return And(sub(), sub())
    if op == "or":
        return Or(sub(), sub())
    if op == "imp":
        return Imp(sub(), sub())
    if op == "X":
        return Next(sub(temporal - 1))
    if op == "G":
        return Always(sub(temporal - 1))
    if op == "F":
        return Eventually(sub(temporal - 1))
    target = rng.choice(others)
    return Comm(agent, target, random_local(rng, sig, target, depth - 1, temporal - 1, allow_comm))


def random_global(rng: random.Random, sig: DistributedSignature, max_temporal: int = 2,
                  max_closure: int = 14, allow_comm: bool = True, atoms: int | None = None,
                  min_temporal: int = 1):
    """Random global formula within the closure and nesting bounds."""
    while True:
        n = atoms or rng.choice([1, 2, 2, 3])
        parts = []
        for _ in range(n):
            agent = rng.choice(sig.agents)
            parts.append(At(agent, random_local(rng, sig, agent, 3, max_temporal, allow_comm)))
        f = parts[0]
        for g in parts[1:]:
            f = rng.choice([And, Or, Imp])(f, g)
        if rng.random() < 0.3:
            f = Not(f)
        if min_temporal <= temporal_depth(f) <= max_temporal and len(closure(f)) <= max_closure:
            return f


def random_lasso(rng: random.Random, sig: DistributedSignature, max_prefix: int = 4,
                 max_loop: int = 3) -> LassoWord:
    """Random fair lasso over full valuations of the signature."""
    agents = sig.agents

    def letter():
        k = rng.randint(1, len(agents))
        who = rng.sample(agents, k)
        return GlobalLetter(
            {a: frozenset(p for p in sig.props[a] if rng.random() < 0.5) for a in who}
        )

    while True:
        pre = [letter() for _ in range(rng.randint(0, max_prefix))]
        loop = [letter() for _ in range(rng.randint(1, max_loop))]
        if all(any(a in x.agents for x in loop) for a in agents):
            return LassoWord(pre, loop)


def all_letters(sig: DistributedSignature):
    out = []
    for r in range(1, len(sig.agents) + 1):
        for who in itertools.combinations(sig.agents, r):
            vals = []
            for a in who:
                props = sig.sorted_props(a)
                vals.append(
                    [frozenset(p for p, b in zip(props, bits) if b)
                     for bits in itertools.product((False, True), repeat=len(props))]
                )
            for combo in itertools.product(*vals):
                out.append(GlobalLetter(dict(zip(who, combo))))
    return out


def all_fair_lassos(sig: DistributedSignature, max_prefix: int, max_loop: int):
    letters = all_letters(sig)
    for p in range(max_prefix + 1):
        for pre in itertools.product(letters, repeat=p):
            for l in range(1, max_loop + 1):
                for loop in itertools.product(letters, repeat=l):
                    if all(any(a in x.agents for x in loop) for a in sig.agents):
                        yield LassoWord(pre, loop)


# ---------------------------------------------------------------------------
# bounded satisfiability through SAT


class _Encoder:
    """CNF for "the lasso of shape (P, L) satisfies alpha"; participation and
    valuations of every position are free variables."""

    def __init__(self, sig, P, L):
        self.sig, self.P, self.L = sig, P, L
        self.n = P + L
        self.U = P + 2 * L  # frames -1 .. U-1; frames >= U repeat earlier ones
        self.pool = IDPool()
        self.clauses = []
        self.true = self.pool.id(("true",))
        self.clauses.append([self.true])
        self.memo = {}
        for c in range(self.n):
            self.clauses.append([self.part(c, a) for a in sig.agents])
        for a in sig.agents:
            self.clauses.append([self.part(c, a) for c in range(P, self.n)])

    def pos(self, k):
        return k if k < self.n else self.P + (k - self.P) % self.L

    def frame(self, f):
        while f >= self.U:
            f -= self.L
        return f

    def part(self, c, a):
        return self.pool.id(("part", c, a))

    def val(self, c, a, p):
        return self.pool.id(("val", c, a, p))

    def fresh(self):
        return self.pool.id(("aux", len(self.pool.obj2id)))

    def ite(self, c, x, y):
        v = self.fresh()
        self.clauses += [[-c, -x, v], [-c, x, -v], [c, -y, v], [c, y, -v]]
        return v

    def conj(self, lits):
        v = self.fresh()
        for x in lits:
            self.clauses.append([-v, x])
        self.clauses.append([v] + [-x for x in lits])
        return v

    def next_move(self, a, f, leaf):
        """ite-chain over the first position after frame f where a moves."""
        out = -self.true
        for d in range(self.n + self.L, 0, -1):
            k = f + d
            out = self.ite(self.part(self.pos(k), a), leaf(k), out)
        return out

    def local(self, a, f, phi):
        f = self.frame(f)
        key = (a, f, phi)
        if key in self.memo:
            return self.memo[key]
        if isinstance(phi, Prop):
            lit = self.next_move(a, f, lambda k: self.val(self.pos(k), a, phi.name))
        elif isinstance(phi, Top):
            lit = self.true
        elif isinstance(phi, Not):
            lit = -self.local(a, f, phi.body)
        elif isinstance(phi, Imp):
            x, y = self.local(a, f, phi.left), self.local(a, f, phi.right)
            lit = -self.conj([x, -y])
        elif isinstance(phi, Next):
            lit = self.next_move(a, f, lambda k: self.local(a, k, phi.body))
        elif isinstance(phi, Always):
            frames = range(f, max(self.U, f + self.L))
            lit = self.conj([self.local(a, g, phi.body) for g in frames])
        elif isinstance(phi, Comm):
            lit = self.comm(a, f, phi)
        else:
            raise TypeError(phi)
        self.memo[key] = lit
        return lit

    def comm(self, a, f, phi):
        if f < 0:
            return -self.true
        c = self.pos(f)
        here = self.conj([self.part(c, phi.target), self.local(phi.target, f, phi.body)])
        return self.ite(self.part(c, a), here, self.comm(a, f - 1, phi))

    def glob(self, alpha):
        if isinstance(alpha, Not):
            return -self.glob(alpha.body)
        if isinstance(alpha, Imp):
            return -self.conj([self.glob(alpha.left), -self.glob(alpha.right)])
        if isinstance(alpha, At):
            return self.local(alpha.agent, -1, alpha.body)
        raise TypeError(alpha)

    def decode(self, model):
        true = {x for x in model if x > 0}
        letters = []
        for c in range(self.n):
            item = {}
            for a in self.sig.agents:
                if self.part(c, a) in true:
                    item[a] = frozenset(
                        p for p in self.sig.props[a] if self.val(c, a, p) in true
                    )
            letters.append(GlobalLetter(item))
        return LassoWord(letters[: self.P], letters[self.P:])


def bounded_model(alpha, sig: DistributedSignature, max_prefix: int = 3, max_loop: int = 3):
    """A fair lasso model with the given bounds, or ``None`` if none exists."""
    used = {n.name for n in walk(alpha) if isinstance(n, Prop)}
    small = sig.restrict(used)
    for L in range(1, max_loop + 1):
        for P in range(max_prefix + 1):
            enc = _Encoder(small, P, L)
            root = enc.glob(alpha)
            with Minisat22(bootstrap_with=enc.clauses + [[root]]) as solver:
                if solver.solve():
                    return enc.decode(solver.get_model())
    return None


# ---------------------------------------------------------------------------
# single-agent LTL on lassos


def ltl_holds(word: LassoWord, phi, k: int = 0, memo=None) -> bool:
    """Textbook LTL on a lasso of valuations (positions, not local states)."""
    memo = {} if memo is None else memo
    k = word.canonical(k)
    key = (k, phi)
    if key in memo:
        return memo[key]
    if isinstance(phi, Prop):
        r = phi.name in word[k]
    elif isinstance(phi, Top):
        r = True
    elif isinstance(phi, Not):
        r = not ltl_holds(word, phi.body, k, memo)
    elif isinstance(phi, Imp):
        r = (not ltl_holds(word, phi.left, k, memo)) or ltl_holds(word, phi.right, k, memo)
    elif isinstance(phi, Next):
        r = ltl_holds(word, phi.body, k + 1, memo)
    elif isinstance(phi, Always):
        start = k if k < len(word.prefix) else len(word.prefix)
        r = all(ltl_holds(word, phi.body, j, memo) for j in range(start, word.span))
    else:
        raise TypeError(phi)
    memo[key] = r
    return r


def ltl_global(word: LassoWord, alpha, memo=None) -> bool:
    memo = {} if memo is None else memo
    if isinstance(alpha, Not):
        return not ltl_global(word, alpha.body, memo)
    if isinstance(alpha, Imp):
        return (not ltl_global(word, alpha.left, memo)) or ltl_global(word, alpha.right, memo)
    return ltl_holds(word, alpha.body, 0, memo)


def ltl_bounded_model(alpha, sig: DistributedSignature, max_prefix: int = 3, max_loop: int = 3):
    """Exhaustive search over single-agent lassos of valuations."""
    (agent,) = sig.agents
    used = sorted({n.name for n in walk(alpha) if isinstance(n, Prop)})
    vals = [frozenset(p for p, b in zip(used, bits) if b)
            for bits in itertools.product((False, True), repeat=len(used))]
    for L in range(1, max_loop + 1):
        for P in range(max_prefix + 1):
            for pre in itertools.product(vals, repeat=P):
                for loop in itertools.product(vals, repeat=L):
                    w = LassoWord(pre, loop)
                    if ltl_global(w, alpha):
                        return w
    return None


# ---------------------------------------------------------------------------
# direct evaluation of next/communication formulas on unrolled words


def naive_global(word: LassoWord, alpha) -> bool:
    """Evaluate directly from the definitions; ``G`` is not supported."""
    if isinstance(alpha, Not):
        return not naive_global(word, alpha.body)
    if isinstance(alpha, Imp):
        return (not naive_global(word, alpha.left)) or naive_global(word, alpha.right)
    return naive_local(word, alpha.agent, 0, alpha.body)


def _event_position(word, agent, m):
    """Word position of agent's m-th event (m >= 1)."""
    seen, k = 0, -1
    while seen < m:
        k += 1
        if agent in word[k].agents:
            seen += 1
    return k


def naive_local(word: LassoWord, agent: str, m: int, phi) -> bool:
    if isinstance(phi, Prop):
        k = _event_position(word, agent, m + 1)
        return phi.name in word[k][agent]
    if isinstance(phi, Top):
        return True
    if isinstance(phi, Not):
        return not naive_local(word, agent, m, phi.body)
    if isinstance(phi, Imp):
        return (not naive_local(word, agent, m, phi.left)) or naive_local(word, agent, m, phi.right)
    if isinstance(phi, Next):
        return naive_local(word, agent, m + 1, phi.body)
    if isinstance(phi, Comm):
        if m == 0:
            return False
        k = _event_position(word, agent, m)
        letter = word[k]
        if phi.target not in letter.agents:
            return False
        mj = sum(1 for x in range(k + 1) if phi.target in word[x].agents)
        return naive_local(word, phi.target, mj, phi.body)
    raise TypeError(f"unsupported operator in {phi!r}")


# ---------------------------------------------------------------------------
# random products with random runs


def random_component(rng: random.Random, agent: str):
    from dtl import Nba

    n = rng.randint(1, 3)
    states = [f"{agent}{k}" for k in range(n)]
    alphabet = [f"{agent}_{x}" for x in "ab"[: rng.randint(1, 2)]]
    delta = {}
    for s in states:
        for a in alphabet:
            # complete automata: every letter has a successor
            succ = [t for t in states if rng.random() < 0.5] or [rng.choice(states)]
            delta.setdefault(s, {})[a] = succ
    accepting = [s for s in states if rng.random() < 0.5]
    return Nba(states, alphabet, delta, [states[0]], accepting, name=agent)


def random_product_run(rng: random.Random):
    """A random product, a random fair word over it and a random lasso run."""
    from dtl import LassoRun, build_product

    agents = [f"g{k}" for k in range(rng.randint(1, 3))]
    comps = {a: random_component(rng, a) for a in agents}
    D = build_product(comps, agents)

    def letter():
        who = rng.sample(agents, rng.randint(1, len(agents)))
        return GlobalLetter({a: rng.choice(comps[a].alphabet) for a in who})

    while True:
        pre = [letter() for _ in range(rng.randint(0, 3))]
        loop = [letter() for _ in range(rng.randint(1, 3))]
        if all(any(a in x.agents for x in loop) for a in agents):
            break
    w = LassoWord(tuple(pre), tuple(loop))
    choice: dict = {}
    node = (D.initial_states[0], 0)
    trail, first = [], {}
    while node not in first or node[1] < len(w.prefix):
        if node[1] >= len(w.prefix):
            first[node] = len(trail)
        trail.append(node)
        q, k = node
        if node not in choice:
            choice[node] = rng.choice(D.successors(q, w[k]))
        node = (choice[node], w.successor(k))
    start = first[node]
    letters = [w[k] for k in range(len(trail))]
    unrolled = LassoWord(tuple(letters[:start]), tuple(letters[start:]))
    run = LassoRun(unrolled, tuple(n[0] for n in trail[:start]), tuple(n[0] for n in trail[start:]))
    return D, w, run


def holds_by_sat(w: LassoWord, alpha, sig: DistributedSignature) -> bool:
    """Truth of ``alpha`` on a fixed fair lasso, through the SAT encoding."""
    enc = _Encoder(sig, len(w.prefix), len(w.loop))
    root = enc.glob(alpha)
    fixed = []
    for c in range(w.span):
        for a in sig.agents:
            inside = a in w[c].agents
            fixed.append(enc.part(c, a) if inside else -enc.part(c, a))
            if inside:
                for p in sig.props[a]:
                    v = enc.val(c, a, p)
                    fixed.append(v if p in w[c][a] else -v)
    with Minisat22(bootstrap_with=enc.clauses) as solver:
        return solver.solve(assumptions=fixed + [root])


def lasso_corpus(seed: int = 0):
    """Fair lassos with ``|prefix| <= 4``, ``|loop| <= 3``, at most two agents
    and at most two propositions each: exhaustive where the count is small,
    sampled otherwise.  Yields ``(sig, word)``."""
    one = DistributedSignature(["i"], {"i": ["p"]})
    bare = DistributedSignature(["i", "j"], {})
    for sig in (one, bare):
        for w in all_fair_lassos(sig, 4, 3):
            yield sig, w
    rng = random.Random(seed)
    two = DistributedSignature(["i"], {"i": ["p", "q"]})
    small = DistributedSignature(["i", "j"], {"i": ["p"], "j": ["q"]})
    full = DistributedSignature(["i", "j"], {"i": ["p", "r"], "j": ["q", "s"]})
    for sig, n in ((two, 500), (small, 1500), (full, 1500)):
        for _ in range(n):
            yield sig, random_lasso(rng, sig, 4, 3)
