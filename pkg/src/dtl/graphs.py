"""Explicit-state graph search shared by the automata modules.

Graphs are given implicitly by initial nodes and a successor function
returning ``(label, node)`` pairs in a deterministic order.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Callable, Hashable, Iterable, Sequence

from .errors import ResourceLimitExceeded

Succ = Callable[[Hashable], Iterable[tuple[Hashable, Hashable]]]


@dataclass
class ExplicitGraph:
    nodes: list
    index: dict
    edges: list  # edges[u] = list of (label, v) with integer endpoints
    initial: list


@dataclass(frozen=True)
class Lasso:
    """Stem and cycle through a graph: ``stem_nodes[0]`` is initial, the cycle
    starts at the node where the stem ends and returns to it."""

    stem_nodes: tuple
    stem_labels: tuple
    cycle_nodes: tuple
    cycle_labels: tuple


def explore(initials: Iterable, succ: Succ, max_states: int | None = None) -> ExplicitGraph:
    """Breadth-first exploration of everything reachable."""
    nodes, index, edges, initial = [], {}, [], []

    def add(n):
        if n not in index:
            if max_states is not None and len(nodes) >= max_states:
                raise ResourceLimitExceeded(f"state space exceeds {max_states} states")
            index[n] = len(nodes)
            nodes.append(n)
            edges.append(None)
            queue.append(index[n])
        return index[n]

    queue: deque = deque()
    for n in initials:
        i = add(n)
        if i not in initial:
            initial.append(i)
    while queue:
        u = queue.popleft()
        out = []
        for label, v in succ(nodes[u]):
            out.append((label, add(v)))
        edges[u] = out
    return ExplicitGraph(nodes, index, edges, initial)


def tarjan(graph: ExplicitGraph) -> list[list[int]]:
    """Strongly connected components (iterative Tarjan), reverse topological order."""
    n = len(graph.nodes)
    low = [0] * n
    num = [-1] * n
    on_stack = [False] * n
    stack: list[int] = []
    comps: list[list[int]] = []
    counter = 0
    for root in range(n):
        if num[root] != -1:
            continue
        work = [(root, 0)]
        num[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack[root] = True
        while work:
            u, i = work[-1]
            out = graph.edges[u]
            if i < len(out):
                work[-1] = (u, i + 1)
                v = out[i][1]
                if num[v] == -1:
                    num[v] = low[v] = counter
                    counter += 1
                    stack.append(v)
                    on_stack[v] = True
                    work.append((v, 0))
                elif on_stack[v]:
                    low[u] = min(low[u], num[v])
            else:
                work.pop()
                if work:
                    parent = work[-1][0]
                    low[parent] = min(low[parent], low[u])
                if low[u] == num[u]:
                    comp = []
                    while True:
                        w = stack.pop()
                        on_stack[w] = False
                        comp.append(w)
                        if w == u:
                            break
                    comps.append(sorted(comp))
    return comps


def _bfs_path(graph, sources, targets, allowed=None):
    """Shortest path (as node and label lists) from any source to any target."""
    targets = set(targets)
    parent = {}
    queue = deque()
    for s in sources:
        if s not in parent:
            parent[s] = None
            queue.append(s)
    while queue:
        u = queue.popleft()
        if u in targets:
            nodes, labels = [u], []
            while parent[u] is not None:
                pu, lab = parent[u]
                nodes.append(pu)
                labels.append(lab)
                u = pu
            return nodes[::-1], labels[::-1]
        for lab, v in graph.edges[u]:
            if v not in parent and (allowed is None or v in allowed):
                parent[v] = (u, lab)
                queue.append(v)
    return None


def find_generalized_lasso(
    initials: Iterable,
    succ: Succ,
    state_obligations: Sequence[Callable[[Hashable], bool]] = (),
    edge_obligations: Sequence[Callable[[Hashable, Hashable, Hashable], bool]] = (),
    max_states: int | None = None,
    graph: ExplicitGraph | None = None,
) -> Lasso | None:
    """A reachable cycle meeting every node predicate at some node and every
    edge predicate at some edge, or ``None``."""
    g = graph or explore(initials, succ, max_states)
    for comp in reversed(tarjan(g)):
        members = set(comp)
        inner = [(u, lab, v) for u in comp for lab, v in g.edges[u] if v in members]
        if not inner:
            continue
        node_targets = []
        ok = True
        for pred in state_obligations:
            hit = next((u for u in comp if pred(g.nodes[u])), None)
            if hit is None:
                ok = False
                break
            node_targets.append(hit)
        if not ok:
            continue
        edge_targets = []
        for pred in edge_obligations:
            hit = next(
                ((u, lab, v) for u, lab, v in inner if pred(g.nodes[u], lab, g.nodes[v])), None
            )
            if hit is None:
                ok = False
                break
            edge_targets.append(hit)
        if not ok:
            continue
        return _assemble(g, members, inner, node_targets, edge_targets)
    return None


def _assemble(g, members, inner, node_targets, edge_targets) -> Lasso:
    stem_nodes, stem_labels = _bfs_path(g, g.initial, members)
    entry = stem_nodes[-1]
    cyc_nodes, cyc_labels = [entry], []

    def walk_to(target):
        path = _bfs_path(g, [cyc_nodes[-1]], [target], members)
        cyc_nodes.extend(path[0][1:])
        cyc_labels.extend(path[1])

    for t in node_targets:
        walk_to(t)
    for u, lab, v in edge_targets:
        walk_to(u)
        cyc_nodes.append(v)
        cyc_labels.append(lab)
    if not cyc_labels:
        # no obligation forced a move: leave along any internal edge
        u, lab, v = next(e for e in inner if e[0] == entry)
        cyc_nodes.append(v)
        cyc_labels.append(lab)
    walk_to(entry)
    cyc_nodes.pop()  # the closing node repeats the entry
    conv = lambda xs: tuple(g.nodes[x] for x in xs)
    return Lasso(conv(stem_nodes[:-1]), tuple(stem_labels), conv(cyc_nodes), tuple(cyc_labels))


def nested_dfs(
    initials: Iterable, succ: Succ, accepting: Callable[[Hashable], bool], max_states: int | None = None
) -> Lasso | None:
    """Classic nested depth-first search for a reachable accepting cycle."""
    visited: set = set()
    flagged: set = set()
    for s0 in initials:
        if s0 in visited:
            continue
        visited.add(s0)
        stack = [(s0, iter(list(succ(s0))), None)]
        while stack:
            node, it, _ = stack[-1]
            pushed = False
            for lab, nxt in it:
                if nxt not in visited:
                    if max_states is not None and len(visited) >= max_states:
                        raise ResourceLimitExceeded(f"state space exceeds {max_states} states")
                    visited.add(nxt)
                    stack.append((nxt, iter(list(succ(nxt))), lab))
                    pushed = True
                    break
            if pushed:
                continue
            if accepting(node):
                cycle = _inner_dfs(node, succ, flagged)
                if cycle is not None:
                    stem_nodes = tuple(n for n, _, _ in stack[:-1])
                    stem_labels = tuple(lab for _, _, lab in stack[1:])
                    return Lasso(stem_nodes, stem_labels, cycle[0], cycle[1])
            stack.pop()
    return None


def _inner_dfs(seed, succ, flagged):
    stack = [(seed, iter(list(succ(seed))), None)]
    while stack:
        node, it, _ = stack[-1]
        pushed = False
        for lab, nxt in it:
            if nxt == seed:
                nodes = tuple(n for n, _, _ in stack)
                labels = tuple(l for _, _, l in stack[1:]) + (lab,)
                return nodes, labels
            if nxt not in flagged:
                flagged.add(nxt)
                stack.append((nxt, iter(list(succ(nxt))), lab))
                pushed = True
                break
        if not pushed:
            stack.pop()
    return None
