"""Ultimately periodic words and global (distributed) letters."""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd
from typing import Any, Generic, Hashable, Iterable, Iterator, Mapping, Sequence, TypeVar

from .errors import UnfairWordError

T = TypeVar("T")


class GlobalLetter(Mapping):
    """Nonempty partial map agent -> local symbol (at most one symbol per agent).

    For DTL the local symbols are valuations, but the product construction
    treats them as opaque hashable values.
    """

    __slots__ = ("_map", "_hash")

    def __init__(self, items: Mapping[str, Hashable] | Iterable[tuple[str, Hashable]]):
        data = dict(items)
        if not data:
            raise ValueError("a global letter must involve at least one agent")
        object.__setattr__(self, "_map", data)
        object.__setattr__(self, "_hash", hash(frozenset(data.items())))

    def __setattr__(self, name, value):
        raise AttributeError("GlobalLetter is immutable")

    def __getitem__(self, agent):
        return self._map[agent]

    def __iter__(self):
        return iter(sorted(self._map))

    def __len__(self):
        return len(self._map)

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        if isinstance(other, GlobalLetter):
            return self._hash == other._hash and self._map == other._map
        return NotImplemented

    def __reduce__(self):
        return (GlobalLetter, (self._map,))

    @property
    def agents(self) -> frozenset[str]:
        return frozenset(self._map)

    def restrict(self, agent: str) -> Any:
        """The agent's symbol, or ``None`` when the agent does not participate."""
        return self._map.get(agent)

    def __repr__(self):
        return "{" + ", ".join(f"{a}:{_show(self._map[a])}" for a in self) + "}"


def _show(symbol) -> str:
    if isinstance(symbol, frozenset):
        return "{" + ",".join(sorted(map(str, symbol))) + "}"
    return str(symbol)


@dataclass(frozen=True)
class LassoWord(Generic[T]):
    """The omega-word ``prefix · loop^ω``."""

    prefix: tuple
    loop: tuple

    def __post_init__(self):
        object.__setattr__(self, "prefix", tuple(self.prefix))
        object.__setattr__(self, "loop", tuple(self.loop))
        if not self.loop:
            raise ValueError("the loop of a lasso word must be nonempty")

    @property
    def span(self) -> int:
        """Number of canonical positions, ``|prefix| + |loop|``."""
        return len(self.prefix) + len(self.loop)

    def canonical(self, k: int) -> int:
        """Canonical position in ``[0, span)`` equivalent to position ``k``."""
        p = len(self.prefix)
        if k < p:
            return k
        return p + (k - p) % len(self.loop)

    def successor(self, pos: int) -> int:
        """Canonical position following canonical position ``pos``."""
        nxt = pos + 1
        return len(self.prefix) if nxt == self.span else nxt

    def __getitem__(self, k: int):
        c = self.canonical(k)
        p = len(self.prefix)
        return self.prefix[c] if c < p else self.loop[c - p]

    def letters(self) -> tuple:
        return self.prefix + self.loop

    def unroll(self, n: int) -> list:
        return [self[k] for k in range(n)]

    def __iter__(self) -> Iterator:
        k = 0
        while True:
            yield self[k]
            k += 1

    def rotate(self) -> "LassoWord[T]":
        """Same omega-word with the first loop letter moved into the prefix."""
        return LassoWord(self.prefix + self.loop[:1], self.loop[1:] + self.loop[:1])

    def omega_equal(self, other: "LassoWord") -> bool:
        n = max(len(self.prefix), len(other.prefix))
        n += len(self.loop) * len(other.loop) // gcd(len(self.loop), len(other.loop))
        return all(self[k] == other[k] for k in range(n))

    def normalized(self) -> "LassoWord[T]":
        """Shortest representation: primitive loop, prefix rolled into the loop."""
        loop = self.loop
        n = len(loop)
        for d in range(1, n + 1):
            if n % d == 0 and loop == loop[:d] * (n // d):
                loop = loop[:d]
                break
        prefix = list(self.prefix)
        while prefix and prefix[-1] == loop[-1]:
            prefix.pop()
            loop = loop[-1:] + loop[:-1]
        return LassoWord(tuple(prefix), loop)

    def map(self, fn) -> "LassoWord":
        return LassoWord(tuple(map(fn, self.prefix)), tuple(map(fn, self.loop)))

    def __repr__(self):
        pre = " ".join(map(repr, self.prefix))
        cyc = " ".join(map(repr, self.loop))
        return f"LassoWord({pre} ({cyc})^ω)" if pre else f"LassoWord(({cyc})^ω)"


def fold_sequence(keys: Sequence[Hashable], start: int = 0) -> tuple[int, int] | None:
    """Find the first ``k1 >= start`` whose key repeats later at ``k2``.

    Returns ``(k1, k2)`` or ``None``.  Used to close unrolled ultimately
    periodic sequences back into lassos.
    """
    seen: dict[Hashable, int] = {}
    for k in range(start, len(keys)):
        if keys[k] in seen:
            return seen[keys[k]], k
        seen[keys[k]] = k
    return None


def starved_agents(w: LassoWord, agents: Iterable[str]) -> list[str]:
    present = set()
    for letter in w.loop:
        present |= letter.agents
    return [a for a in agents if a not in present]


def is_fair(w: LassoWord, agents: Iterable[str]) -> bool:
    """Every agent participates in some loop letter (hence infinitely often)."""
    return not starved_agents(w, agents)


def check_fair(w: LassoWord, agents: Iterable[str]) -> None:
    starved = starved_agents(w, agents)
    if starved:
        raise UnfairWordError(starved)


def project_word(w: LassoWord, agent: str) -> LassoWord:
    """Local word of ``agent``: drop letters without it and unwrap its symbol."""
    check_fair(w, [agent])
    return LassoWord(
        tuple(a[agent] for a in w.prefix if agent in a.agents),
        tuple(a[agent] for a in w.loop if agent in a.agents),
    )
