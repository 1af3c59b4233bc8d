"""Compact word notation for tests.

A letter is written ``i:p,r j:`` (agent ``i`` with ``p`` and ``r`` true,
agent ``j`` with everything false); letters are separated by ``|``.
"""

from dtl import GlobalLetter, LassoWord


def letter(text: str) -> GlobalLetter:
    items = {}
    for part in text.split():
        agent, _, props = part.partition(":")
        items[agent] = frozenset(x for x in props.split(",") if x)
    return GlobalLetter(items)


def word(prefix: str, loop: str) -> LassoWord:
    pre = [letter(x) for x in prefix.split("|")] if prefix.strip() else []
    return LassoWord(tuple(pre), tuple(letter(x) for x in loop.split("|")))


def symbols(*parts) -> GlobalLetter:
    """Letter of opaque symbols, e.g. ``symbols(("1", "0"), ("2", "b"))``."""
    return GlobalLetter(dict(parts))


def fig_letter(text: str) -> GlobalLetter:
    """``"0,b"`` -> agent 1 reads ``0``, agent 2 reads ``b``."""
    items = {}
    for sym in text.split(","):
        items["1" if sym in "01" else "2"] = sym
    return GlobalLetter(items)


# transitions of the two-agent example product as drawn, edge by edge
DRAWN_PRODUCT = {
    (("q0", "p0"), ("q0", "p1")): ["b", "1,b"],
    (("q0", "p0"), ("q0", "p0")): ["1", "a", "b", "1,a", "1,b"],
    (("q0", "p0"), ("q1", "p1")): ["0,b"],
    (("q0", "p0"), ("q1", "p0")): ["0", "0,a", "0,b"],
    (("q0", "p1"), ("q0", "p1")): ["1", "b", "1,b"],
    (("q0", "p1"), ("q1", "p1")): ["0", "0,b"],
    (("q1", "p0"), ("q1", "p0")): ["0", "a", "b", "0,a", "0,b"],
    (("q1", "p0"), ("q0", "p0")): ["1", "1,a", "1,b"],
    (("q1", "p0"), ("q1", "p1")): ["b", "0,b"],
    (("q1", "p1"), ("q0", "p1")): ["1", "1,b"],
    (("q1", "p1"), ("q1", "p1")): ["0", "b", "0,b"],
}


def drawn_product_edges() -> set:
    return {(src, fig_letter(x), dst) for (src, dst), xs in DRAWN_PRODUCT.items() for x in xs}


def example_components():
    from dtl import Nba

    a1 = Nba(["q0", "q1"], ["0", "1"],
             {"q0": {"0": ["q1"], "1": ["q0"]}, "q1": {"0": ["q1"], "1": ["q0"]}},
             ["q0"], ["q1"], name="1")
    a2 = Nba(["p0", "p1"], ["a", "b"],
             {"p0": {"a": ["p0"], "b": ["p0", "p1"]}, "p1": {"b": ["p1"]}},
             ["p0"], ["p1"], name="2")
    return {"1": a1, "2": a2}


def fig_word(prefix: str, loop: str):
    pre = [fig_letter(x) for x in prefix.split()] if prefix else []
    return LassoWord(tuple(pre), tuple(fig_letter(x) for x in loop.split()))
