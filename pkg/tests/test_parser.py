import random

import pytest
from hypothesis import given, settings, strategies as st

from dtl import Always, At, Comm, DistributedSignature, Imp, Next, Prop, parse_global, parse_local
from dtl.errors import ParseError, SignatureError
from dtl.formula import pretty, render
from oracles import random_global

SIG = DistributedSignature(["i", "j"], {"i": ["p"], "j": ["q", "q1", "q2"]})
p = Prop("i", "p")


def test_parse_implication():
    assert parse_global("@i[p] -> @i[p]", SIG) == Imp(At("i", p), At("i", p))


def test_parse_box_communication_example():
    got = parse_global("@i[ G (p -> C j [ q1 -> q2 ]) ]", SIG)
    body = Imp(Prop("j", "q1"), Prop("j", "q2"))
    assert got == At("i", Always(Imp(p, Comm("i", "j", body))))


def test_parse_double_negation():
    assert parse_global("@i[ !!p ]", SIG) == At("i", p)


def test_implication_is_right_associative():
    got = parse_local("p -> p -> p", "i", SIG)
    assert got == Imp(p, Imp(p, p))


def test_precedence_and_binds_tighter_than_or():
    assert parse_local("p | p & X p", "i", SIG) == parse_local("p | (p & X p)", "i", SIG)
    assert parse_local("!p -> p", "i", SIG) == Imp(parse_local("!p", "i", SIG), p)


def test_unicode_aliases():
    assert parse_global("@i[□(p → ○p)]", SIG) == parse_global("@i[G (p -> X p)]", SIG)


@pytest.mark.parametrize(
    "text",
    ["@i[p", "@i[p] ->", "@i[p]]", "@i[C j[]]", "p", "@i[p] & & @i[p]"],
)
def test_syntax_errors_have_positions(text):
    with pytest.raises(ParseError) as info:
        parse_global(text, SIG)
    assert info.value.line >= 1 and info.value.column >= 1


def test_error_column_points_at_offender():
    with pytest.raises(ParseError) as info:
        parse_global("@i[p] & @k[p]", SIG)
    assert info.value.column == 10


def test_undeclared_and_misplaced_props():
    with pytest.raises((ParseError, SignatureError)):
        parse_global("@i[zz]", SIG)
    with pytest.raises((ParseError, SignatureError)):
        parse_global("@i[q]", SIG)  # q belongs to j
    # inside C j[...] the scope switches to j
    parse_global("@i[C j[q]]", SIG)


SIG2 = DistributedSignature(["i", "j"], {"i": ["p", "r"], "j": ["q", "s"]})


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 10**9))
def test_render_roundtrip(seed):
    alpha = random_global(random.Random(seed), SIG2, max_temporal=3, max_closure=40, min_temporal=0)
    assert parse_global(render(alpha), SIG2) == alpha
    assert parse_global(pretty(alpha), SIG2) == alpha
