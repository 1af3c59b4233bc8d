import pytest
from hypothesis import given, settings, strategies as st
import random

from dtl import (
    Always, And, At, Comm, DistributedSignature, Eventually, Imp, Next, Not, Or, Prop, Top,
    closure, parse_global, subformulas_global, subformulas_local, valuations,
)
from dtl.errors import SignatureError
from dtl.formula import FormulaSet, project_down, render, walk
from oracles import random_global

SIG = DistributedSignature(["i", "j"], {"i": ["p"], "j": ["q", "q1", "q2"]})
p, q = Prop("i", "p"), Prop("j", "q")
q1, q2 = Prop("j", "q1"), Prop("j", "q2")

# @i[X(p -> C j[q])] -> @j[X q]
RUNNING = Imp(At("i", Next(Imp(p, Comm("i", "j", q)))), At("j", Next(q)))


def test_signature_rejects_shared_props():
    with pytest.raises(SignatureError):
        DistributedSignature(["i", "j"], {"i": ["p"], "j": ["p"]})


def test_signature_rejects_duplicate_agents():
    with pytest.raises(SignatureError):
        DistributedSignature(["i", "i"], {})


def test_signature_keeps_agent_order():
    assert DistributedSignature(["z", "a"]).agents == ("z", "a")


def test_double_negation_collapses():
    assert Not(Not(p)) is p
    assert Not(Not(At("i", p))) == At("i", p)


def test_comm_body_must_belong_to_target():
    with pytest.raises(SignatureError):
        Comm("i", "j", p)


def test_subformulas_local_of_box_example():
    phi = Always(Imp(p, Comm("i", "j", Imp(q1, q2))))
    got = subformulas_local(phi, "i")
    assert got == {phi, Imp(p, Comm("i", "j", Imp(q1, q2))), p, Comm("i", "j", Imp(q1, q2))}


def test_subformulas_local_atoms():
    assert subformulas_local(p, "i") == {p}
    assert subformulas_local(Next(q), "j") == {Next(q), q}


def test_subformulas_global_running_example():
    got = subformulas_global(RUNNING, include_comm_bodies=False)
    c = Comm("i", "j", q)
    expected = {
        RUNNING, At("i", Next(Imp(p, c))), At("j", Next(q)), Next(Imp(p, c)),
        Imp(p, c), p, c, Next(q), q,
    }
    assert got == expected and len(got) == 9
    # the body q of the communication formula is already present
    assert subformulas_global(RUNNING) == got


def test_subformulas_global_small():
    assert subformulas_global(At("i", p)) == {At("i", p), p}
    assert subformulas_global(Not(At("i", p))) == {Not(At("i", p)), At("i", p), p}


def test_closure_examples():
    assert closure(At("i", p)) == {At("i", p), Not(At("i", p)), p, Not(p)}
    sub = subformulas_global(RUNNING)
    assert len(closure(RUNNING)) == 2 * len(sub)


def test_project_down_examples():
    c = Comm("i", "j", q)
    B = {RUNNING, Next(Imp(p, c)), c, Next(q)}
    assert project_down(B, "i") == {RUNNING, Next(Imp(p, c)), c}
    assert project_down(B, "j") == {RUNNING, Next(q)}
    only_global = {RUNNING, At("i", p)}
    assert project_down(only_global, "i") == only_global


def test_valuations():
    assert set(valuations(SIG, "i")) == {frozenset({"p"}), frozenset()}
    assert valuations(DistributedSignature(["k"]), "k") == [frozenset()]
    assert len(valuations(SIG, "j")) == 8


def test_sugar_desugars_to_core():
    assert And(p, p) == Not(Imp(p, Not(p)))
    assert Or(p, p) == Imp(Not(p), p)
    assert Eventually(p) == Not(Always(Not(p)))
    for node in walk(At("i", And(Eventually(p), Or(p, Top("i"))))):
        assert type(node).__name__ in {"At", "Not", "Imp", "Always", "Prop", "Top"}


def test_self_communication_is_accepted():
    f = At("i", Next(Comm("i", "i", p)))
    assert render(parse_global(render(f), SIG)) == render(f)


def test_formula_set_is_canonically_ordered():
    a = FormulaSet([p, Next(p), Top("i")])
    b = FormulaSet([Top("i"), Next(p), p])
    assert list(a) == list(b) and a == b and hash(a) == hash(b)


SIG2 = DistributedSignature(["i", "j"], {"i": ["p", "r"], "j": ["q", "s"]})


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 10**9))
def test_closure_properties(seed):
    alpha = random_global(random.Random(seed), SIG2, max_temporal=2, min_temporal=0)
    cl = closure(alpha)
    for f in cl:
        assert Not(f) in cl
        # no stored double negation
        assert not (isinstance(f, Not) and isinstance(f.body, Not))
    # closing again adds nothing
    again = set()
    for f in cl:
        again |= {f, Not(f)}
    assert again == set(cl.members)
    # projections onto all agents recover the set
    union = set()
    for a in SIG2.agents:
        union |= set(project_down(cl, a).members)
    assert union == set(cl.members)


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 10**9))
def test_local_subformulas_stay_with_owner(seed):
    alpha = random_global(random.Random(seed), SIG2, max_temporal=2, min_temporal=0)
    for node in walk(alpha):
        if isinstance(node, At):
            sub = subformulas_local(node.body, node.agent)
            for f in sub:
                assert f.owner == node.agent
            comm_bodies = {c.body for c in sub if isinstance(c, Comm)}
            assert not (comm_bodies & set(sub.members) - {n for n in sub if n.owner == node.agent})
