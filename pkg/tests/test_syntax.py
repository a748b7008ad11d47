import inspect

import pytest

from psiprio.errors import ArityMismatch
from psiprio.services import nominal
from psiprio.services.instances import FlipAssertion
from psiprio.services.nominal import Name
from psiprio.services.syntax import (
    NIL, Frame, Out, Output, Par, Restrict, assertion_guarded, encodable, frame_of, normal_form,
    objects_of, reduce_state, struct_congr, substitute, well_formed,
)

x, y, a = Name("x"), Name("y"), Name("a")


def test_actions_print_and_bind():
    assert str(Out(x, (), y)) == "x!y"
    abierta = Out(x, (a,), a)
    assert str(abierta) == "x!(new a)a"
    assert abierta.bn() == (a,)
    assert abierta.subject() == x


def test_frame_composes_assertions_and_collects_binders(agent, flip):
    f = frame_of(agent("(|{x}|) | out(x) | (new a)(|{y}|)"), flip)
    assert isinstance(f, Frame)
    assert f.assertion == FlipAssertion(frozenset({x, y}))
    assert len(f.binders) == 1
    assert frame_of(agent("out(x).(|{x}|)"), flip).assertion == flip.unit


def test_frame_of_xor_cancels(agent, flip):
    assert frame_of(agent("(|{x}|) | (|{x}|)"), flip).assertion == flip.unit


def test_well_formedness_diagnostics(agent):
    assert well_formed(agent("!out(x).(|{x}|)")) == []
    assert well_formed(agent("!(|{x}|)"))
    assert well_formed(agent("case T -> (|{x}|)"))
    assert not assertion_guarded(agent("out(x) | (|{y}|)"))


def test_encodability_diagnostics(agent):
    assert encodable(agent("case T -> out(x) [] x=x -> out(y)")) == []
    mezcla = encodable(agent("case T -> out(x) [] T -> in(y)"))
    assert [d.message for d in mezcla] == ["mixed choice"]
    assert [d.message for d in encodable(agent("!(out(x) | out(y))"))] == ["replication not prefix-guarded"]
    assert [d.message for d in encodable(agent("case T -> (new a)out(a)"))] == ["case branch not prefix-guarded"]


def test_substitution_avoids_capture(agent):
    P = agent("(new y)out(x,y)")
    Q = substitute(P, (x,), (y,))
    assert isinstance(Q, Restrict)
    assert Q.name != y
    assert nominal.alpha_eq(Q, Restrict(a, Output(y, a, NIL)))


def test_substitution_arity():
    with pytest.raises(ArityMismatch):
        substitute(NIL, (x, y), (x,))
    with pytest.raises(ArityMismatch):
        substitute(NIL, (x, x), (x, y))


def test_objects_skip_bound_names(agent):
    assert objects_of(agent("out(x,y) | (new a)out(x,a) | in(x,\\u,u).out(x,u)")) == (y,)


def test_structural_congruence(agent, flip):
    P, Q, R = agent("out(x)"), agent("in(y)"), agent("(|{x}|)")
    assert struct_congr(Par(P, NIL), P, 0, flip)
    assert struct_congr(Par(P, Par(Q, R)), Par(Par(Q, P), R), 0, flip)
    assert struct_congr(agent("(|{x}|) | (|{y}|)"), agent("(|{x,y}|)"), 0, flip)
    assert not struct_congr(P, Q, 0, flip)


def test_replication_folding_is_bounded(agent, flip):
    rep = agent("!out(x)")
    assert struct_congr(Par(agent("out(x)"), rep), rep, 1, flip)
    assert not struct_congr(Par(agent("out(x)"), rep), rep, 0, flip)
    dos = Par(agent("out(x)"), Par(agent("out(x)"), rep))
    assert struct_congr(dos, rep, 2, flip)
    assert not struct_congr(dos, rep, 1, flip)


def test_reduce_state_drops_unused_restrictions(agent, flip):
    assert reduce_state(agent("(new a)out(x) | 0"), flip) == agent("out(x)")
    assert isinstance(reduce_state(agent("(new a)out(a)"), flip), Restrict)


def test_normal_form_is_order_independent(agent, flip):
    assert normal_form(agent("in(y) | out(x)"), flip) == normal_form(agent("out(x) | in(y)"), flip)


def test_agent_defaults_print_at_import():
    assert repr(inspect.signature(Output).parameters["cont"].default) == repr(NIL)
    assert repr(NIL) in Output.__doc__
