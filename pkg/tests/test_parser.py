import pytest

from psiprio.errors import ParseError
from psiprio.services.instances import PrioCond, FlipAssertion, LeveledName, NameEq
from psiprio.services.nominal import Name
from psiprio.services.parser import parse_agent, parse_assertion, parse_condition, parse_macros, parse_term
from psiprio.services.syntax import NIL, Assert, Case, Input, Output, Par, Repl, Restrict

x, y, u = Name("x"), Name("y"), Name("u")


def test_prefix_forms(flip):
    assert parse_agent("out(x,y).0", flip) == Output(x, y, NIL)
    assert parse_agent("out(x)", flip) == Output(x, x, NIL)
    assert parse_agent("in(x)", flip) == Input(x, (), x, NIL)
    assert parse_agent("in(x,y).0", flip) == Input(x, (), y, NIL)
    assert parse_agent("in(x,\\u,u).out(u,u)", flip) == Input(x, (u,), u, Output(u, u, NIL))


def test_composite_forms(flip):
    P = parse_agent("(new a b)out(a,b) | !out(x).(|{x,y}|)", flip)
    assert P == Par(
        Restrict(Name("a"), Restrict(Name("b"), Output(Name("a"), Name("b"), NIL))),
        Repl(Output(x, x, Assert(FlipAssertion(frozenset({x, y}))))),
    )
    C = parse_agent("case x=x -> out(x) [] T -> out(y)", flip)
    assert isinstance(C, Case) and len(C.branches) == 2


def test_printing_round_trips(flip):
    for texto in ("out(x,y).in(y,\\u,u).0", "(new a)out(a,a).0 | !in(x,y).0", "(|{x}|) | out(x,x).0 | 0"):
        P = parse_agent(texto, flip)
        assert parse_agent(str(P), flip) == P


def test_literals(flip, piat):
    assert parse_assertion("{y,x}", flip) == FlipAssertion(frozenset({x, y}))
    assert parse_assertion("{}", flip) == flip.unit
    assert parse_condition("x<p:1", flip) == PrioCond(x, 1)
    assert parse_condition("x=y", flip) == NameEq(x, y)
    assert parse_term("a:1", piat) == LeveledName(Name("a"), 1)


def test_syntax_error_carries_position(flip):
    with pytest.raises(ParseError) as info:
        parse_agent("out(x,,y)", flip)
    assert info.value.line == 1
    assert info.value.column is not None


def test_ill_sorted_piat_agent_is_rejected(piat):
    with pytest.raises(ParseError, match="sort"):
        parse_agent("out(a,v).0", piat)
    assert parse_agent("out(a:1,v).0", piat) == Output(LeveledName(Name("a"), 1), Name("v"), NIL)


def test_macros_expand_in_order(flip):
    macros = parse_macros(["Px=out(x)", "Pxy=Px | out(y)"], flip)
    assert macros["Pxy"] == Par(Output(x, x, NIL), Output(y, y, NIL))
    assert parse_agent("in(x).Pxy", flip, macros).cont == macros["Pxy"]


def test_bad_macros(flip):
    with pytest.raises(ParseError):
        parse_agent("Unknown | 0", flip)
    with pytest.raises(ParseError):
        parse_macros(["sinigual"], flip)
    with pytest.raises(ParseError):
        parse_macros(["p=out(x)"], flip)


def test_keywords_are_not_names(flip):
    with pytest.raises(ParseError):
        parse_agent("out(in,x)", flip)
