import pytest

from psiprio.errors import NotEncodable
from psiprio.services.encoding import (
    ChanEqPrime, GuardingElement, InPrefix, MultTest, Mutant, OutPrefix, TargetAssertion, blocking_pair,
    build_target, element_of, entails_prime, guarding_elements_of, translate,
)
from psiprio.services.equivalence import BisimConfig, bisim
from psiprio.services.fimm import FIMM, INF
from psiprio.services.instances import FlipAssertion, PrioCond, get_instance
from psiprio.services.nominal import Name
from psiprio.services.params import TOP, check_requisites, static_equiv
from psiprio.services.parser import parse_assertion, parse_condition
from psiprio.services.semantics import Layer
from psiprio.services.syntax import NIL, Assert, Case, Input, Output, Par, frame_of

x, y = Name("x"), Name("y")
OUT_X = GuardingElement(TOP, OutPrefix(x, x))
OUT_Y = GuardingElement(TOP, OutPrefix(y, y))
IN_Y = GuardingElement(TOP, InPrefix(y, (), y))


@pytest.fixture(scope="module")
def target(flip):
    return build_target(flip, max_elements=1, multiplicities=(1, INF))


def test_prefix_translation(agent, flip):
    assert str(translate(agent("out(x,x).0"), flip)) == "(|out(x,x)|) | out(x,x).(0 | (|-out(x,x)|))"
    assert str(translate(agent("out(x,x).0"), flip, Mutant.NO_RETRACTION)) == "(|out(x,x)|) | out(x,x).0"


def test_replication_translation(agent, flip):
    P = agent("!out(x)")
    assert str(translate(P, flip)) == "(|(inf)out(x,x)|) | !out(x,x).(0 | (|-out(x,x)|))"
    assert str(translate(P, flip, Mutant.FINITE_REPLICATION)) == "(|out(x,x)|) | !out(x,x).(0 | (|-out(x,x)|))"
    assert str(translate(P, flip, Mutant.SIMPLIFIED_REPLICATION)) == "(|(inf)out(x,x)|) | !out(x,x).0"


def test_case_translation_retracts_every_branch(agent, flip):
    P = agent("case T -> out(x) [] x<p:0 -> out(y)")
    Q = translate(P, flip)
    assert isinstance(Q, Par) and isinstance(Q.left, Assert) and isinstance(Q.right, Case)
    todos = Q.left.assertion.elems
    assert todos == FIMM([(OUT_X, 1), (GuardingElement(PrioCond(x, 0), OutPrefix(y, y)), 1)])
    for _, rama in Q.right.branches:
        assert rama.cont.right.assertion.elems == todos.negate()
    parcial = translate(P, flip, Mutant.NO_CASE_RETRACTION)
    primera = parcial.right.branches[0][1]
    assert primera.cont.right.assertion.elems == FIMM.single(OUT_X, -1)


def test_translation_rejects_non_encodable_agents(agent, flip):
    with pytest.raises(NotEncodable) as info:
        translate(agent("case T -> out(x) [] T -> in(y)"), flip)
    assert len(info.value.diagnostics) == 1


def test_guarding_elements(agent):
    E = guarding_elements_of(agent("out(x) | !in(y) | case T -> out(y) | (|{x}|)"))
    assert E.multiplicity(OUT_X) == 1
    assert E.multiplicity(IN_Y) == INF
    assert E.multiplicity(OUT_Y) == 1
    assert len(E) == 3


def test_input_elements_are_alpha_invariant(agent):
    uno = element_of(agent("in(x,\\u,u)"))
    otro = element_of(agent("in(x,\\v,v)"))
    assert uno == otro
    assert hash(uno) == hash(otro)


def test_encoded_frame_records_guarding_elements(agent, flip, target):
    P = agent("out(x) | !in(y) | (|{x}|)")
    f = frame_of(translate(P, flip), target)
    assert f.assertion.elems == guarding_elements_of(P)
    assert f.assertion.base == FlipAssertion(frozenset({x}))


def test_multiplicity_tests(flip):
    psi = TargetAssertion(flip.unit, FIMM.single(OUT_X, 2))
    assert entails_prime(psi, MultTest(2, OUT_X), flip)
    assert not entails_prime(psi, MultTest(1, OUT_X), flip)
    assert entails_prime(psi, MultTest(0, OUT_Y), flip)
    assert entails_prime(psi, PrioCond(x, 0), flip)


def test_blocking_pair_disables_low_priority_channels(flip):
    pendiente = FIMM([(IN_Y, 1), (OUT_Y, 1)])
    psi = TargetAssertion(FlipAssertion(frozenset({x})), pendiente)
    assert blocking_pair(psi.base, x, psi.elems, flip) == (IN_Y, OUT_Y)
    assert not entails_prime(psi, ChanEqPrime(x, x), flip)
    assert entails_prime(psi, ChanEqPrime(y, y), flip)
    libre = TargetAssertion(FlipAssertion(frozenset({x})), FIMM.single(IN_Y))
    assert entails_prime(libre, ChanEqPrime(x, x), flip)


def test_target_instance(flip, target):
    assert target.name == "encoded:flip"
    assert target.source is flip
    assert not target.has_prio
    assert target.unit == TargetAssertion(flip.unit, FIMM())
    assert get_instance("encoded:flip").name == "encoded:flip"


def test_target_satisfies_requisites(target):
    report = check_requisites(target)
    assert report.ok, report.failures


def test_target_literals(flip, target):
    assert parse_assertion("(2)out(x,x)", target) == TargetAssertion(flip.unit, FIMM.single(OUT_X, 2))
    assert parse_assertion("-out(x,x)", target) == TargetAssertion(flip.unit, FIMM.single(OUT_X, -1))
    assert parse_condition("x<->'y", target) == ChanEqPrime(x, y)
    assert parse_condition("(inf)in(y,y)", target) == MultTest(INF, IN_Y)


def test_translation_accepts_target_instance(agent, flip, target):
    P = agent("out(x,x).0")
    assert translate(P, target) == translate(P, flip)


def test_target_keeps_elements_of_agents_under_test(agent, flip):
    # sin pool: sólo los elementos de los agentes entran en la base de condiciones
    target = build_target(flip, [agent("out(y,y).0")], max_elements=0)
    assert MultTest(2, OUT_Y) in target.condition_basis
    assert MultTest(2, OUT_X) not in target.condition_basis


def test_target_assertion_sugar_without_target(flip):
    assert str(TargetAssertion(flip.unit, FIMM.single(OUT_X, 2))) == "(2)out(x,x)"
    assert str(TargetAssertion(flip.unit, FIMM.single(OUT_X, -1))) == "-out(x,x)"
    flipped = TargetAssertion(FlipAssertion(frozenset({x})), FIMM.single(OUT_X))
    assert str(flipped) == f"({flipped.base} ; {flipped.elems})"


def test_unit_is_declared_by_assertions(flip):
    assert TargetAssertion(flip.unit).is_unit()
    assert not TargetAssertion(FlipAssertion(frozenset({x}))).is_unit()
    assert not TargetAssertion(flip.unit, FIMM.single(OUT_X)).is_unit()


def test_multiplicity_separates_translations_statically(flip):
    # P | P frente a α.P: sólo (2)α los distingue y debe estar en la base
    local = flip.with_names((x, y, Name("g")))
    alpha = Output(x, x, NIL)
    PP, Q = Par(alpha, alpha), Output(x, x, alpha)
    target = build_target(local, [PP, Q, Input(x, (), x, NIL)])
    assert MultTest(2, OUT_X) in target.condition_basis
    f_pp, f_q = frame_of(translate(PP, local), target), frame_of(translate(Q, local), target)
    assert not static_equiv(f_pp, f_q, target.condition_basis, target)
    r = bisim(target.unit, translate(PP, local), translate(Q, local),
              BisimConfig.for_instance(target, Layer.PLAIN), target)
    assert not r.related
    assert r.states == 1
