import pytest

from psiprio.errors import InstanceMismatch
from psiprio.services.instances import (
    BINDER, FALSE, TRUE, UNIT, FlipAssertion, LeveledName, NameEq, PrioCond, get_instance, match_name_pattern,
)
from psiprio.services.nominal import Name

x, y, a = Name("x"), Name("y"), Name("a")


def test_flip_composition_is_symmetric_difference(flip):
    fx, fy = FlipAssertion(frozenset({x})), FlipAssertion(frozenset({y}))
    assert flip.compose(fx, fy) == FlipAssertion(frozenset({x, y}))
    assert flip.compose(fx, fx) == flip.unit
    assert str(flip.compose(fx, fy)) == "{x,y}"
    assert str(flip.unit) == "{}"


def test_flip_entailment(flip):
    fx = FlipAssertion(frozenset({x}))
    assert flip.entails(fx, PrioCond(x, 1))
    assert not flip.entails(fx, PrioCond(x, 0))
    assert flip.entails(fx, PrioCond(y, 0))
    assert not flip.entails(fx, PrioCond(y, 2))
    assert flip.entails(flip.unit, NameEq(x, x))
    assert not flip.entails(flip.unit, NameEq(x, y))


def test_flip_bases(flip):
    assert len(flip.assertion_basis) == 4
    assert len(flip.condition_basis) == 1 + 4 + 4
    assert flip.subjects() == [x, y]
    assert flip.max_priority == 1


def test_piat_channels(piat):
    a1 = LeveledName(a, 1)
    assert piat.entails(UNIT, piat.chan_eq(a1, a1))
    assert not piat.entails(UNIT, piat.chan_eq(a1, LeveledName(a, 0)))
    assert not piat.entails(UNIT, piat.chan_eq(a, a))
    assert piat.entails(UNIT, TRUE) and not piat.entails(UNIT, FALSE)
    assert str(a1) == "a:1"
    assert len(piat.subjects()) == 4


def test_piat_substitution_keeps_level():
    a1 = LeveledName(a, 1)
    assert a1.subst((a,), (Name("b"),)) == LeveledName(Name("b"), 1)


def test_pi_has_no_priorities(pi):
    assert not pi.has_prio
    with pytest.raises(InstanceMismatch):
        pi.require_prio()
    assert pi.entails(UNIT, NameEq(Name("m"), Name("m")))


def test_name_patterns():
    assert match_name_pattern(BINDER, (BINDER,), x) == [(x,)]
    assert match_name_pattern(x, (), x) == [()]
    assert match_name_pattern(x, (), y) == []
    assert match_name_pattern(BINDER, (BINDER,), LeveledName(a, 0), Name) == []
    nivelado = LeveledName(BINDER, 1)
    assert match_name_pattern(nivelado, (BINDER,), LeveledName(a, 1)) == [(a,)]
    assert match_name_pattern(nivelado, (BINDER,), LeveledName(a, 0)) == []


def test_registry():
    assert get_instance("flip", ["y", "x"]).names == (x, y)
    assert get_instance("piat", None, 2).max_priority == 2
    assert get_instance("pi").name == "pi"
    with pytest.raises(ValueError):
        get_instance("ccs")


def test_with_names_rebuilds_bases(flip):
    tres = flip.with_names((x, y, a))
    assert len(tres.assertion_basis) == 8
    assert tres.unit == flip.unit
