import pytest

from psiprio.errors import AmbiguousPriority, InstanceMismatch, NoPriority
from psiprio.services.instances import FlipAssertion, LeveledName, PrioCond
from psiprio.services.nominal import Name
from psiprio.services.params import TOP, Top, check_requisites, frame_entails, prio_of_frame, static_equiv
from psiprio.services.syntax import Frame

x, y = Name("x"), Name("y")


@pytest.mark.parametrize("fixture", ["flip", "piat", "pi"])
def test_bundled_instances_satisfy_requisites(request, fixture):
    report = check_requisites(request.getfixturevalue(fixture))
    assert report.ok, report.failures
    assert report.checked["compose_associativity"] > 0
    assert report.to_frame().empty


def test_requisites_only_check_priorities_when_present(flip, pi):
    assert "prio_uniqueness" in check_requisites(flip).checked
    assert "prio_uniqueness" not in check_requisites(pi).checked


def test_broken_composition_is_reported(flip):
    roto = flip.replace(name="roto", compose_fn=lambda a, b: a)
    report = check_requisites(roto)
    assert not report.ok
    assert {f.law for f in report.failures} == {"compose_commutativity"}
    assert list(report.to_frame().columns) == ["instance", "law", "witness"]


def test_ambiguous_priorities_are_reported(flip):
    todo = flip.replace(name="todo", entails_fn=lambda psi, phi: True)
    leyes = {f.law for f in check_requisites(todo).failures}
    assert "prio_uniqueness" in leyes


def test_witnesses_are_capped(flip):
    roto = flip.replace(compose_fn=lambda a, b: a)
    report = check_requisites(roto, max_witnesses=2)
    assert len(report.failures) == 2


def test_flip_priorities(flip):
    flipped = FlipAssertion(frozenset({x}))
    assert prio_of_frame(flipped, x, flip) == 1
    assert prio_of_frame(flipped, y, flip) == 0
    assert prio_of_frame(flip.unit, x, flip) == 0
    assert prio_of_frame(Frame((Name("a"),), flipped), x, flip) == 1


def test_piat_priorities(piat):
    assert prio_of_frame(piat.unit, LeveledName(Name("a"), 1), piat) == 1
    with pytest.raises(NoPriority):
        prio_of_frame(piat.unit, Name("a"), piat)


def test_priority_errors(pi, flip):
    with pytest.raises(InstanceMismatch):
        prio_of_frame(pi.unit, Name("m"), pi)
    todo = flip.replace(entails_fn=lambda psi, phi: True)
    with pytest.raises(AmbiguousPriority):
        prio_of_frame(flip.unit, x, todo)


def test_top_is_entailed_everywhere(flip, piat, pi):
    assert Top() is TOP
    assert str(TOP) == "T"
    for inst in (flip, piat, pi):
        assert all(inst.entails(psi, TOP) for psi in inst.assertion_basis)


def test_frame_entailment_and_static_equivalence(flip):
    f = Frame((Name("a"),), FlipAssertion(frozenset({x})))
    assert frame_entails(f, PrioCond(x, 1), flip)
    assert not frame_entails(f, PrioCond(y, 1), flip)
    assert static_equiv(f, FlipAssertion(frozenset({x})), flip.condition_basis, flip)
    assert not static_equiv(flip.unit, FlipAssertion(frozenset({y})), flip.condition_basis, flip)
