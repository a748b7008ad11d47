import random

from psiprio.services import nominal
from psiprio.services.nominal import Name, least_fresh_name, name, rename_fresh
from psiprio.services.syntax import NIL, Output, Par, Restrict

x, y, z, a, b = (Name(n) for n in "xyzab")


def _random_agent(rng, depth=3):
    if depth == 0:
        return NIL
    n1, n2 = rng.choice([x, y, z, a]), rng.choice([x, y, z, a])
    opcion = rng.randrange(3)
    if opcion == 0:
        return Output(n1, n2, _random_agent(rng, depth - 1))
    if opcion == 1:
        return Restrict(n1, _random_agent(rng, depth - 1))
    return Par(_random_agent(rng, depth - 1), _random_agent(rng, depth - 1))


def test_name_printing_and_parsing():
    assert str(Name("x", 3)) == "x'3"
    assert name("x'3") == Name("x", 3)
    assert name("y") == y
    assert str(nominal.canonical_atom(2)) == "#2"


def test_swap_is_an_involution_and_equivariant_for_support():
    rng = random.Random(0)
    for _ in range(300):
        P = _random_agent(rng)
        assert nominal.swap(x, a, nominal.swap(x, a, P)) == P
        esperado = frozenset(n.swap(x, a) for n in P.support())
        assert nominal.support(nominal.swap(x, a, P)) == esperado


def test_swap_fixes_names_outside_support():
    rng = random.Random(1)
    for _ in range(200):
        P = _random_agent(rng)
        frescos = [n for n in (Name("f"), Name("g")) if n not in P.support()]
        assert nominal.swap_fixes(frescos[0], frescos[1], P)


def test_restriction_binds_its_name():
    P = Restrict(a, Output(a, b, NIL))
    assert P.support() == {b}
    assert nominal.alpha_eq(P, Restrict(z, Output(z, b, NIL)))
    assert not nominal.alpha_eq(P, Restrict(b, Output(b, b, NIL)))


def test_least_fresh_name_is_deterministic():
    assert least_fresh_name(set(), "e") == Name("e", 1)
    assert least_fresh_name({Name("e", 1), Name("e", 2)}, "e") == Name("e", 3)


def test_fresh_name_avoids_given_names():
    evitar = {Name("n", k) for k in range(1, 50)}
    assert nominal.fresh_name(evitar, "n") not in evitar


def test_rename_fresh_only_touches_clashing_binders():
    cuerpo = Output(a, b, NIL)
    binders, nuevo = rename_fresh((a, b), cuerpo, {a})
    assert binders[1] == b
    assert binders[0] != a
    assert nuevo == Output(binders[0], b, NIL)


def test_fresh_for():
    assert nominal.fresh_for(z, Output(x, y, NIL))
    assert not nominal.fresh_for(x, Output(x, y, NIL))
    assert nominal.fresh_for(a, Restrict(a, Output(a, a, NIL)))
