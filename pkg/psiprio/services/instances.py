"""
PsiPRIO - Instancias concretas
pi-cálculo plano, π@ (prioridades estáticas a:n) y la instancia de
prioridades dinámicas por inversión (flip).
"""
import itertools
import logging
from dataclasses import dataclass
from typing import Any, FrozenSet, List, Optional, Sequence, Tuple

from lark import Transformer

from psiprio.services import nominal
from psiprio.services.nominal import Name, name
from psiprio.services.params import TOP, Instance
from psiprio.services.syntax import Diagnostic, Input, Output, _walk

logger = logging.getLogger(__name__)

DEFAULT_NAMES = ("x", "y")
BINDER = Name("u")


# =========================================================
#  Tipos de datos de las instancias
# =========================================================

@dataclass(frozen=True, repr=False)
class NameEq(nominal.Nominal):
    left: Any
    right: Any

    def swap(self, a, b):
        return NameEq(nominal.swap(a, b, self.left), nominal.swap(a, b, self.right))

    def support(self):
        return nominal.support(self.left) | nominal.support(self.right)

    def subst(self, xs, ts):
        return NameEq(nominal.subst(self.left, xs, ts), nominal.subst(self.right, xs, ts))

    def __str__(self):
        return f"{self.left}={self.right}"


@dataclass(frozen=True, repr=False)
class PrioCond(nominal.Nominal):
    """M≺n, impreso M<p:n."""
    term: Any
    level: int

    def swap(self, a, b):
        return PrioCond(nominal.swap(a, b, self.term), self.level)

    def support(self):
        return nominal.support(self.term)

    def subst(self, xs, ts):
        return PrioCond(nominal.subst(self.term, xs, ts), self.level)

    def __str__(self):
        return f"{self.term}<p:{self.level}"


@dataclass(frozen=True, repr=False)
class BoolCond(nominal.Nominal):
    value: bool

    def swap(self, a, b):
        return self

    def support(self):
        return frozenset()

    def subst(self, xs, ts):
        return self

    def __str__(self):
        return "true" if self.value else "false"


TRUE = BoolCond(True)
FALSE = BoolCond(False)


@dataclass(frozen=True, repr=False)
class UnitAssertion(nominal.Nominal):
    def swap(self, a, b):
        return self

    def support(self):
        return frozenset()

    def subst(self, xs, ts):
        return self

    def is_unit(self) -> bool:
        return True

    def __str__(self):
        return "1"


UNIT = UnitAssertion()


@dataclass(frozen=True, repr=False)
class FlipAssertion(nominal.Nominal):
    """Conjunto de canales cuya prioridad se ha invertido a baja."""
    flipped: FrozenSet[Name] = frozenset()

    def swap(self, a, b):
        return FlipAssertion(frozenset(n.swap(a, b) for n in self.flipped))

    def support(self):
        return frozenset(self.flipped)

    def subst(self, xs, ts):
        return FlipAssertion(frozenset(n.subst(xs, ts) for n in self.flipped))

    def is_unit(self) -> bool:
        return not self.flipped

    def __str__(self):
        return "{" + ",".join(str(n) for n in sorted(self.flipped)) + "}"


@dataclass(frozen=True, repr=False)
class LeveledName(nominal.Nominal):
    """Sujeto π@ a:n."""
    channel: Name
    level: int

    def swap(self, a, b):
        return LeveledName(self.channel.swap(a, b), self.level)

    def support(self):
        return frozenset((self.channel,))

    def subst(self, xs, ts):
        nuevo = self.channel.subst(xs, ts)
        if isinstance(nuevo, LeveledName):
            nuevo = nuevo.channel
        return LeveledName(nuevo, self.level)

    def __str__(self):
        return f"{self.channel}:{self.level}"


# =========================================================
#  Gramáticas y transformadores de literales
# =========================================================

PLAIN_WRAPPER = r"""
?cond: base_cond
?assertion: base_assertion
"""

FLIP_GRAMMAR = r"""
?term: NAME
?base_cond: "T" -> top
          | NAME "=" NAME -> name_eq
          | NAME "<p:" INT -> prio_cond
?base_assertion: "{" [NAME ("," NAME)*] "}" -> flip_set
"""

PIAT_GRAMMAR = r"""
?term: NAME
     | NAME ":" INT -> leveled
?base_cond: "T" -> top
          | "true" -> bool_true
          | "false" -> bool_false
?base_assertion: "1" -> unit_assertion
"""

PI_GRAMMAR = r"""
?term: NAME
?base_cond: "T" -> top
          | NAME "=" NAME -> name_eq
?base_assertion: "1" -> unit_assertion
"""


class LiteralBuilder(Transformer):
    def top(self, items):
        return TOP

    def name_eq(self, items):
        return NameEq(items[0], items[1])

    def prio_cond(self, items):
        return PrioCond(items[0], int(items[1]))

    def flip_set(self, items):
        return FlipAssertion(frozenset(n for n in items if n is not None))

    def leveled(self, items):
        return LeveledName(items[0], int(items[1]))

    def bool_true(self, items):
        return TRUE

    def bool_false(self, items):
        return FALSE

    def unit_assertion(self, items):
        return UNIT


# =========================================================
#  Emparejamiento de patrones
# =========================================================

def match_name_pattern(pattern: Any, binders: Tuple[Name, ...], value: Any, allowed=None) -> List[tuple]:
    """Patrones de un nombre o a:n; devuelve las secuencias L̃ con pattern[binders:=L̃] = value."""
    if isinstance(pattern, Name):
        if pattern in binders:
            if len(binders) != 1 or (allowed is not None and not isinstance(value, allowed)):
                return []
            return [(value,)]
        return [()] if not binders and pattern == value else []
    if isinstance(pattern, LeveledName):
        if not isinstance(value, LeveledName) or value.level != pattern.level:
            return []
        return match_name_pattern(pattern.channel, binders, value.channel, Name)
    return [()] if not binders and pattern == value else []


# =========================================================
#  Pools para enumeración
# =========================================================

def _name_prefixes(names: Sequence[Name]) -> list:
    pool = [("out", a, b) for a in names for b in names]
    pool += [("in", a, (), b) for a in names for b in names]
    pool += [("in", a, (BINDER,), BINDER) for a in names]
    return pool


def _as_names(names: Optional[Sequence[Any]]) -> Tuple[Name, ...]:
    names = names or DEFAULT_NAMES
    return tuple(sorted({n if isinstance(n, Name) else name(str(n)) for n in names}))


# =========================================================
#  pi-cálculo
# =========================================================

def make_pi_instance(names: Optional[Sequence[Any]] = None) -> Instance:
    names = _as_names(names)

    def entails(psi, phi):
        if isinstance(phi, NameEq):
            return phi.left == phi.right
        return False

    condiciones = [TOP] + [NameEq(a, b) for a in names for b in names]
    return Instance(
        name="pi",
        entails_fn=entails,
        compose_fn=lambda a, b: UNIT,
        unit=UNIT,
        chan_eq_fn=NameEq,
        matcher_fn=lambda p, xs, v: match_name_pattern(p, xs, v, Name),
        grammar=PI_GRAMMAR + PLAIN_WRAPPER,
        transformer=LiteralBuilder,
        assertion_basis=(UNIT,),
        condition_basis=tuple(condiciones),
        term_universe=names,
        names=names,
        assertion_leaves=(),
        prefix_pool_fn=_name_prefixes,
        factory=make_pi_instance,
    )


# =========================================================
#  π@
# =========================================================

def _piat_sort_check(agent) -> List[Diagnostic]:
    diags = []
    for path, Q in _walk(agent):
        if isinstance(Q, (Output, Input)) and not isinstance(Q.subj, LeveledName):
            diags.append(Diagnostic(path, f"sort: subject {Q.subj} must be a:n"))
        if isinstance(Q, Output) and not isinstance(Q.obj, Name):
            diags.append(Diagnostic(path, f"sort: object {Q.obj} must be a plain name"))
        if isinstance(Q, Input) and not isinstance(Q.pattern, Name):
            diags.append(Diagnostic(path, f"sort: pattern {Q.pattern} must be a plain name"))
    return diags


def make_piat_instance(max_priority: int = 1, names: Optional[Sequence[Any]] = None) -> Instance:
    names = _as_names(names)

    def entails(psi, phi):
        if isinstance(phi, BoolCond):
            return phi.value
        return False

    def chan_eq(m, n):
        return BoolCond(isinstance(m, LeveledName) and m == n)

    def prio(m, p):
        return BoolCond(isinstance(m, LeveledName) and m.level == p)

    niveles = range(max_priority + 1)
    sujetos = tuple(LeveledName(a, n) for a in names for n in niveles)

    def prefix_pool(pool_names):
        canales = [LeveledName(a, n) for a in pool_names for n in niveles]
        pool = [("out", s, v) for s in canales for v in pool_names]
        pool += [("in", s, (BINDER,), BINDER) for s in canales]
        return pool

    return Instance(
        name="piat",
        entails_fn=entails,
        compose_fn=lambda a, b: UNIT,
        unit=UNIT,
        chan_eq_fn=chan_eq,
        matcher_fn=lambda p, xs, v: match_name_pattern(p, xs, v, Name),
        grammar=PIAT_GRAMMAR + PLAIN_WRAPPER,
        transformer=LiteralBuilder,
        prio_fn=prio,
        max_priority=max_priority,
        assertion_basis=(UNIT,),
        condition_basis=(TOP, TRUE, FALSE),
        term_universe=names + sujetos,
        names=names,
        assertion_leaves=(),
        prefix_pool_fn=prefix_pool,
        sort_check_fn=_piat_sort_check,
        factory=lambda ns: make_piat_instance(max_priority, ns),
    )


# =========================================================
#  Prioridades dinámicas (flip)
# =========================================================

def flip_compose(a: FlipAssertion, b: FlipAssertion) -> FlipAssertion:
    return FlipAssertion(a.flipped ^ b.flipped)


def flip_entails(psi: FlipAssertion, phi: Any) -> bool:
    if isinstance(phi, NameEq):
        return phi.left == phi.right
    if isinstance(phi, PrioCond):
        if phi.level == 1:
            return phi.term in psi.flipped
        if phi.level == 0:
            return phi.term not in psi.flipped
        return False
    return False


def make_flip_instance(names_in_scope: Optional[Sequence[Any]] = None) -> Instance:
    names = _as_names(names_in_scope)
    subconjuntos = [FlipAssertion(frozenset(c)) for k in range(len(names) + 1)
                    for c in itertools.combinations(names, k)]
    condiciones = [TOP] + [NameEq(a, b) for a in names for b in names]
    condiciones += [PrioCond(a, p) for a in names for p in (0, 1)]
    return Instance(
        name="flip",
        entails_fn=flip_entails,
        compose_fn=flip_compose,
        unit=FlipAssertion(),
        chan_eq_fn=NameEq,
        matcher_fn=lambda p, xs, v: match_name_pattern(p, xs, v, Name),
        grammar=FLIP_GRAMMAR + PLAIN_WRAPPER,
        transformer=LiteralBuilder,
        prio_fn=PrioCond,
        max_priority=1,
        assertion_basis=tuple(subconjuntos),
        condition_basis=tuple(condiciones),
        term_universe=names,
        names=names,
        assertion_leaves=tuple(FlipAssertion(frozenset((a,))) for a in names),
        prefix_pool_fn=_name_prefixes,
        factory=make_flip_instance,
    )


# =========================================================
#  Registro
# =========================================================

INSTANCE_NAMES = ("flip", "piat", "pi")


def get_instance(spec: str, names: Optional[Sequence[Any]] = None, max_priority: int = 1) -> Instance:
    """Selecciona por nombre: flip | piat | pi | encoded:<base>."""
    spec = spec.strip()
    if spec.startswith("encoded:"):
        from psiprio.services.encoding import build_target
        return build_target(get_instance(spec.split(":", 1)[1], names, max_priority))
    if spec == "flip":
        return make_flip_instance(names)
    if spec == "piat":
        return make_piat_instance(max_priority, names)
    if spec == "pi":
        return make_pi_instance(names)
    raise ValueError(f"Instancia desconocida: {spec}")
