"""
PsiPRIO - Codificación de prioridades
Elementos de guarda, el cálculo destino (aserciones con FIMM de prefijos) y la
traducción ⟦·⟧ de agentes con prioridades a agentes sin ellas.
"""
import itertools
import logging
from dataclasses import dataclass
from enum import Enum
from typing import Any, Iterable, List, Sequence, Tuple

from lark import Transformer

from psiprio.errors import NoPriority, NotEncodable
from psiprio.services import nominal
from psiprio.services.fimm import FIMM, INF, ExtInt
from psiprio.services.instances import PLAIN_WRAPPER
from psiprio.services.nominal import Name, NameSeq, canonical_atom
from psiprio.services.params import TOP, Instance, prio_of_frame
from psiprio.services.syntax import (
    NIL, Agent, Assert, Case, Input, Nil, Output, Par, Repl, Restrict, encodable, prefixes_of,
)

logger = logging.getLogger(__name__)

_LOCAL = "~"


# =========================================================
#  Prefijos y elementos de guarda
# =========================================================

@dataclass(frozen=True, repr=False)
class OutPrefix(nominal.Nominal):
    subj: Any
    obj: Any

    def swap(self, a, b):
        return OutPrefix(nominal.swap(a, b, self.subj), nominal.swap(a, b, self.obj))

    def support(self):
        return nominal.support(self.subj) | nominal.support(self.obj)

    def subst(self, xs, ts):
        return OutPrefix(nominal.subst(self.subj, xs, ts), nominal.subst(self.obj, xs, ts))

    def canon(self, depth=0):
        return OutPrefix(nominal.canon(self.subj, depth), nominal.canon(self.obj, depth))

    def key(self) -> str:
        return f"out({nominal.canonical_key(self.subj)},{nominal.canonical_key(self.obj)})"

    def __str__(self):
        return f"out({self.subj},{self.obj})"


@dataclass(frozen=True, repr=False)
class InPrefix(nominal.Nominal):
    """Prefijo de entrada; los binders ligan en el patrón."""
    subj: Any
    binders: NameSeq
    pattern: Any

    def swap(self, a, b):
        return InPrefix(nominal.swap(a, b, self.subj), tuple(n.swap(a, b) for n in self.binders),
                        nominal.swap(a, b, self.pattern))

    def support(self):
        return nominal.support(self.subj) | (nominal.support(self.pattern) - set(self.binders))

    def subst(self, xs, ts):
        peligro = set(xs) | nominal.support(ts)
        binders, pattern = nominal.rename_fresh(self.binders, self.pattern, peligro)
        return InPrefix(nominal.subst(self.subj, xs, ts), binders, nominal.subst(pattern, xs, ts))

    def canon(self, depth=0):
        atomos = tuple(canonical_atom(depth + i) for i in range(len(self.binders)))
        pattern = self.pattern
        for b, c in zip(self.binders, atomos):
            pattern = nominal.swap(b, c, pattern)
        return InPrefix(nominal.canon(self.subj, depth), atomos, nominal.canon(pattern, depth + len(atomos)))

    def key(self) -> str:
        locales = [Name(_LOCAL, i) for i in range(len(self.binders))]
        pattern = self.pattern
        for b, c in zip(self.binders, locales):
            pattern = nominal.swap(b, c, pattern)
        return f"in({nominal.canonical_key(self.subj)},{len(locales)},{nominal.canonical_key(pattern)})"

    def __str__(self):
        if self.binders:
            return f"in({self.subj},\\{' '.join(str(b) for b in self.binders)},{self.pattern})"
        return f"in({self.subj},{self.pattern})"


@dataclass(frozen=True, eq=False, repr=False)
class GuardingElement(nominal.Nominal):
    """Par (condición, prefijo), identificado módulo alfa de los binders de entrada."""
    guard: Any
    prefix: Any

    def _key(self) -> Tuple[str, str]:
        return (nominal.canonical_key(self.guard), self.prefix.key())

    def __eq__(self, other):
        if not isinstance(other, GuardingElement):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    @property
    def is_input(self) -> bool:
        return isinstance(self.prefix, InPrefix)

    def swap(self, a, b):
        return GuardingElement(nominal.swap(a, b, self.guard), self.prefix.swap(a, b))

    def support(self):
        return nominal.support(self.guard) | self.prefix.support()

    def subst(self, xs, ts):
        return GuardingElement(nominal.subst(self.guard, xs, ts), self.prefix.subst(xs, ts))

    def canon(self, depth=0):
        return GuardingElement(nominal.canon(self.guard, depth), self.prefix.canon(depth))

    def __str__(self):
        if self.guard == TOP:
            return str(self.prefix)
        return f"[{self.guard}]{self.prefix}"

    def __repr__(self):
        return f"GuardingElement<{self}>"


def element_of(prefix: Agent, guard: Any = TOP) -> GuardingElement:
    if isinstance(prefix, Output):
        return GuardingElement(guard, OutPrefix(prefix.subj, prefix.obj))
    if isinstance(prefix, Input):
        return GuardingElement(guard, InPrefix(prefix.subj, tuple(prefix.binders), prefix.pattern))
    raise TypeError(f"No es un prefijo: {prefix!r}")


# =========================================================
#  Aserciones y condiciones del cálculo destino
# =========================================================

@dataclass(frozen=True, repr=False)
class TargetAssertion(nominal.Nominal):
    base: Any
    elems: FIMM = FIMM()

    def swap(self, a, b):
        return TargetAssertion(nominal.swap(a, b, self.base), self.elems.swap(a, b))

    def support(self):
        return nominal.support(self.base) | self.elems.support()

    def subst(self, xs, ts):
        return TargetAssertion(nominal.subst(self.base, xs, ts), self.elems.subst(xs, ts))

    def canon(self, depth=0):
        return TargetAssertion(nominal.canon(self.base, depth), self.elems.canon(depth))

    def is_unit(self) -> bool:
        return self.elems.is_empty() and _is_unit(self.base)

    def __str__(self):
        if self.elems.is_empty():
            return str(self.base)
        if _is_unit(self.base) and len(self.elems) == 1:
            (elem, z), = self.elems.items()
            if z == 1:
                return str(elem)
            if z == -1:
                return f"-{elem}"
            return f"({z}){elem}"
        return f"({self.base} ; {self.elems})"

    def __repr__(self):
        return f"TargetAssertion<{self}>"


def _is_unit(psi: Any) -> bool:
    # las aserciones de las instancias declaran si son la unidad de su composición
    es_unidad = getattr(psi, "is_unit", None)
    return bool(es_unidad and es_unidad())


@dataclass(frozen=True, repr=False)
class MultTest(nominal.Nominal):
    z: ExtInt
    elem: GuardingElement

    def swap(self, a, b):
        return MultTest(self.z, self.elem.swap(a, b))

    def support(self):
        return self.elem.support()

    def subst(self, xs, ts):
        return MultTest(self.z, self.elem.subst(xs, ts))

    def canon(self, depth=0):
        return MultTest(self.z, self.elem.canon(depth))

    def __str__(self):
        return f"({self.z}){self.elem}"


@dataclass(frozen=True, repr=False)
class ChanEqPrime(nominal.Nominal):
    left: Any
    right: Any

    def swap(self, a, b):
        return ChanEqPrime(nominal.swap(a, b, self.left), nominal.swap(a, b, self.right))

    def support(self):
        return nominal.support(self.left) | nominal.support(self.right)

    def subst(self, xs, ts):
        return ChanEqPrime(nominal.subst(self.left, xs, ts), nominal.subst(self.right, xs, ts))

    def __str__(self):
        return f"{self.left}<->'{self.right}"


# =========================================================
#  Entailment ⊢′
# =========================================================

def _priority(psi: Any, m: Any, inst: Instance):
    try:
        return prio_of_frame(psi, m, inst)
    except NoPriority:
        return None


def blocking_pair(psi: Any, m: Any, elems: FIMM, inst: Instance):
    """Par (entrada, salida) de E que comunica con prioridad estrictamente mayor que la de m."""
    nivel = _priority(psi, m, inst)
    if nivel is None:
        return None
    miembros = elems.members()
    entradas = [g for g in miembros if g.is_input and inst.entails(psi, g.guard)]
    salidas = [g for g in miembros if not g.is_input and inst.entails(psi, g.guard)]
    for gi in entradas:
        n = _priority(psi, gi.prefix.subj, inst)
        if n is None or not n < nivel:
            continue
        for go in salidas:
            if not inst.entails(psi, inst.chan_eq(gi.prefix.subj, go.prefix.subj)):
                continue
            if inst.matcher(gi.prefix.pattern, gi.prefix.binders, go.prefix.obj):
                return gi, go
    return None


def entails_prime(psi_e: TargetAssertion, phi: Any, inst: Instance) -> bool:
    if isinstance(phi, MultTest):
        return psi_e.elems.multiplicity(phi.elem) == phi.z
    if isinstance(phi, ChanEqPrime):
        if not inst.entails(psi_e.base, inst.chan_eq(phi.left, phi.right)):
            return False
        return blocking_pair(psi_e.base, phi.left, psi_e.elems, inst) is None
    return inst.entails(psi_e.base, phi)


def compose_prime(a: TargetAssertion, b: TargetAssertion, inst: Instance) -> TargetAssertion:
    return TargetAssertion(inst.compose(a.base, b.base), a.elems.union(b.elems))


# =========================================================
#  Gramática de literales del destino
# =========================================================

TARGET_GRAMMAR = r"""
?cond: base_cond
     | "(" mult ")" gelem                   -> mult_test
     | term "<->'" term                     -> chan_prime
?assertion: base_assertion                  -> lift_base
          | gelem                           -> elem_assertion
          | "-" gelem                       -> neg_assertion
          | "(" mult ")" gelem              -> mult_assertion
          | "(" base_assertion ";" "{" [fimm_entry ("," fimm_entry)*] "}" ")" -> target_assertion
fimm_entry: "(" mult ")" gelem
?mult: SIGNED_INT                           -> int_mult
     | "inf"                                -> inf_mult
gelem: ["[" base_cond "]"] gprefix
?gprefix: "out" "(" term "," term ")"              -> gout
        | "in" "(" term "," binders "," term ")"   -> gin
        | "in" "(" term "," term ")"               -> gin_plain
"""


class TargetBuilder(Transformer):
    source_unit = None

    def int_mult(self, items):
        return int(items[0])

    def inf_mult(self, items):
        return INF

    def gout(self, items):
        return OutPrefix(items[0], items[1])

    def gin(self, items):
        return InPrefix(items[0], tuple(items[1]), items[2])

    def gin_plain(self, items):
        return InPrefix(items[0], (), items[1])

    def gelem(self, items):
        guard, prefix = items
        return GuardingElement(TOP if guard is None else guard, prefix)

    def mult_test(self, items):
        return MultTest(items[0], items[1])

    def chan_prime(self, items):
        return ChanEqPrime(items[0], items[1])

    def lift_base(self, items):
        return TargetAssertion(items[0], FIMM())

    def elem_assertion(self, items):
        return TargetAssertion(self.source_unit, FIMM.single(items[0]))

    def neg_assertion(self, items):
        return TargetAssertion(self.source_unit, FIMM.single(items[0], -1))

    def mult_assertion(self, items):
        return TargetAssertion(self.source_unit, FIMM.single(items[1], items[0]))

    def fimm_entry(self, items):
        return (items[1], items[0])

    def target_assertion(self, items):
        base, *entries = items
        return TargetAssertion(base, FIMM([e for e in entries if e is not None]))


# =========================================================
#  Construcción del cálculo destino
# =========================================================

def _pool_elements(inst: Instance) -> List[GuardingElement]:
    elementos = []
    for entrada in inst.prefix_pool(inst.names):
        if entrada[0] == "out":
            elementos.append(GuardingElement(TOP, OutPrefix(entrada[1], entrada[2])))
        else:
            elementos.append(GuardingElement(TOP, InPrefix(entrada[1], tuple(entrada[2]), entrada[3])))
    return elementos


def _agent_elements(agents: Iterable[Agent]) -> List[GuardingElement]:
    vistos = {}
    for P in agents:
        for g in guarding_elements_of(P).items():
            vistos.setdefault(g[0], None)
        for Q in prefixes_of(P):
            vistos.setdefault(element_of(Q), None)
    return list(vistos)


def guard_universe(inst: Instance, agents: Iterable[Agent] = ()) -> List[GuardingElement]:
    """Elementos de guarda de los agentes bajo prueba más los del pool de prefijos."""
    vistos = dict.fromkeys(_agent_elements(agents))
    for g in _pool_elements(inst):
        vistos.setdefault(g, None)
    return list(vistos)


def _fimm_basis(elementos: Sequence[GuardingElement], multiplicities: Sequence[ExtInt]) -> List[FIMM]:
    base = [FIMM()]
    base += [FIMM.single(g, z) for g in elementos for z in multiplicities]
    entradas = [g for g in elementos if g.is_input]
    salidas = [g for g in elementos if not g.is_input]
    base += [FIMM([(gi, 1), (go, 1)]) for gi in entradas for go in salidas]
    return base


def build_target(inst: Instance, agents: Sequence[Agent] = (),
                 multiplicities: Sequence[ExtInt] = (-2, -1, 1, 2, INF), max_elements: int = 2) -> Instance:
    """Cálculo destino sin prioridades: aserciones (Ψ, E), ⊢′ con cláusula de bloqueo, unidad (1, ∅)."""
    inst.require_prio()

    pool = _pool_elements(inst)
    elegidos = [g for g in pool if not g.is_input][:max_elements] + [g for g in pool if g.is_input][:max_elements]
    # los elementos de los agentes bajo prueba entran siempre, aunque el recorte del pool los deje fuera
    elementos = list(dict.fromkeys(elegidos + _agent_elements(agents)))

    fimms = _fimm_basis(elementos, multiplicities)
    bases = list(inst.assertion_basis) or [inst.unit]
    asserciones = tuple(TargetAssertion(a, e) for a, e in itertools.product(bases, fimms))

    pruebas = sorted({z for z in multiplicities if z is not INF} | {0}) + [INF]
    condiciones = list(inst.condition_basis)
    condiciones += [MultTest(z, g) for g in elementos for z in pruebas]
    sujetos = inst.subjects()
    condiciones += [ChanEqPrime(m, n) for m in sujetos for n in sujetos]

    literales = type(f"{inst.transformer.__name__}Target", (TargetBuilder, inst.transformer),
                     {"source_unit": inst.unit})

    target = Instance(
        name=f"encoded:{inst.name}",
        entails_fn=lambda psi, phi: entails_prime(psi, phi, inst),
        compose_fn=lambda a, b: compose_prime(a, b, inst),
        unit=TargetAssertion(inst.unit, FIMM()),
        chan_eq_fn=ChanEqPrime,
        matcher_fn=inst.matcher_fn,
        grammar=inst.grammar.replace(PLAIN_WRAPPER, "") + TARGET_GRAMMAR,
        transformer=literales,
        assertion_basis=asserciones,
        condition_basis=tuple(condiciones),
        term_universe=inst.term_universe,
        names=inst.names,
        guard_pool=inst.guard_pool,
        assertion_leaves=tuple(TargetAssertion(a, FIMM()) for a in inst.assertion_leaves),
        prefix_pool_fn=inst.prefix_pool_fn,
        sort_check_fn=inst.sort_check_fn,
        factory=lambda ns: build_target(inst.with_names(ns), agents, multiplicities, max_elements),
        source=inst,
    )
    logger.info(f"{target.name}: {len(asserciones)} aserciones, {len(condiciones)} condiciones en las bases")
    return target


# =========================================================
#  Traducción
# =========================================================

class Mutant(str, Enum):
    NONE = "none"
    NO_RETRACTION = "no-retraction"
    FINITE_REPLICATION = "finite-replication"
    SIMPLIFIED_REPLICATION = "simplified-replication"
    NO_CASE_RETRACTION = "no-case-retraction"


def _fresh_input(P: Agent) -> Agent:
    """Binders de entrada frescos para el sujeto, de modo que α[x̃:=L̃] = α."""
    if isinstance(P, Input) and set(P.binders) & nominal.support(P.subj):
        binders, (pattern, cont) = nominal.rename_fresh(P.binders, (P.pattern, P.cont), nominal.support(P.subj))
        return Input(P.subj, binders, pattern, cont)
    return P


def _with_cont(prefix: Agent, cont: Agent) -> Agent:
    if isinstance(prefix, Output):
        return Output(prefix.subj, prefix.obj, cont)
    return Input(prefix.subj, prefix.binders, prefix.pattern, cont)


def translate(P: Agent, inst: Instance, mutant: Mutant = Mutant.NONE) -> Agent:
    """⟦P⟧; inst es la instancia fuente (o la destino, de la que se toma la fuente)."""
    diags = encodable(P)
    if diags:
        raise NotEncodable(diags)
    fuente = inst.source or inst
    return _Translator(fuente.unit, Mutant(mutant)).run(P)


class _Translator:
    def __init__(self, unit: Any, mutant: Mutant):
        self.unit = unit
        self.mutant = mutant

    def lift(self, elems: FIMM) -> Agent:
        return Assert(TargetAssertion(self.unit, elems))

    def run(self, P: Agent) -> Agent:
        if isinstance(P, Nil):
            return NIL
        if isinstance(P, Assert):
            return Assert(TargetAssertion(P.assertion, FIMM()))
        if isinstance(P, Par):
            return Par(self.run(P.left), self.run(P.right))
        if isinstance(P, Restrict):
            return Restrict(P.name, self.run(P.body))
        if isinstance(P, (Output, Input)):
            return self.prefix(_fresh_input(P))
        if isinstance(P, Repl):
            return self.replication(_fresh_input(P.body))
        if isinstance(P, Case):
            return self.case(P)
        raise TypeError(f"No es un agente: {P!r}")

    def prefix(self, P: Agent) -> Agent:
        g = element_of(P)
        cuerpo = self.run(P.cont)
        if self.mutant is not Mutant.NO_RETRACTION:
            cuerpo = Par(cuerpo, self.lift(FIMM.single(g, -1)))
        return Par(self.lift(FIMM.single(g)), _with_cont(P, cuerpo))

    def replication(self, P: Agent) -> Agent:
        g = element_of(P)
        cuerpo = self.run(P.cont)
        if self.mutant is Mutant.FINITE_REPLICATION:
            registro = FIMM.single(g)
        else:
            registro = FIMM.single(g, INF)
        if self.mutant is not Mutant.SIMPLIFIED_REPLICATION:
            cuerpo = Par(cuerpo, self.lift(FIMM.single(g, -1)))
        return Par(self.lift(registro), Repl(_with_cont(P, cuerpo)))

    def case(self, P: Case) -> Agent:
        ramas = [(phi, _fresh_input(Q)) for phi, Q in P.branches]
        elementos = [element_of(Q, phi) for phi, Q in ramas]
        todos = FIMM([(g, 1) for g in elementos])
        nuevas = []
        for (phi, Q), g in zip(ramas, elementos):
            retirada = FIMM.single(g, -1) if self.mutant is Mutant.NO_CASE_RETRACTION else todos.negate()
            nuevas.append((phi, _with_cont(Q, Par(self.run(Q.cont), self.lift(retirada)))))
        return Par(self.lift(todos), Case(tuple(nuevas)))


def guarding_elements_of(P: Agent) -> FIMM:
    """Prefijos de nivel superior de P: (∞) para los replicados, (φi, αi) para las ramas de case."""
    if isinstance(P, (Output, Input)):
        return FIMM.single(element_of(_fresh_input(P)))
    if isinstance(P, Repl):
        if isinstance(P.body, (Output, Input)):
            return FIMM.single(element_of(_fresh_input(P.body)), INF)
        return FIMM()
    if isinstance(P, Case):
        return FIMM([(element_of(_fresh_input(Q), phi), 1) for phi, Q in P.branches
                     if isinstance(Q, (Output, Input))])
    if isinstance(P, Par):
        return guarding_elements_of(P.left).union(guarding_elements_of(P.right))
    if isinstance(P, Restrict):
        return guarding_elements_of(P.body)
    return FIMM()
