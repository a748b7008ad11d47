"""
PsiPRIO - Parámetros de un psi-cálculo
Contrato de instancia (T, A, C, ⊢, ⊗, ↔, 1), extensión con prioridades y
kit de comprobación de requisitos sobre bases finitas.
"""
import dataclasses
import itertools
import logging
from dataclasses import dataclass
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import pandas as pd
from pydantic import BaseModel, Field

from psiprio.errors import AmbiguousPriority, InstanceMismatch, NoPriority
from psiprio.services import nominal
from psiprio.services.nominal import Name, NameSeq
from psiprio.services.syntax import Frame

logger = logging.getLogger(__name__)


# =========================================================
#  Condición ⊤
# =========================================================

class Top(nominal.Nominal):
    """Condición siempre cierta; soporte vacío e invariante por sustitución."""
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def swap(self, a, b):
        return self

    def support(self):
        return frozenset()

    def subst(self, xs, ts):
        return self

    def __eq__(self, other):
        return isinstance(other, Top)

    def __hash__(self):
        return hash("psiprio.top")

    def __str__(self):
        return "T"

    def __repr__(self):
        return "TOP"


TOP = Top()


# =========================================================
#  Instancia
# =========================================================

@dataclass(frozen=True)
class Instance:
    """Paquete inmutable de parámetros; todas las funciones son puras."""
    name: str
    entails_fn: Callable[[Any, Any], bool]
    compose_fn: Callable[[Any, Any], Any]
    unit: Any
    chan_eq_fn: Callable[[Any, Any], Any]
    matcher_fn: Callable[[Any, NameSeq, Any], List[tuple]]
    grammar: str
    transformer: type
    top: Any = TOP
    prio_fn: Optional[Callable[[Any, int], Any]] = None
    max_priority: int = 0
    assertion_basis: Tuple[Any, ...] = ()
    condition_basis: Tuple[Any, ...] = ()
    term_universe: Tuple[Any, ...] = ()
    names: Tuple[Name, ...] = ()
    guard_pool: Tuple[Any, ...] = (TOP,)
    assertion_leaves: Tuple[Any, ...] = ()
    prefix_pool_fn: Optional[Callable[..., list]] = None
    sort_check_fn: Optional[Callable[[Any], list]] = None
    factory: Optional[Callable[[Sequence[Name]], "Instance"]] = None
    source: Optional["Instance"] = None

    # ----- parámetros -----

    def entails(self, psi: Any, phi: Any) -> bool:
        if phi == self.top:
            return True
        return bool(self.entails_fn(psi, phi))

    def compose(self, psi1: Any, psi2: Any) -> Any:
        return self.compose_fn(psi1, psi2)

    def chan_eq(self, m: Any, n: Any) -> Any:
        return self.chan_eq_fn(m, n)

    @property
    def has_prio(self) -> bool:
        return self.prio_fn is not None

    def prio(self, m: Any, p: int) -> Any:
        if self.prio_fn is None:
            raise InstanceMismatch(f"La instancia {self.name} no tiene operador de prioridad")
        return self.prio_fn(m, p)

    def matcher(self, pattern: Any, binders: NameSeq, value: Any) -> List[tuple]:
        return self.matcher_fn(pattern, tuple(binders), value)

    def substitute(self, x: Any, xs: NameSeq, ts: Sequence[Any]) -> Any:
        return nominal.subst(x, xs, ts)

    # ----- utilidades -----

    def sort_check(self, agent) -> list:
        if self.sort_check_fn is None:
            return []
        return self.sort_check_fn(agent)

    def prefix_pool(self, names: Sequence[Name]) -> list:
        if self.prefix_pool_fn is None:
            return []
        return self.prefix_pool_fn(names)

    def with_names(self, names: Sequence[Name]) -> "Instance":
        """Reconstruye las bases dependientes de los nombres en ámbito."""
        if self.factory is None:
            return self
        return self.factory(tuple(names))

    def replace(self, **changes) -> "Instance":
        return dataclasses.replace(self, **changes)

    def subjects(self) -> List[Any]:
        """Términos del universo que son canal de sí mismos bajo la unidad."""
        return [m for m in self.term_universe if self.entails(self.unit, self.chan_eq(m, m))]

    def require_prio(self):
        if not self.has_prio:
            raise InstanceMismatch(f"La instancia {self.name} no tiene prioridades")

    def __repr__(self):
        return f"Instance<{self.name}>"


# =========================================================
#  Marcos: entailment, equivalencia estática, prioridad
# =========================================================

def as_frame(f: Any) -> Frame:
    return f if isinstance(f, Frame) else Frame((), f)


def frame_entails(f: Any, phi: Any, inst: Instance) -> bool:
    f = as_frame(f)
    if f.binders:
        f = f.fresh_for(nominal.support(phi))
    return inst.entails(f.assertion, phi)


def signature(f: Any, basis: Sequence[Any], inst: Instance) -> Tuple[bool, ...]:
    return tuple(frame_entails(f, phi, inst) for phi in basis)


def static_equiv(f: Any, g: Any, basis: Sequence[Any], inst: Instance) -> bool:
    return all(frame_entails(f, phi, inst) == frame_entails(g, phi, inst) for phi in basis)


def prio_of_frame(f: Any, m: Any, inst: Instance) -> int:
    inst.require_prio()
    f = as_frame(f)
    encontrados = [p for p in range(inst.max_priority + 1) if frame_entails(f, inst.prio(m, p), inst)]
    if not encontrados:
        raise NoPriority(f"{m} no tiene prioridad en {f} (0..{inst.max_priority})")
    if len(encontrados) > 1:
        raise AmbiguousPriority(f"{m} tiene prioridades {encontrados} en {f}")
    return encontrados[0]


# =========================================================
#  Requisitos
# =========================================================

class RequisiteFailure(BaseModel):
    law: str
    witness: List[str]


class RequisiteReport(BaseModel):
    instance: str
    checked: Dict[str, int] = Field(default_factory=dict)
    failures: List[RequisiteFailure] = Field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def to_frame(self) -> pd.DataFrame:
        filas = [{"instance": self.instance, "law": f.law, "witness": " | ".join(f.witness)}
                 for f in self.failures]
        return pd.DataFrame(filas, columns=["instance", "law", "witness"])


class _Checker:
    def __init__(self, inst: Instance, report: RequisiteReport, max_witnesses: int):
        self.inst = inst
        self.report = report
        self.max_witnesses = max_witnesses
        self._sig: Dict[Any, Tuple[bool, ...]] = {}

    def sig(self, psi) -> Tuple[bool, ...]:
        if psi not in self._sig:
            self._sig[psi] = signature(psi, self.inst.condition_basis, self.inst)
        return self._sig[psi]

    def check(self, law: str, ok: bool, *witness):
        self.report.checked[law] = self.report.checked.get(law, 0) + 1
        if not ok:
            previos = sum(1 for f in self.report.failures if f.law == law)
            if previos < self.max_witnesses:
                self.report.failures.append(RequisiteFailure(law=law, witness=[str(w) for w in witness]))


def check_requisites(inst: Instance, max_witnesses: int = 5) -> RequisiteReport:
    report = RequisiteReport(instance=inst.name)
    c = _Checker(inst, report, max_witnesses)
    basis = list(inst.assertion_basis) or [inst.unit]
    terms = list(inst.term_universe)
    subjects = inst.subjects() or terms

    # ----- canales -----
    for psi in basis:
        for m, n in itertools.product(terms, repeat=2):
            if inst.entails(psi, inst.chan_eq(m, n)):
                c.check("chan_eq_symmetry", inst.entails(psi, inst.chan_eq(n, m)), psi, m, n)
                for l in terms:
                    if inst.entails(psi, inst.chan_eq(n, l)):
                        c.check("chan_eq_transitivity", inst.entails(psi, inst.chan_eq(m, l)), psi, m, n, l)

    # ----- monoide abeliano módulo ≃ -----
    for psi in basis:
        c.check("compose_unit", c.sig(inst.compose(psi, inst.unit)) == c.sig(psi), psi)
    for p1, p2 in itertools.product(basis, repeat=2):
        c.check("compose_commutativity", c.sig(inst.compose(p1, p2)) == c.sig(inst.compose(p2, p1)), p1, p2)
    for p1, p2, p3 in itertools.product(basis, repeat=3):
        izq = inst.compose(inst.compose(p1, p2), p3)
        der = inst.compose(p1, inst.compose(p2, p3))
        c.check("compose_associativity", c.sig(izq) == c.sig(der), p1, p2, p3)

    clases: Dict[Tuple[bool, ...], list] = {}
    for psi in basis:
        clases.setdefault(c.sig(psi), []).append(psi)
    for miembros in clases.values():
        for p1, p2 in itertools.combinations(miembros, 2):
            for p3 in basis:
                ok = c.sig(inst.compose(p1, p3)) == c.sig(inst.compose(p2, p3))
                c.check("compose_compositionality", ok, p1, p2, p3)

    # ----- sustitución -----
    for m in terms:
        for a in sorted(nominal.support(m)):
            for t in terms:
                resultado = inst.substitute(m, (a,), (t,))
                ok = nominal.support(t) <= nominal.support(resultado)
                c.check("subst_support", ok, m, a, t)
    valores = terms + list(inst.condition_basis) + basis
    for x in valores:
        for a in inst.names:
            if a in nominal.support(x):
                continue
            for t in terms:
                c.check("subst_fresh_identity", inst.substitute(x, (a,), (t,)) == x, x, a, t)

    # ----- ⊤ -----
    for psi in basis:
        c.check("top_entailed", inst.entails(psi, inst.top), psi)
    c.check("top_support", not nominal.support(inst.top), inst.top)
    for a in inst.names:
        for t in terms:
            c.check("top_subst", inst.substitute(inst.top, (a,), (t,)) == inst.top, a, t)

    # ----- unicidad de prioridad -----
    if inst.has_prio:
        for psi in basis:
            for m, n in itertools.product(subjects, repeat=2):
                if not inst.entails(psi, inst.chan_eq(m, n)):
                    continue
                try:
                    pm = prio_of_frame(psi, m, inst)
                    pn = prio_of_frame(psi, n, inst)
                    c.check("prio_uniqueness", pm == pn, psi, m, n)
                except (NoPriority, AmbiguousPriority) as e:
                    c.check("prio_uniqueness", False, psi, m, n, e)

    if report.failures:
        logger.warning(f"Requisitos de {inst.name}: {len(report.failures)} fallos")
    else:
        logger.info(f"Requisitos de {inst.name}: {sum(report.checked.values())} comprobaciones correctas")
    return report
