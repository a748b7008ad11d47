"""
PsiPRIO - Arnés de verificación
Enumeración de agentes, correspondencia operacional fuerte entre el cálculo con
prioridades y su traducción, contraejemplo de abstracción completa y chequeos
de invariantes (precisión de marcos, inclusión de capas).
"""
import itertools
import logging
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from math import comb
from typing import Any, Dict, Iterable, Iterator, List, Optional, Tuple

import pandas as pd
from pydantic import BaseModel, Field, field_validator

from psiprio.errors import NoPriority, PsiError
from psiprio.services import nominal
from psiprio.services.encoding import (
    Mutant, TargetAssertion, build_target, element_of, entails_prime, guarding_elements_of, translate,
    MultTest,
)
from psiprio.services.equivalence import BisimConfig, bisim
from psiprio.services.fimm import FIMM
from psiprio.services.nominal import Name
from psiprio.services.params import Instance, static_equiv
from psiprio.services.parser import parse_agent, parse_assertion, parse_macros
from psiprio.services.semantics import Layer, Semantics, Transition
from psiprio.services.syntax import (
    NIL, Agent, Assert, Case, Frame, Input, Nil, Out, Output, Par, Repl, Restrict, Tau,
    build_par, compose_frames, encodable, frame_of, normal_form, objects_of,
)

logger = logging.getLogger(__name__)

DIRECTIONS = ("both", "out", "in")

# Configuración del ejemplo de equidad con prioridades dinámicas (instancia flip)
FAIRNESS_LETS = (
    "Px=(|{x}|) | !out(x).(|{x,y}|) | !out(y).(|{x,y}|)",
    "Py=(|{y}|) | !out(x).(|{x,y}|) | !out(y).(|{x,y}|)",
)
FAIRNESS_ENV = "{}"
FAIRNESS_AGENT = "Py | in(x).in(x).in(x) | in(y)"


# =========================================================
#  Enumeración de agentes
# =========================================================

class EnumConfig(BaseModel):
    prefix_depth: int = 1
    max_parallel: int = 1
    name_pool: List[str] = Field(default_factory=lambda: ["x", "y"])
    include_case: bool = False
    include_repl: bool = False
    include_restrict: bool = False
    directions: str = "both"

    @field_validator("prefix_depth")
    @classmethod
    def _depth(cls, v):
        if v < 0:
            raise ValueError("prefix_depth debe ser >= 0")
        return v

    @field_validator("max_parallel")
    @classmethod
    def _parallel(cls, v):
        if v < 1:
            raise ValueError("max_parallel debe ser >= 1")
        return v

    @field_validator("directions")
    @classmethod
    def _directions(cls, v):
        if v not in DIRECTIONS:
            raise ValueError(f"directions debe ser una de {DIRECTIONS}")
        return v

    def names(self) -> Tuple[Name, ...]:
        return tuple(sorted({nominal.name(n) for n in self.name_pool}))


def _prefix_agent(entry, cont: Agent) -> Agent:
    if entry[0] == "out":
        return Output(entry[1], entry[2], cont)
    return Input(entry[1], tuple(entry[2]), entry[3], cont)


class _Enumerator:
    def __init__(self, cfg: EnumConfig, inst: Instance):
        self.cfg = cfg
        self.inst = inst.with_names(cfg.names())
        pool = self.inst.prefix_pool(cfg.names())
        if cfg.directions != "both":
            pool = [e for e in pool if e[0] == cfg.directions]
        self.pool = pool
        self.leaves = [Assert(a) for a in self.inst.assertion_leaves]
        self._memo: Dict[int, List[Agent]] = {}

    def prefixed(self, depth: int) -> List[Agent]:
        return [_prefix_agent(e, cont) for e in self.pool for cont in self.processes(depth - 1)]

    def cases(self, prefixed: List[Agent]) -> List[Agent]:
        resultado = []
        for tipo in (Output, Input):
            ramas = [(g, P) for g in self.inst.guard_pool for P in prefixed if isinstance(P, tipo)]
            resultado += [Case((a, b)) for a, b in itertools.combinations(ramas, 2)]
        return resultado

    def processes(self, depth: int) -> List[Agent]:
        """Componentes secuenciales de profundidad de prefijos <= depth."""
        if depth in self._memo:
            return self._memo[depth]
        procesos = [NIL] + self.leaves
        if depth > 0:
            prefijados = self.prefixed(depth)
            procesos += prefijados
            if self.cfg.include_repl:
                procesos += [Repl(P) for P in prefijados]
            if self.cfg.include_case:
                procesos += self.cases(prefijados)
            if self.cfg.include_restrict:
                procesos += [Restrict(a, P) for P in prefijados for a in self.cfg.names() if a in P.support()]
        self._memo[depth] = procesos
        return procesos

    def agents(self) -> Iterator[Agent]:
        vistos = set()
        componentes = [P for P in self.processes(self.cfg.prefix_depth) if not isinstance(P, Nil)]
        candidatos = itertools.chain(
            [NIL],
            *(itertools.combinations_with_replacement(componentes, k) for k in range(1, self.cfg.max_parallel + 1)),
        )
        # sin restricciones los componentes ya son distintos módulo alfa
        deduplicar = self.cfg.include_restrict
        for c in candidatos:
            P = c if isinstance(c, Agent) else build_par(list(c))
            if encodable(P):
                continue
            if deduplicar:
                clave = nominal.canonical_key(P)
                if clave in vistos:
                    continue
                vistos.add(clave)
            yield P


def enumerate_agents(cfg: EnumConfig, inst: Instance) -> Iterator[Agent]:
    """Enumeración exhaustiva y sin duplicados (módulo alfa) de agentes codificables."""
    return _Enumerator(cfg, inst).agents()


def count_agents(cfg: EnumConfig, inst: Instance) -> int:
    """Recuento recursivo independiente de la enumeración (sin restricciones)."""
    if cfg.include_restrict:
        raise ValueError("count_agents no cubre include_restrict")
    local = inst.with_names(cfg.names())
    pool = local.prefix_pool(cfg.names())
    if cfg.directions != "both":
        pool = [e for e in pool if e[0] == cfg.directions]
    salidas = sum(1 for e in pool if e[0] == "out")
    entradas = len(pool) - salidas
    hojas = len(local.assertion_leaves)
    guardas = len(local.guard_pool)

    s = 1 + hojas
    for _ in range(cfg.prefix_depth):
        anterior = s
        s = 1 + hojas + len(pool) * anterior
        if cfg.include_repl:
            s += len(pool) * anterior
        if cfg.include_case:
            s += comb(guardas * salidas * anterior, 2) + comb(guardas * entradas * anterior, 2)
    n = s - 1
    return 1 + sum(comb(n + k - 1, k) for k in range(1, cfg.max_parallel + 1))


# =========================================================
#  Correspondencia operacional
# =========================================================

class CorrespondenceFailure(BaseModel):
    # 1/2: transición fuente sin pareja (visible/τ); 3/4: transición destino sin pareja; 0: recuento
    direction: int
    env: str
    source: str
    action: str
    expected: str
    actual: str


class CorrespondenceReport(BaseModel):
    checked: int = 0
    states: int = 0
    agents: int = 0
    failures: List[CorrespondenceFailure] = Field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def merge(self, other: "CorrespondenceReport") -> "CorrespondenceReport":
        return CorrespondenceReport(
            checked=self.checked + other.checked,
            states=self.states + other.states,
            agents=self.agents + other.agents,
            failures=self.failures + other.failures,
        )

    def to_frame(self) -> pd.DataFrame:
        columnas = ["direction", "env", "source", "action", "expected", "actual"]
        return pd.DataFrame([f.model_dump() for f in self.failures], columns=columnas)


def _erase(action):
    return action.erased() if isinstance(action, Tau) else action


def _match_key(action, target: Agent, inst: Instance, unfold_budget: int) -> Tuple[str, str]:
    """Etiqueta (sin prioridad) y derivado en forma normal ≡, módulo alfa de los extruidos."""
    action = _erase(action)
    if not action.bn():
        return (str(action), nominal.canonical_key(normal_form(target, inst, unfold_budget)))
    mejor = None
    for perm in itertools.permutations(action.bn()):
        a, t = action, target
        for i, b in enumerate(perm):
            c = Name("^", i)
            a, t = a.swap(b, c), t.swap(b, c)
        clave = (str(a), nominal.canonical_key(normal_form(t, inst, unfold_budget)))
        if mejor is None or clave < mejor:
            mejor = clave
    return mejor


def _observable(inst: Instance, P: Agent) -> Tuple[Any, ...]:
    vistos = {}
    for v in tuple(inst.term_universe) + objects_of(P):
        vistos.setdefault(str(v), v)
    return tuple(vistos.values())


class _Correspondence:
    def __init__(self, inst: Instance, target: Instance, observable, mutant: Mutant,
                 rep_unfold: int, unfold_budget: int):
        self.inst = inst
        self.target = target
        self.mutant = Mutant(mutant)
        self.unfold_budget = unfold_budget
        self.source = Semantics(inst, Layer.PRIO, rep_unfold, observable)
        self.dest = Semantics(target, Layer.PLAIN, rep_unfold, observable)

    def compare(self, env: Any, S: Agent, report: CorrespondenceReport) -> List[Transition]:
        T = translate(S, self.inst, self.mutant)
        env_t = TargetAssertion(env, FIMM())
        fuente = self.source.transitions(env, S).sorted()
        destino = self.dest.transitions(env_t, T).sorted()
        report.states += 1
        report.checked += len(fuente) + len(destino)

        esperadas: Dict[Tuple[str, str], Transition] = {}
        cuenta_f = Counter()
        for t in fuente:
            k = _match_key(t.action, translate(t.target, self.inst, self.mutant), self.target, self.unfold_budget)
            esperadas.setdefault(k, t)
            cuenta_f[k] += 1
        obtenidas: Dict[Tuple[str, str], Transition] = {}
        cuenta_d = Counter()
        for u in destino:
            k = _match_key(u.action, u.target, self.target, self.unfold_budget)
            obtenidas.setdefault(k, u)
            cuenta_d[k] += 1

        def fallo(direction, action, expected, actual):
            report.failures.append(CorrespondenceFailure(
                direction=direction, env=str(env), source=str(S), action=str(action),
                expected=expected, actual=actual))

        for k, t in esperadas.items():
            if k not in obtenidas:
                fallo(2 if isinstance(t.action, Tau) else 1, t.action,
                      f"{_erase(t.action)} -> {translate(t.target, self.inst, self.mutant)}",
                      "; ".join(str(u) for u in destino) or "sin transiciones")
        for k, u in obtenidas.items():
            if k not in esperadas:
                fallo(4 if isinstance(u.action, Tau) else 3, u.action,
                      "; ".join(str(t) for t in fuente) or "sin transiciones", str(u))
        if cuenta_f != cuenta_d and set(cuenta_f) == set(cuenta_d):
            fallo(0, "-", f"{sum(cuenta_f.values())} transiciones fuente",
                  f"{sum(cuenta_d.values())} transiciones destino")
        return fuente


def check_correspondence(env: Any, P: Agent, inst: Instance, depth: int = 4, mutant: Mutant = Mutant.NONE,
                         rep_unfold: int = 2, unfold_budget: int = 2,
                         target: Optional[Instance] = None) -> CorrespondenceReport:
    """Compara, en cada estado alcanzable hasta depth, las transiciones con prioridad y las de ⟦·⟧."""
    inst.require_prio()
    translate(P, inst, mutant)
    target = target or build_target(inst, [P])
    comparador = _Correspondence(inst, target, _observable(inst, P), mutant, rep_unfold, unfold_budget)
    report = CorrespondenceReport(agents=1)
    vistos = {nominal.canonical_key(P)}
    frontera = [P]
    for _ in range(depth):
        siguiente = []
        for S in frontera:
            for t in comparador.compare(env, S, report):
                clave = nominal.canonical_key(t.target)
                if clave not in vistos:
                    vistos.add(clave)
                    siguiente.append(t.target)
        frontera = siguiente
        if not frontera:
            break
    if report.failures:
        logger.info(f"Correspondencia de {P}: {len(report.failures)} fallos en {report.states} estados")
    return report


def sweep_correspondence(agents: Iterable[Agent], inst: Instance, env: Any = None, depth: int = 4,
                         mutant: Mutant = Mutant.NONE, rep_unfold: int = 2, unfold_budget: int = 2,
                         jobs: int = 1, batch_size: int = 256) -> CorrespondenceReport:
    """Correspondencia sobre muchos agentes en paralelo; fusiona los informes por agente.

    Los agentes se consumen por lotes, de modo que la enumeración nunca se materializa entera.
    """
    env = inst.unit if env is None else env
    # la semántica del destino sólo usa los parámetros, no las bases finitas
    target = build_target(inst)

    def uno(P: Agent) -> CorrespondenceReport:
        try:
            return check_correspondence(env, P, inst, depth, mutant, rep_unfold, unfold_budget, target)
        except PsiError as e:
            logger.error(f"Correspondencia de {P} abortada: {e}")
            return CorrespondenceReport(agents=1, failures=[CorrespondenceFailure(
                direction=0, env=str(env), source=str(P), action="-", expected="sin error", actual=str(e))])

    total = CorrespondenceReport()
    pendientes = iter(agents)
    with ThreadPoolExecutor(max_workers=max(1, jobs)) as executor:
        while True:
            lote = list(itertools.islice(pendientes, batch_size * max(1, jobs)))
            if not lote:
                break
            for r in executor.map(uno, lote):
                total = total.merge(r)
            logger.info(f"Correspondencia: {total.agents} agentes, {len(total.failures)} fallos")
    logger.info(f"Correspondencia: {total.agents} agentes, {total.states} estados, {len(total.failures)} fallos")
    return total


# =========================================================
#  Contraejemplo de abstracción completa
# =========================================================

class CounterexamplePart(BaseModel):
    part: str
    claim: str
    expected: bool
    observed: bool

    @property
    def ok(self) -> bool:
        return self.expected == self.observed


class CounterexampleReport(BaseModel):
    parts: List[CounterexamplePart] = Field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(p.ok for p in self.parts)

    def to_frame(self) -> pd.DataFrame:
        filas = [{**p.model_dump(), "ok": p.ok} for p in self.parts]
        return pd.DataFrame(filas, columns=["part", "claim", "expected", "observed", "ok"])


def check_counterexample_full_abstraction(inst: Instance, channel: str = "x",
                                          low_channel: str = "g") -> CounterexampleReport:
    """P = α.0 y Q = α.P son bisimilares, pero sus traducciones se distinguen en el destino."""
    inst.require_prio()
    a, g = nominal.name(channel), nominal.name(low_channel)
    local = inst.with_names(tuple(set(inst.names) | {a, g}))
    alpha = Output(a, a, NIL)
    beta = Input(a, (), a, NIL)
    P = alpha
    Q = Output(a, a, alpha)
    PP = Par(P, P)
    report = CounterexampleReport()

    # (a) P | P ∼ Q en la semántica con prioridades
    cfg = BisimConfig.for_instance(local, Layer.PRIO)
    relacionados = bisim(local.unit, PP, Q, cfg, local).related
    report.parts.append(CounterexamplePart(part="a", claim=f"{PP} ~ {Q}", expected=True, observed=relacionados))

    # (b) F(⟦P|P⟧) ⊢′ (2)α y F(⟦Q⟧) ⊬′ (2)α
    target = build_target(local, [PP, Q, beta])
    t_pp, t_q = translate(PP, local), translate(Q, local)
    dos = MultTest(2, element_of(alpha))
    f_pp = frame_of(t_pp, target).assertion
    f_q = frame_of(t_q, target).assertion
    report.parts.append(CounterexamplePart(part="b", claim=f"F([[P|P]]) |-' {dos}", expected=True,
                                           observed=entails_prime(f_pp, dos, local)))
    report.parts.append(CounterexamplePart(part="b", claim=f"F([[Q]]) |-' {dos}", expected=False,
                                           observed=entails_prime(f_q, dos, local)))
    # la cláusula estática en la raíz basta para separarlos; el juego completo sólo si coinciden
    cfg_t = BisimConfig.for_instance(target, Layer.PLAIN)
    traducidos = static_equiv(frame_of(t_pp, target), frame_of(t_q, target), cfg_t.condition_basis, target)
    if traducidos:
        traducidos = bisim(target.unit, t_pp, t_q, cfg_t, target).related
    report.parts.append(CounterexamplePart(part="b", claim="[[P|P]] ~ [[Q]]", expected=False,
                                           observed=traducidos))

    # (c) R = (|−α|) | (|β|) | γ.0 bajo (Ψ con g de prioridad baja, ∅)
    R = build_par([
        Assert(TargetAssertion(local.unit, FIMM.single(element_of(alpha), -1))),
        Assert(TargetAssertion(local.unit, FIMM.single(element_of(beta)))),
        Output(g, g, NIL),
    ])
    env = TargetAssertion(local.compose(local.unit, _low_priority(local, g)), FIMM())
    motor = Semantics(target, Layer.PLAIN)
    for nombre, T, esperado in (("R | [[Q]]", t_q, True), ("R | [[P|P]]", t_pp, False)):
        accion = any(isinstance(t.action, Out) and t.action.subj == g
                     for t in motor.transitions(env, Par(R, T)))
        report.parts.append(CounterexamplePart(part="c", claim=f"{nombre} tiene una acción en {g}",
                                               expected=esperado, observed=accion))
    for p in report.parts:
        logger.info(f"Contraejemplo ({p.part}) {p.claim}: {p.observed}")
    return report


def _low_priority(inst: Instance, g: Name) -> Any:
    """Aserción de la base que da a g la prioridad más baja disponible."""
    mejor, nivel = inst.unit, -1
    for psi in inst.assertion_basis:
        for p in range(inst.max_priority, -1, -1):
            if inst.entails(psi, inst.prio(g, p)):
                if p > nivel and all(not inst.entails(psi, inst.prio(n, p)) for n in inst.names if n != g):
                    mejor, nivel = psi, p
                break
    return mejor


# =========================================================
#  Invariantes
# =========================================================

def _expected_frame(P: Agent, inst: Instance, target: Instance) -> Frame:
    """(νb̃)(Ψ_P, E_P) calculado componente a componente sobre la fuente."""
    if isinstance(P, Assert):
        return Frame((), TargetAssertion(P.assertion, FIMM()))
    if isinstance(P, Par):
        return compose_frames(_expected_frame(P.left, inst, target), _expected_frame(P.right, inst, target), target)
    if isinstance(P, Restrict):
        f = _expected_frame(P.body, inst, target)
        if P.name in f.binders:
            f = f.fresh_for({P.name})
        return Frame((P.name,) + f.binders, f.assertion)
    return Frame((), TargetAssertion(inst.unit, guarding_elements_of(P)))


def check_frame_accuracy(P: Agent, inst: Instance, env: Any = None, depth: int = 4,
                         target: Optional[Instance] = None) -> List[str]:
    """F(⟦S⟧) coincide con los elementos de guarda de S en cada estado alcanzable."""
    env = inst.unit if env is None else env
    target = target or build_target(inst, [P])
    motor = Semantics(inst, Layer.PRIO)
    problemas = []
    vistos = {nominal.canonical_key(P)}
    frontera = [P]
    for nivel in range(depth + 1):
        siguiente = []
        for S in frontera:
            obtenido = nominal.canonical_key(frame_of(translate(S, inst), target))
            esperado = nominal.canonical_key(_expected_frame(S, inst, target))
            if obtenido != esperado:
                problemas.append(f"{S}: F([[S]]) = {obtenido}, esperado {esperado}")
            if nivel == depth:
                continue
            for t in motor.transitions(env, S):
                clave = nominal.canonical_key(t.target)
                if clave not in vistos:
                    vistos.add(clave)
                    siguiente.append(t.target)
        frontera = siguiente
    return problemas


def check_layer_inclusion(env: Any, P: Agent, inst: Instance, depth: int = 4) -> List[str]:
    """prio ⊆ neg, neg borrada ⊆ plana y maximalidad de la prioridad en cada estado alcanzable."""
    inst.require_prio()
    prio = Semantics(inst, Layer.PRIO)
    neg = Semantics(inst, Layer.NEG)
    plana = Semantics(inst, Layer.PLAIN)
    problemas = []
    vistos = {nominal.canonical_key(P)}
    frontera = [P]
    for _ in range(depth):
        siguiente = []
        for S in frontera:
            t_prio = prio.transitions(env, S)
            t_neg = neg.transitions(env, S)
            claves_neg = t_neg.keys()
            for t in t_prio:
                if t.key() not in claves_neg:
                    problemas.append(f"{S}: {t} está en prio pero no en neg")
            claves_plana = plana.transitions(env, S).keys()
            for t in t_neg:
                if Transition(env, S, _erase(t.action), t.target).key() not in claves_plana:
                    problemas.append(f"{S}: {t} de neg no aparece borrada en la capa plana")
            suelo = neg.min_tau(env, S)
            if suelo is not None:
                for t in t_prio:
                    try:
                        nivel = prio.prio_of_action(t.action, env, S)
                    except NoPriority:
                        continue
                    if nivel > suelo:
                        problemas.append(f"{S}: {t} tiene prioridad {nivel} > {suelo}")
            for t in t_prio:
                clave = nominal.canonical_key(t.target)
                if clave not in vistos:
                    vistos.add(clave)
                    siguiente.append(t.target)
        frontera = siguiente
    return problemas


def fairness_agent(inst: Instance) -> Tuple[Any, Agent, Dict[str, Agent]]:
    """Entorno, agente inicial y macros Px/Py del ejemplo de equidad."""
    macros = parse_macros(FAIRNESS_LETS, inst)
    return parse_assertion(FAIRNESS_ENV, inst), parse_agent(FAIRNESS_AGENT, inst, macros), macros
