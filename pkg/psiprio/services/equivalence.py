"""
PsiPRIO - Equivalencias
Bisimulación fuerte como punto fijo máximo sobre ternas (Ψ, P, Q), congruencia
fuerte con secuencias de sustituciones acotadas y batería de leyes algebraicas.
"""
import itertools
import logging
import random
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Iterable, List, Optional, Sequence, Tuple

import pandas as pd
from pydantic import BaseModel, ConfigDict, Field

from psiprio.errors import PsiError, StateBudgetExceeded
from psiprio.services import nominal
from psiprio.services.params import Instance, frame_entails
from psiprio.services.parser import parse_agent, parse_assertion
from psiprio.services.semantics import Layer, Semantics
from psiprio.services.syntax import (
    NIL, Agent, Case, Frame, Input, Output, Par, Repl, Restrict, assertion_guarded,
    frame_of, objects_of, reduce_state, substitute,
)

logger = logging.getLogger(__name__)

WITNESS_COLUMNS = ["kind", "step", "clause", "move", "env", "left", "right"]

Triple = Tuple[Any, Agent, Agent]
Key = Tuple[str, str, str]


# =========================================================
#  Modelos
# =========================================================

class BisimConfig(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    condition_basis: List[Any]
    assertion_basis: List[Any]
    subst_universe: List[Tuple[tuple, tuple]] = Field(default_factory=list)
    max_states: int = 20000
    layer: Layer = Layer.PRIO
    # congruence: derivados reducidos con ≡ y recolección de restricciones; alpha: sólo módulo alfa
    state_reduction: str = "congruence"
    unfold_budget: int = 2
    rep_unfold: int = 1

    @classmethod
    def for_instance(cls, inst: Instance, layer: Optional[Layer] = None, **changes) -> "BisimConfig":
        if layer is None:
            layer = Layer.PRIO if inst.has_prio else Layer.PLAIN
        sustituciones = [((a,), (b,)) for a in inst.names for b in inst.names if a != b]
        return cls(
            condition_basis=list(inst.condition_basis) or [inst.top],
            assertion_basis=list(inst.assertion_basis) or [inst.unit],
            subst_universe=sustituciones,
            layer=layer,
            **changes,
        )


class AttackStep(BaseModel):
    clause: str
    move: str
    env: str
    left: str
    right: str


class BisimResult(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    related: bool
    relation: List[Tuple[Any, Any, Any]] = Field(default_factory=list)
    attack: List[AttackStep] = Field(default_factory=list)
    states: int = 0

    def to_frame(self) -> pd.DataFrame:
        if self.related:
            filas = [{"kind": "relation", "step": i, "clause": None, "move": None,
                      "env": str(e), "left": str(p), "right": str(q)}
                     for i, (e, p, q) in enumerate(self.relation)]
        else:
            filas = [{"kind": "attack", "step": i, **s.model_dump()} for i, s in enumerate(self.attack)]
        return pd.DataFrame(filas, columns=WITNESS_COLUMNS)


class LawReport(BaseModel):
    law: str
    expected: bool = True
    checked: int = 0
    skipped: int = 0
    failures: List[str] = Field(default_factory=list)
    errors: List[str] = Field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures and not self.errors


def laws_to_frame(reports: Sequence[LawReport]) -> pd.DataFrame:
    filas = [{"law": r.law, "expected": r.expected, "checked": r.checked, "skipped": r.skipped,
              "failures": len(r.failures), "errors": len(r.errors),
              "witness": r.failures[0] if r.failures else (r.errors[0] if r.errors else None)}
             for r in reports]
    return pd.DataFrame(filas, columns=["law", "expected", "checked", "skipped", "failures", "errors", "witness"])


# =========================================================
#  Juego de bisimulación
# =========================================================

@dataclass
class _Node:
    env: Any
    left: Agent
    right: Agent
    static_fail: Optional[str] = None
    symmetry: Optional[Key] = None
    extensions: List[Tuple[str, Key]] = field(default_factory=list)
    moves: List[Tuple[str, List[Key]]] = field(default_factory=list)


def _observable(inst: Instance, agents: Iterable[Agent]) -> Tuple[Any, ...]:
    vistos = {}
    for v in tuple(inst.term_universe):
        vistos.setdefault(str(v), v)
    for P in agents:
        for v in objects_of(P):
            vistos.setdefault(str(v), v)
    return tuple(vistos.values())


def _rename_bound(action, target, nuevos):
    for b, c in zip(action.bn(), nuevos):
        action, target = action.swap(b, c), target.swap(b, c)
    return action, target


class _Game:
    def __init__(self, cfg: BisimConfig, inst: Instance, observable: Sequence[Any],
                 engine: Optional[Semantics] = None):
        self.cfg = cfg
        self.inst = inst
        self.engine = engine or Semantics(inst, cfg.layer, cfg.rep_unfold, observable)
        self.base_avoid = nominal.support(inst.term_universe) | nominal.support(tuple(observable))
        self.nodes: Dict[Key, _Node] = {}
        self._signatures: Dict[Tuple[str, str], Tuple[bool, ...]] = {}

    def reduce(self, P: Agent) -> Agent:
        if self.cfg.state_reduction == "alpha":
            return P
        return reduce_state(P, self.inst, self.cfg.unfold_budget)

    @staticmethod
    def key(env, P, Q) -> Key:
        return (nominal.canonical_key(env), nominal.canonical_key(P), nominal.canonical_key(Q))

    def closed_frame(self, env, P) -> Frame:
        f = frame_of(P, self.inst).fresh_for(nominal.support(env))
        return Frame(f.binders, self.inst.compose(env, f.assertion))

    def signature(self, env, P) -> Tuple[bool, ...]:
        clave = (nominal.canonical_key(env), nominal.canonical_key(P))
        firma = self._signatures.get(clave)
        if firma is None:
            marco = self.closed_frame(env, P)
            firma = tuple(frame_entails(marco, phi, self.inst) for phi in self.cfg.condition_basis)
            self._signatures[clave] = firma
        return firma

    def static_difference(self, env, P, Q) -> Optional[str]:
        for phi, izq, der in zip(self.cfg.condition_basis, self.signature(env, P), self.signature(env, Q)):
            if izq != der:
                return f"{phi}: {'izquierda' if izq else 'derecha'} lo deriva"
        return None

    def expand(self, env, P, Q) -> Tuple[_Node, List[Triple]]:
        nodo = _Node(env, P, Q)
        nodo.static_fail = self.static_difference(env, P, Q)
        if nodo.static_fail is not None:
            return nodo, []
        sucesores: List[Triple] = [(env, Q, P)]
        nodo.symmetry = self.key(env, Q, P)
        for extra in self.cfg.assertion_basis:
            nuevo = self.inst.compose(env, extra)
            sucesores.append((nuevo, P, Q))
            nodo.extensions.append((str(extra), self.key(nuevo, P, Q)))

        tp = self.engine.transitions(env, P).sorted()
        tq = self.engine.transitions(env, Q).sorted()
        evitar = set(nominal.support(env) | P.support() | Q.support() | self.base_avoid)
        for t in tp + tq:
            evitar |= set(t.action.bn())
        for t in tp:
            k = len(t.action.bn())
            frescos = []
            for _ in range(k):
                frescos.append(nominal.least_fresh_name(evitar | set(frescos), "e"))
            a_t, p_t = _rename_bound(t.action, t.target, frescos)
            candidatos = []
            for u in tq:
                if u.action.kind != t.action.kind or len(u.action.bn()) != k:
                    continue
                for perm in itertools.permutations(u.action.bn()):
                    a_u, q_u = u.action, u.target
                    for b, c in zip(perm, frescos):
                        a_u, q_u = a_u.swap(b, c), q_u.swap(b, c)
                    if a_u == a_t:
                        triple = (env, self.reduce(p_t), self.reduce(q_u))
                        sucesores.append(triple)
                        candidatos.append(self.key(*triple))
            nodo.moves.append((f"{a_t} -> {p_t}", candidatos))
        return nodo, sucesores

    def explore(self, roots: Sequence[Triple]) -> List[Key]:
        """Explora el producto alcanzable desde varias raíces; devuelve sus claves."""
        raices = [self.key(*r) for r in roots]
        pendientes = list(reversed(roots))
        while pendientes:
            e, p, q = pendientes.pop()
            k = self.key(e, p, q)
            if k in self.nodes:
                continue
            if len(self.nodes) >= self.cfg.max_states:
                logger.warning(f"Bisimulación: presupuesto de {self.cfg.max_states} estados agotado")
                raise StateBudgetExceeded(self.cfg.max_states)
            nodo, sucesores = self.expand(e, p, q)
            self.nodes[k] = nodo
            pendientes.extend(sucesores)
        return raices

    def solve(self) -> Tuple[set, Dict[Key, tuple]]:
        """Punto fijo máximo; devuelve ternas vivas y el motivo de cada eliminación."""
        vivos = set()
        motivos: Dict[Key, tuple] = {}
        turno: Dict[Key, int] = {}
        contador = itertools.count()
        for k, n in self.nodes.items():
            if n.static_fail is None:
                vivos.add(k)
            else:
                motivos[k] = ("static", n.static_fail, None)
                turno[k] = next(contador)
        cambio = True
        while cambio:
            cambio = False
            for k in sorted(vivos):
                motivo = self._violation(self.nodes[k], vivos, turno)
                if motivo is not None:
                    vivos.discard(k)
                    motivos[k] = motivo
                    turno[k] = next(contador)
                    cambio = True
        return vivos, motivos

    @staticmethod
    def _violation(n: _Node, vivos: set, turno: Dict[Key, int]) -> Optional[tuple]:
        for etiqueta, candidatos in n.moves:
            if not any(c in vivos for c in candidatos):
                siguiente = min(candidatos, key=lambda c: turno.get(c, -1)) if candidatos else None
                return ("simulation", etiqueta, siguiente)
        for extra, k in n.extensions:
            if k not in vivos:
                return ("extension", f"extensión con {extra}", k)
        if n.symmetry not in vivos:
            return ("symmetry", "intercambio de lados", n.symmetry)
        return None

    def attack(self, raiz: Key, motivos: Dict[Key, tuple]) -> List[AttackStep]:
        pasos = []
        visitados = set()
        k = raiz
        while k is not None and k not in visitados and k in motivos:
            visitados.add(k)
            n = self.nodes[k]
            clausula, movimiento, siguiente = motivos[k]
            if clausula == "simulation" and siguiente is None:
                movimiento = f"{movimiento} (sin respuesta)"
            pasos.append(AttackStep(clause=clausula, move=movimiento, env=str(n.env),
                                    left=str(n.left), right=str(n.right)))
            k = siguiente
        return pasos


# =========================================================
#  API
# =========================================================

def _result(juego: _Game, raiz: Key, vivos: set, motivos: Dict[Key, tuple]) -> BisimResult:
    if raiz in vivos:
        n = juego.nodes[raiz]
        relacion = [(m.env, m.left, m.right) for k, m in juego.nodes.items() if k in vivos and k != raiz]
        return BisimResult(related=True, relation=[(n.env, n.left, n.right)] + relacion,
                           states=len(juego.nodes))
    return BisimResult(related=False, attack=juego.attack(raiz, motivos), states=len(juego.nodes))


def bisim(env: Any, P: Agent, Q: Agent, cfg: BisimConfig, inst: Instance,
          observable: Optional[Sequence[Any]] = None, engine: Optional[Semantics] = None) -> BisimResult:
    if observable is None:
        observable = engine.observable if engine is not None and engine.observable else _observable(inst, (P, Q))
    juego = _Game(cfg, inst, observable, engine)
    raiz, = juego.explore([(env, P, Q)])
    vivos, motivos = juego.solve()
    return _result(juego, raiz, vivos, motivos)


def recheck_relation(triples: Sequence[Triple], cfg: BisimConfig, inst: Instance,
                     observable: Optional[Sequence[Any]] = None) -> List[str]:
    """Revalida un testigo: cada terna cumple las cuatro cláusulas dentro de la propia relación."""
    if not triples:
        return ["relación vacía"]
    if observable is None:
        _, p0, q0 = triples[0]
        observable = _observable(inst, (p0, q0))
    juego = _Game(cfg, inst, observable)
    claves = {juego.key(*t) for t in triples}
    problemas = []
    for env, P, Q in triples:
        nodo, _ = juego.expand(env, P, Q)
        etiqueta = f"({env}, {P}, {Q})"
        if nodo.static_fail is not None:
            problemas.append(f"{etiqueta}: equivalencia estática falla en {nodo.static_fail}")
            continue
        if nodo.symmetry not in claves:
            problemas.append(f"{etiqueta}: falta la terna simétrica")
        for extra, k in nodo.extensions:
            if k not in claves:
                problemas.append(f"{etiqueta}: falta la extensión con {extra}")
        for movimiento, candidatos in nodo.moves:
            if not any(c in claves for c in candidatos):
                problemas.append(f"{etiqueta}: {movimiento} sin respuesta dentro de la relación")
    return problemas


def _sigma_text(sigma) -> str:
    return " ".join("[" + ",".join(f"{x}:={t}" for x, t in zip(xs, ts)) + "]" for xs, ts in sigma) or "id"


def _apply(P: Agent, sigma) -> Agent:
    for xs, ts in sigma:
        P = substitute(P, xs, ts)
    return P


def substitution_sequences(cfg: BisimConfig, max_length: int = 2) -> List[tuple]:
    secuencias = [()]
    for n in range(1, max_length + 1):
        secuencias += list(itertools.product(cfg.subst_universe, repeat=n))
    return secuencias


def congruent(P: Agent, Q: Agent, cfg: BisimConfig, inst: Instance,
              engine: Optional[Semantics] = None) -> BisimResult:
    """Para toda secuencia de sustituciones σ y todo Ψ de la base: Ψ ⊳ Pσ ∼ Qσ."""
    pares = []
    vistos = set()
    for sigma in substitution_sequences(cfg):
        p_s, q_s = _apply(P, sigma), _apply(Q, sigma)
        clave_par = (nominal.canonical_key(p_s), nominal.canonical_key(q_s))
        if clave_par not in vistos:
            vistos.add(clave_par)
            pares.append((sigma, p_s, q_s))
    if engine is None or engine.observable is None:
        observable = _observable(inst, [A for _, p_s, q_s in pares for A in (p_s, q_s)])
        engine = Semantics(inst, cfg.layer, cfg.rep_unfold, observable)

    relacion: Dict[Key, Triple] = {}
    estados = 0
    for sigma, p_s, q_s in pares:
        # todos los entornos de la base comparten un único juego: las extensiones los conectan
        juego = _Game(cfg, inst, engine.observable, engine)
        for env in cfg.assertion_basis:
            motivo = juego.static_difference(env, p_s, q_s)
            if motivo is not None:
                pasos = [AttackStep(clause=c, move=m, env=str(env), left=str(p_s), right=str(q_s))
                         for c, m in (("substitution", _sigma_text(sigma)), ("static", motivo))]
                return BisimResult(related=False, attack=pasos, states=estados)
        raices = juego.explore([(env, p_s, q_s) for env in cfg.assertion_basis])
        vivos, motivos = juego.solve()
        estados += len(juego.nodes)
        for env, raiz in zip(cfg.assertion_basis, raices):
            if raiz not in vivos:
                paso = AttackStep(clause="substitution", move=_sigma_text(sigma), env=str(env),
                                  left=str(p_s), right=str(q_s))
                r = _result(juego, raiz, vivos, motivos)
                return BisimResult(related=False, attack=[paso] + r.attack, states=estados)
        for k, n in juego.nodes.items():
            if k in vivos:
                relacion.setdefault(k, (n.env, n.left, n.right))
    return BisimResult(related=True, relation=list(relacion.values()), states=estados)


# =========================================================
#  Leyes algebraicas
# =========================================================

LawBuilder = Callable[[random.Random, "_LawPool"], Optional[Tuple[Agent, Agent]]]


class _LawPool:
    def __init__(self, inst: Instance, agents: Sequence[Agent]):
        self.inst = inst
        self.agents = [a for a in agents if assertion_guarded(a)] or [NIL]
        self.all_agents = list(agents) or [NIL]
        self.prefixed = [a for a in agents if isinstance(a, (Output, Input))]
        self.names = list(inst.names)
        self.pool = inst.prefix_pool(inst.names)
        self.guards = [inst.top] + [c for c in inst.condition_basis if c != inst.top]
        self.observable = _observable(inst, self.all_agents)
        self._lock = threading.Lock()
        self._engines: Dict[Tuple[Layer, int], Semantics] = {}
        self._verdicts: Dict[Tuple[str, str, str], Tuple[bool, str]] = {}

    def name(self, rng: random.Random, avoid=frozenset()) -> Optional[nominal.Name]:
        libres = [n for n in self.names if n not in avoid]
        return rng.choice(libres) if libres else nominal.least_fresh_name(avoid, "a")

    def engine(self, cfg: BisimConfig) -> Semantics:
        """Un motor por capa, compartido por todas las leyes y muestras."""
        with self._lock:
            clave = (cfg.layer, cfg.rep_unfold)
            if clave not in self._engines:
                self._engines[clave] = Semantics(self.inst, cfg.layer, cfg.rep_unfold, self.observable)
            return self._engines[clave]

    def verdict(self, P: Agent, Q: Agent, cfg: BisimConfig) -> Tuple[bool, str]:
        """(relacionados, detalle del ataque) con memoria: las muestras repetidas no se recalculan."""
        clave = (cfg.state_reduction, nominal.canonical_key(P), nominal.canonical_key(Q))
        with self._lock:
            previo = self._verdicts.get(clave)
        if previo is not None:
            return previo
        r = congruent(P, Q, cfg, self.inst, self.engine(cfg))
        veredicto = (r.related, r.attack[-1].move if r.attack else "relacionados")
        with self._lock:
            self._verdicts[clave] = veredicto
        return veredicto


def _prefix_from(entry, cont: Agent) -> Agent:
    if entry[0] == "out":
        return Output(entry[1], entry[2], cont)
    return Input(entry[1], tuple(entry[2]), entry[3], cont)


def _entry_support(entry) -> frozenset:
    if entry[0] == "out":
        return nominal.support(entry[1]) | nominal.support(entry[2])
    return nominal.support(entry[1]) | frozenset(entry[2]) | nominal.support(entry[3])


def _law_par_unit(rng, pool):
    P = rng.choice(pool.all_agents)
    return P, Par(P, NIL)


def _law_par_assoc(rng, pool):
    P, Q, R = (rng.choice(pool.all_agents) for _ in range(3))
    return Par(P, Par(Q, R)), Par(Par(P, Q), R)


def _law_par_comm(rng, pool):
    P, Q = rng.choice(pool.all_agents), rng.choice(pool.all_agents)
    return Par(P, Q), Par(Q, P)


def _law_restrict_nil(rng, pool):
    a = pool.name(rng)
    return Restrict(a, NIL), NIL


def _law_restrict_comm(rng, pool):
    P = rng.choice(pool.all_agents)
    a = pool.name(rng)
    b = pool.name(rng, {a})
    return Restrict(a, Restrict(b, P)), Restrict(b, Restrict(a, P))


def _law_replication(rng, pool):
    if not pool.prefixed:
        return None
    P = rng.choice(pool.prefixed)
    return Repl(P), Par(P, Repl(P))


def _law_scope_extension(rng, pool):
    P, Q = rng.choice(pool.all_agents), rng.choice(pool.all_agents)
    a = pool.name(rng, P.support())
    if a in P.support():
        return None
    return Par(P, Restrict(a, Q)), Restrict(a, Par(P, Q))


def _law_output_restrict(rng, pool):
    salidas = [e for e in pool.pool if e[0] == "out"]
    if not salidas:
        return None
    entry = rng.choice(salidas)
    a = pool.name(rng, _entry_support(entry))
    if a in _entry_support(entry):
        return None
    P = rng.choice(pool.all_agents)
    return _prefix_from(entry, Restrict(a, P)), Restrict(a, _prefix_from(entry, P))


def _law_input_restrict(rng, pool):
    entradas = [e for e in pool.pool if e[0] == "in"]
    if not entradas:
        return None
    entry = rng.choice(entradas)
    a = pool.name(rng, _entry_support(entry))
    if a in _entry_support(entry):
        return None
    P = rng.choice(pool.all_agents)
    return _prefix_from(entry, Restrict(a, P)), Restrict(a, _prefix_from(entry, P))


def _law_case_restrict(rng, pool):
    guardas = [rng.choice(pool.guards) for _ in range(2)]
    ocupados = nominal.support(tuple(guardas))
    a = pool.name(rng, ocupados)
    if a in ocupados:
        return None
    ramas = [rng.choice(pool.agents) for _ in guardas]
    izq = Case(tuple((g, Restrict(a, P)) for g, P in zip(guardas, ramas)))
    der = Restrict(a, Case(tuple(zip(guardas, ramas))))
    return izq, der


THEOREM1_LAWS: Dict[str, LawBuilder] = {
    "par_unit": _law_par_unit,
    "par_assoc": _law_par_assoc,
    "par_comm": _law_par_comm,
    "restrict_nil": _law_restrict_nil,
    "restrict_comm": _law_restrict_comm,
    "replication": _law_replication,
    "scope_extension": _law_scope_extension,
    "output_restrict": _law_output_restrict,
    "input_restrict": _law_input_restrict,
    "case_restrict": _law_case_restrict,
}


def _mutant_prefix_swap(rng, pool):
    if len(pool.pool) < 2:
        return None
    e1, e2 = rng.sample(pool.pool, 2)
    return _prefix_from(e1, _prefix_from(e2, NIL)), _prefix_from(e2, _prefix_from(e1, NIL))


def _mutant_dropped_restriction(rng, pool):
    entry = rng.choice(pool.pool) if pool.pool else None
    if entry is None or not nominal.support(entry[1]):
        return None
    a = sorted(nominal.support(entry[1]))[0]
    P = _prefix_from(entry, rng.choice(pool.all_agents))
    return Restrict(a, P), P


MUTANT_LAWS: Dict[str, LawBuilder] = {
    "prefix_swap": _mutant_prefix_swap,
    "dropped_restriction": _mutant_dropped_restriction,
}


def _law_config(law: str, cfg: BisimConfig) -> BisimConfig:
    # !P no tiene espacio de estados finito módulo alfa
    reduccion = "congruence" if law == "replication" else "alpha"
    return cfg.model_copy(update={"state_reduction": reduccion})


def _check_law(law: str, builder: LawBuilder, expected: bool, pool: _LawPool, cfg: BisimConfig,
               samples: int, seed: int) -> LawReport:
    rng = random.Random(f"{seed}:{law}")
    report = LawReport(law=law, expected=expected)
    law_cfg = _law_config(law, cfg) if expected else cfg
    for _ in range(samples):
        par = builder(rng, pool)
        if par is None:
            report.skipped += 1
            continue
        P, Q = par
        try:
            relacionados, detalle = pool.verdict(P, Q, law_cfg)
        except PsiError as e:
            logger.warning(f"Ley {law}: {P} / {Q} omitida: {e}")
            report.errors.append(f"{P} / {Q}: {e}")
            continue
        report.checked += 1
        if relacionados != expected:
            report.failures.append(f"{P}  vs  {Q}: {detalle}")
    nivel = logging.INFO if report.ok else logging.WARNING
    logger.log(nivel, f"Ley {law}: {report.checked} comprobadas, {len(report.failures)} fallos")
    return report


def _run_laws(laws: Dict[str, LawBuilder], expected: bool, inst: Instance, agents: Sequence[Agent],
              cfg: BisimConfig, samples: int, seed: int, jobs: int) -> List[LawReport]:
    pool = _LawPool(inst, agents)
    with ThreadPoolExecutor(max_workers=max(1, jobs)) as executor:
        futuros = [executor.submit(_check_law, nombre, builder, expected, pool, cfg, samples, seed)
                   for nombre, builder in laws.items()]
        return [f.result() for f in futuros]


def check_theorem1(inst: Instance, agents: Sequence[Agent], cfg: BisimConfig, samples: int = 200,
                   seed: int = 0, jobs: int = 1, laws: Optional[Sequence[str]] = None) -> List[LawReport]:
    seleccion = {k: v for k, v in THEOREM1_LAWS.items() if laws is None or k in laws}
    return _run_laws(seleccion, True, inst, agents, cfg, samples, seed, jobs)


def check_mutant_laws(inst: Instance, agents: Sequence[Agent], cfg: BisimConfig, samples: int = 20,
                      seed: int = 0, jobs: int = 1) -> List[LawReport]:
    """Controles negativos: las leyes mutadas deben quedar refutadas."""
    return _run_laws(MUTANT_LAWS, False, inst, agents, cfg, samples, seed, jobs)


# =========================================================
#  Replay de testigos
# =========================================================

def replay(records: pd.DataFrame, inst: Instance, cfg: BisimConfig) -> List[str]:
    """Revalida un testigo exportado; devuelve la lista de problemas (vacía si es válido)."""
    if records.empty:
        return ["testigo vacío"]
    records = records.assign(step=records["step"].astype(int)).sort_values("step")
    ternas = [(parse_assertion(str(r["env"]), inst), parse_agent(str(r["left"]), inst),
               parse_agent(str(r["right"]), inst))
              for _, r in records.iterrows()]
    tipo = str(records.iloc[0]["kind"])
    if tipo == "relation":
        return recheck_relation(ternas, cfg, inst)
    if tipo == "attack":
        # la primera fila es la terna atacada (tras σ si la hubo)
        env, P, Q = ternas[0]
        r = bisim(env, P, Q, cfg, inst)
        return [] if not r.related else [f"({env}, {P}, {Q}) resulta bisimilar: el ataque no se reproduce"]
    return [f"tipo de testigo desconocido: {tipo}"]
