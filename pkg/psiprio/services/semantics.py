"""
PsiPRIO - Semántica operacional
Tres relaciones de transición: la plana, la capa negativa (τ:p sin
restricciones) y la capa con prioridades (priook en Case, Par y Com).
"""
import itertools
import logging
import threading
from dataclasses import dataclass
from enum import Enum
from typing import Any, Callable, Dict, Iterator, List, Optional, Sequence, Tuple

from psiprio.services import nominal
from psiprio.services.nominal import Name
from psiprio.services.params import Instance, prio_of_frame
from psiprio.services.syntax import (
    Action, Agent, Case, Frame, In, Input, Out, Output, Par, Repl, Restrict, Tau,
    frame_of, objects_of, restrict_all,
)

logger = logging.getLogger(__name__)


class Layer(str, Enum):
    PLAIN = "plain"
    NEG = "neg"
    PRIO = "prio"


# =========================================================
#  Transiciones
# =========================================================

_RANK = {"tau": 0, "out": 1, "in": 2}
_BOUND_ATOM = "^"


def transition_key(action: Action, target: Agent) -> Tuple[str, str]:
    """Clave de (acción, derivado) módulo alfa; los nombres extruidos cuentan como conjunto."""
    if isinstance(action, Out) and action.extruded:
        mejor = None
        for perm in itertools.permutations(action.extruded):
            atomos = [Name(_BOUND_ATOM, i) for i in range(len(perm))]
            obj, tgt = action.obj, target
            for b, c in zip(perm, atomos):
                obj, tgt = nominal.swap(b, c, (obj, tgt))
            ligados = " ".join(str(a) for a in atomos)
            clave = (f"{action.subj}!(new {ligados}){nominal.canonical_key(obj)}", nominal.canonical_key(tgt))
            if mejor is None or clave < mejor:
                mejor = clave
        return mejor
    return (str(action), nominal.canonical_key(target))


@dataclass(frozen=True)
class Transition:
    env: Any
    source: Agent
    action: Action
    target: Agent

    def key(self) -> Tuple[str, str]:
        return transition_key(self.action, self.target)

    def order_key(self) -> Tuple[int, str, str]:
        accion, destino = self.key()
        return (_RANK[self.action.kind], accion, destino)

    def to_record(self) -> dict:
        a = self.action
        return {
            "env": str(self.env),
            "source": str(self.source),
            "action": {
                "kind": a.kind,
                "subject": None if a.subject() is None else str(a.subject()),
                "extruded": [str(n) for n in a.bn()],
                "object": str(a.obj) if hasattr(a, "obj") else None,
                "priority": getattr(a, "priority", None),
            },
            "target": str(self.target),
        }

    def __str__(self):
        return f"{self.action} -> {self.target}"


class TransitionSet:
    """Transiciones deduplicadas módulo alfa de (acción, derivado)."""

    def __init__(self, transitions: Sequence[Transition] = ()):
        self._items: Dict[Tuple[str, str], Transition] = {}
        for t in transitions:
            self.add(t)

    def add(self, t: Transition):
        self._items.setdefault(t.key(), t)

    def __iter__(self) -> Iterator[Transition]:
        return iter(self.sorted())

    def __len__(self) -> int:
        return len(self._items)

    def __bool__(self) -> bool:
        return bool(self._items)

    def sorted(self) -> List[Transition]:
        return sorted(self._items.values(), key=Transition.order_key)

    def labels(self) -> List[str]:
        return [str(t.action) for t in self.sorted()]

    def taus(self) -> List[Transition]:
        return [t for t in self.sorted() if isinstance(t.action, Tau)]

    def keys(self):
        return set(self._items)


# =========================================================
#  Motor de derivación
# =========================================================

@dataclass(frozen=True)
class _Want:
    kind: str
    values: Tuple[Any, ...] = ()


_OUT = _Want("out")
_TAU = _Want("tau")


def _freshen_bound(action: Action, target: Agent, avoid) -> Tuple[Action, Agent]:
    """Renombra los nombres extruidos que chocan con avoid (bn(α) # Q)."""
    if not isinstance(action, Out) or not action.extruded:
        return action, target
    choques = [b for b in action.extruded if b in avoid]
    if not choques:
        return action, target
    usados = set(avoid) | action.support() | target.support()
    for b in choques:
        fresco = nominal.fresh_name(usados, b.base)
        usados.add(fresco)
        action, target = action.swap(b, fresco), target.swap(b, fresco)
    return action, target


class Semantics:
    """Derivaciones de las reglas SOS para una instancia y una capa.

    Las tablas de memoización (suelo τ de la capa negativa y conjuntos de
    transiciones) están protegidas por un lock y se pueden compartir entre hilos.
    """

    def __init__(self, inst: Instance, layer: Layer = Layer.PLAIN, rep_unfold: int = 1,
                 observable: Optional[Sequence[Any]] = None):
        self.inst = inst
        self.layer = Layer(layer)
        if self.layer is not Layer.PLAIN:
            inst.require_prio()
        self.rep_unfold = max(1, int(rep_unfold))
        self.observable = tuple(observable) if observable is not None else None
        self._universe_names = nominal.support(inst.term_universe)
        self._lock = threading.RLock()
        self._floor: Dict[Tuple[Any, str], Optional[int]] = {}
        self._cache: Dict[Tuple[Any, str], List[Tuple[Action, Agent]]] = {}
        self._neg: Optional["Semantics"] = None
        if self.layer is Layer.PRIO:
            self._neg = Semantics(inst, Layer.NEG, rep_unfold, observable)

    # ----- API pública -----

    def values_for(self, P: Agent) -> Tuple[Any, ...]:
        """Universo observable: term_universe más objetos de salida presentes en P."""
        if self.observable is not None:
            return self.observable
        vistos = {}
        for v in tuple(self.inst.term_universe) + objects_of(P):
            vistos.setdefault(str(v), v)
        return tuple(vistos.values())

    def transitions(self, env: Any, P: Agent) -> TransitionSet:
        clave = (env, nominal.canonical_key(P))
        with self._lock:
            pares = self._cache.get(clave)
        if pares is None:
            valores = self.values_for(P)
            pares = []
            for want in (_TAU, _OUT, _Want("in", valores)):
                pares.extend(self._derive(env, P, want))
            with self._lock:
                self._cache[clave] = pares
        return TransitionSet([Transition(env, P, a, t) for a, t in pares])

    def min_tau(self, env: Any, P: Agent) -> Optional[int]:
        """Menor prioridad τ de la capa negativa (None si no hay τ)."""
        motor = self._neg_engine()
        clave = (env, nominal.canonical_key(P))
        with motor._lock:
            if clave in motor._floor:
                return motor._floor[clave]
        prioridades = [a.priority for a, _ in motor._derive(env, P, _TAU)]
        suelo = min(prioridades) if prioridades else None
        with motor._lock:
            motor._floor[clave] = suelo
        return suelo

    def prio_of_action(self, action: Action, env: Any, P: Agent) -> int:
        """Prioof(Ψ ⊗ F(P), α)."""
        if isinstance(action, Tau):
            return action.priority
        marco = frame_of(P, self.inst).fresh_for(nominal.support(env))
        contexto = Frame(marco.binders, self.inst.compose(env, marco.assertion))
        return prio_of_frame(contexto, action.subject(), self.inst)

    def prio_ok(self, action: Action, env: Any, P: Agent) -> bool:
        suelo = self.min_tau(env, P)
        if suelo is None:
            return True
        return not suelo < self.prio_of_action(action, env, P)

    # ----- reglas -----

    def _neg_engine(self) -> "Semantics":
        if self.layer is Layer.NEG:
            return self
        if self._neg is None:
            self.inst.require_prio()
            self._neg = Semantics(self.inst, Layer.NEG, self.rep_unfold, self.observable)
        return self._neg

    def _allowed(self, action: Action, env: Any, P: Agent) -> bool:
        if self.layer is not Layer.PRIO:
            return True
        return self.prio_ok(action, env, P)

    def _context(self, env: Any, want: _Want) -> frozenset:
        return nominal.support(env) | nominal.support(want.values) | self._universe_names

    def _subjects(self, env: Any, m: Any, output: bool) -> List[Any]:
        candidatos = [m] + [t for t in self.inst.term_universe if t != m]
        if output:
            return [k for k in candidatos if self.inst.entails(env, self.inst.chan_eq(m, k))]
        return [k for k in candidatos if self.inst.entails(env, self.inst.chan_eq(k, m))]

    def _tau(self, env_all: Any, subj: Any) -> Tau:
        if self.layer is Layer.PLAIN:
            return Tau()
        return Tau(prio_of_frame(env_all, subj, self.inst))

    def _derive(self, env: Any, P: Agent, want: _Want) -> Iterator[Tuple[Action, Agent]]:
        if isinstance(P, Output):
            if want.kind == "out":
                for k in self._subjects(env, P.subj, output=True):
                    yield Out(k, (), P.obj), P.cont
        elif isinstance(P, Input):
            if want.kind == "in":
                for k in self._subjects(env, P.subj, output=False):
                    for v in want.values:
                        for ls in self.inst.matcher(P.pattern, P.binders, v):
                            derivado = P.cont.subst(P.binders, tuple(ls)) if P.binders else P.cont
                            yield In(k, v), derivado
        elif isinstance(P, Case):
            for phi, rama in P.branches:
                if self.inst.entails(env, phi):
                    for a, t in self._derive(env, rama, want):
                        if self._allowed(a, env, P):
                            yield a, t
        elif isinstance(P, Restrict):
            yield from self._derive_restrict(env, P, want)
        elif isinstance(P, Par):
            yield from self._derive_par(env, P, want)
        elif isinstance(P, Repl):
            yield from self._derive_repl(env, P, want, self.rep_unfold)

    def _derive_restrict(self, env, P: Restrict, want: _Want):
        (b,), cuerpo = nominal.rename_fresh((P.name,), P.body, self._context(env, want))
        for a, t in self._derive(env, cuerpo, want):
            if b not in a.support():
                # Scope
                yield a, Restrict(b, t)
            elif (isinstance(a, Out) and b not in nominal.support(a.subj)
                  and b not in a.extruded and b in nominal.support(a.obj)):
                # Open
                yield Out(a.subj, (b,) + a.extruded, a.obj), t

    def _derive_par(self, env, P: Par, want: _Want):
        inst = self.inst
        L, R = P.left, P.right
        evitar = self._context(env, want) | L.support() | R.support()
        fl = frame_of(L, inst).fresh_for(evitar)
        fr = frame_of(R, inst).fresh_for(evitar | set(fl.binders))
        env_l = inst.compose(fr.assertion, env)
        env_r = inst.compose(fl.assertion, env)

        for a, t in self._derive(env_l, L, want):
            a, t = _freshen_bound(a, t, R.support() | nominal.support(env))
            if self._allowed(a, env, P):
                yield a, Par(t, R)
        for a, t in self._derive(env_r, R, want):
            a, t = _freshen_bound(a, t, L.support() | nominal.support(env))
            if self._allowed(a, env, P):
                yield a, Par(L, t)

        if want.kind == "tau":
            env_all = inst.compose(inst.compose(env, fl.assertion), fr.assertion)
            yield from self._com(env, P, env_all, (env_l, L), (env_r, R), output_left=True)
            yield from self._com(env, P, env_all, (env_r, R), (env_l, L), output_left=False)

    def _com(self, env, P: Agent, env_all, emisor, receptor, output_left: bool):
        env_o, lado_o = emisor
        env_i, lado_i = receptor
        for o, t_o in self._derive(env_o, lado_o, _OUT):
            o, t_o = _freshen_bound(o, t_o, lado_i.support() | nominal.support(env))
            for i, t_i in self._derive(env_i, lado_i, _Want("in", (o.obj,))):
                if not self.inst.entails(env_all, self.inst.chan_eq(o.subj, i.subj)):
                    continue
                tau = self._tau(env_all, o.subj)
                if not self._allowed(tau, env, P):
                    continue
                cuerpo = Par(t_o, t_i) if output_left else Par(t_i, t_o)
                yield tau, restrict_all(o.extruded, cuerpo)

    def _derive_repl(self, env, P: Repl, want: _Want, depth: int):
        """Rep acotado: P′ | !P, comunicaciones copia-copia y, con depth ≥ 2, P | (P′ | !P)."""
        cuerpo = P.body
        desplegado = Par(cuerpo, P)
        evitar = P.support() | nominal.support(env)

        for a, t in self._derive(env, cuerpo, want):
            a, t = _freshen_bound(a, t, evitar)
            if self._allowed(a, env, desplegado):
                yield a, Par(t, P)

        if want.kind == "tau":
            for o, t_o in self._derive(env, cuerpo, _OUT):
                o, t_o = _freshen_bound(o, t_o, evitar)
                for i, t_i in self._derive(env, cuerpo, _Want("in", (o.obj,))):
                    if not self.inst.entails(env, self.inst.chan_eq(o.subj, i.subj)):
                        continue
                    tau = self._tau(env, o.subj)
                    if not self._allowed(tau, env, desplegado):
                        continue
                    yield tau, restrict_all(o.extruded, Par(t_o, Par(t_i, P)))
                    yield tau, restrict_all(o.extruded, Par(t_i, Par(t_o, P)))

        if depth > 1:
            for a, t in self._derive_repl(env, P, want, depth - 1):
                a, t = _freshen_bound(a, t, evitar)
                if self._allowed(a, env, desplegado):
                    yield a, Par(cuerpo, t)


# =========================================================
#  Funciones de módulo
# =========================================================

def transitions_plain(env: Any, P: Agent, inst: Instance, **kwargs) -> TransitionSet:
    return Semantics(inst, Layer.PLAIN, **kwargs).transitions(env, P)


def transitions_neg(env: Any, P: Agent, inst: Instance, **kwargs) -> TransitionSet:
    return Semantics(inst, Layer.NEG, **kwargs).transitions(env, P)


def transitions_prio(env: Any, P: Agent, inst: Instance, **kwargs) -> TransitionSet:
    return Semantics(inst, Layer.PRIO, **kwargs).transitions(env, P)


def prio_ok(action: Action, env: Any, P: Agent, inst: Instance) -> bool:
    return Semantics(inst, Layer.NEG).prio_ok(action, env, P)


def trace(env: Any, P: Agent, inst: Instance, max_steps: int, layer: Layer = Layer.PRIO,
          tau_only: bool = False, choose: Optional[Callable[[List[Transition]], Transition]] = None,
          engine: Optional[Semantics] = None) -> List[Transition]:
    """Secuencia de transiciones con desempate por orden canónico de acciones."""
    motor = engine or Semantics(inst, layer)
    pasos: List[Transition] = []
    actual = P
    for _ in range(max_steps):
        candidatas = motor.transitions(env, actual).sorted()
        if tau_only:
            candidatas = [t for t in candidatas if isinstance(t.action, Tau)]
        if not candidatas:
            break
        elegida = choose(candidatas) if choose else candidatas[0]
        pasos.append(elegida)
        actual = elegida.target
    return pasos


def tau_traces(env: Any, P: Agent, inst: Instance, depth: int, layer: Layer = Layer.PRIO,
               engine: Optional[Semantics] = None) -> List[List[Transition]]:
    """Todas las τ-trazas maximales (o truncadas a depth)."""
    motor = engine or Semantics(inst, layer)
    trazas: List[List[Transition]] = []

    def explorar(actual: Agent, prefijo: List[Transition]):
        taus = motor.transitions(env, actual).taus() if len(prefijo) < depth else []
        if not taus:
            trazas.append(prefijo)
            return
        for t in taus:
            explorar(t.target, prefijo + [t])

    explorar(P, [])
    return trazas


def lts_records(env: Any, P: Agent, inst: Instance, depth: int, layer: Layer = Layer.PRIO,
                engine: Optional[Semantics] = None) -> List[dict]:
    """Registros de exportación del LTS alcanzable hasta depth pasos."""
    motor = engine or Semantics(inst, layer)
    registros = []
    vistos = {nominal.canonical_key(P)}
    frontera = [P]
    for _ in range(depth):
        siguiente = []
        for estado in frontera:
            for t in motor.transitions(env, estado):
                registros.append(t.to_record())
                clave = nominal.canonical_key(t.target)
                if clave not in vistos:
                    vistos.add(clave)
                    siguiente.append(t.target)
        frontera = siguiente
    logger.info(f"LTS: {len(vistos)} estados, {len(registros)} transiciones")
    return registros
