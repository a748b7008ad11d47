"""
PsiPRIO - Sintaxis de agentes
Agentes, acciones y marcos; buena formación, sustitución sin captura y
congruencia estructural ≡.
"""
import logging
from collections import Counter
from dataclasses import dataclass
from typing import Any, FrozenSet, List, Optional, Sequence, Tuple

from psiprio.errors import ArityMismatch
from psiprio.services import nominal
from psiprio.services.nominal import Name, NameSeq, canonical_atom

logger = logging.getLogger(__name__)


# =========================================================
#  Agentes
# =========================================================

class Agent(nominal.Nominal):
    """Proceso psi. Inmutable; los métodos nominales son puros."""
    __slots__ = ()

    def __str__(self) -> str:
        return _pretty(self)

    def __repr__(self) -> str:
        return f"{type(self).__name__}<{self}>"


# ===== Impresión =====

def _as_unit(P: Agent) -> str:
    if isinstance(P, (Par, Case)):
        return f"({P})"
    return str(P)


def _pretty(P: Agent) -> str:
    if isinstance(P, Nil):
        return "0"
    if isinstance(P, Output):
        return f"out({P.subj},{P.obj}).{_as_unit(P.cont)}"
    if isinstance(P, Input):
        if P.binders:
            binders = " ".join(str(b) for b in P.binders)
            return f"in({P.subj},\\{binders},{P.pattern}).{_as_unit(P.cont)}"
        return f"in({P.subj},{P.pattern}).{_as_unit(P.cont)}"
    if isinstance(P, Case):
        return "case " + " [] ".join(f"{c} -> {_as_unit(p)}" for c, p in P.branches)
    if isinstance(P, Restrict):
        return f"(new {P.name}){_as_unit(P.body)}"
    if isinstance(P, Par):
        right = f"({P.right})" if isinstance(P.right, Par) else str(P.right)
        return f"{P.left} | {right}"
    if isinstance(P, Repl):
        return f"!{_as_unit(P.body)}"
    if isinstance(P, Assert):
        return f"(|{P.assertion}|)"
    raise TypeError(f"No es un agente: {P!r}")


@dataclass(frozen=True, repr=False)
class Nil(Agent):
    def swap(self, a, b):
        return self

    def support(self):
        return frozenset()

    def subst(self, xs, ts):
        return self


NIL = Nil()


@dataclass(frozen=True, repr=False)
class Output(Agent):
    subj: Any
    obj: Any
    cont: Agent = NIL

    def swap(self, a, b):
        return Output(nominal.swap(a, b, self.subj), nominal.swap(a, b, self.obj), self.cont.swap(a, b))

    def support(self):
        return nominal.support(self.subj) | nominal.support(self.obj) | self.cont.support()

    def subst(self, xs, ts):
        return Output(nominal.subst(self.subj, xs, ts), nominal.subst(self.obj, xs, ts), self.cont.subst(xs, ts))

    def canon(self, depth=0):
        return Output(nominal.canon(self.subj, depth), nominal.canon(self.obj, depth), self.cont.canon(depth))


@dataclass(frozen=True, repr=False)
class Input(Agent):
    subj: Any
    binders: NameSeq
    pattern: Any
    cont: Agent = NIL

    def swap(self, a, b):
        return Input(
            nominal.swap(a, b, self.subj),
            tuple(n.swap(a, b) for n in self.binders),
            nominal.swap(a, b, self.pattern),
            self.cont.swap(a, b),
        )

    def support(self):
        ligados = (nominal.support(self.pattern) | self.cont.support()) - set(self.binders)
        return nominal.support(self.subj) | ligados

    def subst(self, xs, ts):
        peligro = set(xs) | nominal.support(ts)
        binders, (pattern, cont) = nominal.rename_fresh(self.binders, (self.pattern, self.cont), peligro)
        return Input(nominal.subst(self.subj, xs, ts), binders, nominal.subst(pattern, xs, ts), cont.subst(xs, ts))

    def canon(self, depth=0):
        atomos = tuple(canonical_atom(depth + i) for i in range(len(self.binders)))
        cuerpo = (self.pattern, self.cont)
        for b, c in zip(self.binders, atomos):
            cuerpo = nominal.swap(b, c, cuerpo)
        d = depth + len(atomos)
        return Input(nominal.canon(self.subj, depth), atomos, nominal.canon(cuerpo[0], d), cuerpo[1].canon(d))


@dataclass(frozen=True, repr=False)
class Case(Agent):
    branches: Tuple[Tuple[Any, Agent], ...]

    def swap(self, a, b):
        return Case(tuple((nominal.swap(a, b, c), p.swap(a, b)) for c, p in self.branches))

    def support(self):
        acc = frozenset()
        for c, p in self.branches:
            acc |= nominal.support(c) | p.support()
        return acc

    def subst(self, xs, ts):
        return Case(tuple((nominal.subst(c, xs, ts), p.subst(xs, ts)) for c, p in self.branches))

    def canon(self, depth=0):
        return Case(tuple((nominal.canon(c, depth), p.canon(depth)) for c, p in self.branches))


@dataclass(frozen=True, repr=False)
class Restrict(Agent):
    name: Name
    body: Agent

    def swap(self, a, b):
        return Restrict(self.name.swap(a, b), self.body.swap(a, b))

    def support(self):
        return self.body.support() - {self.name}

    def subst(self, xs, ts):
        peligro = set(xs) | nominal.support(ts)
        (n,), body = nominal.rename_fresh((self.name,), self.body, peligro)
        return Restrict(n, body.subst(xs, ts))

    def canon(self, depth=0):
        atomo = canonical_atom(depth)
        return Restrict(atomo, self.body.swap(self.name, atomo).canon(depth + 1))


@dataclass(frozen=True, repr=False)
class Par(Agent):
    left: Agent
    right: Agent

    def swap(self, a, b):
        return Par(self.left.swap(a, b), self.right.swap(a, b))

    def support(self):
        return self.left.support() | self.right.support()

    def subst(self, xs, ts):
        return Par(self.left.subst(xs, ts), self.right.subst(xs, ts))

    def canon(self, depth=0):
        return Par(self.left.canon(depth), self.right.canon(depth))


@dataclass(frozen=True, repr=False)
class Repl(Agent):
    body: Agent

    def swap(self, a, b):
        return Repl(self.body.swap(a, b))

    def support(self):
        return self.body.support()

    def subst(self, xs, ts):
        return Repl(self.body.subst(xs, ts))

    def canon(self, depth=0):
        return Repl(self.body.canon(depth))


@dataclass(frozen=True, repr=False)
class Assert(Agent):
    assertion: Any

    def swap(self, a, b):
        return Assert(nominal.swap(a, b, self.assertion))

    def support(self):
        return nominal.support(self.assertion)

    def subst(self, xs, ts):
        return Assert(nominal.subst(self.assertion, xs, ts))

    def canon(self, depth=0):
        return Assert(nominal.canon(self.assertion, depth))


PREFIXES = (Output, Input)


def restrict_all(names: Sequence[Name], body: Agent) -> Agent:
    for n in reversed(tuple(names)):
        body = Restrict(n, body)
    return body


def build_par(components: Sequence[Agent]) -> Agent:
    """Paralelo asociado a la izquierda; [] es 0."""
    if not components:
        return NIL
    acc = components[0]
    for c in components[1:]:
        acc = Par(acc, c)
    return acc


def par_components(P: Agent) -> List[Agent]:
    if isinstance(P, Par):
        return par_components(P.left) + par_components(P.right)
    return [P]


# =========================================================
#  Acciones
# =========================================================

class Action(nominal.Nominal):
    __slots__ = ()
    kind = ""

    def bn(self) -> NameSeq:
        return ()

    def subject(self):
        return None

    def __repr__(self):
        return f"{type(self).__name__}<{self}>"


@dataclass(frozen=True, repr=False)
class Out(Action):
    subj: Any
    extruded: NameSeq
    obj: Any
    kind = "out"

    def bn(self):
        return self.extruded

    def subject(self):
        return self.subj

    def swap(self, a, b):
        return Out(nominal.swap(a, b, self.subj), tuple(n.swap(a, b) for n in self.extruded),
                   nominal.swap(a, b, self.obj))

    def support(self):
        return nominal.support(self.subj) | nominal.support(self.obj) | frozenset(self.extruded)

    def subst(self, xs, ts):
        return Out(nominal.subst(self.subj, xs, ts), self.extruded, nominal.subst(self.obj, xs, ts))

    def __str__(self):
        if self.extruded:
            return f"{self.subj}!(new {' '.join(str(n) for n in self.extruded)}){self.obj}"
        return f"{self.subj}!{self.obj}"


@dataclass(frozen=True, repr=False)
class In(Action):
    subj: Any
    obj: Any
    kind = "in"

    def subject(self):
        return self.subj

    def swap(self, a, b):
        return In(nominal.swap(a, b, self.subj), nominal.swap(a, b, self.obj))

    def support(self):
        return nominal.support(self.subj) | nominal.support(self.obj)

    def subst(self, xs, ts):
        return In(nominal.subst(self.subj, xs, ts), nominal.subst(self.obj, xs, ts))

    def __str__(self):
        return f"{self.subj}?{self.obj}"


@dataclass(frozen=True, repr=False)
class Tau(Action):
    priority: Optional[int] = None
    kind = "tau"

    def swap(self, a, b):
        return self

    def support(self):
        return frozenset()

    def subst(self, xs, ts):
        return self

    def erased(self) -> "Tau":
        return TAU

    def __str__(self):
        return "tau" if self.priority is None else f"tau:{self.priority}"


TAU = Tau()


# =========================================================
#  Marcos
# =========================================================

@dataclass(frozen=True, repr=False)
class Frame(nominal.Nominal):
    binders: NameSeq
    assertion: Any

    def swap(self, a, b):
        return Frame(tuple(n.swap(a, b) for n in self.binders), nominal.swap(a, b, self.assertion))

    def support(self):
        return nominal.support(self.assertion) - set(self.binders)

    def subst(self, xs, ts):
        peligro = set(xs) | nominal.support(ts)
        binders, assertion = nominal.rename_fresh(self.binders, self.assertion, peligro)
        return Frame(binders, nominal.subst(assertion, xs, ts))

    def canon(self, depth=0):
        atomos = tuple(canonical_atom(depth + i) for i in range(len(self.binders)))
        cuerpo = self.assertion
        for b, c in zip(self.binders, atomos):
            cuerpo = nominal.swap(b, c, cuerpo)
        return Frame(atomos, nominal.canon(cuerpo, depth + len(atomos)))

    def fresh_for(self, avoid) -> "Frame":
        binders, assertion = nominal.rename_fresh(self.binders, self.assertion, avoid)
        return Frame(binders, assertion)

    def __str__(self):
        if self.binders:
            return f"(new {' '.join(str(b) for b in self.binders)}){self.assertion}"
        return str(self.assertion)

    def __repr__(self):
        return f"Frame<{self}>"


def frame_of(P: Agent, inst) -> Frame:
    if isinstance(P, Assert):
        return Frame((), P.assertion)
    if isinstance(P, Par):
        fp = frame_of(P.left, inst)
        fq = frame_of(P.right, inst)
        fp = fp.fresh_for(fq.support() | set(fq.binders))
        fq = fq.fresh_for(fp.support() | set(fp.binders))
        return Frame(fp.binders + fq.binders, inst.compose(fp.assertion, fq.assertion))
    if isinstance(P, Restrict):
        f = frame_of(P.body, inst)
        if P.name in f.binders:
            f = f.fresh_for({P.name})
        return Frame((P.name,) + f.binders, f.assertion)
    return Frame((), inst.unit)


def compose_frames(f: Frame, g: Frame, inst) -> Frame:
    f = f.fresh_for(g.support() | set(g.binders))
    g = g.fresh_for(f.support() | set(f.binders))
    return Frame(f.binders + g.binders, inst.compose(f.assertion, g.assertion))


# =========================================================
#  Buena formación
# =========================================================

@dataclass(frozen=True)
class Diagnostic:
    path: str
    message: str

    def __str__(self):
        return f"{self.path}: {self.message}"


def assertion_guarded(P: Agent) -> bool:
    if isinstance(P, Assert):
        return False
    if isinstance(P, Par):
        return assertion_guarded(P.left) and assertion_guarded(P.right)
    if isinstance(P, (Restrict, Repl)):
        return assertion_guarded(P.body)
    if isinstance(P, Case):
        return all(assertion_guarded(p) for _, p in P.branches)
    return True


def _children(P: Agent, path: str):
    if isinstance(P, (Output, Input)):
        yield f"{path}.cont", P.cont
    elif isinstance(P, Case):
        for i, (_, p) in enumerate(P.branches):
            yield f"{path}.case[{i}]", p
    elif isinstance(P, Restrict):
        yield f"{path}.new", P.body
    elif isinstance(P, Repl):
        yield f"{path}.repl", P.body
    elif isinstance(P, Par):
        yield f"{path}.left", P.left
        yield f"{path}.right", P.right


def _walk(P: Agent, path: str = "agent"):
    yield path, P
    for sub_path, child in _children(P, path):
        yield from _walk(child, sub_path)


def well_formed(P: Agent) -> List[Diagnostic]:
    diags = []
    for path, Q in _walk(P):
        if isinstance(Q, Input):
            if len(set(Q.binders)) != len(Q.binders):
                diags.append(Diagnostic(path, "duplicate binders"))
            fuera = [b for b in Q.binders if b not in nominal.support(Q.pattern)]
            for b in fuera:
                diags.append(Diagnostic(path, f"binder {b} does not occur in pattern"))
        elif isinstance(Q, Repl) and not assertion_guarded(Q.body):
            diags.append(Diagnostic(path, "replication body not assertion-guarded"))
        elif isinstance(Q, Case):
            for i, (_, p) in enumerate(Q.branches):
                if not assertion_guarded(p):
                    diags.append(Diagnostic(f"{path}.case[{i}]", "case branch not assertion-guarded"))
    return diags


def encodable(P: Agent) -> List[Diagnostic]:
    """Elección separada y replicación guardada por prefijo."""
    diags = []
    for path, Q in _walk(P):
        if isinstance(Q, Case):
            cuerpos = [p for _, p in Q.branches]
            if not all(isinstance(p, PREFIXES) for p in cuerpos):
                diags.append(Diagnostic(path, "case branch not prefix-guarded"))
            elif len({type(p) for p in cuerpos}) > 1:
                diags.append(Diagnostic(path, "mixed choice"))
        elif isinstance(Q, Repl) and not isinstance(Q.body, PREFIXES):
            diags.append(Diagnostic(path, "replication not prefix-guarded"))
    return diags


# =========================================================
#  Sustitución y objetos
# =========================================================

def substitute(P: Any, xs: Sequence[Name], ts: Sequence[Any], inst=None) -> Any:
    if len(xs) != len(ts):
        raise ArityMismatch(f"Sustitución con {len(xs)} nombres y {len(ts)} términos")
    if len(set(xs)) != len(xs):
        raise ArityMismatch(f"Nombres repetidos en la sustitución: {[str(x) for x in xs]}")
    if inst is not None and not isinstance(P, Agent):
        return inst.substitute(P, tuple(xs), tuple(ts))
    return nominal.subst(P, tuple(xs), tuple(ts))


def objects_of(P: Agent) -> Tuple[Any, ...]:
    """Objetos de salida presentes sintácticamente, sin nombres ligados."""
    vistos = {}

    def visitar(Q: Agent, ligados: FrozenSet[Name]):
        if isinstance(Q, Output):
            if not (nominal.support(Q.obj) & ligados):
                vistos.setdefault(str(Q.obj), Q.obj)
            visitar(Q.cont, ligados)
        elif isinstance(Q, Input):
            visitar(Q.cont, ligados | set(Q.binders))
        elif isinstance(Q, Restrict):
            visitar(Q.body, ligados | {Q.name})
        else:
            for _, child in _children(Q, ""):
                visitar(child, ligados)

    visitar(P, frozenset())
    return tuple(vistos[k] for k in sorted(vistos))


def prefixes_of(P: Agent) -> List[Agent]:
    """Todos los prefijos del agente (cualquier profundidad)."""
    return [Q for _, Q in _walk(P) if isinstance(Q, PREFIXES)]


# =========================================================
#  Congruencia estructural
# =========================================================

def _normalize_inner(P: Agent, inst, budget: int) -> Agent:
    if isinstance(P, Output):
        return Output(P.subj, P.obj, normal_form(P.cont, inst, budget))
    if isinstance(P, Input):
        return Input(P.subj, P.binders, P.pattern, normal_form(P.cont, inst, budget))
    if isinstance(P, Case):
        return Case(tuple((c, normal_form(p, inst, budget)) for c, p in P.branches))
    if isinstance(P, Restrict):
        return Restrict(P.name, normal_form(P.body, inst, budget))
    if isinstance(P, Repl):
        return Repl(normal_form(P.body, inst, budget))
    return P


def _fold_replications(components: List[Agent], budget: int) -> List[Agent]:
    """Absorbe hasta `budget` copias P de cada !P presente (P | !P ≡ !P)."""
    if budget <= 0:
        return components
    comps = list(components)
    for rep in [c for c in comps if isinstance(c, Repl)]:
        copia = Counter(nominal.canonical_key(c) for c in par_components(rep.body) if not isinstance(c, Nil))
        if not copia:
            continue
        for _ in range(budget):
            claves = Counter(nominal.canonical_key(c) for c in comps)
            if any(claves[k] < n for k, n in copia.items()):
                break
            pendientes = Counter(copia)
            restantes = []
            for c in comps:
                k = nominal.canonical_key(c)
                if pendientes[k] > 0 and c is not rep:
                    pendientes[k] -= 1
                else:
                    restantes.append(c)
            comps = restantes
    return comps


def normal_form(P: Agent, inst, unfold_budget: int = 0) -> Agent:
    """Forma normal AC de ≡: aplana |, quita 0, une aserciones y ordena."""
    comps = []
    asercion = None
    for c in par_components(P):
        c = _normalize_inner(c, inst, unfold_budget)
        for d in par_components(c):
            if isinstance(d, Nil):
                continue
            if isinstance(d, Assert):
                asercion = d.assertion if asercion is None else inst.compose(asercion, d.assertion)
                continue
            comps.append(d)
    if asercion is not None and asercion != inst.unit:
        comps.append(Assert(asercion))
    comps = _fold_replications(comps, unfold_budget)
    comps.sort(key=nominal.canonical_key)
    return build_par(comps)


def struct_congr(P: Agent, Q: Agent, unfold_budget: int, inst) -> bool:
    nf_p = nominal.canonical(normal_form(P, inst, unfold_budget))
    nf_q = nominal.canonical(normal_form(Q, inst, unfold_budget))
    return nf_p == nf_q


def _drop_unused_restrictions(P: Agent) -> Agent:
    if isinstance(P, Restrict):
        body = _drop_unused_restrictions(P.body)
        if P.name not in body.support():
            return body
        return Restrict(P.name, body)
    if isinstance(P, Par):
        return Par(_drop_unused_restrictions(P.left), _drop_unused_restrictions(P.right))
    if isinstance(P, Output):
        return Output(P.subj, P.obj, _drop_unused_restrictions(P.cont))
    if isinstance(P, Input):
        return Input(P.subj, P.binders, P.pattern, _drop_unused_restrictions(P.cont))
    if isinstance(P, Case):
        return Case(tuple((c, _drop_unused_restrictions(p)) for c, p in P.branches))
    if isinstance(P, Repl):
        return Repl(_drop_unused_restrictions(P.body))
    return P


def reduce_state(P: Agent, inst, unfold_budget: int = 2) -> Agent:
    """Representante de estado para bisimulación: ≡ más (νa)Q ∼ Q si a # Q."""
    return normal_form(_drop_unused_restrictions(P), inst, unfold_budget)
