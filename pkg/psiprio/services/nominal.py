"""
PsiPRIO - Módulo nominal
Nombres atómicos, permutaciones, soporte, nombres frescos y alfa-equivalencia.

Todo valor nominal implementa swap / support / subst / canon. Los helpers de
este módulo despachan sobre esos métodos y sobre tuplas, listas y frozensets.
"""
import itertools
import threading
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Any, FrozenSet, Iterable, Sequence, Tuple


# =========================================================
#  Nombres
# =========================================================

@dataclass(frozen=True, order=True, repr=False)
class Name:
    """Átomo: base legible + índice desambiguador. Igualdad estructural."""
    base: str
    index: int = 0

    def __str__(self) -> str:
        if self.base == "":
            return f"#{self.index}"
        if self.index == 0:
            return self.base
        return f"{self.base}'{self.index}"

    def __repr__(self) -> str:
        return f"Name({self})"

    def swap(self, a: "Name", b: "Name") -> "Name":
        if self == a:
            return b
        if self == b:
            return a
        return self

    def support(self) -> FrozenSet["Name"]:
        return frozenset((self,))

    def subst(self, xs: Sequence["Name"], ts: Sequence[Any]):
        for x, t in zip(xs, ts):
            if self == x:
                return t
        return self

    def canon(self, depth: int = 0) -> "Name":
        return self


NameSeq = Tuple[Name, ...]


def name(text: str) -> Name:
    """Construye un Name a partir de su forma impresa (x, x'3)."""
    if "'" in text:
        base, idx = text.split("'", 1)
        return Name(base, int(idx))
    return Name(text)


def canonical_atom(depth: int) -> Name:
    """Átomo canónico para binders; nunca coincide con nombres de usuario."""
    return Name("", depth)


class Nominal(ABC):
    """Protocolo de los tipos de datos nominales del banco."""

    @abstractmethod
    def swap(self, a: Name, b: Name): ...

    @abstractmethod
    def support(self) -> FrozenSet[Name]: ...

    @abstractmethod
    def subst(self, xs: Sequence[Name], ts: Sequence[Any]): ...

    def canon(self, depth: int = 0):
        # Sin binders la forma canónica es el propio valor
        return self


# =========================================================
#  Despacho genérico
# =========================================================

def swap(a: Name, b: Name, x: Any) -> Any:
    if a == b:
        return x
    if hasattr(x, "swap"):
        return x.swap(a, b)
    if isinstance(x, (tuple, list)):
        return type(x)(swap(a, b, y) for y in x)
    if isinstance(x, frozenset):
        return frozenset(swap(a, b, y) for y in x)
    return x


def support(x: Any) -> FrozenSet[Name]:
    if hasattr(x, "support"):
        return x.support()
    if isinstance(x, (tuple, list, frozenset, set)):
        acc = frozenset()
        for y in x:
            acc |= support(y)
        return acc
    return frozenset()


def subst(x: Any, xs: Sequence[Name], ts: Sequence[Any]) -> Any:
    if not xs:
        return x
    if hasattr(x, "subst"):
        return x.subst(tuple(xs), tuple(ts))
    if isinstance(x, (tuple, list)):
        return type(x)(subst(y, xs, ts) for y in x)
    if isinstance(x, frozenset):
        return frozenset(subst(y, xs, ts) for y in x)
    return x


def canon(x: Any, depth: int = 0) -> Any:
    if hasattr(x, "canon"):
        return x.canon(depth)
    if isinstance(x, (tuple, list)):
        return type(x)(canon(y, depth) for y in x)
    return x


def canonical(x: Any) -> Any:
    """Representante canónico: binders sustituidos por átomos posicionales."""
    return canon(x, 0)


def canonical_key(x: Any) -> str:
    return str(canonical(x))


def alpha_eq(x: Any, y: Any) -> bool:
    if type(x) is not type(y):
        return False
    return canonical(x) == canonical(y)


def fresh_for(name_: Name, *values: Any) -> bool:
    """a # X: el nombre no está en el soporte de ninguno de los valores."""
    return all(name_ not in support(v) for v in values)


def swap_fixes(a: Name, b: Name, x: Any) -> bool:
    """Oráculo de soporte por sondeo: (a b)·x = x."""
    return alpha_eq(swap(a, b, x), x)


# =========================================================
#  Nombres frescos
# =========================================================

class NameSupply:
    """Contador monótono de nombres frescos, seguro entre hilos."""

    def __init__(self):
        self._counter = itertools.count(1)
        self._lock = threading.Lock()

    def fresh(self, avoid: Iterable[Name] = (), hint: str = "n") -> Name:
        avoid = set(avoid)
        hint = hint or "n"
        with self._lock:
            while True:
                candidato = Name(hint, next(self._counter))
                if candidato not in avoid:
                    return candidato


_SUPPLY = NameSupply()


def fresh_name(avoid: Iterable[Name] = (), hint: str = "n") -> Name:
    return _SUPPLY.fresh(avoid, hint)


def least_fresh_name(avoid: Iterable[Name], hint: str = "n") -> Name:
    """Nombre fresco determinista: el menor índice libre para la base dada."""
    avoid = set(avoid)
    for k in itertools.count(1):
        candidato = Name(hint or "n", k)
        if candidato not in avoid:
            return candidato


def rename_fresh(binders: Sequence[Name], body: Any, avoid: Iterable[Name]) -> Tuple[NameSeq, Any]:
    """Alfa-renombra los binders que están en avoid; devuelve (binders', body')."""
    avoid = set(avoid)
    usados = avoid | set(binders) | set(support(body))
    nuevos = []
    for b in binders:
        if b in avoid:
            fresco = fresh_name(usados, b.base)
            body = swap(b, fresco, body)
            usados.add(fresco)
            nuevos.append(fresco)
        else:
            nuevos.append(b)
    return tuple(nuevos), body
