"""
PsiPRIO - Multiconjuntos con índice entero (FIMM)
Multiplicidades en ℤ ∪ {∞}; las entradas con multiplicidad 0 nunca se guardan.
"""
from typing import Any, Dict, FrozenSet, Iterable, Iterator, List, Mapping, Tuple, Union

from psiprio.services import nominal


# =========================================================
#  Enteros extendidos
# =========================================================

class _Infinity:
    """Elemento máximo de ℤ∞. La suma es absorbente: ∞ + z = ∞."""
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __add__(self, other):
        if isinstance(other, (int, _Infinity)):
            return self
        return NotImplemented

    __radd__ = __add__

    def __neg__(self):
        raise ValueError("∞ no tiene opuesto: la traducción sólo retracta multiplicidades finitas")

    def __lt__(self, other):
        if isinstance(other, (int, _Infinity)):
            return False
        return NotImplemented

    def __le__(self, other):
        if isinstance(other, _Infinity):
            return True
        if isinstance(other, int):
            return False
        return NotImplemented

    def __gt__(self, other):
        if isinstance(other, _Infinity):
            return False
        if isinstance(other, int):
            return True
        return NotImplemented

    def __ge__(self, other):
        if isinstance(other, (int, _Infinity)):
            return True
        return NotImplemented

    def __eq__(self, other):
        return other is self

    def __hash__(self):
        return hash("psiprio.inf")

    def __str__(self):
        return "inf"

    def __repr__(self):
        return "INF"

    def __reduce__(self):
        return (_Infinity, ())


INF = _Infinity()
ExtInt = Union[int, _Infinity]


def parse_ext_int(text: str) -> ExtInt:
    text = text.strip()
    if text in ("inf", "∞"):
        return INF
    return int(text)


def _check_mult(z: Any) -> ExtInt:
    if z is INF:
        return z
    if isinstance(z, bool) or not isinstance(z, int):
        raise TypeError(f"Multiplicidad no válida: {z!r}")
    return z


# =========================================================
#  FIMM
# =========================================================

class FIMM:
    __slots__ = ("_entries", "_hash")

    def __init__(self, entries: Union[Mapping[Any, ExtInt], Iterable[Tuple[Any, ExtInt]]] = ()):
        if isinstance(entries, Mapping):
            entries = entries.items()
        acc: Dict[Any, ExtInt] = {}
        for elem, z in entries:
            total = acc.get(elem, 0) + _check_mult(z)
            if total == 0:
                acc.pop(elem, None)
            else:
                acc[elem] = total
        self._entries = acc
        self._hash = None

    @classmethod
    def empty(cls) -> "FIMM":
        return cls()

    @classmethod
    def from_items(cls, items: Iterable[Tuple[Any, ExtInt]]) -> "FIMM":
        """Construye un FIMM sumando multiplicidades repetidas."""
        return cls(list(items))

    @classmethod
    def single(cls, elem: Any, z: ExtInt = 1) -> "FIMM":
        return cls([(elem, z)])

    # ----- consultas -----

    def multiplicity(self, x: Any) -> ExtInt:
        return self._entries.get(x, 0)

    def member(self, x: Any) -> bool:
        return self.multiplicity(x) > 0

    def members(self) -> List[Any]:
        return [e for e, z in self.items() if z > 0]

    def items(self) -> List[Tuple[Any, ExtInt]]:
        return sorted(self._entries.items(), key=lambda kv: nominal.canonical_key(kv[0]))

    def is_empty(self) -> bool:
        return not self._entries

    def __len__(self) -> int:
        return len(self._entries)

    def __iter__(self) -> Iterator[Any]:
        return iter(self.members())

    # ----- álgebra -----

    def union(self, other: "FIMM") -> "FIMM":
        return FIMM(list(self._entries.items()) + list(other._entries.items()))

    def negate(self) -> "FIMM":
        return FIMM([(e, -z) for e, z in self._entries.items()])

    def __eq__(self, other):
        if not isinstance(other, FIMM):
            return NotImplemented
        return self._entries == other._entries

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._entries.items()))
        return self._hash

    # ----- protocolo nominal -----

    def swap(self, a, b) -> "FIMM":
        return FIMM([(nominal.swap(a, b, e), z) for e, z in self._entries.items()])

    def support(self) -> FrozenSet:
        acc = frozenset()
        for e in self._entries:
            acc |= nominal.support(e)
        return acc

    def subst(self, xs, ts) -> "FIMM":
        return FIMM([(nominal.subst(e, xs, ts), z) for e, z in self._entries.items()])

    def canon(self, depth: int = 0) -> "FIMM":
        return FIMM([(nominal.canon(e, depth), z) for e, z in self._entries.items()])

    def __str__(self):
        cuerpo = ", ".join(f"({z}){e}" for e, z in self.items())
        return "{" + cuerpo + "}"

    def __repr__(self):
        return f"FIMM({self})"


def from_items(items: Iterable[Tuple[Any, ExtInt]]) -> FIMM:
    return FIMM.from_items(items)


def empty() -> FIMM:
    return FIMM.empty()


def union(e1: FIMM, e2: FIMM) -> FIMM:
    return e1.union(e2)


def member(x: Any, e: FIMM) -> bool:
    return e.member(x)


def multiplicity(x: Any, e: FIMM) -> ExtInt:
    return e.multiplicity(x)


def negate(e: FIMM) -> FIMM:
    return e.negate()
