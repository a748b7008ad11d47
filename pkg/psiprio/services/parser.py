"""
PsiPRIO - Parser de agentes
Gramática ASCII de agentes con lark; los literales de términos, condiciones y
aserciones los aporta cada instancia como fragmento de gramática.
"""
import logging
from functools import lru_cache
from typing import Any, Dict, Mapping, Optional

from lark import Lark, Transformer
from lark.exceptions import UnexpectedInput, VisitError

from psiprio.errors import ParseError
from psiprio.services import nominal
from psiprio.services.syntax import (
    NIL, Agent, Assert, Case, Input, Output, Repl, build_par, restrict_all,
)

logger = logging.getLogger(__name__)

AGENT_GRAMMAR = r"""
start: par
assertion_start: assertion
cond_start: cond
term_start: term

?par: unit ("|" unit)*

?unit: "0"                                            -> nil
     | "out" "(" term "," term ")" cont               -> output
     | "out" "(" term ")" cont                        -> output_short
     | "in" "(" term "," binders "," term ")" cont    -> input
     | "in" "(" term "," term ")" cont                -> input_plain
     | "in" "(" term ")" cont                         -> input_short
     | term "(" NAME ")" cont                         -> input_sugar
     | "case" branch ("[]" branch)*                   -> case
     | "(" "new" NAME+ ")" unit                       -> restrict
     | "!" unit                                       -> repl
     | "(|" assertion "|)"                            -> assert_agent
     | "(" par ")"
     | MACRO                                          -> macro

cont: ("." unit)?
branch: cond "->" unit
binders: "\\" NAME+

NAME: /(?!(?:out|in|case|new|inf|true|false)\b)[a-z][A-Za-z0-9_]*(?:'[0-9]+)?/
MACRO: /[A-Z][A-Za-z0-9_]+/

%import common.INT
%import common.SIGNED_INT
%import common.WS
%ignore WS
"""


class AgentBuilder(Transformer):
    """Construye el AST; las macros se expanden por sustitución literal."""

    def __init__(self, macros: Optional[Mapping[str, Agent]] = None):
        super().__init__()
        self.macros = dict(macros or {})

    def NAME(self, token):
        return nominal.name(str(token))

    def start(self, items):
        return items[0]

    def assertion_start(self, items):
        return items[0]

    def cond_start(self, items):
        return items[0]

    def term_start(self, items):
        return items[0]

    def par(self, items):
        return build_par(items)

    def nil(self, items):
        return NIL

    def cont(self, items):
        return items[0] if items else NIL

    def binders(self, items):
        return tuple(items)

    def output(self, items):
        subj, obj, cont = items
        return Output(subj, obj, cont)

    def output_short(self, items):
        subj, cont = items
        return Output(subj, subj, cont)

    def input(self, items):
        subj, binders, pattern, cont = items
        return Input(subj, binders, pattern, cont)

    def input_plain(self, items):
        subj, pattern, cont = items
        return Input(subj, (), pattern, cont)

    def input_short(self, items):
        subj, cont = items
        return Input(subj, (), subj, cont)

    def input_sugar(self, items):
        subj, x, cont = items
        return Input(subj, (x,), x, cont)

    def case(self, items):
        return Case(tuple(items))

    def branch(self, items):
        return (items[0], items[1])

    def restrict(self, items):
        *names, body = items
        return restrict_all(names, body)

    def repl(self, items):
        return Repl(items[0])

    def assert_agent(self, items):
        return Assert(items[0])

    def macro(self, items):
        nombre = str(items[0])
        if nombre not in self.macros:
            raise ParseError(f"Macro desconocida: {nombre}")
        return self.macros[nombre]


@lru_cache(maxsize=16)
def _lark_for(grammar: str) -> Lark:
    return Lark(
        AGENT_GRAMMAR + grammar,
        start=["start", "assertion_start", "cond_start", "term_start"],
        parser="earley",
        maybe_placeholders=True,
    )


def _builder_for(inst, macros) -> Transformer:
    cls = type(f"{inst.transformer.__name__}Agent", (inst.transformer, AgentBuilder), {})
    return cls(macros)


def _parse(text: str, inst, start: str, macros=None) -> Any:
    try:
        tree = _lark_for(inst.grammar).parse(text, start=start)
        return _builder_for(inst, macros).transform(tree)
    except UnexpectedInput as e:
        raise ParseError(f"Error de sintaxis en {text!r}", e.line, e.column) from e
    except VisitError as e:
        if isinstance(e.orig_exc, ParseError):
            raise e.orig_exc
        raise ParseError(f"Literal no válido en {text!r}: {e.orig_exc}") from e


def parse_agent(text: str, inst, macros: Optional[Mapping[str, Agent]] = None) -> Agent:
    agent = _parse(text, inst, "start", macros)
    diags = inst.sort_check(agent)
    if diags:
        raise ParseError("; ".join(str(d) for d in diags))
    return agent


def parse_assertion(text: str, inst) -> Any:
    return _parse(text, inst, "assertion_start")


def parse_condition(text: str, inst) -> Any:
    return _parse(text, inst, "cond_start")


def parse_term(text: str, inst) -> Any:
    return _parse(text, inst, "term_start")


def parse_macros(definitions, inst) -> Dict[str, Agent]:
    """Definiciones NOMBRE=AGENTE en orden; cada una puede usar las anteriores."""
    macros: Dict[str, Agent] = {}
    for definicion in definitions or ():
        if "=" not in definicion:
            raise ParseError(f"Definición --let sin '=': {definicion!r}")
        nombre, texto = definicion.split("=", 1)
        nombre = nombre.strip()
        if not (len(nombre) >= 2 and nombre[0].isupper()):
            raise ParseError(f"Nombre de macro no válido: {nombre!r}")
        macros[nombre] = parse_agent(texto, inst, macros)
    return macros
