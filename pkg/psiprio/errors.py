"""
PsiPRIO - Jerarquía de excepciones
Los servicios lanzan; los comandos traducen a códigos de salida.
"""
from typing import Optional


class PsiError(Exception):
    """Error base del banco de trabajo."""


class ParseError(PsiError, ValueError):
    """Texto que no encaja en la gramática, macro desconocida o error de sorts."""

    def __init__(self, message: str, line: Optional[int] = None, column: Optional[int] = None):
        self.line = line
        self.column = column
        if line is not None:
            message = f"{message} (línea {line}, columna {column})"
        super().__init__(message)


class ArityMismatch(PsiError, ValueError):
    pass


class NoPriority(PsiError):
    pass


class AmbiguousPriority(PsiError):
    pass


class NotEncodable(PsiError):
    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        detalle = "; ".join(str(d) for d in self.diagnostics)
        super().__init__(f"Agente no codificable: {detalle}")


class InstanceMismatch(PsiError):
    pass


class StateBudgetExceeded(PsiError):
    def __init__(self, limit: int):
        self.limit = limit
        super().__init__(f"Se superó el presupuesto de {limit} estados")
