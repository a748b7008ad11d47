"""
PsiPRIO - Banco de trabajo para psi-cálculos con prioridades de canal.
"""

__version__ = "1.0.0"
