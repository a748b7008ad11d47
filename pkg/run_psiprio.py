#!/usr/bin/env python3
"""
Script de arranque de PsiPRIO.
Ejecutar: python3 run_psiprio.py <comando> [opciones]
"""
import os
import sys

# Asegurar que el paquete se importa desde la raíz del proyecto
sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from psiprio.main import run

if __name__ == "__main__":
    sys.exit(run(sys.argv[1:]))
