"""
PsiPRIO - Utilidades comunes de los comandos
Opciones compartidas, construcción de la instancia y traducción de errores a códigos de salida.
"""
import functools
import logging
from typing import Optional, Sequence

import click

from psiprio.errors import InstanceMismatch, ParseError, PsiError
from psiprio.reports import write_report
from psiprio.services.instances import get_instance
from psiprio.services.params import Instance
from psiprio.services.parser import parse_agent, parse_assertion, parse_macros
from psiprio.services.semantics import Layer

logger = logging.getLogger(__name__)

LAYERS = [layer.value for layer in Layer]


def instance_options(f):
    """--instance, --universe, --max-priority y --let."""
    f = click.option("--let", "lets", multiple=True, metavar="NAME=AGENT",
                     help="Macro de agente, p. ej. --let 'Py=(|{y}|) | out(x)'")(f)
    f = click.option("--max-priority", type=int, default=1, show_default=True,
                     help="Nivel máximo de prioridad (piat)")(f)
    f = click.option("--universe", default=None, metavar="a,b,c",
                     help="Nombres del universo de términos (por defecto de la configuración)")(f)
    f = click.option("--instance", "instance_spec", default="flip", show_default=True,
                     help="flip | piat | pi | encoded:<base>")(f)
    return f


def env_option(f):
    return click.option("--env", "env_text", default=None, help="Aserción de entorno (por defecto la unidad)")(f)


def layer_option(f):
    return click.option("--layer", type=click.Choice(LAYERS), default=None,
                        help="Capa semántica (por defecto prio si la instancia tiene prioridades)")(f)


def report_option(f):
    return click.option("--report", "report_path", type=click.Path(dir_okay=False), default=None,
                        help="Fichero de informe (.ndjson, .jsonl, .csv, .xlsx)")(f)


def split_names(text: Optional[str]) -> Optional[Sequence[str]]:
    if text is None:
        return None
    nombres = [n.strip() for n in text.split(",") if n.strip()]
    return nombres or None


def build_instance(instance_spec: str, universe: Optional[str], max_priority: int,
                   settings=None) -> Instance:
    nombres = split_names(universe)
    if nombres is None and settings is not None:
        nombres = settings.universe
    try:
        return get_instance(instance_spec, nombres, max_priority)
    except ValueError as e:
        raise click.BadParameter(str(e), param_hint="--instance")


def resolve_layer(layer: Optional[str], inst: Instance) -> Layer:
    if layer is None:
        return Layer.PRIO if inst.has_prio else Layer.PLAIN
    capa = Layer(layer)
    if capa is not Layer.PLAIN:
        inst.require_prio()
    return capa


class Workspace:
    """Instancia, macros y entorno resueltos a partir de las opciones."""

    def __init__(self, ctx: click.Context, instance_spec: str, universe: Optional[str],
                 max_priority: int, lets: Sequence[str]):
        self.settings = ctx.obj
        self.inst = build_instance(instance_spec, universe, max_priority, self.settings)
        self.macros = parse_macros(lets, self.inst)

    def agent(self, text: str):
        return parse_agent(text, self.inst, self.macros)

    def env(self, text: Optional[str]):
        if text is None:
            return self.inst.unit
        return parse_assertion(text, self.inst)


def handle_errors(f):
    """Errores de parseo e instancia como uso incorrecto (2); resto de PsiError como fallo (1)."""

    @functools.wraps(f)
    def wrapper(*args, **kwargs):
        try:
            return f(*args, **kwargs)
        except (ParseError, InstanceMismatch) as e:
            raise click.UsageError(str(e))
        except PsiError as e:
            logger.error(f"{type(e).__name__}: {e}")
            click.echo(f"error: {e}", err=True)
            click.get_current_context().exit(1)

    return wrapper


def emit_report(df, report_path: Optional[str]):
    if report_path:
        ruta = write_report(df, report_path)
        click.echo(f"informe: {ruta}")


def finish(ok: bool):
    if not ok:
        click.get_current_context().exit(1)
