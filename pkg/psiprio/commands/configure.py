"""
PsiPRIO - Comando de configuración
Muestra la configuración efectiva, la modifica y la guarda en data/psiprio_config.json.
"""
import logging
from pathlib import Path

import click
from pydantic import ValidationError

from psiprio.config import CONFIG_PATH, Settings, get_settings, save_settings

logger = logging.getLogger(__name__)


def _parse_assignments(assignments) -> dict:
    cambios = {}
    for asignacion in assignments:
        if "=" not in asignacion:
            raise click.BadParameter(f"se esperaba CAMPO=VALOR: {asignacion}", param_hint="--set")
        campo, valor = (s.strip() for s in asignacion.split("=", 1))
        if campo not in Settings.model_fields:
            raise click.BadParameter(f"campo desconocido: {campo}", param_hint="--set")
        cambios[campo] = [n.strip() for n in valor.split(",") if n.strip()] if campo == "universe" else valor
    return cambios


@click.command("config")
@click.option("--set", "assignments", multiple=True, metavar="CAMPO=VALOR",
              help="Cambia un valor, p. ej. --set depth=3 --set universe=a,b")
@click.option("--save", is_flag=True, help="Guarda la configuración resultante")
@click.option("--file", "config_path", type=click.Path(dir_okay=False), default=None,
              help="Fichero de configuración (por defecto data/psiprio_config.json)")
@click.pass_context
def config_cmd(ctx, assignments, save, config_path):
    """Muestra (y opcionalmente guarda) la configuración efectiva."""
    ruta = Path(config_path) if config_path else None
    settings = get_settings(ruta) if ruta or ctx.obj is None else ctx.obj
    if assignments:
        cambios = _parse_assignments(assignments)
        logger.debug(f"Cambios de configuración: {cambios}")
        try:
            settings = Settings(**{**settings.model_dump(), **cambios})
        except ValidationError as e:
            raise click.BadParameter(str(e), param_hint="--set")
    for campo, valor in settings.model_dump().items():
        click.echo(f"{campo}: {','.join(valor) if isinstance(valor, list) else valor}")
    if save:
        save_settings(settings, ruta)
        click.echo(f"guardado: {ruta or CONFIG_PATH}")


COMMANDS = [config_cmd]
