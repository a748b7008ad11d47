"""
PsiPRIO - Punto de entrada de línea de comandos
Registra los comandos de exploración y de verificación en un único grupo click.
"""
import logging
from typing import Optional, Sequence

import click

from psiprio import __version__
from psiprio.commands import checks, configure, explore
from psiprio.config import get_settings

logger = logging.getLogger(__name__)


@click.group()
@click.version_option(__version__, prog_name="psiprio")
@click.option("--verbose", "-v", count=True, help="-v INFO, -vv DEBUG")
@click.pass_context
def cli(ctx, verbose):
    """Banco de trabajo de psi-cálculos con prioridades."""
    settings = get_settings()
    nivel = {0: settings.log_level, 1: "INFO"}.get(verbose, "DEBUG")
    logging.basicConfig(level=nivel, format="%(asctime)s %(levelname)s %(name)s: %(message)s")
    ctx.obj = settings


for comando in explore.COMMANDS + checks.COMMANDS + configure.COMMANDS:
    cli.add_command(comando)


def run(argv: Optional[Sequence[str]] = None) -> int:
    """Ejecuta un comando y devuelve el código de salida: 0 éxito, 1 fallo, 2 uso."""
    try:
        rv = cli.main(args=list(argv) if argv is not None else None, prog_name="psiprio",
                      standalone_mode=False)
    except click.ClickException as e:
        e.show()
        return e.exit_code
    except click.Abort:
        click.echo("Abortado", err=True)
        return 1
    return rv if isinstance(rv, int) else 0
