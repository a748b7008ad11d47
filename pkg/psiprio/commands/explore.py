"""
PsiPRIO - Comandos de exploración
parse, step, trace, translate, frame, entail, enumerate y export-lts.
"""
import itertools
import logging

import click
import pandas as pd

from psiprio.commands import (
    Workspace, emit_report, env_option, finish, handle_errors, instance_options, layer_option,
    report_option, resolve_layer, split_names,
)
from psiprio.reports import records_frame
from psiprio.services.encoding import Mutant, build_target, translate
from psiprio.services.harness import EnumConfig, count_agents, enumerate_agents
from psiprio.services.parser import parse_condition
from psiprio.services.semantics import Semantics, lts_records, tau_traces, trace
from psiprio.services.syntax import Tau, encodable, frame_of, well_formed

logger = logging.getLogger(__name__)

MUTANTS = [m.value for m in Mutant]


@click.command("parse")
@instance_options
@click.option("--check-encodable", is_flag=True, help="Comprueba también que el agente sea codificable")
@click.argument("agent_text", metavar="AGENT")
@click.pass_context
@handle_errors
def parse_cmd(ctx, instance_spec, universe, max_priority, lets, check_encodable, agent_text):
    """Parsea un agente y muestra su forma impresa y sus diagnósticos."""
    ws = Workspace(ctx, instance_spec, universe, max_priority, lets)
    P = ws.agent(agent_text)
    click.echo(str(P))
    diags = well_formed(P) + (encodable(P) if check_encodable else [])
    for d in diags:
        click.echo(f"  {d}", err=True)
    finish(not diags)


@click.command("step")
@instance_options
@env_option
@layer_option
@click.option("--tau-only", is_flag=True, help="Sólo transiciones τ")
@click.argument("agent_text", metavar="AGENT")
@click.pass_context
@handle_errors
def step_cmd(ctx, instance_spec, universe, max_priority, lets, env_text, layer, tau_only, agent_text):
    """Lista las transiciones de un paso."""
    ws = Workspace(ctx, instance_spec, universe, max_priority, lets)
    P, env = ws.agent(agent_text), ws.env(env_text)
    motor = Semantics(ws.inst, resolve_layer(layer, ws.inst))
    transiciones = motor.transitions(env, P).sorted()
    if tau_only:
        transiciones = [t for t in transiciones if isinstance(t.action, Tau)]
    for t in transiciones:
        click.echo(str(t))
    logger.info(f"step: {len(transiciones)} transiciones")


@click.command("trace")
@instance_options
@env_option
@layer_option
@click.option("--steps", type=int, default=None, help="Número máximo de pasos (por defecto depth)")
@click.option("--tau-only", is_flag=True, help="Sólo transiciones τ")
@click.option("--all", "all_traces", is_flag=True, help="Todas las τ-trazas maximales")
@report_option
@click.argument("agent_text", metavar="AGENT")
@click.pass_context
@handle_errors
def trace_cmd(ctx, instance_spec, universe, max_priority, lets, env_text, layer, steps, tau_only,
              all_traces, report_path, agent_text):
    """Traza determinista (orden canónico de acciones) o todas las τ-trazas."""
    ws = Workspace(ctx, instance_spec, universe, max_priority, lets)
    P, env = ws.agent(agent_text), ws.env(env_text)
    capa = resolve_layer(layer, ws.inst)
    pasos = steps if steps is not None else ws.settings.depth
    if all_traces:
        trazas = tau_traces(env, P, ws.inst, pasos, capa)
    else:
        trazas = [trace(env, P, ws.inst, pasos, capa, tau_only=tau_only)]
    filas = []
    for n, traza in enumerate(trazas):
        if len(trazas) > 1:
            click.echo(f"# traza {n}: {' '.join(str(t.action) for t in traza)}")
        for i, t in enumerate(traza):
            click.echo(f"{i}: {t}")
            filas.append({"trace": n, "step": i, **t.to_record()})
    emit_report(records_frame(filas), report_path)


@click.command("translate")
@instance_options
@click.option("--mutant", type=click.Choice(MUTANTS), default=Mutant.NONE.value, show_default=True)
@click.argument("agent_text", metavar="AGENT")
@click.pass_context
@handle_errors
def translate_cmd(ctx, instance_spec, universe, max_priority, lets, mutant, agent_text):
    """Imprime ⟦P⟧ en el cálculo destino."""
    ws = Workspace(ctx, instance_spec, universe, max_priority, lets)
    click.echo(str(translate(ws.agent(agent_text), ws.inst, Mutant(mutant))))


@click.command("frame")
@instance_options
@click.option("--encoded", is_flag=True, help="Marco de ⟦P⟧ en el cálculo destino")
@click.argument("agent_text", metavar="AGENT")
@click.pass_context
@handle_errors
def frame_cmd(ctx, instance_spec, universe, max_priority, lets, encoded, agent_text):
    """Imprime el marco F(P)."""
    ws = Workspace(ctx, instance_spec, universe, max_priority, lets)
    P = ws.agent(agent_text)
    if encoded:
        target = build_target(ws.inst, [P])
        click.echo(str(frame_of(translate(P, ws.inst), target)))
    else:
        click.echo(str(frame_of(P, ws.inst)))


@click.command("entail")
@instance_options
@click.argument("assertion_text", metavar="ASSERTION")
@click.argument("condition_text", metavar="CONDITION")
@click.pass_context
@handle_errors
def entail_cmd(ctx, instance_spec, universe, max_priority, lets, assertion_text, condition_text):
    """Decide Ψ ⊢ φ."""
    ws = Workspace(ctx, instance_spec, universe, max_priority, lets)
    psi = ws.env(assertion_text)
    phi = parse_condition(condition_text, ws.inst)
    click.echo("true" if ws.inst.entails(psi, phi) else "false")


@click.command("enumerate")
@instance_options
@click.option("--prefix-depth", type=int, default=1, show_default=True)
@click.option("--parallel", "max_parallel", type=int, default=1, show_default=True)
@click.option("--names", default=None, metavar="a,b", help="Nombres para los prefijos (por defecto el universo)")
@click.option("--case/--no-case", "include_case", default=False)
@click.option("--repl/--no-repl", "include_repl", default=False)
@click.option("--restrict/--no-restrict", "include_restrict", default=False)
@click.option("--directions", type=click.Choice(["both", "out", "in"]), default="both", show_default=True)
@click.option("--count", "only_count", is_flag=True, help="Sólo el número de agentes")
@click.option("--limit", type=int, default=None)
@click.pass_context
@handle_errors
def enumerate_cmd(ctx, instance_spec, universe, max_priority, lets, prefix_depth, max_parallel, names,
                  include_case, include_repl, include_restrict, directions, only_count, limit):
    """Enumera los agentes codificables dentro de las cotas."""
    ws = Workspace(ctx, instance_spec, universe, max_priority, lets)
    cfg = EnumConfig(
        prefix_depth=prefix_depth, max_parallel=max_parallel,
        name_pool=split_names(names) or [str(n) for n in ws.inst.names],
        include_case=include_case, include_repl=include_repl, include_restrict=include_restrict,
        directions=directions,
    )
    agentes = enumerate_agents(cfg, ws.inst)
    if only_count:
        total = sum(1 for _ in agentes)
        click.echo(str(total))
        if not include_restrict and total != count_agents(cfg, ws.inst):
            logger.warning(f"Recuento cerrado distinto: {count_agents(cfg, ws.inst)}")
        return
    for P in itertools.islice(agentes, limit):
        click.echo(str(P))


@click.command("export-lts")
@instance_options
@env_option
@layer_option
@click.option("--depth", type=int, default=None)
@report_option
@click.argument("agent_text", metavar="AGENT")
@click.pass_context
@handle_errors
def export_lts_cmd(ctx, instance_spec, universe, max_priority, lets, env_text, layer, depth, report_path,
                   agent_text):
    """Exporta el LTS alcanzable: un registro por transición."""
    ws = Workspace(ctx, instance_spec, universe, max_priority, lets)
    P, env = ws.agent(agent_text), ws.env(env_text)
    registros = lts_records(env, P, ws.inst, depth or ws.settings.depth, resolve_layer(layer, ws.inst))
    if report_path:
        # NDJSON conserva el registro anidado; CSV y Excel lo aplanan
        df = pd.DataFrame(registros) if report_path.endswith((".ndjson", ".jsonl")) else records_frame(registros)
        emit_report(df, report_path)
    else:
        for r in registros:
            click.echo(f"{r['source']} --{r['action']['kind']}--> {r['target']}")


COMMANDS = [parse_cmd, step_cmd, trace_cmd, translate_cmd, frame_cmd, entail_cmd, enumerate_cmd, export_lts_cmd]
