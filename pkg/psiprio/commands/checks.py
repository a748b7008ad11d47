"""
PsiPRIO - Comandos de verificación
bisim, congruent, check-requisites, check-correspondence, check-theorem1,
check-counterexample, check-frame y replay.
"""
import logging

import click
import pandas as pd

from psiprio.commands import (
    Workspace, emit_report, env_option, finish, handle_errors, instance_options, layer_option,
    report_option, resolve_layer, split_names,
)
from psiprio.commands.explore import MUTANTS
from psiprio.reports import read_report
from psiprio.services.encoding import Mutant
from psiprio.services.equivalence import (
    BisimConfig, BisimResult, bisim, check_mutant_laws, check_theorem1, congruent, laws_to_frame, replay,
)
from psiprio.services.harness import (
    EnumConfig, check_counterexample_full_abstraction, check_frame_accuracy, enumerate_agents,
    sweep_correspondence,
)
from psiprio.services.params import check_requisites

logger = logging.getLogger(__name__)


def sweep_options(f):
    f = click.option("--restrict/--no-restrict", "include_restrict", default=False)(f)
    f = click.option("--repl/--no-repl", "include_repl", default=False, show_default=True)(f)
    f = click.option("--case/--no-case", "include_case", default=False, show_default=True)(f)
    f = click.option("--names", default=None, metavar="a,b", help="Nombres de los prefijos enumerados")(f)
    f = click.option("--parallel", "max_parallel", type=int, default=2, show_default=True,
                     help="Máximo de componentes paralelos")(f)
    f = click.option("--prefix-depth", type=int, default=3, show_default=True)(f)
    return f


def _enum_config(ws: Workspace, prefix_depth, max_parallel, names, include_case, include_repl,
                 include_restrict) -> EnumConfig:
    return EnumConfig(
        prefix_depth=prefix_depth, max_parallel=max_parallel,
        name_pool=split_names(names) or [str(n) for n in ws.inst.names],
        include_case=include_case, include_repl=include_repl, include_restrict=include_restrict,
    )


def _echo_result(r: BisimResult):
    if r.related:
        click.echo(f"related ({len(r.relation)} ternas, {r.states} estados)")
        return
    click.echo(f"not related ({r.states} estados)")
    for i, paso in enumerate(r.attack):
        click.echo(f"  {i} [{paso.clause}] {paso.move}")
        click.echo(f"      {paso.env} |> {paso.left}  ~  {paso.right}")


def _bisim_config(ws: Workspace, layer, max_states) -> BisimConfig:
    return BisimConfig.for_instance(
        ws.inst, resolve_layer(layer, ws.inst),
        max_states=max_states or ws.settings.max_states,
        unfold_budget=ws.settings.unfold_budget,
    )


@click.command("bisim")
@instance_options
@env_option
@layer_option
@click.option("--max-states", type=int, default=None)
@report_option
@click.argument("left_text", metavar="P")
@click.argument("right_text", metavar="Q")
@click.pass_context
@handle_errors
def bisim_cmd(ctx, instance_spec, universe, max_priority, lets, env_text, layer, max_states, report_path,
              left_text, right_text):
    """Decide Ψ ⊳ P ∼̇ Q; el testigo es la relación o la secuencia de ataque."""
    ws = Workspace(ctx, instance_spec, universe, max_priority, lets)
    r = bisim(ws.env(env_text), ws.agent(left_text), ws.agent(right_text), _bisim_config(ws, layer, max_states),
              ws.inst)
    _echo_result(r)
    emit_report(r.to_frame(), report_path)
    finish(r.related)


@click.command("congruent")
@instance_options
@layer_option
@click.option("--max-states", type=int, default=None)
@report_option
@click.argument("left_text", metavar="P")
@click.argument("right_text", metavar="Q")
@click.pass_context
@handle_errors
def congruent_cmd(ctx, instance_spec, universe, max_priority, lets, layer, max_states, report_path,
                  left_text, right_text):
    """Decide P ∼ Q (todas las sustituciones y todos los entornos de la base)."""
    ws = Workspace(ctx, instance_spec, universe, max_priority, lets)
    r = congruent(ws.agent(left_text), ws.agent(right_text), _bisim_config(ws, layer, max_states), ws.inst)
    _echo_result(r)
    emit_report(r.to_frame(), report_path)
    finish(r.related)


@click.command("check-requisites")
@instance_options
@report_option
@click.pass_context
@handle_errors
def check_requisites_cmd(ctx, instance_spec, universe, max_priority, lets, report_path):
    """Comprueba las leyes de instancia sobre las bases finitas."""
    ws = Workspace(ctx, instance_spec, universe, max_priority, lets)
    report = check_requisites(ws.inst)
    for ley, n in sorted(report.checked.items()):
        fallos = sum(1 for f in report.failures if f.law == ley)
        click.echo(f"{ley}: {n} casos, {fallos} fallos")
    for f in report.failures:
        click.echo(f"  {f.law}: {' | '.join(f.witness)}", err=True)
    emit_report(report.to_frame(), report_path)
    finish(report.ok)


@click.command("check-correspondence")
@instance_options
@env_option
@click.option("--depth", type=int, default=None)
@click.option("--mutant", type=click.Choice(MUTANTS), default=Mutant.NONE.value, show_default=True)
@click.option("--jobs", type=int, default=None)
@sweep_options
@report_option
@click.argument("agent_texts", nargs=-1, metavar="[AGENT]...")
@click.pass_context
@handle_errors
def check_correspondence_cmd(ctx, instance_spec, universe, max_priority, lets, env_text, depth, mutant, jobs,
                             prefix_depth, max_parallel, names, include_case, include_repl, include_restrict,
                             report_path, agent_texts):
    """Correspondencia operacional fuerte sobre los agentes dados o sobre la enumeración."""
    ws = Workspace(ctx, instance_spec, universe, max_priority, lets)
    ws.inst.require_prio()
    if agent_texts:
        agentes = [ws.agent(t) for t in agent_texts]
    else:
        cfg = _enum_config(ws, prefix_depth, max_parallel, names, include_case, include_repl, include_restrict)
        agentes = enumerate_agents(cfg, ws.inst)
    s = ws.settings
    report = sweep_correspondence(agentes, ws.inst, ws.env(env_text), depth or s.depth, Mutant(mutant),
                                  s.rep_unfold, s.unfold_budget, jobs or s.jobs)
    click.echo(f"agentes: {report.agents}  estados: {report.states}  transiciones: {report.checked}  "
               f"fallos: {len(report.failures)}")
    for f in report.failures[:20]:
        click.echo(f"  [{f.direction}] {f.source}: {f.action}", err=True)
    emit_report(report.to_frame(), report_path)
    finish(report.ok)


@click.command("check-theorem1")
@instance_options
@click.option("--samples", type=int, default=None)
@click.option("--seed", type=int, default=None)
@click.option("--jobs", type=int, default=None)
@click.option("--max-states", type=int, default=None)
@click.option("--mutants/--no-mutants", default=True, show_default=True, help="Incluye los controles negativos")
@click.option("--prefix-depth", type=int, default=1, show_default=True)
@report_option
@click.pass_context
@handle_errors
def check_theorem1_cmd(ctx, instance_spec, universe, max_priority, lets, samples, seed, jobs, max_states, mutants,
                       prefix_depth, report_path):
    """Batería de leyes de la congruencia fuerte sobre agentes muestreados."""
    ws = Workspace(ctx, instance_spec, universe, max_priority, lets)
    s = ws.settings
    cfg = _bisim_config(ws, None, max_states)
    pool = EnumConfig(prefix_depth=prefix_depth, max_parallel=1, name_pool=[str(n) for n in ws.inst.names])
    agentes = list(enumerate_agents(pool, ws.inst))
    muestras, semilla, hilos = samples or s.samples, s.seed if seed is None else seed, jobs or s.jobs
    reports = check_theorem1(ws.inst, agentes, cfg, muestras, semilla, hilos)
    if mutants:
        reports += check_mutant_laws(ws.inst, agentes, cfg, min(muestras, 20), semilla, hilos)
    for r in reports:
        estado = "ok" if r.ok else "FALLO"
        click.echo(f"{r.law}: {r.checked} comprobadas, {r.skipped} omitidas, {len(r.failures)} fallos [{estado}]")
        for w in r.failures[:3] + r.errors[:3]:
            click.echo(f"  {w}", err=True)
    emit_report(laws_to_frame(reports), report_path)
    finish(all(r.ok for r in reports))


@click.command("check-counterexample")
@instance_options
@report_option
@click.pass_context
@handle_errors
def check_counterexample_cmd(ctx, instance_spec, universe, max_priority, lets, report_path):
    """Reproduce el contraejemplo de abstracción completa de la traducción."""
    ws = Workspace(ctx, instance_spec, universe, max_priority, lets)
    report = check_counterexample_full_abstraction(ws.inst)
    for p in report.parts:
        click.echo(f"({p.part}) {p.claim}: {p.observed} [{'ok' if p.ok else 'FALLO'}]")
    emit_report(report.to_frame(), report_path)
    finish(report.ok)


@click.command("check-frame")
@instance_options
@env_option
@click.option("--depth", type=int, default=None)
@sweep_options
@report_option
@click.pass_context
@handle_errors
def check_frame_cmd(ctx, instance_spec, universe, max_priority, lets, env_text, depth, prefix_depth,
                    max_parallel, names, include_case, include_repl, include_restrict, report_path):
    """F(⟦P⟧) frente a los elementos de guarda de P en cada estado alcanzable."""
    ws = Workspace(ctx, instance_spec, universe, max_priority, lets)
    cfg = _enum_config(ws, prefix_depth, max_parallel, names, include_case, include_repl, include_restrict)
    problemas = []
    for P in enumerate_agents(cfg, ws.inst):
        problemas += check_frame_accuracy(P, ws.inst, ws.env(env_text), depth or ws.settings.depth)
    click.echo(f"problemas: {len(problemas)}")
    for p in problemas[:20]:
        click.echo(f"  {p}", err=True)
    emit_report(pd.DataFrame({"problem": problemas}), report_path)
    finish(not problemas)


@click.command("replay")
@instance_options
@layer_option
@click.option("--max-states", type=int, default=None)
@click.argument("witness_path", type=click.Path(exists=True, dir_okay=False), metavar="FILE")
@click.pass_context
@handle_errors
def replay_cmd(ctx, instance_spec, universe, max_priority, lets, layer, max_states, witness_path):
    """Revalida un testigo exportado por bisim o congruent."""
    ws = Workspace(ctx, instance_spec, universe, max_priority, lets)
    problemas = replay(read_report(witness_path), ws.inst, _bisim_config(ws, layer, max_states))
    if problemas:
        for p in problemas:
            click.echo(f"  {p}", err=True)
        click.echo("invalid")
    else:
        click.echo("valid")
    finish(not problemas)


COMMANDS = [
    bisim_cmd, congruent_cmd, check_requisites_cmd, check_correspondence_cmd, check_theorem1_cmd,
    check_counterexample_cmd, check_frame_cmd, replay_cmd,
]
