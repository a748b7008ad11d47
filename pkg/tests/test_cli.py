import pytest
from click.testing import CliRunner

from psiprio.config import ENV_VARS, get_settings
from psiprio.main import cli, run
from psiprio.reports import read_report
from psiprio.services.harness import FAIRNESS_AGENT, FAIRNESS_LETS

LETS = [arg for let in FAIRNESS_LETS for arg in ("--let", let)]


@pytest.fixture(autouse=True)
def _clean_env(monkeypatch):
    for variable in list(ENV_VARS.values()) + ["PSIPRIO_UNIVERSE"]:
        monkeypatch.delenv(variable, raising=False)


@pytest.fixture
def invoke():
    runner = CliRunner()

    def _invoke(*args):
        return runner.invoke(cli, list(args), catch_exceptions=False)

    return _invoke


def test_translate(invoke):
    r = invoke("translate", "out(x,x).0")
    assert r.exit_code == 0
    assert r.output.strip() == "(|out(x,x)|) | out(x,x).(0 | (|-out(x,x)|))"


def test_fairness_state_has_one_enabled_tau(invoke):
    r = invoke("step", "--tau-only", *LETS, FAIRNESS_AGENT)
    assert r.exit_code == 0
    lineas = r.output.strip().splitlines()
    assert len(lineas) == 1
    assert lineas[0].startswith("tau:0 -> ")


def test_fairness_trace(invoke):
    r = invoke("trace", "--steps", "4", *LETS, FAIRNESS_AGENT)
    etiquetas = [linea.split(" ")[1] for linea in r.output.strip().splitlines()]
    assert etiquetas == ["tau:0", "tau:0", "tau:0", "tau:1"]


def test_ill_sorted_agent_is_a_usage_error(invoke):
    r = invoke("parse", "--instance", "piat", "out(a,v).0")
    assert r.exit_code == 2
    assert "sort" in r.output


def test_unknown_instance(invoke):
    assert invoke("parse", "--instance", "ccs", "0").exit_code == 2


def test_parse_reports_encodability(invoke):
    assert invoke("parse", "case T -> out(x) [] T -> out(y)", "--check-encodable").exit_code == 0
    assert invoke("parse", "case T -> out(x) [] T -> in(y)", "--check-encodable").exit_code == 1


def test_entail_and_frame(invoke):
    assert invoke("entail", "{x}", "x<p:1").output.strip() == "true"
    assert invoke("entail", "{}", "x<p:1").output.strip() == "false"
    assert invoke("frame", "(|{x}|) | out(x)").output.strip() == "{x}"


def test_enumerate_count(invoke):
    r = invoke("enumerate", "--count", "--names", "x")
    assert r.output.strip() == "8"


def test_bisim_exit_codes_and_replay(invoke, tmp_path):
    r = invoke("bisim", "out(x)", "out(y)")
    assert r.exit_code == 1
    assert "not related" in r.output
    ruta = tmp_path / "testigo.ndjson"
    r = invoke("bisim", "--report", str(ruta), "out(x)", "out(x) | 0")
    assert r.exit_code == 0
    assert r.output.startswith("related")
    r = invoke("replay", str(ruta))
    assert r.exit_code == 0
    assert r.output.strip().endswith("valid")


def test_congruent_pi(invoke):
    r = invoke("congruent", "--instance", "pi", "--universe", "m,n", "case m=n -> out(m)", "0")
    assert r.exit_code == 1
    assert "[substitution]" in r.output


def test_instance_checks(invoke):
    assert invoke("check-requisites").exit_code == 0
    assert invoke("check-requisites", "--instance", "piat", "--universe", "a,v").exit_code == 0
    assert invoke("check-counterexample").exit_code == 0


def test_correspondence_on_given_agents(invoke, tmp_path):
    ruta = tmp_path / "corr.csv"
    r = invoke("check-correspondence", "--depth", "2", "--report", str(ruta), "out(x) | in(x)", "!in(y)")
    assert r.exit_code == 0
    assert "fallos: 0" in r.output
    assert ruta.exists()
    r = invoke("check-correspondence", "--depth", "2", "--mutant", "no-retraction", "out(x).out(y) | in(x)")
    assert r.exit_code == 1


def test_correspondence_needs_priorities(invoke):
    assert invoke("check-correspondence", "--instance", "pi", "out(x)").exit_code == 2


def test_export_lts(invoke, tmp_path):
    r = invoke("export-lts", "--depth", "1", "out(x) | in(x)")
    assert r.exit_code == 0
    assert "--tau-->" in r.output
    ruta = tmp_path / "lts.ndjson"
    assert invoke("export-lts", "--report", str(ruta), "out(x)").exit_code == 0
    assert len(read_report(ruta)) == 1


def test_run_returns_exit_codes():
    assert run(["translate", "out(x,x).0"]) == 0
    assert run(["bisim", "out(x)", "out(y)"]) == 1
    assert run(["parse", "out(x,"]) == 2


def test_config_set_and_save(invoke, tmp_path):
    ruta = tmp_path / "psiprio_config.json"
    r = invoke("config", "--file", str(ruta), "--set", "depth=3", "--set", "universe=a,b", "--save")
    assert r.exit_code == 0
    assert "depth: 3" in r.output
    assert "universe: a,b" in r.output
    assert f"guardado: {ruta}" in r.output
    settings = get_settings(ruta)
    assert settings.depth == 3
    assert settings.universe == ["a", "b"]


@pytest.mark.parametrize("asignacion", ["depth", "colour=red", "depth=-1"])
def test_config_rejects_bad_assignments(invoke, tmp_path, asignacion):
    ruta = tmp_path / "psiprio_config.json"
    r = invoke("config", "--file", str(ruta), "--set", asignacion, "--save")
    assert r.exit_code == 2
    assert not ruta.exists()


def test_correspondence_sweep_defaults():
    defaults = {p.name: p.default for p in cli.commands["check-correspondence"].params}
    assert defaults["prefix_depth"] == 3
    assert defaults["max_parallel"] == 2
    assert not defaults["include_case"]
    assert not defaults["include_repl"]
