import pytest

from psiprio.errors import StateBudgetExceeded
from psiprio.reports import read_report, write_report
from psiprio.services.equivalence import (
    MUTANT_LAWS, THEOREM1_LAWS, WITNESS_COLUMNS, BisimConfig, bisim, check_mutant_laws, check_theorem1,
    _LawPool, congruent, laws_to_frame, recheck_relation, replay, substitution_sequences,
)
from psiprio.services.harness import EnumConfig, enumerate_agents
from psiprio.services.semantics import Layer


@pytest.fixture(scope="module")
def cfg(flip):
    return BisimConfig.for_instance(flip)


@pytest.fixture(scope="module")
def law_pool(flip):
    return list(enumerate_agents(EnumConfig(prefix_depth=1), flip))


def test_config_defaults(flip, pi, cfg):
    assert cfg.layer is Layer.PRIO
    assert BisimConfig.for_instance(pi).layer is Layer.PLAIN
    assert len(cfg.assertion_basis) == 4
    assert len(substitution_sequences(cfg)) == 1 + 2 + 4


def test_parallel_unit_is_bisimilar(agent, flip, cfg):
    r = bisim(flip.unit, agent("out(x)"), agent("out(x) | 0"), cfg, flip)
    assert r.related
    assert [str(c) for c in r.relation[0]] == ["{}", "out(x,x).0", "out(x,x).0 | 0"]
    assert recheck_relation(r.relation, cfg, flip) == []


def test_different_channels_are_distinguished(agent, flip, cfg):
    r = bisim(flip.unit, agent("out(x)"), agent("out(y)"), cfg, flip)
    assert not r.related
    assert r.attack[0].clause == "simulation"
    assert "x!x" in r.attack[0].move


def test_environment_extension_can_separate(agent, flip, cfg):
    P, Q = agent("case x<p:0 -> out(x)"), agent("out(x)")
    r = bisim(flip.unit, P, Q, cfg, flip)
    assert not r.related
    assert r.attack[0].clause in ("extension", "symmetry")
    assert r.attack[-1].clause == "simulation"
    assert bisim(flip.unit, P, Q, cfg.model_copy(update={"assertion_basis": [flip.unit]}), flip).related


def test_static_equivalence_is_checked(agent, flip, cfg):
    r = bisim(flip.unit, agent("(|{x}|)"), agent("0"), cfg, flip)
    assert not r.related
    assert r.attack[0].clause == "static"


def test_congruence_rejects_static_difference_before_exploring(agent, flip, cfg):
    r = congruent(agent("(|{x}|) | out(y)"), agent("out(y)"), cfg, flip)
    assert not r.related
    assert [p.clause for p in r.attack] == ["substitution", "static"]
    assert r.attack[0].move == "id"
    assert r.states == 0


def test_congruence_closes_under_substitutions(agent, pi):
    cfg = BisimConfig.for_instance(pi)
    P, Q = agent("case m=n -> out(m)", pi), agent("0", pi)
    assert bisim(pi.unit, P, Q, cfg, pi).related
    r = congruent(P, Q, cfg, pi)
    assert not r.related
    assert r.attack[0].clause == "substitution"
    assert ":=" in r.attack[0].move


def test_congruent_relation_witness(agent, flip, cfg):
    r = congruent(agent("in(x) | out(y)"), agent("out(y) | in(x)"), cfg, flip)
    assert r.related
    assert r.states > 0


def test_state_budget(agent, flip, cfg):
    with pytest.raises(StateBudgetExceeded):
        bisim(flip.unit, agent("out(x)"), agent("out(x)"), cfg.model_copy(update={"max_states": 1}), flip)


def test_witness_frames(agent, flip, cfg):
    relacion = bisim(flip.unit, agent("out(x)"), agent("out(x) | 0"), cfg, flip).to_frame()
    assert list(relacion.columns) == WITNESS_COLUMNS
    assert set(relacion["kind"]) == {"relation"}
    ataque = bisim(flip.unit, agent("out(x)"), agent("out(y)"), cfg, flip).to_frame()
    assert set(ataque["kind"]) == {"attack"}
    assert list(ataque["step"]) == list(range(len(ataque)))


@pytest.mark.parametrize("suffix", [".ndjson", ".csv"])
def test_replay_round_trip(tmp_path, agent, flip, cfg, suffix):
    for Q, esperado in (("out(x) | 0", True), ("out(y)", False)):
        r = bisim(flip.unit, agent("out(x)"), agent(Q), cfg, flip)
        assert r.related is esperado
        ruta = write_report(r.to_frame(), tmp_path / f"testigo{suffix}")
        assert replay(read_report(ruta), flip, cfg) == []


def test_replay_detects_incomplete_relation(tmp_path, agent, flip, cfg):
    df = bisim(flip.unit, agent("out(x)"), agent("out(x) | 0"), cfg, flip).to_frame()
    ruta = write_report(df.head(1), tmp_path / "recortado.ndjson")
    problemas = replay(read_report(ruta), flip, cfg)
    assert any("simétrica" in p for p in problemas)


def test_replay_rejects_false_attack(tmp_path, agent, flip, cfg):
    df = bisim(flip.unit, agent("out(x)"), agent("out(y)"), cfg, flip).to_frame()
    df.loc[0, "right"] = "out(x,x).0"
    ruta = write_report(df, tmp_path / "falso.ndjson")
    assert replay(read_report(ruta), flip, cfg)


def test_algebraic_laws_hold(flip, cfg, law_pool):
    reports = check_theorem1(flip, law_pool, cfg, samples=2, seed=7)
    assert [r.law for r in reports] == list(THEOREM1_LAWS)
    for r in reports:
        assert r.ok, (r.law, r.failures, r.errors)
        assert r.checked + r.skipped == 2


def test_law_selection_and_threads(flip, cfg, law_pool):
    reports = check_theorem1(flip, law_pool, cfg, samples=1, laws=["par_comm", "restrict_nil"], jobs=2)
    assert [r.law for r in reports] == ["par_comm", "restrict_nil"]
    assert all(r.ok for r in reports)


def test_mutant_laws_are_refuted(flip, cfg, law_pool):
    reports = check_mutant_laws(flip, law_pool, cfg, samples=3)
    assert [r.law for r in reports] == list(MUTANT_LAWS)
    for r in reports:
        assert not r.expected
        assert r.ok, (r.law, r.failures)
        assert r.checked > 0
    df = laws_to_frame(reports)
    assert list(df["failures"]) == [0, 0]


def test_repeated_samples_reuse_verdicts(agent, flip, cfg):
    pool = [agent("out(x)")]
    reports = check_theorem1(flip, pool, cfg, samples=50, laws=["par_unit", "par_comm"], jobs=2)
    assert [(r.checked, r.ok) for r in reports] == [(50, True), (50, True)]
    memo = _LawPool(flip, pool)
    P, Q = agent("out(x) | 0"), agent("out(x)")
    assert memo.verdict(P, Q, cfg) == (True, "relacionados")
    assert memo.verdict(P, Q, cfg) is memo.verdict(P, Q, cfg)
    assert memo.engine(cfg) is memo.engine(cfg)


@pytest.mark.acceptance
@pytest.mark.parametrize("instancia,names", [("flip", ["x", "y"]), ("piat", ["a", "v"])])
def test_algebraic_laws_at_full_sample_size(request, instancia, names):
    inst = request.getfixturevalue(instancia)
    pool = list(enumerate_agents(EnumConfig(prefix_depth=1, name_pool=names), inst))
    law_cfg = BisimConfig.for_instance(inst)
    reports = check_theorem1(inst, pool, law_cfg, samples=200, jobs=4)
    for r in reports:
        assert r.ok, (r.law, r.failures[:3], r.errors[:3])
        assert r.checked + r.skipped == 200
    assert all(r.ok for r in check_mutant_laws(inst, pool, law_cfg, samples=20, jobs=4))
