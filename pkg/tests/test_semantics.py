import pytest

from psiprio.errors import InstanceMismatch
from psiprio.services.harness import FAIRNESS_AGENT
from psiprio.services.instances import FlipAssertion
from psiprio.services.nominal import Name
from psiprio.services.semantics import Layer, Semantics, lts_records, tau_traces, trace
from psiprio.services.syntax import NIL, Out, Restrict, Tau, struct_congr

x, y = Name("x"), Name("y")
FLIPPED_X = FlipAssertion(frozenset({x}))
DOS_CANALES = "out(x) | in(x) | out(y) | in(y)"


def test_communication_in_pi(agent, pi):
    P = agent("out(m,n).0 | in(m,\\u,u).out(u,u)", pi)
    ts = Semantics(pi).transitions(pi.unit, P)
    assert ts.labels() == ["tau", "m!n", "m?m", "m?n"]
    (tau,) = ts.taus()
    assert struct_congr(tau.target, agent("out(n,n)", pi), 0, pi)


def test_scope_extrusion(agent, pi):
    ts = Semantics(pi).transitions(pi.unit, agent("(new a)out(m,a).0", pi))
    (t,) = ts.sorted()
    assert isinstance(t.action, Out)
    assert len(t.action.extruded) == 1
    assert t.target == NIL
    assert not Semantics(pi).transitions(pi.unit, agent("(new a)out(a,m).0", pi))


def test_private_channel_only_communicates(agent, pi):
    ts = Semantics(pi).transitions(pi.unit, agent("(new a)(out(a) | in(a))", pi))
    assert ts.labels() == ["tau"]
    assert isinstance(ts.taus()[0].target, Restrict)


def test_extruded_name_keeps_scope_after_com(agent, pi):
    P = agent("(new a)out(m,a).in(a) | in(m,\\u,u).out(u,u)", pi)
    (tau,) = Semantics(pi).transitions(pi.unit, P).taus()
    assert isinstance(tau.target, Restrict)


def test_flip_negative_layer_labels_priorities(agent, flip):
    neg = Semantics(flip, Layer.NEG).transitions(FLIPPED_X, agent(DOS_CANALES))
    assert {str(t.action) for t in neg.taus()} == {"tau:0", "tau:1"}
    assert "x!x" in neg.labels()


def test_flip_priority_layer_blocks_lower_priority(agent, flip):
    prio = Semantics(flip, Layer.PRIO).transitions(FLIPPED_X, agent(DOS_CANALES))
    assert [str(t.action) for t in prio.taus()] == ["tau:0"]
    assert "x!x" not in prio.labels()
    assert "y!y" in prio.labels()


def test_flip_unit_environment_has_equal_priorities(agent, flip):
    prio = Semantics(flip, Layer.PRIO).transitions(flip.unit, agent(DOS_CANALES))
    assert [str(t.action) for t in prio.taus()] == ["tau:0", "tau:0"]


def test_piat_static_priorities(agent, piat):
    P = agent("out(a:0,v) | in(a:0,\\u,u) | out(a:1,v) | in(a:1,\\u,u)", piat)
    neg = Semantics(piat, Layer.NEG).transitions(piat.unit, P)
    assert sorted(str(t.action) for t in neg.taus()) == ["tau:0", "tau:1"]
    prio = Semantics(piat, Layer.PRIO).transitions(piat.unit, P)
    assert [str(t.action) for t in prio.taus()] == ["tau:0"]
    assert "a:1!v" not in prio.labels()


def test_case_guards_read_the_environment(agent, flip):
    P = agent("case x<p:1 -> out(x) [] x<p:0 -> out(y)")
    motor = Semantics(flip)
    assert motor.transitions(FLIPPED_X, P).labels() == ["x!x"]
    assert motor.transitions(flip.unit, P).labels() == ["y!y"]


def test_fairness_trace_alternates_channels(agent, flip):
    P = agent(FAIRNESS_AGENT)
    pasos = trace(flip.unit, P, flip, 4)
    assert [str(t.action) for t in pasos] == ["tau:0", "tau:0", "tau:0", "tau:1"]
    assert struct_congr(pasos[-1].target, agent("Py"), 2, flip)


def test_fairness_without_priorities_can_starve(agent, flip):
    P = agent(FAIRNESS_AGENT)
    neg = Semantics(flip, Layer.NEG).transitions(flip.unit, P)
    assert {str(t.action) for t in neg.taus()} == {"tau:0", "tau:1"}
    prio = Semantics(flip, Layer.PRIO).transitions(flip.unit, P)
    assert [str(t.action) for t in prio.taus()] == ["tau:0"]


def test_min_tau_and_prio_ok(agent, flip):
    motor = Semantics(flip, Layer.PRIO)
    P = agent(FAIRNESS_AGENT)
    assert motor.min_tau(flip.unit, P) == 0
    assert motor.min_tau(flip.unit, NIL) is None
    assert motor.prio_of_action(Out(y, (), y), flip.unit, P) == 1
    assert not motor.prio_ok(Out(y, (), y), flip.unit, P)
    assert motor.prio_ok(Out(x, (), x), flip.unit, P)
    assert motor.prio_ok(Tau(0), flip.unit, P)


def test_tau_traces_cover_interleavings(agent, flip):
    trazas = tau_traces(flip.unit, agent(DOS_CANALES), flip, 4)
    assert len(trazas) == 2
    assert all(len(t) == 2 for t in trazas)


def test_replication_unfolding_depth(agent, pi):
    P = agent("!out(m)", pi)
    assert len(Semantics(pi, rep_unfold=1).transitions(pi.unit, P)) == 1
    assert len(Semantics(pi, rep_unfold=2).transitions(pi.unit, P)) == 2


def test_priority_layers_need_priorities(pi):
    with pytest.raises(InstanceMismatch):
        Semantics(pi, Layer.PRIO)


def test_lts_records(agent, pi):
    registros = lts_records(pi.unit, agent("out(m,n).0", pi), pi, 2, Layer.PLAIN)
    assert len(registros) == 1
    accion = registros[0]["action"]
    assert (accion["kind"], accion["subject"], accion["object"]) == ("out", "m", "n")
    assert registros[0]["target"] == "0"
