import pytest

from chp.compose import INDEX, PRIME, RelabelScheme, compose, compose_many, relabel
from chp.errors import RelabelError
from chp.net import TAU, make_net
from chp.runs import maximal_runs
from chp.testing import FAILURE, SUCCESS, run_outcome
from chp.textio import fixture, parse, serialize_net

from . import oracles


def n2_run(h):
    runs = maximal_runs(fixture("N2")).runs
    return next(r for r in runs if any(t.label == h for t in r.events))


def test_compose_with_test_examples():
    t = fixture("T")
    ok = compose(n2_run("h1").causal, t.net)
    assert oracles.dead_markings(ok) == {frozenset({"p2_0", "q3_0", "s2"})}
    bad = compose(n2_run("h2").causal, t.net)
    (dead,) = oracles.dead_markings(bad)
    assert "s1" in dead and "q2_0" in dead


def test_disjoint_alphabets_give_disjoint_union():
    a = make_net("A", {"a"}, {"p", "q"}, [("t", ["p"], "a", ["q"])], {"p"})
    b = make_net("B", {"b"}, {"r", "s"}, [("u", ["r"], "b", ["s"])], {"r"})
    c = compose(a, b)
    assert c.places == a.places | b.places and c.initial == {"p", "r"}
    assert sorted(t.id for t in c.transitions) == ["t", "u"]


def test_sync_and_tau():
    a = make_net("A", {"a"}, {"p", "q"}, [("t", ["p"], "a", ["q"]), ("x", ["p"], TAU, ["q"])], {"p"})
    b = make_net("B", {"a"}, {"r", "s"}, [("u", ["r"], "a", ["s"]), ("y", ["r"], TAU, ["s"])], {"r"})
    c = compose(a, b)
    syncs = [t for t in c.transitions if t.label == "a"]
    assert len(syncs) == 1 and syncs[0].pre == {"p", "r"} and syncs[0].post == {"q", "s"}
    assert syncs[0].id == "sync1.t.u"
    assert sum(t.label == TAU for t in c.transitions) == 2


def test_shared_label_without_partner_is_blocked():
    a = make_net("A", {"a"}, {"p", "q"}, [("t", ["p"], "a", ["q"])], {"p"})
    b = make_net("B", {"a"}, {"r"}, [], {"r"})
    assert compose(a, b).transitions == ()


def test_place_clash_is_renamed():
    a = make_net("A", {"a"}, {"p", "q"}, [("t", ["p"], "a", ["q"])], {"p"})
    c = compose(a, a)
    assert c.places == {"A@1.p", "A@1.q", "A@2.p", "A@2.q"}
    assert c.meta["renaming"]["left"]["p"] == "A@1.p"
    b = a.replace(name="B")
    assert compose(a, b).places == {"A.p", "A.q", "B.p", "B.q"}


def test_relabel_examples():
    rho3 = fixture("rho3")
    primed = relabel(rho3, RelabelScheme(PRIME, 2))
    assert sorted(t.label for t in primed.transitions) == ["h2'", "l1'", "l2'"]
    assert relabel(rho3, RelabelScheme(PRIME, 1)) == rho3
    assert RelabelScheme(INDEX, 3).apply("l1") == "l1_3"
    assert RelabelScheme(PRIME, 3).apply(TAU) == TAU


def test_relabel_collision():
    net = make_net("X", {"u", "u'"}, {"p", "q"}, [("t", ["p"], "u", ["q"])], {"p"})
    with pytest.raises(RelabelError):
        relabel(net, RelabelScheme(PRIME, 2))


def test_scheme_validation():
    with pytest.raises(ValueError):
        RelabelScheme("roman", 1)
    with pytest.raises(ValueError):
        RelabelScheme(PRIME, 0)


def _rho1_test_rho3(test_name):
    rho1 = fixture("rho1")
    rho3 = relabel(fixture("rho3"), RelabelScheme(PRIME, 2))
    rho3 = rho3.replace(name="rho3p")
    from chp.compose import rename_places

    rho3 = rename_places(rho3, {p: p + "'" for p in rho3.places})
    t = fixture(test_name)
    return compose_many([rho1, t.net, rho3]), t


def test_sequential_test_two_runs_one_success_one_deadlock():
    net, t = _rho1_test_rho3("Tseq")
    runs = maximal_runs(net).runs
    outcomes = sorted(run_outcome(net, t.net.places, t.tick, r) for r in runs)
    assert outcomes == [FAILURE, SUCCESS]


def test_concurrent_test_unique_successful_run():
    net, t = _rho1_test_rho3("Tcon")
    runs = maximal_runs(net).runs
    assert len(runs) == 1
    assert run_outcome(net, t.net.places, t.tick, runs[0]) == SUCCESS


def test_compose_many_single():
    nc = fixture("NC")
    assert compose_many([nc]) is nc
    with pytest.raises(ValueError):
        compose_many([])


def test_composed_net_serializes():
    net, _ = _rho1_test_rho3("Tseq")
    again = parse(serialize_net(net)).nets[net.name]
    assert again == net
