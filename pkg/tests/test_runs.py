import pytest

from chp.errors import BoundRequired, ResourceError
from chp.net import make_net, reach
from chp.pomset import EMPTY, Pomset, linearizations, pomset_iso, project
from chp.runs import (
    EXTENSION,
    LITERAL,
    CausalRun,
    causal_net_of,
    is_maximal,
    maximal_runs,
    pomset_of,
    run_of_pomset,
    validate_causal,
    validate_embedding,
)
from chp.textio import fixture

from . import oracles

PI1 = Pomset.from_relation(["h1", "l1", "l2"], [(0, 1), (0, 2)])
PI2 = Pomset.chain(["h2", "l1", "l2"])
PI3 = Pomset.chain(["h2", "l2", "l1"])


def rho(name):
    """A fixture causal net together with its identity embedding into NC."""
    net = fixture(name)
    return CausalRun(net, {p: p for p in net.places}, fixture("NC"))


@pytest.mark.parametrize("name,count", [("NA", 2), ("NB", 4), ("NC", 3)])
def test_run_counts(name, count):
    rs = maximal_runs(fixture(name))
    assert rs.exact and len(rs) == count
    assert oracles.count_runs(fixture(name)) == count


def test_nc_pomsets():
    got = [pomset_of(r) for r in maximal_runs(fixture("NC"))]
    for expected in (PI1, PI2, PI3):
        assert sum(pomset_iso(p, expected)[0] for p in got) == 1


def test_validate_causal_examples():
    assert validate_causal(fixture("rho1")) == (True, [])
    ok, problems = validate_causal(fixture("NC"))
    assert not ok and any("p0" in p and "|post(p0)| = 2" in p for p in problems)
    lone = make_net("E", set(), {"p"}, [], {"p"})
    assert validate_causal(lone)[0]


def test_validate_causal_detects_cycle_and_initial():
    cyc = make_net("C", {"a"}, {"p", "q"}, [("t", ["p"], "a", ["q"]), ("u", ["q"], "a", ["p"])], {"p"})
    ok, problems = validate_causal(cyc)
    assert not ok and any("cycle" in p for p in problems)
    wrong_init = make_net("W", {"a"}, {"p", "q"}, [("t", ["p"], "a", ["q"])], {"q"})
    assert not validate_causal(wrong_init)[0]


def test_validate_embedding_examples():
    assert validate_embedding(rho("rho1")) == (True, [])
    net = fixture("rho2")
    assert validate_embedding(CausalRun(net, {p: p for p in net.places}, net))[0]
    # two concurrently marked places mapped to one target place
    two = make_net("Two", {"a"}, {"x", "y"}, [], {"x", "y"})
    target = make_net("One", {"a"}, {"p"}, [], {"p"})
    ok, problems = validate_embedding(CausalRun(two, {"x": "p", "y": "p"}, target))
    assert not ok and any("injective" in p for p in problems)


def test_validate_embedding_rejects_non_transition():
    net = fixture("rho2")
    f = {p: p for p in net.places}
    f["p31"] = "p32"
    assert not validate_embedding(CausalRun(net, f, fixture("NC")))[0]


@pytest.mark.parametrize("mode", [EXTENSION, LITERAL])
def test_maximality_examples(mode):
    for name in ("rho1", "rho2", "rho3"):
        assert is_maximal(rho(name), mode)
    prefix = make_net("pre", {"h1", "h2", "l1", "l2"}, {"p0", "p13"}, [("e1", ["p0"], "h2", ["p13"])], {"p0"})
    assert not is_maximal(CausalRun(prefix, {"p0": "p0", "p13": "p13"}, fixture("NC")), mode)
    dead = make_net("D", {"a"}, {"p", "q"}, [("t", ["q"], "a", ["p"])], {"p"})
    empty = make_net("E", {"a"}, {"p"}, [], {"p"})
    assert is_maximal(CausalRun(empty, {"p": "p"}, dead), mode)


def test_maximality_modes_can_differ():
    # the target transition needs p and q; the run stops with only p marked
    target = make_net("T", {"a", "b"}, {"p", "q", "r", "s"}, [("t", ["p", "q"], "a", ["r"]), ("u", ["s"], "b", ["q"])], {"p", "s"})
    run_net = make_net("R", {"a", "b"}, {"p0", "s0"}, [], {"p0", "s0"})
    run = CausalRun(run_net, {"p0": "p", "s0": "s"}, target)
    assert not is_maximal(run, EXTENSION)
    assert not is_maximal(run, LITERAL)
    run_net = make_net("R", {"a", "b"}, {"p0", "s0", "q0"}, [("e1", ["s0"], "b", ["q0"])], {"p0", "s0"})
    run = CausalRun(run_net, {"p0": "p", "s0": "s", "q0": "q"}, target)
    assert not is_maximal(run, EXTENSION) and not is_maximal(run, LITERAL)
    # p has a flow successor in the target but the transition also needs q, which never comes
    target2 = make_net("T2", {"a"}, {"p", "q", "r"}, [("t", ["p", "q"], "a", ["r"])], {"p"})
    stuck = CausalRun(make_net("R", {"a"}, {"p0"}, [], {"p0"}), {"p0": "p"}, target2)
    assert is_maximal(stuck, EXTENSION) and not is_maximal(stuck, LITERAL)


def test_enumerated_runs_are_valid_and_maximal():
    for name in ("NA", "NB", "NC", "N1", "N2"):
        for run in maximal_runs(fixture(name)):
            assert validate_causal(run.causal)[0]
            assert validate_embedding(run)[0]
            assert is_maximal(run)


def test_empty_run():
    net = make_net("D", {"a"}, {"p", "q"}, [("t", ["q"], "a", ["p"])], {"p"})
    (run,) = maximal_runs(net).runs
    assert run.causal.transitions == () and pomset_of(run) == EMPTY


def test_cyclic_net_needs_bound():
    thl = fixture("Thl").net
    with pytest.raises(BoundRequired):
        maximal_runs(thl)
    rs = maximal_runs(thl, bound=2)
    assert not rs.exact and rs.partial
    for run in rs.partial:
        assert len(run.events) == 2 and not is_maximal(run)


def test_bound_on_finite_net_is_exact():
    rs = maximal_runs(fixture("NC"), bound=10)
    assert rs.exact and len(rs) == 3 and not rs.partial


def test_interleavings_collapse():
    # two independent events give one run, not two
    net = make_net("I", {"a", "b"}, {"p", "q", "r", "s"}, [("t", ["p"], "a", ["r"]), ("u", ["q"], "b", ["s"])], {"p", "q"})
    assert len(maximal_runs(net)) == 1


def test_pomset_of_examples():
    runs = maximal_runs(fixture("NC")).runs
    assert pomset_iso(pomset_of(rho("rho1")), PI1)[0]
    assert pomset_iso(pomset_of(rho("rho2")), PI2)[0]
    one = make_net("O", {"a"}, {"p", "q"}, [("t", ["p"], "a", ["q"])], {"p"})
    assert pomset_of(one) == Pomset(("a",), canonical=True)
    assert len(runs) == 3


def test_causal_net_of_examples():
    net = causal_net_of(PI2)
    assert len(net.places) == 4 and validate_causal(net)[0]
    assert pomset_iso(pomset_of(net), PI2)[0]
    empty = causal_net_of(EMPTY)
    assert len(empty.places) == 1 and empty.initial == empty.places and not empty.transitions
    from chp.runs import causal_key

    assert causal_key(causal_net_of(PI1)) == causal_key(fixture("rho1"))


def test_run_of_pomset_is_valid():
    run = run_of_pomset(PI1)
    assert validate_embedding(run)[0] and is_maximal(run)


def test_pomset_iso_examples():
    perm = Pomset(("l2", "h2", "l1"), frozenset({(1, 2), (1, 0), (2, 0)}))
    ok, f = pomset_iso(PI2, perm)
    assert ok
    assert all(PI2.labels[i] == perm.labels[f[i]] for i in f)
    assert {(f[a], f[b]) for a, b in PI2.order} == set(perm.order)
    assert pomset_iso(PI2, PI3) == (False, None)
    assert not pomset_iso(PI1, PI2)[0]


def test_project_examples():
    low = {"l1", "l2"}
    assert project(PI1, low) == Pomset(("l1", "l2")).canonicalize()
    assert pomset_iso(project(PI2, low), Pomset.chain(["l1", "l2"]))[0]
    assert project(PI2, set()) == EMPTY
    assert pomset_iso(project(PI1, {"h1", "l1", "l2", "x"}), PI1)[0]


def test_linearizations_examples():
    words = [str(p) for p in linearizations(PI1)]
    assert words == ["h1·l1·l2", "h1·l2·l1"]
    assert linearizations(PI2) == [PI2.canonicalize()]
    assert len(linearizations(Pomset(("a", "b", "c")))) == 6
    with pytest.raises(ResourceError):
        linearizations(Pomset(("a", "b", "c", "d")), cap=5)


def test_nc_has_four_interleaving_traces():
    keys = {t.key() for r in maximal_runs(fixture("NC")) for t in linearizations(pomset_of(r))}
    assert len(keys) == 4


def test_pomset_validation():
    with pytest.raises(ValueError):
        Pomset(("a", "b"), frozenset({(0, 0)}))
    with pytest.raises(ValueError):
        Pomset(("a", "b", "c"), frozenset({(0, 1), (1, 2)}))
    with pytest.raises(ValueError):
        Pomset(("a",), frozenset({(0, 3)}))


def test_pomset_json_round_trip():
    for p in (PI1, PI2, PI3, EMPTY):
        data = p.to_json()
        assert set(data) == {"size", "labels", "order"}
        assert pomset_iso(Pomset.from_json(data), p)[0]


def test_run_final_cut_matches_dead_markings():
    for name in ("NA", "NB", "NC", "N1", "N2"):
        net = fixture(name)
        cuts = {r.image(r.final_cut()) for r in maximal_runs(net)}
        assert cuts == oracles.dead_markings(net)


def test_run_markings_injective():
    for run in maximal_runs(fixture("NC")):
        for m in reach(run.causal):
            assert len(run.image(m)) == len(m)
