"""May/must testing of nets and quantified hyperproperty queries.

A net passes a test on a maximal run of ``N || T`` that is either infinite
or ends in a dead marking whose test places are all ticked.  On the finite
reachability graph of the safe composition this becomes: *may* holds iff
some reachable dead marking has only ticked test places or some cycle is
reachable; *must* fails iff some reachable dead marking holds an unticked
test place.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

from .compose import PRIME, RelabelScheme, compose, compose_many, relabel, rename_places
from .errors import ContactError, ContractError, NetError
from .net import Net, _find_cycle
from .runs import CausalRun, is_maximal, maximal_runs, pomset_of

log = logging.getLogger(__name__)

MAY = "may"
MUST = "must"
FORALL = "forall"
EXISTS = "exists"

SUCCESS = "success"
FAILURE = "failure"
DEADLOCK_FREE = "deadlock_free"


@dataclass(frozen=True)
class Test:
    __test__ = False  # not a pytest class

    net: Net
    tick: frozenset

    def __post_init__(self):
        object.__setattr__(self, "tick", frozenset(self.tick))
        if not self.tick <= self.net.places:
            raise NetError(f"test {self.net.name}: tick places {sorted(self.tick - self.net.places)} are undeclared")
        if not self.tick:
            log.warning("test %s has no tick places; it can only pass on infinite runs", self.net.name)

    @property
    def name(self):
        return self.net.name


@dataclass
class Verdict:
    """Outcome of a testing query; ``holds`` is None when unknown."""

    holds: bool | None
    mode: str
    quantifiers: tuple = ()
    witness: dict | None = None
    bounded: bool = False
    bound_used: int | None = None
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.holds is None and not self.bounded:
            raise ValueError("an unknown verdict must come from a bounded search")

    @property
    def status(self):
        return {True: "true", False: "false", None: "unknown"}[self.holds]

    def to_json(self):
        out = {
            "holds": "unknown" if self.holds is None else self.holds,
            "mode": self.mode,
            "quantifiers": list(self.quantifiers),
            "bounded": self.bounded,
            "bound_used": self.bound_used,
            "witness": self.witness,
        }
        out.update(self.extra)
        return out


# -- marking-level search ---------------------------------------------------


def _search(pre, post, initial, dead_goal):
    """Depth-first exploration from ``initial`` that stops at the first
    dead marking satisfying ``dead_goal``.

    Depth-first matters: composed run chains have their dead markings at
    the bottom of a wide interleaving space.

    Returns ``(goal, parent, succ)``: ``goal`` is the matching mask or None,
    ``parent`` maps masks to ``(previous mask, transition index)`` and
    ``succ`` holds the explored edges (complete when ``goal`` is None).
    """
    # transitions indexed by the lowest place of their preset
    by_bit = {}
    for i in range(len(pre) - 1, -1, -1):
        p = pre[i]
        by_bit.setdefault(p & -p, []).append(i)
    parent = {initial: None}
    succ = {}
    stack = [initial]
    while stack:
        m = stack.pop()
        edges = []
        rest_bits = m
        while rest_bits:
            low = rest_bits & -rest_bits
            rest_bits ^= low
            for i in by_bit.get(low, ()):
                p = pre[i]
                if p & m == p:
                    rest = m & ~p
                    if rest & post[i]:
                        raise ContactError("contact in composition", transition=i)
                    edges.append((i, rest | post[i]))
        edges.sort(reverse=True)
        for i, m2 in edges:
            if m2 not in parent:
                parent[m2] = (m, i)
                stack.append(m2)
        edges.reverse()
        succ[m] = edges
        if not edges and dead_goal(m):
            return m, parent, succ
    return None, parent, succ


def _path(parent, m):
    path = []
    while parent[m] is not None:
        m, i = parent[m]
        path.append(i)
    return path[::-1]


def _cycle(parent, succ):
    """Transition indices of a path to a reachable cycle plus the cycle."""
    nodes = list(succ)
    index = {m: k for k, m in enumerate(nodes)}
    adj = [[(i, index[m2]) for i, m2 in succ[m]] for m in nodes]
    cyc = _find_cycle(len(nodes), adj)
    if cyc is None:
        return None
    start = nodes[cyc[0][0]]
    return _path(parent, start), [i for _, i, _ in cyc]


def _decide(pre, post, initial, test_mask, tick_mask, mode):
    """Core may/must decision on a flattened net.

    Returns ``(holds, info)`` where ``info`` carries a path (transition
    indices), the final mask, and for may-by-cycle the cycle.
    """
    bad = test_mask & ~tick_mask
    if mode == MUST:
        goal, parent, _ = _search(pre, post, initial, lambda m: bool(m & bad))
        if goal is None:
            return True, {}
        return False, {"path": _path(parent, goal), "marking": goal, "reason": "dead marking with an unticked test place"}
    if mode == MAY:
        goal, parent, succ = _search(pre, post, initial, lambda m: not (m & bad))
        if goal is not None:
            return True, {"path": _path(parent, goal), "marking": goal, "reason": "successful termination"}
        cyc = _cycle(parent, succ)
        if cyc is not None:
            return True, {"path": cyc[0], "cycle": cyc[1], "reason": "infinite run"}
        dead = next(m for m, edges in succ.items() if not edges)
        return False, {"path": _path(parent, dead), "marking": dead, "reason": "every maximal run fails; one of them"}
    raise ValueError(f"unknown mode {mode!r}")


def _compose_with_test(n: Net, t: Test):
    composed = compose(n, t.net)
    renaming = composed.meta.get("renaming")
    if renaming:
        rt = renaming["right"]
        return composed, frozenset(rt[p] for p in t.net.places), frozenset(rt[p] for p in t.tick)
    return composed, t.net.places, t.tick


def decide_composed(composed: Net, test_places, tick, mode) -> Verdict:
    """May/must on an already composed net given its test places."""
    c = composed.compiled
    holds, info = _decide(c.pre, c.post, c.initial, c.mask(test_places), c.mask(tick), mode)
    witness = None
    if info:
        witness = {
            "reason": info["reason"],
            "path": [c.transitions[i].id for i in info["path"]],
            "labels": [c.transitions[i].label for i in info["path"]],
        }
        if "marking" in info:
            witness["marking"] = sorted(c.marking(info["marking"]))
        if "cycle" in info:
            witness["cycle"] = [c.transitions[i].id for i in info["cycle"]]
    return Verdict(holds, mode, witness=witness)


def may_pass(n: Net, t: Test) -> Verdict:
    composed, places, tick = _compose_with_test(n, t)
    return decide_composed(composed, places, tick, MAY)


def must_pass(n: Net, t: Test) -> Verdict:
    composed, places, tick = _compose_with_test(n, t)
    return decide_composed(composed, places, tick, MUST)


def run_outcome(composed: Net, test_places, tick, run: CausalRun) -> str:
    """``success`` or ``failure`` for a finite maximal run of ``composed``."""
    if run.target is not composed and run.target != composed:
        raise ContractError("run does not belong to the composed net")
    if not is_maximal(run):
        raise ContractError("run_outcome needs a maximal run")
    pending = run.image(run.final_cut()) & frozenset(test_places)
    return SUCCESS if pending <= frozenset(tick) else FAILURE


def pass_via_runs(n: Net, t: Test, mode: str) -> bool:
    """May/must decided by enumerating the maximal runs of ``n || t``.

    Independent of the marking-level search; only for compositions whose
    runs are all finite.
    """
    composed, places, tick = _compose_with_test(n, t)
    outcomes = [run_outcome(composed, places, tick, r) for r in maximal_runs(composed)]
    return all(o == SUCCESS for o in outcomes) if mode == MUST else any(o == SUCCESS for o in outcomes)


# -- quantified queries -----------------------------------------------------


def copy_of_run(run: CausalRun, copy: int, scheme: str = PRIME) -> Net:
    """Run net relabeled for position ``copy`` with places prefixed ``r<copy>_``."""
    net = relabel(run.causal, RelabelScheme(scheme, copy))
    net = rename_places(net, {p: f"r{copy}_{p}" for p in net.places})
    return net.replace(name=f"r{copy}")


def compose_tuple(runs, test: Test, scheme: str = PRIME) -> Net:
    """``N_1 || ... || N_k || T`` for the given runs (relabeled per position)."""
    return compose_many([copy_of_run(r, i, scheme) for i, r in enumerate(runs, 1)] + [test.net], name="hyper")


class _Part:
    """A component flattened onto a shared bit space."""

    __slots__ = ("alphabet", "trans", "initial", "names")

    def __init__(self, net: Net, offset: int, display):
        self.alphabet = net.alphabet
        places = sorted(net.places)
        bit = {p: 1 << (offset + i) for i, p in enumerate(places)}
        self.names = {offset + i: display(p) for i, p in enumerate(places)}
        self.initial = sum(bit[p] for p in net.initial)
        self.trans = [
            (sum(bit[p] for p in t.pre), sum(bit[p] for p in t.post), t.label, f"{net.name}.{t.id}")
            for t in net.transitions
        ]


def _flat_compose(parts):
    alpha = set(parts[0].alphabet)
    trans = list(parts[0].trans)
    for part in parts[1:]:
        shared = alpha & part.alphabet
        by_label = {}
        for t in part.trans:
            by_label.setdefault(t[2], []).append(t)
        new = [t for t in trans if t[2] not in shared] + [t for t in part.trans if t[2] not in shared]
        for t in trans:
            if t[2] in shared:
                for u in by_label.get(t[2], ()):
                    new.append((t[0] | u[0], t[1] | u[1], t[2], f"{t[3]}+{u[3]}"))
        alpha |= part.alphabet
        trans = new
    return trans


class HyperQuery:
    """Evaluates ``Q1 r1 ... Qk rk. N_1 || ... || N_k  m-pass  T``."""

    def __init__(self, system: Net, test: Test, quants, mode, scheme=PRIME, bound=None, runset=None):
        quants = tuple(quants)
        if not quants:
            raise ContractError("at least one quantifier is required")
        for q in quants:
            if q not in (FORALL, EXISTS):
                raise ValueError(f"unknown quantifier {q!r}")
        if mode not in (MAY, MUST):
            raise ValueError(f"unknown mode {mode!r}")
        self.system, self.test, self.quants, self.mode = system, test, quants, mode
        self.scheme, self.bound = scheme, bound
        self.runset = runset if runset is not None else maximal_runs(system, bound)
        self.runs = self.runset.runs
        self.k = len(quants)
        self._test_part = _Part(test.net, 0, lambda p: p)
        self._test_mask = sum(1 << i for i in self._test_part.names)
        tick_bits = {p: 1 << i for i, p in enumerate(sorted(test.net.places))}
        self._tick_mask = sum(tick_bits[p] for p in test.tick)
        # every copy gets a disjoint block of bits wide enough for any run
        self._width = max((len(r.causal.places) for r in self.runs), default=0)
        self._parts = {}
        self._cache = {}
        self.evaluated = 0

    def _part(self, copy, idx):
        key = (copy, idx)
        part = self._parts.get(key)
        if part is None:
            run = self.runs[idx]
            net = copy_of_run(run, copy, self.scheme)
            offset = len(self.test.net.places) + (copy - 1) * self._width
            suffix = "" if self.k == 1 else f"#{copy}"
            part = self._parts[key] = _Part(net, offset, lambda p, f=run.embedding: f[p.split("_", 1)[1]] + suffix)
        return part

    def _decide_tuple(self, idxs):
        parts = [self._part(i, idx) for i, idx in enumerate(idxs, 1)] + [self._test_part]
        trans = _flat_compose(parts)
        initial = 0
        for p in parts:
            initial |= p.initial
        holds, info = _decide(
            [t[0] for t in trans], [t[1] for t in trans], initial, self._test_mask, self._tick_mask, self.mode
        )
        return holds, info, trans, parts

    def evaluate(self, idxs) -> bool:
        """Exact verdict for one tuple of run indices."""
        hit = self._cache.get(idxs)
        if hit is None:
            self.evaluated += 1
            hit = self._cache[idxs] = self._decide_tuple(idxs)[0]
        return hit

    def witness(self, idxs) -> dict:
        """The runs of a tuple plus the deciding run of the composition."""
        holds, info, trans, parts = self._decide_tuple(idxs)
        witness = {"runs": [self.describe_run(i, idx) for i, idx in enumerate(idxs, 1)], "passes": holds, "path": []}
        if info:
            names = {}
            for p in parts:
                names.update(p.names)
            witness["reason"] = info["reason"]
            witness["path"] = [trans[i][3] for i in info["path"]]
            witness["labels"] = [trans[i][2] for i in info["path"]]
            if "marking" in info:
                witness["marking"] = sorted(names[b] for b in names if info["marking"] >> b & 1)
            if "cycle" in info:
                witness["cycle"] = [trans[i][3] for i in info["cycle"]]
        return witness

    def describe_run(self, copy, idx):
        run = self.runs[idx]
        scheme = RelabelScheme(self.scheme, copy)
        return {
            "copy": copy,
            "index": idx,
            "events": [scheme.apply(t.label) for t in run.firing_sequence()],
            "pomset": pomset_of(run).to_json(),
        }

    def _fold(self, level, chosen):
        if level == self.k:
            return self.evaluate(chosen), chosen
        q = self.quants[level]
        unknown = False
        last = None
        for idx in range(len(self.runs)):
            holds, w = self._fold(level + 1, chosen + (idx,))
            if q == FORALL and holds is False:
                return False, w
            if q == EXISTS and holds is True:
                return True, w
            unknown = unknown or holds is None
            last = w
        if unknown or not self.runset.exact:
            return None, None
        return (q == FORALL), last

    def verdict(self) -> Verdict:
        holds, idxs = self._fold(0, ())
        witness = self.witness(idxs) if holds is not None and idxs is not None else None
        return Verdict(
            holds,
            self.mode,
            self.quants,
            witness=witness,
            bounded=not self.runset.exact,
            bound_used=self.bound,
            extra={"runs": len(self.runs), "partial_runs": len(self.runset.partial), "tuples_evaluated": self.evaluated},
        )


def check_hyper(system: Net, test: Test, quants, mode, scheme=PRIME, bound=None, runset=None) -> Verdict:
    """Quantified hyperproperty test over the maximal runs of ``system``.

    Tuples are visited in the (deterministic) order of the enumerated runs
    and the quantifier prefix is folded with short-circuiting; a truncated
    run space makes non-conclusive folds unknown.
    """
    return HyperQuery(system, test, quants, mode, scheme, bound, runset).verdict()


def check_trace_test(system: Net, test: Test, quant, mode, bound=None) -> Verdict:
    return check_hyper(system, test, [quant], mode, PRIME, bound)


def check_hyper_via_nets(system: Net, test: Test, quants, mode, scheme=PRIME):
    """Reference evaluation of an exact query through :func:`compose_many`
    and :func:`may_pass`/:func:`must_pass` on explicit nets (slow)."""
    runs = maximal_runs(system).runs
    decide = must_pass if mode == MUST else may_pass
    k = len(quants)

    def fold(level, chosen):
        if level == k:
            composed = compose_many([copy_of_run(r, i, scheme) for i, r in enumerate(chosen, 1)])
            return decide(composed, test).holds
        vals = (fold(level + 1, chosen + (r,)) for r in runs)
        return all(vals) if quants[level] == FORALL else any(vals)

    return fold(0, ())
