"""Causal nets, concurrent runs (processes) and their pomsets.

Runs are built by process construction: an event is identified by the
target transition plus the conditions it consumes, a condition by the event
that produced it plus its target place.  With these structural identities
every configuration is reached once no matter which interleaving produced
it, so the search walks configurations rather than firing sequences.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from .canon import canonical_labeling
from .errors import BoundRequired, ContactError
from .net import Net, Transition, reach, reachability_graph
from .pomset import EMPTY, Pomset

EXTENSION = "extension"
LITERAL = "literal"


@dataclass(frozen=True)
class CausalRun:
    causal: Net
    embedding: Mapping
    target: Net

    @property
    def events(self):
        return self.causal.transitions

    def final_cut(self) -> frozenset:
        consumed = set()
        for t in self.causal.transitions:
            consumed |= t.pre
        return frozenset(self.causal.places - consumed)

    def image(self, places):
        return frozenset(self.embedding[p] for p in places)

    def firing_sequence(self):
        """Events in one topological order (ties broken by label, then id)."""
        done = set(self.causal.initial)
        pending = list(self.causal.transitions)
        seq = []
        while pending:
            t = next(t for t in pending if t.pre <= done)
            pending.remove(t)
            done |= t.post
            seq.append(t)
        return seq

    def __str__(self):
        return str(pomset_of(self))


def flow_successors(net: Net):
    """Place -> set of places reachable in one flow step."""
    succ = {p: set() for p in net.places}
    for t in net.transitions:
        for p in t.pre:
            succ[p] |= t.post
    return succ


def validate_causal(net: Net):
    """Check the three causal-net conditions; returns ``(ok, violations)``."""
    problems = []
    for p in sorted(net.places):
        ins = net.preset_of_place(p)
        outs = net.postset_of_place(p)
        if len(ins) > 1:
            problems.append(f"place {p} is branched backwards: |pre({p})| = {len(ins)}")
        if len(outs) > 1:
            problems.append(f"place {p} is branched: |post({p})| = {len(outs)}")
    succ = flow_successors(net)
    cycle = _flow_cycle(succ)
    if cycle:
        problems.append("flow relation has a cycle through " + " -> ".join(cycle))
    sources = frozenset(p for p in net.places if not net.preset_of_place(p))
    if sources != net.initial:
        problems.append(
            f"initial marking {sorted(net.initial)} differs from the places without ingoing arcs {sorted(sources)}"
        )
    return not problems, problems


def _flow_cycle(succ):
    colour = {p: 0 for p in succ}
    for root in sorted(succ):
        if colour[root]:
            continue
        colour[root] = 1
        stack = [(root, iter(sorted(succ[root])))]
        while stack:
            p, it = stack[-1]
            for q in it:
                if colour[q] == 1:
                    path = [s for s, _ in stack]
                    return path[path.index(q):] + [q]
                if colour[q] == 0:
                    colour[q] = 1
                    stack.append((q, iter(sorted(succ[q]))))
                    break
            else:
                colour[p] = 2
                stack.pop()
    return None


def validate_embedding(run: CausalRun):
    """Check the embedding conditions of ``run`` against its target net."""
    causal, f, target = run.causal, run.embedding, run.target
    problems = []
    missing = causal.places - set(f)
    if missing:
        return False, [f"embedding undefined on {sorted(missing)}"]
    unknown = {p: f[p] for p in causal.places if f[p] not in target.places}
    if unknown:
        return False, [f"embedding maps into undeclared target places {unknown}"]
    if causal.alphabet != target.alphabet:
        problems.append("alphabets of the causal net and the target differ")
    if run.image(causal.initial) != target.initial:
        problems.append(
            f"f(M0) = {sorted(run.image(causal.initial))} but target M0 = {sorted(target.initial)}"
        )
    for m in reach(causal):
        if len(run.image(m)) != len(m):
            problems.append(f"f is not injective on reachable marking {sorted(m)}")
    triples = {t.triple for t in target.transitions}
    for t in causal.transitions:
        if (run.image(t.pre), t.label, run.image(t.post)) not in triples:
            problems.append(f"event {t.id} does not map onto a transition of {target.name}")
    tsucc = flow_successors(target)
    for p, qs in flow_successors(causal).items():
        for q in qs:
            if f[q] not in tsucc[f[p]]:
                problems.append(f"flow {p} -> {q} is not preserved by f")
    return not problems, problems


def is_maximal(run: CausalRun, mode: str = EXTENSION) -> bool:
    """Maximality of a finite run.

    ``extension``: no transition of the target is enabled at the image of
    the final cut.  ``literal``: every causal place whose image has a flow
    successor in the target has a flow successor itself.
    """
    if mode == EXTENSION:
        image = run.image(run.final_cut())
        return not any(t.pre <= image for t in run.target.transitions)
    if mode == LITERAL:
        tsucc = flow_successors(run.target)
        csucc = flow_successors(run.causal)
        return all(csucc[p] or not tsucc[run.embedding[p]] for p in run.causal.places)
    raise ValueError(f"unknown maximality mode {mode!r}")


@dataclass(frozen=True)
class RunSet:
    """Result of :func:`maximal_runs`.

    ``runs`` are complete maximal runs; ``partial`` are runs cut off at the
    bound while still extensible.  ``exact`` is True iff nothing was cut.
    """

    net: Net
    runs: tuple
    partial: tuple
    exact: bool
    bound: int | None

    def __iter__(self):
        return iter(self.runs)

    def __len__(self):
        return len(self.runs)


def maximal_runs(net: Net, bound: int | None = None) -> RunSet:
    """Enumerate the maximal runs of ``net`` up to causal-net isomorphism.

    Without ``bound`` the net must have an acyclic reachability graph (so
    every run is finite); otherwise :class:`BoundRequired` is raised.
    ``bound`` caps the number of events per run.
    """
    if bound is None and reachability_graph(net).has_cycle():
        raise BoundRequired(f"net {net.name} has infinite runs; an event bound is required")
    c = net.compiled

    cond_ids = {}
    conds = []  # cid -> (producing eid or None, place)
    event_ids = {}
    events = []  # eid -> (transition index, input cids, output cids)

    def cond(producer, place):
        key = (producer, place)
        cid = cond_ids.get(key)
        if cid is None:
            cid = cond_ids[key] = len(conds)
            conds.append(key)
        return cid

    init_cut = frozenset(cond(None, p) for p in sorted(net.initial))
    start = (frozenset(), init_cut)
    seen = {start[0]}
    stack = [start]
    complete, truncated = [], []
    while stack:
        config, cut = stack.pop()
        by_place = {conds[cid][1]: cid for cid in cut}
        marking = c.mask(by_place)
        extensions = c.enabled(marking)
        if not extensions:
            complete.append((config, cut))
            continue
        if bound is not None and len(config) >= bound:
            truncated.append((config, cut))
            continue
        for ti in reversed(extensions):
            t = c.transitions[ti]
            if (marking & ~c.pre[ti]) & c.post[ti]:
                raise ContactError(f"net {net.name}: contact when firing {t.id}", transition=t)
            inputs = frozenset(by_place[p] for p in t.pre)
            key = (ti, inputs)
            eid = event_ids.get(key)
            if eid is None:
                eid = event_ids[key] = len(events)
                outputs = frozenset(cond(eid, q) for q in sorted(t.post))
                events.append((ti, inputs, outputs))
            new_config = config | {eid}
            if new_config in seen:
                continue
            seen.add(new_config)
            stack.append((new_config, (cut - inputs) | events[eid][2]))
    def build(config):
        return _run_from_config(net, config, init_cut, conds, events)

    runs = _dedup(build(cfg) for cfg, _ in complete)
    partial = _dedup(build(cfg) for cfg, _ in truncated)
    return RunSet(net, tuple(runs), tuple(partial), not truncated, bound)


def _run_from_config(net, config, init_cut, conds, events):
    c = net.compiled
    depth = {}
    producer_of = {}
    for eid in sorted(config):
        for cid in events[eid][2]:
            producer_of[cid] = eid

    def ev_depth(eid):
        if eid not in depth:
            ins = events[eid][1]
            depth[eid] = 1 + max((ev_depth(producer_of[cid]) for cid in ins if cid in producer_of), default=0)
        return depth[eid]

    order = sorted(config, key=lambda e: (ev_depth(e), c.transitions[events[e][0]].label, e))
    used = list(sorted(init_cut, key=lambda cid: conds[cid][1]))
    for eid in order:
        used.extend(sorted(events[eid][2], key=lambda cid: conds[cid][1]))
    names = {}
    counter = {}
    f = {}
    for cid in used:
        place = conds[cid][1]
        k = counter.get(place, 0)
        counter[place] = k + 1
        names[cid] = f"{place}_{k}"
        f[names[cid]] = place
    transitions = []
    for n, eid in enumerate(order, 1):
        ti, ins, outs = events[eid]
        transitions.append(
            Transition(f"e{n}", frozenset(names[x] for x in ins), c.transitions[ti].label, frozenset(names[x] for x in outs))
        )
    causal = Net(
        f"{net.name}_run",
        net.alphabet,
        frozenset(names.values()),
        tuple(transitions),
        frozenset(names[cid] for cid in init_cut),
    )
    return CausalRun(causal, f, net)


def causal_key(net: Net):
    """Isomorphism invariant of a labeled net (places and transitions as a
    coloured bipartite digraph)."""
    places = sorted(net.places)
    index = {p: i for i, p in enumerate(places)}
    colours = [("p", "1" if p in net.initial else "0") for p in places]
    edges = []
    for t in net.transitions:
        i = len(colours)
        colours.append(("t", t.label))
        edges.extend((index[p], i) for p in t.pre)
        edges.extend((i, index[q]) for q in t.post)
    return canonical_labeling(colours, edges)[0]


def _dedup(runs):
    keyed = {}
    for r in runs:
        k = causal_key(r.causal)
        if k not in keyed:
            keyed[k] = r
    return [keyed[k] for k in sorted(keyed, key=lambda k: (sum(1 for c in k[0] if c[0] == "t"), k))]


def pomset_of(run) -> Pomset:
    """Pomset of a run (or of a causal net given directly)."""
    net = run.causal if isinstance(run, CausalRun) else run
    ts = net.transitions
    if not ts:
        return EMPTY
    pairs = [(i, j) for i, a in enumerate(ts) for j, b in enumerate(ts) if a.post & b.pre]
    return Pomset.from_relation([t.label for t in ts], pairs).canonicalize()


def causal_net_of(p: Pomset, name: str = "pomset", alphabet=None) -> Net:
    """A causal net whose pomset is isomorphic to ``p``.

    One place per covering pair, one initial place per minimal event and one
    final place per maximal event.  The empty pomset gives a single marked
    place and no transitions.
    """
    alphabet = frozenset(p.labels) if alphabet is None else frozenset(alphabet)
    if p.size == 0:
        return Net(name, alphabet, frozenset({"c0"}), (), frozenset({"c0"}))
    cover = sorted(p.covering())
    pre = {i: set() for i in range(p.size)}
    post = {i: set() for i in range(p.size)}
    places, initial = [], []
    for a, b in cover:
        q = f"c{a}_{b}"
        places.append(q)
        post[a].add(q)
        pre[b].add(q)
    for i in range(p.size):
        if not pre[i]:
            q = f"i{i}"
            places.append(q)
            initial.append(q)
            pre[i].add(q)
        if not post[i]:
            q = f"o{i}"
            places.append(q)
            post[i].add(q)
    ts = [Transition(f"x{i}", frozenset(pre[i]), p.labels[i], frozenset(post[i])) for i in range(p.size)]
    return Net(name, alphabet, frozenset(places), tuple(ts), frozenset(initial))


def run_of_pomset(p: Pomset, name: str = "pomset") -> CausalRun:
    """Wrap :func:`causal_net_of` as a run of itself (identity embedding)."""
    net = causal_net_of(p, name)
    return CausalRun(net, {q: q for q in net.places}, net)
