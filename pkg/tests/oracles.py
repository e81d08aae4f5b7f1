"""Brute-force reference implementations used to check the library.

Everything here works on plain sets and firing sequences and uses networkx
for isomorphism, so it shares no code with the bitmask, canonical-form or
configuration-based machinery under test.
"""

from itertools import permutations

import networkx as nx


def enabled(net, marking):
    return [t for t in net.transitions if t.pre <= marking]


def fire(marking, t):
    rest = marking - t.pre
    assert not (rest & t.post), "contact"
    return rest | t.post


def reachable(net):
    seen = {net.initial}
    todo = [net.initial]
    while todo:
        m = todo.pop()
        for t in enabled(net, m):
            m2 = fire(m, t)
            if m2 not in seen:
                seen.add(m2)
                todo.append(m2)
    return seen


def dead_markings(net):
    return {m for m in reachable(net) if not enabled(net, m)}


def has_cycle(net):
    g = nx.DiGraph()
    for m in reachable(net):
        g.add_node(m)
        for t in enabled(net, m):
            g.add_edge(m, fire(m, t))
    return not nx.is_directed_acyclic_graph(g)


def maximal_sequences(net, limit=200_000):
    """All firing sequences of an acyclic net that end in a dead marking."""
    out = []

    def walk(m, seq):
        ts = enabled(net, m)
        if not ts:
            out.append((tuple(seq), m))
            assert len(out) <= limit
            return
        for t in ts:
            seq.append(t)
            walk(fire(m, t), seq)
            seq.pop()

    walk(net.initial, [])
    return out


def process_graph(net, seq):
    """Causal net of a firing sequence as a coloured networkx digraph."""
    g = nx.DiGraph()
    holder = {}
    for p in net.initial:
        node = ("c", p, None)
        g.add_node(node, colour=("p", True))
        holder[p] = node
    for k, t in enumerate(seq):
        ev = ("e", k)
        g.add_node(ev, colour=("t", t.label))
        for p in t.pre:
            g.add_edge(holder.pop(p), ev)
        for q in t.post:
            node = ("c", q, k)
            g.add_node(node, colour=("p", False))
            g.add_edge(ev, node)
            holder[q] = node
    return g


def pomset_graph(labels, order):
    g = nx.DiGraph()
    for i, l in enumerate(labels):
        g.add_node(i, colour=l)
    g.add_edges_from(order)
    return g


def same_colour(a, b):
    return a["colour"] == b["colour"]


def iso_classes(graphs):
    classes = []
    for g in graphs:
        if not any(nx.is_isomorphic(g, h, node_match=same_colour) for h in classes):
            classes.append(g)
    return classes


def count_runs(net):
    return len(iso_classes(process_graph(net, seq) for seq, _ in maximal_sequences(net)))


def pomset_oracle_iso(a, b):
    """Pomset isomorphism by brute force over permutations."""
    if a.size != b.size:
        return False
    for perm in permutations(range(b.size)):
        if all(a.labels[i] == b.labels[perm[i]] for i in range(a.size)) and {
            (perm[x], perm[y]) for x, y in a.order
        } == set(b.order):
            return True
    return False


def pass_by_sequences(composed, test_places, tick, mode):
    """May/must from the dead markings of an acyclic composition."""
    outcomes = [not ((m & test_places) - tick) for _, m in maximal_sequences(composed)]
    return all(outcomes) if mode == "must" else any(outcomes)


def lts_graph(net):
    """Reachability graph as a networkx multigraph with labelled edges."""
    g = nx.MultiDiGraph()
    for m in reachable(net):
        g.add_node(m, init=(m == net.initial))
        for t in enabled(net, m):
            g.add_edge(m, fire(m, t), label=t.label)
    return g


def lts_isomorphic(a, b):
    ga, gb = lts_graph(a), lts_graph(b)
    return nx.is_isomorphic(
        ga,
        gb,
        node_match=lambda x, y: x["init"] == y["init"],
        edge_match=lambda x, y: sorted(d["label"] for d in x.values()) == sorted(d["label"] for d in y.values()),
    )
