"""Safe labeled Petri nets and their token game.

Markings are frozensets of place names at the API boundary.  Exploration
works on an int-bitmask encoding of the same markings, compiled lazily per
net; the two views are interchangeable through :class:`Compiled`.
"""

from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping

from .errors import ContactError, FiringError, NetError

TAU = "tau"

LABEL_RE = re.compile(r"[A-Za-z0-9_][A-Za-z0-9_']*\Z")
# places and transition ids may also carry the separators introduced by
# automatic renaming ("net.place") and shorthand expansion ("t@label")
NAME_RE = re.compile(r"[A-Za-z0-9_][A-Za-z0-9_'.@]*\Z")

Marking = frozenset


@dataclass(frozen=True)
class Transition:
    id: str
    pre: frozenset
    label: str
    post: frozenset

    def __post_init__(self):
        object.__setattr__(self, "pre", frozenset(self.pre))
        object.__setattr__(self, "post", frozenset(self.post))

    @property
    def triple(self):
        return (self.pre, self.label, self.post)

    def __str__(self):
        pre = ",".join(sorted(self.pre))
        post = ",".join(sorted(self.post))
        return f"{self.id}: {{{pre}}} -{self.label}-> {{{post}}}"


@dataclass(frozen=True)
class Net:
    """A safe labeled net ``(alphabet, places, transitions, initial)``.

    Transitions are kept sorted by ``(label, id)``; that order is the
    exploration order everywhere in the package.
    """

    name: str
    alphabet: frozenset
    places: frozenset
    transitions: tuple
    initial: frozenset
    meta: Mapping = field(default_factory=dict, compare=False, hash=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "alphabet", frozenset(self.alphabet))
        object.__setattr__(self, "places", frozenset(self.places))
        object.__setattr__(self, "initial", frozenset(self.initial))
        ts = tuple(sorted(self.transitions, key=lambda t: (t.label, t.id)))
        object.__setattr__(self, "transitions", ts)
        self._validate()

    def _validate(self):
        if TAU in self.alphabet:
            raise NetError(f"net {self.name}: '{TAU}' may not occur in the alphabet")
        for a in self.alphabet:
            if not LABEL_RE.match(a):
                raise NetError(f"net {self.name}: bad action label {a!r}")
        for p in self.places:
            if not NAME_RE.match(p):
                raise NetError(f"net {self.name}: bad place name {p!r}")
        if not self.initial:
            raise NetError(f"net {self.name}: initial marking is empty")
        if not self.initial <= self.places:
            bad = sorted(self.initial - self.places)
            raise NetError(f"net {self.name}: undeclared initial places {bad}")
        ids = set()
        triples = {}
        for t in self.transitions:
            if t.id in ids:
                raise NetError(f"net {self.name}: duplicate transition id {t.id!r}")
            ids.add(t.id)
            if not NAME_RE.match(t.id):
                raise NetError(f"net {self.name}: bad transition id {t.id!r}")
            if not t.pre or not t.post:
                raise NetError(f"net {self.name}: transition {t.id} has an empty pre- or postset")
            unknown = (t.pre | t.post) - self.places
            if unknown:
                raise NetError(f"net {self.name}: transition {t.id} uses undeclared places {sorted(unknown)}")
            if t.label != TAU and t.label not in self.alphabet:
                raise NetError(f"net {self.name}: label {t.label!r} of {t.id} is not in the alphabet")
            if t.triple in triples:
                raise NetError(
                    f"net {self.name}: transitions {triples[t.triple]} and {t.id} are the same (pre, label, post) triple"
                )
            triples[t.triple] = t.id

    @cached_property
    def compiled(self) -> Compiled:
        return Compiled(self)

    def transition(self, tid: str) -> Transition:
        for t in self.transitions:
            if t.id == tid:
                return t
        raise KeyError(tid)

    def preset_of_place(self, p):
        return tuple(t for t in self.transitions if p in t.post)

    def postset_of_place(self, p):
        return tuple(t for t in self.transitions if p in t.pre)

    def replace(self, **changes) -> Net:
        fields = dict(
            name=self.name,
            alphabet=self.alphabet,
            places=self.places,
            transitions=self.transitions,
            initial=self.initial,
            meta=self.meta,
        )
        fields.update(changes)
        return Net(**fields)


def make_net(name, alphabet, places, transitions, initial) -> Net:
    """Convenience constructor: ``transitions`` holds ``(id, pre, label, post)`` tuples."""
    ts = [t if isinstance(t, Transition) else Transition(t[0], frozenset(t[1]), t[2], frozenset(t[3])) for t in transitions]
    return Net(name, frozenset(alphabet), frozenset(places), tuple(ts), frozenset(initial))


class Compiled:
    """Bitmask view of a net: one bit per place, transitions as mask pairs."""

    def __init__(self, net: Net):
        self.net = net
        self.places = tuple(sorted(net.places))
        self.bit = {p: 1 << i for i, p in enumerate(self.places)}
        self.transitions = net.transitions
        self.pre = [self.mask(t.pre) for t in net.transitions]
        self.post = [self.mask(t.post) for t in net.transitions]
        self.initial = self.mask(net.initial)

    def mask(self, places: Iterable[str]) -> int:
        m = 0
        bit = self.bit
        for p in places:
            try:
                m |= bit[p]
            except KeyError:
                raise NetError(f"net {self.net.name}: unknown place {p!r}") from None
        return m

    def marking(self, mask: int) -> frozenset:
        return frozenset(p for p, b in self.bit.items() if mask & b)

    def enabled(self, m: int) -> list:
        return [i for i, pre in enumerate(self.pre) if pre & m == pre]


def enabled(net: Net, m: Iterable[str]) -> tuple:
    """Transitions whose preset is contained in ``m``, in ``(label, id)`` order."""
    c = net.compiled
    mask = c.mask(m)
    return tuple(c.transitions[i] for i in c.enabled(mask))


def fire(net: Net, m: Iterable[str], t: Transition) -> frozenset:
    m = frozenset(m)
    net.compiled.mask(m)
    if not t.pre <= m:
        raise FiringError(f"{t.id} is not enabled at {sorted(m)}")
    rest = m - t.pre
    clash = rest & t.post
    if clash:
        raise ContactError(f"contact: firing {t.id} re-marks {sorted(clash)}", marking=m, transition=t)
    return rest | t.post


def is_dead(net: Net, m: Iterable[str]) -> bool:
    return not enabled(net, m)


class ReachabilityGraph:
    """Markings reachable from ``M0`` (breadth-first order) and firing edges.

    Node 0 is the initial marking.  ``edges`` holds ``(src, transition, dst)``
    triples in discovery order.
    """

    def __init__(self, net: Net, masks, edges, parent):
        c = net.compiled
        self.net = net
        self.masks = masks
        self.markings = tuple(c.marking(m) for m in masks)
        self.edges = tuple((s, c.transitions[i], d) for s, i, d in edges)
        self._parent = parent
        self._succ = [[] for _ in masks]
        for s, t, d in self.edges:
            self._succ[s].append((t, d))

    def __len__(self):
        return len(self.markings)

    def successors(self, node):
        return tuple(self._succ[node])

    def dead_nodes(self):
        return [i for i, s in enumerate(self._succ) if not s]

    def path_to(self, node):
        """Shortest firing sequence (list of transitions) from ``M0`` to ``node``."""
        path = []
        while self._parent[node] is not None:
            prev, ti = self._parent[node]
            path.append(self.net.compiled.transitions[ti])
            node = prev
        return path[::-1]

    def find_cycle(self):
        """A list of edges forming a cycle, or None if the graph is acyclic."""
        return _find_cycle(len(self.markings), self._succ)

    def has_cycle(self):
        return self.find_cycle() is not None


def _find_cycle(n, succ):
    WHITE, GREY, BLACK = 0, 1, 2
    colour = [WHITE] * n
    for root in range(n):
        if colour[root] != WHITE:
            continue
        colour[root] = GREY
        stack = [(root, iter(succ[root]))]
        trail = []  # trail[k] is the edge entering stack[k + 1]
        while stack:
            node, it = stack[-1]
            for t, d in it:
                if colour[d] == GREY:
                    j = next(k for k, (s, _) in enumerate(stack) if s == d)
                    return trail[j:] + [(node, t, d)]
                if colour[d] == WHITE:
                    colour[d] = GREY
                    trail.append((node, t, d))
                    stack.append((d, iter(succ[d])))
                    break
            else:
                colour[node] = BLACK
                stack.pop()
                if trail:
                    trail.pop()
    return None


def _explore(net: Net):
    c = net.compiled
    index = {c.initial: 0}
    masks = [c.initial]
    parent = [None]
    edges = []
    queue = deque([0])
    while queue:
        i = queue.popleft()
        m = masks[i]
        for ti in c.enabled(m):
            pre, post = c.pre[ti], c.post[ti]
            rest = m & ~pre
            if rest & post:
                path = []
                node = i
                while parent[node] is not None:
                    node, pti = parent[node]
                    path.append(c.transitions[pti].id)
                raise ContactError(
                    f"net {net.name}: contact when firing {c.transitions[ti].id} at {sorted(c.marking(m))}",
                    marking=c.marking(m),
                    transition=c.transitions[ti],
                    path=path[::-1],
                )
            m2 = rest | post
            j = index.get(m2)
            if j is None:
                j = index[m2] = len(masks)
                masks.append(m2)
                parent.append((i, ti))
                queue.append(j)
            edges.append((i, ti, j))
    return masks, edges, parent


def reachability_graph(net: Net) -> ReachabilityGraph:
    masks, edges, parent = _explore(net)
    return ReachabilityGraph(net, masks, edges, parent)


def reach(net: Net) -> tuple:
    """All reachable markings, breadth-first, starting with ``M0``."""
    return reachability_graph(net).markings


def is_contact_free(net: Net):
    """``(True, None)`` or ``(False, (marking, transition))``."""
    try:
        _explore(net)
    except ContactError as e:
        return False, (e.marking, e.transition)
    return True, None
