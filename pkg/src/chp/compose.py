"""Parallel composition with synchronisation on shared labels, and relabeling."""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce

from .errors import RelabelError
from .net import TAU, Net, Transition

PRIME = "prime"
INDEX = "index"


@dataclass(frozen=True)
class RelabelScheme:
    kind: str = PRIME
    copy_number: int = 1

    def __post_init__(self):
        if self.kind not in (PRIME, INDEX):
            raise ValueError(f"unknown relabel scheme {self.kind!r}")
        if self.copy_number < 1:
            raise ValueError("copy_number must be positive")

    def apply(self, label: str) -> str:
        if label == TAU:
            return label
        if self.kind == PRIME:
            return label + "'" * (self.copy_number - 1)
        return f"{label}_{self.copy_number}"


def relabel(net: Net, scheme: RelabelScheme) -> Net:
    mapping = {a: scheme.apply(a) for a in net.alphabet}
    clash = {a: b for a, b in mapping.items() if b != a and b in net.alphabet}
    if clash:
        a, b = sorted(clash.items())[0]
        raise RelabelError(f"relabeling {a} to {b} collides with an existing label of {net.name}")
    ts = tuple(Transition(t.id, t.pre, mapping.get(t.label, t.label), t.post) for t in net.transitions)
    return net.replace(alphabet=frozenset(mapping.values()), transitions=ts)


def rename_places(net: Net, mapping) -> Net:
    ts = tuple(
        Transition(t.id, frozenset(mapping[p] for p in t.pre), t.label, frozenset(mapping[p] for p in t.post))
        for t in net.transitions
    )
    return net.replace(
        places=frozenset(mapping[p] for p in net.places),
        initial=frozenset(mapping[p] for p in net.initial),
        transitions=ts,
    )


def compose(a: Net, b: Net, name: str | None = None) -> Net:
    """``a || b``: equal non-tau labels in both alphabets fire jointly.

    If the place sets overlap, every place is prefixed with its net's name
    and the renaming is recorded in ``meta["renaming"]``.
    """
    renaming = None
    if a.places & b.places:
        na, nb = (a.name, b.name) if a.name != b.name else (a.name + "@1", b.name + "@2")
        ma = {p: f"{na}.{p}" for p in a.places}
        mb = {p: f"{nb}.{p}" for p in b.places}
        a, b = rename_places(a, ma), rename_places(b, mb)
        renaming = {"left": ma, "right": mb}
    shared = a.alphabet & b.alphabet
    ts = []
    ids = set()

    def fresh(tid, owner):
        base, k = tid, 1
        while tid in ids:
            tid = f"{owner}{k if k > 1 else ''}.{base}"
            k += 1
        ids.add(tid)
        return tid

    for owner, net in (("l", a), ("r", b)):
        for t in net.transitions:
            if t.label not in shared:
                ts.append(Transition(fresh(t.id, owner), t.pre, t.label, t.post))
    n = 0
    b_by_label = {}
    for t in b.transitions:
        b_by_label.setdefault(t.label, []).append(t)
    for ta in a.transitions:
        if ta.label not in shared:
            continue
        for tb in b_by_label.get(ta.label, ()):
            n += 1
            ts.append(Transition(fresh(f"sync{n}.{ta.id}.{tb.id}", "s"), ta.pre | tb.pre, ta.label, ta.post | tb.post))
    meta = {"components": (a.name, b.name)}
    if renaming:
        meta["renaming"] = renaming
    return Net(
        name or f"{a.name}_{b.name}",
        a.alphabet | b.alphabet,
        a.places | b.places,
        tuple(ts),
        a.initial | b.initial,
        meta,
    )


def compose_many(nets, name: str | None = None) -> Net:
    nets = list(nets)
    if not nets:
        raise ValueError("compose_many needs at least one net")
    result = reduce(compose, nets)
    if name:
        result = result.replace(name=name)
    return result
