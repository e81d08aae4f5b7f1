"""Labeled partial orders (pomsets) held as canonical representatives."""

from __future__ import annotations

from dataclasses import dataclass, field
from .canon import canonical_labeling
from .errors import ResourceError


def transitive_closure(n, pairs):
    succ = [set() for _ in range(n)]
    for a, b in pairs:
        succ[a].add(b)
    changed = True
    while changed:
        changed = False
        for a in range(n):
            extra = set()
            for b in succ[a]:
                extra |= succ[b]
            if not extra <= succ[a]:
                succ[a] |= extra
                changed = True
    return frozenset((a, b) for a in range(n) for b in succ[a])


@dataclass(frozen=True)
class Pomset:
    """Events ``0..size-1`` with ``labels[i]`` and a strict order given as the
    full transitive relation ``order`` (set of ``(i, j)`` with ``i < j``)."""

    labels: tuple
    order: frozenset = frozenset()
    canonical: bool = field(default=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "labels", tuple(self.labels))
        object.__setattr__(self, "order", frozenset(tuple(p) for p in self.order))
        n = len(self.labels)
        for a, b in self.order:
            if not (0 <= a < n and 0 <= b < n):
                raise ValueError(f"order pair {(a, b)} out of range")
            if a == b:
                raise ValueError("order must be irreflexive")
        succ = [set() for _ in range(n)]
        for a, b in self.order:
            succ[a].add(b)
        for a in range(n):
            for b in succ[a]:
                if not succ[b] <= succ[a]:
                    raise ValueError("order must be transitive")

    @classmethod
    def from_relation(cls, labels, pairs):
        """Build from any acyclic relation; the transitive closure is taken."""
        return cls(tuple(labels), transitive_closure(len(labels), pairs))

    @classmethod
    def chain(cls, labels):
        n = len(labels)
        return cls(tuple(labels), frozenset((i, j) for i in range(n) for j in range(i + 1, n)))

    @property
    def size(self):
        return len(self.labels)

    def _labeling(self):
        return canonical_labeling(self.labels, self.order)

    def key(self):
        """Hashable isomorphism invariant: equal keys iff isomorphic pomsets."""
        return self._labeling()[0]

    def canonicalize(self) -> Pomset:
        if self.canonical:
            return self
        _, perm = self._labeling()
        pos = {v: i for i, v in enumerate(perm)}
        return Pomset(
            tuple(self.labels[v] for v in perm),
            frozenset((pos[a], pos[b]) for a, b in self.order),
            canonical=True,
        )

    def covering(self):
        """Immediate successor pairs (the Hasse diagram)."""
        return frozenset(
            (a, b) for a, b in self.order if not any((a, c) in self.order and (c, b) in self.order for c in range(self.size))
        )

    def is_total(self):
        return len(self.order) == self.size * (self.size - 1) // 2

    def to_json(self):
        p = self.canonicalize()
        return {"size": p.size, "labels": list(p.labels), "order": [list(x) for x in sorted(p.order)]}

    @classmethod
    def from_json(cls, data):
        return cls(tuple(data["labels"]), frozenset(tuple(x) for x in data["order"])).canonicalize()

    def __str__(self):
        if self.is_total():
            seq = sorted(range(self.size), key=lambda i: sum(1 for a, b in self.order if b == i))
            return "·".join(self.labels[i] for i in seq) or "ε"
        cov = sorted(self.covering())
        evs = ", ".join(f"{i}:{l}" for i, l in enumerate(self.labels))
        rel = ", ".join(f"{a}<{b}" for a, b in cov)
        return f"[{evs} | {rel}]"


EMPTY = Pomset((), frozenset(), canonical=True)


def pomset_iso(a: Pomset, b: Pomset):
    """``(True, f)`` with ``f`` a label- and order-preserving bijection
    (dict from events of ``a`` to events of ``b``), or ``(False, None)``."""
    if a.size != b.size or len(a.order) != len(b.order) or sorted(a.labels) != sorted(b.labels):
        return False, None
    ca, pa = a._labeling()
    cb, pb = b._labeling()
    if ca != cb:
        return False, None
    return True, {pa[i]: pb[i] for i in range(a.size)}


def project(p: Pomset, keep) -> Pomset:
    keep = set(keep)
    idx = [i for i, l in enumerate(p.labels) if l in keep]
    pos = {v: i for i, v in enumerate(idx)}
    return Pomset(
        tuple(p.labels[i] for i in idx),
        frozenset((pos[a], pos[b]) for a, b in p.order if a in pos and b in pos),
    ).canonicalize()


def linearizations(p: Pomset, cap=10_000):
    """Distinct tomsets (total orders) extending ``p``, sorted by label word.

    Raises :class:`ResourceError` once more than ``cap`` distinct ones exist.
    """
    n = p.size
    preds = [frozenset(a for a, b in p.order if b == i) for i in range(n)]
    words = set()
    seen = set()

    def walk(done, word):
        if len(done) == n:
            if word not in words:
                words.add(word)
                if len(words) > cap:
                    raise ResourceError(f"more than {cap} linearizations")
            return
        if (done, word) in seen:
            return
        seen.add((done, word))
        for i in range(n):
            if i not in done and preds[i] <= done:
                walk(done | {i}, word + (p.labels[i],))

    walk(frozenset(), ())
    return [Pomset.chain(w).canonicalize() for w in sorted(words)]
