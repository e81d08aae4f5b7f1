"""Brute-force checks of the built-in security properties over pomset sets.

These evaluate the declarative definitions directly and serve as
independent oracles for the testing route.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from itertools import permutations, product

from .pomset import Pomset, pomset_iso, project


@dataclass(frozen=True)
class SecurityPartition:
    low: frozenset
    high: frozenset

    def __post_init__(self):
        object.__setattr__(self, "low", frozenset(self.low))
        object.__setattr__(self, "high", frozenset(self.high))
        overlap = self.low & self.high
        if overlap:
            raise ValueError(f"labels {sorted(overlap)} are both low and high")


def check_T1(p: Pomset, part: SecurityPartition) -> bool:
    """No low event causally depends on a high event."""
    return not any(p.labels[x] in part.high and p.labels[y] in part.low for x, y in p.order)


def low_multiset(p: Pomset, part: SecurityPartition) -> Counter:
    return Counter(l for l in p.labels if l in part.low)


def _low_bijection(a: Pomset, b: Pomset, part: SecurityPartition) -> bool:
    """Search for a label-preserving bijection between the low events."""
    xs = [i for i, l in enumerate(a.labels) if l in part.low]
    ys = [j for j, l in enumerate(b.labels) if l in part.low]
    if len(xs) != len(ys):
        return False

    def extend(k, used):
        if k == len(xs):
            return True
        for j in ys:
            if j not in used and b.labels[j] == a.labels[xs[k]] and extend(k + 1, used | {j}):
                return True
        return False

    return extend(0, frozenset())


def check_H1(ts, part: SecurityPartition, method: str = "multiset") -> bool:
    """Every pair of traces agrees on the occurrence of low events."""
    ts = list(ts)
    if method == "multiset":
        return all(low_multiset(a, part) == low_multiset(b, part) for a, b in product(ts, repeat=2))
    if method == "bijection":
        return all(_low_bijection(a, b, part) for a, b in product(ts, repeat=2))
    raise ValueError(f"unknown method {method!r}")


def check_H2(ts, part: SecurityPartition) -> bool:
    """Every pair agrees on the occurrence and the ordering of low events."""
    lows = [project(p, part.low) for p in ts]
    return all(pomset_iso(a, b)[0] for a, b in product(lows, repeat=2))


def check_H3(ts, part: SecurityPartition) -> bool:
    """Generalized noninterference: for all traces p, q some trace r shows
    the low behaviour of p together with the high behaviour of q."""
    ts = list(ts)
    lows = [project(p, part.low).key() for p in ts]
    highs = [project(p, part.high).key() for p in ts]
    pairs = set(zip(lows, highs))
    return all((lo, hi) in pairs for lo, hi in product(lows, highs))


def check_H3_brute(ts, part: SecurityPartition) -> bool:
    """Same as :func:`check_H3` but with explicit isomorphism search."""
    ts = list(ts)
    for p, q in product(ts, repeat=2):
        pl, qh = project(p, part.low), project(q, part.high)
        if not any(
            pomset_iso(project(r, part.low), pl)[0] and pomset_iso(project(r, part.high), qh)[0] for r in ts
        ):
            return False
    return True


def iso_brute(a: Pomset, b: Pomset) -> bool:
    """Isomorphism by trying every bijection; exponential, for testing only."""
    if a.size != b.size:
        return False
    for perm in permutations(range(b.size)):
        if all(a.labels[i] == b.labels[perm[i]] for i in range(a.size)) and {
            (perm[x], perm[y]) for x, y in a.order
        } == set(b.order):
            return True
    return False
