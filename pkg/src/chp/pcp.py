"""Post Correspondence Problem instances as nets and tests.

``encode_net`` builds a net whose maximal runs simulate index sequences of
an instance (one branch spelling the u-words, one the v-words);
``encode_test`` builds a test that is failed exactly by a u-run and a
primed v-run spelling the same word with the same indices.  Universal may
testing therefore fails iff the instance has a solution.
"""

from __future__ import annotations

from dataclasses import dataclass

from .net import TAU, make_net
from .testing import FORALL, MAY, Test, Verdict, check_hyper

LETTERS = ("a", "b")


@dataclass(frozen=True)
class PcpInstance:
    pairs: tuple

    def __post_init__(self):
        pairs = tuple((str(u), str(v)) for u, v in self.pairs)
        if not pairs:
            raise ValueError("a PCP instance needs at least one pair")
        for i, (u, v) in enumerate(pairs, 1):
            for w in (u, v):
                if not w:
                    raise ValueError(f"pair {i}: empty words are not supported")
                if set(w) - set(LETTERS):
                    raise ValueError(f"pair {i}: words must be over {{a, b}}, got {w!r}")
        object.__setattr__(self, "pairs", pairs)

    @classmethod
    def parse(cls, text: str) -> PcpInstance:
        """Parse ``"u1:v1,u2:v2,..."``."""
        pairs = []
        for item in text.split(","):
            item = item.strip()
            if item.count(":") != 1:
                raise ValueError(f"malformed pair {item!r}; expected u:v")
            pairs.append(tuple(item.split(":")))
        return cls(tuple(pairs))

    @property
    def n(self):
        return len(self.pairs)

    def __str__(self):
        return ",".join(f"{u}:{v}" for u, v in self.pairs)

    def solves(self, indices) -> bool:
        if not indices:
            return False
        u = "".join(self.pairs[i - 1][0] for i in indices)
        v = "".join(self.pairs[i - 1][1] for i in indices)
        return u == v


def _branch(side, words, ts, places):
    """Centre place with one loop per pair: index label, then the letters."""
    centre = f"{side}c"
    places.add(centre)
    for i, w in enumerate(words, 1):
        chain = [f"{side}{i}_{k}" for k in range(len(w))] + [centre]
        ts.append((f"{side}{i}", [centre], str(i), [chain[0]]))
        for k, letter in enumerate(w):
            places.add(chain[k])
            ts.append((f"{side}{i}_{letter}{k}", [chain[k]], letter, [chain[k + 1]]))
    return centre


def encode_net(inst: PcpInstance):
    places = {"start", "ustart", "vstart", "uend", "vend"}
    ts = [
        ("go_u", ["start"], TAU, ["ustart"]),
        ("go_v", ["start"], TAU, ["vstart"]),
    ]
    uc = _branch("u", [u for u, _ in inst.pairs], ts, places)
    vc = _branch("v", [v for _, v in inst.pairs], ts, places)
    ts += [
        ("begin_u", ["ustart"], "u", [uc]),
        ("begin_v", ["vstart"], "v", [vc]),
        ("end_u", [uc], "fu", ["uend"]),
        ("end_v", [vc], "fv", ["vend"]),
    ]
    indices = [str(i) for i in range(1, inst.n + 1)]
    alphabet = {"u", "v", "fu", "fv", *LETTERS, *indices}
    return make_net("NI", alphabet, places, ts, {"start"})


def encode_test(inst: PcpInstance) -> Test:
    indices = [str(i) for i in range(1, inst.n + 1)]
    primed = [i + "'" for i in indices]
    letters_all = [*LETTERS, *(x + "'" for x in LETTERS)]
    ts = [
        ("gate_u", ["g0"], "u", ["g1"]),
        ("gate_v", ["g1"], "v'", ["g2"]),
        ("to_letters", ["g2"], TAU, ["L"]),
        ("to_indices", ["g2"], TAU, ["I0"]),
    ]
    letter_ticks = ["L", "Lf"]
    for x in LETTERS:
        ts.append((f"L_{x}", ["L"], x, [f"L{x}"]))
        ts.append((f"L_{x}'", [f"L{x}"], x + "'", ["L"]))
        letter_ticks.append(f"L{x}")
    ts += [("L_fu", ["L"], "fu", ["Lf"]), ("L_fv'", ["Lf"], "fv'", ["Lx"])]
    index_ticks = ["I0", "I", "If"]
    for i in indices:
        ts.append((f"I0_{i}", ["I0"], i, [f"I{i}"]))
        ts.append((f"I_{i}", ["I"], i, [f"I{i}"]))
        ts.append((f"I{i}_{i}'", [f"I{i}"], i + "'", ["I"]))
        index_ticks.append(f"I{i}")
    ts += [("I_fu", ["I"], "fu", ["If"]), ("I_fv'", ["If"], "fv'", ["Ix"])]
    # loops on tick places keep unrelated events from blocking a branch
    for p in letter_ticks:
        ts += [(f"{p}@{x}", [p], x, [p]) for x in indices + primed]
    for p in index_ticks:
        ts += [(f"{p}@{x}", [p], x, [p]) for x in letters_all + ["u", "v'"]]
    places = {"g0", "g1", "g2", "Lx", "Ix", *letter_ticks, *index_ticks}
    alphabet = {"u", "v'", "fu", "fv'", *letters_all, *indices, *primed}
    net = make_net("TPCP", alphabet, places, ts, {"g0"})
    tick = frozenset(places - {"Lx", "Ix"})
    return Test(net, tick)


def decode_witness(witness) -> dict:
    """Index sequence and word spelled by the u-run of a witness pair."""
    for run in witness["runs"]:
        events = [e.rstrip("'") for e in run["events"]]
        if "u" in events:
            return {
                "indices": [int(e) for e in events if e.isdigit()],
                "word": "".join(e for e in events if e in LETTERS),
            }
    raise ValueError("witness contains no u-run")


def check_pcp(inst: PcpInstance, bound: int) -> Verdict:
    """Bounded universal may test of the encoding.

    ``bound`` counts simulated events per run (the initial internal choice
    is not counted).  False means a solution was found; the decoded
    solution is attached to the witness.  Never returns true.
    """
    if bound < 1:
        raise ValueError("bound must be positive")
    verdict = check_hyper(encode_net(inst), encode_test(inst), [FORALL, FORALL], MAY, bound=bound + 1)
    verdict.bound_used = bound
    if verdict.holds is False:
        verdict.witness["solution"] = decode_witness(verdict.witness)
    return verdict

