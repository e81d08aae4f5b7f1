"""Text format for nets and tests (``.chp`` files).

::

    # comment
    net NC {
      alphabet h1 h2 l1 l2;
      places p0 p11;
      initial p0;
      trans t1: {p0} -h1-> {p11};
      trans loop: {p11} -{l1,l2}-> {p11};   # expands to loop@l1, loop@l2
    }
    test T { ...same clauses...  tick s2; }
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from importlib import resources

from .errors import NetError, ParseError
from .net import NAME_RE, TAU, Net, Transition, is_contact_free
from .testing import Test

_TOKEN = re.compile(
    r"""
    (?P<ws>[ \t\r]+)
  | (?P<nl>\n)
  | (?P<comment>\#[^\n]*)
  | (?P<arrow>->)
  | (?P<punct>[{}:;,\-])
  | (?P<ident>[A-Za-z0-9_][A-Za-z0-9_'.@]*)
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    col: int


def tokenize(text: str):
    tokens = []
    line, start, pos = 1, 0, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - start + 1)
        kind = m.lastgroup
        if kind == "nl":
            line += 1
            start = m.end()
        elif kind in ("arrow", "punct", "ident"):
            tokens.append(Token(kind if kind == "ident" else "sym", m.group(), line, pos - start + 1))
        pos = m.end()
    tokens.append(Token("eof", "", line, pos - start + 1))
    return tokens


@dataclass
class Document:
    nets: dict = field(default_factory=dict)
    tests: dict = field(default_factory=dict)
    positions: dict = field(default_factory=dict, compare=False)

    def get(self, name):
        if name in self.nets:
            return self.nets[name]
        if name in self.tests:
            return self.tests[name]
        raise KeyError(name)

    def net(self, name) -> Net:
        if name not in self.nets:
            raise KeyError(f"no net named {name!r} (nets: {', '.join(self.nets) or 'none'})")
        return self.nets[name]

    def test(self, name) -> Test:
        if name not in self.tests:
            raise KeyError(f"no test named {name!r} (tests: {', '.join(self.tests) or 'none'})")
        return self.tests[name]


class _Parser:
    def __init__(self, text):
        self.toks = tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def next(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def error(self, msg, tok=None):
        tok = tok or self.peek()
        return ParseError(msg, tok.line, tok.col)

    def expect(self, text):
        tok = self.next()
        if tok.text != text or tok.kind == "eof":
            raise self.error(f"expected {text!r}, found {tok.text or 'end of input'!r}", tok)
        return tok

    def ident(self, what):
        tok = self.next()
        if tok.kind != "ident":
            raise self.error(f"expected {what}, found {tok.text or 'end of input'!r}", tok)
        return tok

    def idents_until(self, stop, what, allow_empty=False):
        out = []
        while self.peek().text != stop or self.peek().kind == "ident":
            out.append(self.ident(what))
        if not out and not allow_empty:
            raise self.error(f"expected at least one {what}")
        self.expect(stop)
        return out

    def document(self):
        doc = Document()
        while self.peek().kind != "eof":
            tok = self.next()
            if tok.text not in ("net", "test") or tok.kind != "ident":
                raise self.error(f"expected 'net' or 'test', found {tok.text!r}", tok)
            name_tok = self.ident("a name")
            name = name_tok.text
            if name in doc.nets or name in doc.tests:
                raise self.error(f"duplicate name {name!r}", name_tok)
            item = self.body(name, name_tok, is_test=tok.text == "test")
            (doc.tests if tok.text == "test" else doc.nets)[name] = item
            doc.positions[name] = (name_tok.line, name_tok.col)
        return doc

    def clause(self, keyword, what, allow_empty=False):
        self.expect(keyword)
        return self.idents_until(";", what, allow_empty)

    def body(self, name, name_tok, is_test):
        self.expect("{")
        alphabet = self.clause("alphabet", "label", allow_empty=True)
        for tok in alphabet:
            if tok.text == TAU:
                raise self.error("tau must not appear in the alphabet", tok)
        places_toks = self.clause("places", "place")
        initial_toks = self.clause("initial", "place")
        places = {t.text for t in places_toks}
        for tok in places_toks:
            if not NAME_RE.fullmatch(tok.text):
                raise self.error(f"invalid place name {tok.text!r}", tok)
        for tok in initial_toks:
            if tok.text not in places:
                raise self.error(f"initial place {tok.text!r} is not declared", tok)
        labels = {t.text for t in alphabet}
        transitions, seen_ids, seen_triples = [], set(), set()
        while self.peek().text == "trans":
            for t, tok in self.trans(places, labels):
                if t.id in seen_ids:
                    raise self.error(f"duplicate transition id {t.id!r}", tok)
                if t.triple in seen_triples:
                    raise self.error(f"transition {t.id} duplicates the (pre, label, post) of another", tok)
                seen_ids.add(t.id)
                seen_triples.add(t.triple)
                transitions.append(t)
        tick = None
        if self.peek().text == "tick":
            tick_tok = self.peek()
            if not is_test:
                raise self.error(f"net {name} is not a test and cannot have tick places", tick_tok)
            toks = self.clause("tick", "place", allow_empty=True)
            for tok in toks:
                if tok.text not in places:
                    raise self.error(f"tick place {tok.text!r} is not declared", tok)
            tick = frozenset(t.text for t in toks)
        elif is_test:
            raise self.error(f"test {name} needs a 'tick' clause")
        self.expect("}")
        try:
            net = Net(name, frozenset(labels), frozenset(places), tuple(transitions), frozenset(t.text for t in initial_toks))
        except NetError as exc:
            raise ParseError(str(exc), name_tok.line, name_tok.col) from exc
        ok, info = is_contact_free(net)
        if not ok:
            marking, t = info
            raise ParseError(
                f"net {name} has contact: {t.id} at marking {{{', '.join(sorted(marking))}}}", name_tok.line, name_tok.col
            )
        return Test(net, tick) if is_test else net

    def trans(self, places, labels):
        self.expect("trans")
        id_tok = self.ident("a transition id")
        if not NAME_RE.fullmatch(id_tok.text):
            raise self.error(f"invalid transition id {id_tok.text!r}", id_tok)
        self.expect(":")
        pre = self.place_set(places)
        self.expect("-")
        if self.peek().text == "{":
            self.next()
            label_toks = [self.ident("label")]
            while self.peek().text == ",":
                self.next()
                label_toks.append(self.ident("label"))
            self.expect("}")
            shorthand = True
        else:
            label_toks = [self.ident("label")]
            shorthand = False
        self.expect("->")
        post = self.place_set(places)
        self.expect(";")
        out = []
        for tok in label_toks:
            if tok.text != TAU and tok.text not in labels:
                raise self.error(f"label {tok.text!r} is not in the alphabet", tok)
            tid = f"{id_tok.text}@{tok.text}" if shorthand else id_tok.text
            out.append((Transition(tid, pre, tok.text, post), id_tok))
        return out

    def place_set(self, places):
        self.expect("{")
        toks = self.idents_until("}", "place")
        for tok in toks:
            if tok.text not in places:
                raise self.error(f"place {tok.text!r} is not declared", tok)
        return frozenset(t.text for t in toks)


def parse(text: str) -> Document:
    return _Parser(text).document()


def _clause(keyword, items):
    return f"  {keyword}" + "".join(" " + x for x in items) + ";"


def serialize_net(net: Net, tick=None, keyword="net") -> str:
    lines = [f"{keyword} {net.name} {{", _clause("alphabet", sorted(net.alphabet)), _clause("places", sorted(net.places))]
    lines.append(_clause("initial", sorted(net.initial)))
    for t in sorted(net.transitions, key=lambda t: t.id):
        lines.append(f"  trans {t.id}: {{{' '.join(sorted(t.pre))}}} -{t.label}-> {{{' '.join(sorted(t.post))}}};")
    if tick is not None:
        lines.append(_clause("tick", sorted(tick)))
    lines.append("}")
    return "\n".join(lines) + "\n"


def serialize(doc: Document) -> str:
    parts = [serialize_net(n) for n in doc.nets.values()]
    parts += [serialize_net(t.net, t.tick, "test") for t in doc.tests.values()]
    return "\n".join(parts)


def load(path) -> Document:
    with open(path, encoding="ascii") as fh:
        return parse(fh.read())


FIXTURES = ("fig1", "fig2", "fig3", "thl", "fig7")


def fixture_text(name: str) -> str:
    return resources.files("chp").joinpath("fixtures", f"{name}.chp").read_text(encoding="ascii")


def load_fixture(name: str) -> Document:
    return parse(fixture_text(name))


def fixture(item: str):
    """Look up a net or test by name across all bundled fixture files."""
    for name in FIXTURES:
        doc = load_fixture(name)
        if item in doc.nets or item in doc.tests:
            return doc.get(item)
    raise KeyError(item)
