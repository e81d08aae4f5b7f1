"""Command-line interface: ``chp parse|runs|test|oracle|pcp``.

Exit codes: 0 property holds, 1 property fails, 2 unknown (bound
exhausted), 3 usage or input error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .compose import INDEX, PRIME
from .errors import ChpError
from .pcp import PcpInstance, check_pcp, encode_net, encode_test
from .pomset import linearizations
from .props import SecurityPartition, check_H1, check_H2, check_H3, check_T1
from .runs import maximal_runs, pomset_of
from .testing import EXISTS, FORALL, MAY, MUST, Verdict, check_hyper
from .textio import Document, fixture_text, parse, serialize_net

EXIT_HOLDS, EXIT_FAILS, EXIT_UNKNOWN, EXIT_ERROR = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def exit_code(holds) -> int:
    return {True: EXIT_HOLDS, False: EXIT_FAILS, None: EXIT_UNKNOWN}[holds]


def threads() -> int:
    """Value of CHP_THREADS (0 = auto); evaluation is sequential, so any cap is met."""
    raw = os.environ.get("CHP_THREADS", "0")
    try:
        n = int(raw)
    except ValueError:
        raise UsageError(f"CHP_THREADS must be a non-negative integer, got {raw!r}") from None
    if n < 0:
        raise UsageError(f"CHP_THREADS must be a non-negative integer, got {raw!r}")
    return n


def read_source(path: str) -> str:
    """File contents; ``@name`` refers to a bundled fixture file."""
    if path.startswith("@"):
        try:
            return fixture_text(path[1:])
        except FileNotFoundError:
            raise UsageError(f"no bundled fixture named {path[1:]!r}") from None
    with open(path, encoding="ascii") as fh:
        return fh.read()


def load_documents(paths) -> Document:
    merged = Document()
    for path in paths:
        try:
            doc = parse(read_source(path))
        except ChpError as exc:
            raise ChpError(f"{path}:{exc}") from exc
        for name in list(doc.nets) + list(doc.tests):
            if name in merged.nets or name in merged.tests:
                raise UsageError(f"{path}: name {name!r} is already defined by an earlier file")
        merged.nets.update(doc.nets)
        merged.tests.update(doc.tests)
    return merged


def lookup(doc, kind, name):
    try:
        return doc.net(name) if kind == "net" else doc.test(name)
    except KeyError as exc:
        raise UsageError(exc.args[0]) from None


def emit(args, payload, text):
    """Print the result once, as JSON or text."""
    if args.format == "json":
        sys.stdout.write(json.dumps(payload, indent=2, sort_keys=False) + "\n")
    else:
        sys.stdout.write(text.rstrip("\n") + "\n")


def verdict_text(v: Verdict) -> str:
    lines = [f"holds: {v.status}", f"mode: {v.mode}"]
    if v.quantifiers:
        lines.append("quantifiers: " + ", ".join(v.quantifiers))
    if v.bounded or v.bound_used is not None:
        lines.append(f"bounded: {str(v.bounded).lower()} (bound {v.bound_used})")
    w = v.witness
    if w:
        for run in w.get("runs", []):
            lines.append(f"run {run['copy']}: " + " ".join(run["events"]))
        if "labels" in w:
            lines.append(f"{w.get('reason', 'path')}: " + (" ".join(w["labels"]) or "(empty)"))
        if "marking" in w:
            lines.append("final marking: {" + ", ".join(w["marking"]) + "}")
        if "solution" in w:
            sol = w["solution"]
            lines.append("solution: (" + ",".join(map(str, sol["indices"])) + ") word " + sol["word"])
    for key, value in v.extra.items():
        lines.append(f"{key}: {value}")
    return "\n".join(lines)


# -- commands ---------------------------------------------------------------


def cmd_parse(args):
    doc = load_documents(args.files)
    items = [
        {"kind": "net", "name": n.name, "places": len(n.places), "transitions": len(n.transitions), "alphabet": sorted(n.alphabet)}
        for n in doc.nets.values()
    ] + [
        {
            "kind": "test",
            "name": t.name,
            "places": len(t.net.places),
            "transitions": len(t.net.transitions),
            "alphabet": sorted(t.net.alphabet),
            "tick": sorted(t.tick),
        }
        for t in doc.tests.values()
    ]
    text = "\n".join(f"{i['kind']} {i['name']}: {i['places']} places, {i['transitions']} transitions" for i in items)
    emit(args, {"ok": True, "items": items}, text or "empty document")
    return EXIT_HOLDS


def cmd_runs(args):
    net = lookup(load_documents(args.files), "net", args.net)
    rs = maximal_runs(net, args.bound)

    def describe(run):
        return {"events": [t.label for t in run.firing_sequence()], "pomset": pomset_of(run).to_json()}

    payload = {
        "net": net.name,
        "exact": rs.exact,
        "bound": rs.bound,
        "runs": [describe(r) for r in rs.runs],
        "partial": [describe(r) for r in rs.partial],
    }
    lines = [f"{len(rs.runs)} maximal run(s) of {net.name}" + ("" if rs.exact else f" (bound {rs.bound}, truncated)")]
    lines += [f"  {i}: {pomset_of(r)}" for i, r in enumerate(rs.runs, 1)]
    if rs.partial:
        lines.append(f"{len(rs.partial)} partial run(s) cut at the bound")
        lines += [f"  {i}: {pomset_of(r)}" for i, r in enumerate(rs.partial, 1)]
    emit(args, payload, "\n".join(lines))
    return EXIT_HOLDS


def cmd_test(args):
    doc = load_documents(args.files)
    net, test = lookup(doc, "net", args.net), lookup(doc, "test", args.test)
    quants = [q.strip() for q in args.quant.split(",") if q.strip()]
    bad = [q for q in quants if q not in (FORALL, EXISTS)]
    if not quants or bad:
        raise UsageError(f"--quant takes a comma-separated list of forall/exists, got {args.quant!r}")
    if args.scheme == PRIME and len(quants) > args.prime_depth:
        raise UsageError(
            f"{len(quants)} copies exceed the prime depth limit {args.prime_depth}; use --scheme index"
        )
    threads()
    v = check_hyper(net, test, quants, args.mode, args.scheme, args.bound)
    emit(args, v.to_json(), verdict_text(v))
    return exit_code(v.holds)


def _parse_labels(text):
    return frozenset(x.strip() for x in (text or "").split(",") if x.strip())


def cmd_oracle(args):
    net = lookup(load_documents(args.files), "net", args.net)
    part = SecurityPartition(_parse_labels(args.low), _parse_labels(args.high))
    rs = maximal_runs(net, args.bound)
    traces = [pomset_of(r) for r in rs.runs]
    if args.trace_mode == "interleaving":
        uniq = {}
        for p in traces:
            for t in linearizations(p):
                uniq.setdefault(t.key(), t)
        traces = [uniq[k] for k in sorted(uniq)]
    if args.prop == "T1":
        value = all(check_T1(p, part) for p in traces)
    else:
        value = {"H1": check_H1, "H2": check_H2, "H3": check_H3}[args.prop](traces, part)
    # a violation among complete traces of a universal property is conclusive
    if rs.exact or (value is False and args.prop in ("T1", "H1", "H2")):
        holds = value
    else:
        holds = None
    payload = {
        "holds": "unknown" if holds is None else holds,
        "property": args.prop,
        "trace_mode": args.trace_mode,
        "low": sorted(part.low),
        "high": sorted(part.high),
        "bounded": not rs.exact,
        "bound_used": args.bound,
        "traces": [p.to_json() for p in traces],
    }
    text = [f"holds: {json.dumps(payload['holds']).strip(chr(34))}", f"property: {args.prop} over {len(traces)} {args.trace_mode} trace(s)"]
    text += [f"  {p}" for p in traces]
    emit(args, payload, "\n".join(text))
    return exit_code(holds)


def cmd_pcp(args):
    try:
        inst = PcpInstance.parse(args.pairs)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if args.emit is None and args.check_bound is None:
        raise UsageError("pcp needs --emit and/or --check-bound")
    if args.emit is not None:
        t = encode_test(inst)
        text = f"# PCP instance {inst}\n" + serialize_net(encode_net(inst)) + "\n" + serialize_net(t.net, t.tick, "test")
        tmp = args.emit + ".tmp"
        with open(tmp, "w", encoding="ascii") as fh:
            fh.write(text)
        os.replace(tmp, args.emit)
    if args.check_bound is None:
        emit(args, {"emitted": args.emit, "instance": str(inst)}, f"wrote {args.emit}")
        return EXIT_HOLDS
    if args.check_bound < 1:
        raise UsageError("--check-bound must be positive")
    threads()
    v = check_pcp(inst, args.check_bound)
    payload = v.to_json()
    payload["instance"] = str(inst)
    emit(args, payload, verdict_text(v))
    return exit_code(v.holds)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="chp", description="Test concurrent hyperproperties of safe Petri nets.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, files=True):
        if files:
            p.add_argument("files", nargs="+", metavar="FILE", help=".chp file, or @name for a bundled fixture")
        p.add_argument("--format", choices=["json", "text"], default="text")

    p = sub.add_parser("parse", help="parse and validate files")
    common(p)
    p.set_defaults(func=cmd_parse)

    p = sub.add_parser("runs", help="list the maximal runs of a net")
    common(p)
    p.add_argument("--net", required=True)
    p.add_argument("--bound", type=int)
    p.set_defaults(func=cmd_runs)

    p = sub.add_parser("test", help="quantified may/must test over runs")
    common(p)
    p.add_argument("--net", required=True)
    p.add_argument("--test", required=True)
    p.add_argument("--mode", choices=[MAY, MUST], required=True)
    p.add_argument("--quant", required=True, help="comma-separated forall/exists")
    p.add_argument("--scheme", choices=[PRIME, INDEX], default=PRIME)
    p.add_argument("--bound", type=int)
    p.add_argument("--prime-depth", type=int, default=3, help="max copies under the prime scheme")
    p.set_defaults(func=cmd_test)

    p = sub.add_parser("oracle", help="evaluate T1/H1/H2/H3 directly on the traces")
    common(p)
    p.add_argument("--net", required=True)
    p.add_argument("--prop", choices=["T1", "H1", "H2", "H3"], required=True)
    p.add_argument("--low", default="")
    p.add_argument("--high", default="")
    p.add_argument("--trace-mode", choices=["pomset", "interleaving"], default="pomset")
    p.add_argument("--bound", type=int)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("pcp", help="PCP encoding and bounded universal may check")
    common(p, files=False)
    p.add_argument("--pairs", required=True, help='e.g. "ab:bb,a:aba,baa:aa"')
    p.add_argument("--emit", metavar="FILE")
    p.add_argument("--check-bound", type=int)
    p.set_defaults(func=cmd_pcp)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ChpError, UsageError, OSError, ValueError) as exc:
        print(f"chp: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
