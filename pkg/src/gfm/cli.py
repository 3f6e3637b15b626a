"""gfm command line.

Exit codes: 0 success, 1 usage error, 2 validation/resolution error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .artifact import as_artifact, load_artifact, normalize_media_type
from .errors import FileUnreadable, GFMError, ModelFormatError, UnknownMediaType
from .grammar import parse_expression, print_expression
from .hk import ArtifactStore, HKModel, load_model, save_model
from .resolver import ResolvedFragment, list_indexers, resolve

EXIT_OK, EXIT_USAGE, EXIT_INVALID, EXIT_IO = 0, 1, 2, 3

IO_ERRORS = (FileUnreadable, UnknownMediaType, ModelFormatError, OSError)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


class Output:
    def __init__(self, as_json: bool, quiet: bool):
        self.json = as_json
        self.quiet = quiet

    def emit(self, doc, text: str):
        if self.json:
            print(json.dumps(doc, ensure_ascii=False))
        elif not self.quiet:
            print(text)


def _error_doc(exc: BaseException) -> dict:
    doc = {"error": type(exc).__name__, "message": str(exc)}
    for key in ("segment", "parameter", "offset"):
        value = getattr(exc, key, None)
        if value is not None:
            doc[key] = value
    return doc


def _format_report(resolved: ResolvedFragment) -> str:
    report = resolved.report()
    spans = " ".join(f"[{s},{e})" for s, e in report["bits"]) or "(empty)"
    lines = [f"source:     {report['source']} ({report['media_type']})",
             f"expression: {report['expression']}",
             f"bits:       {spans}",
             f"extent:     {json.dumps(report['extent'])}"]
    for i, step in enumerate(report["trail"], 1):
        lines.append(f"  {i}. {step['segment']} -> {json.dumps(step['extent'])}")
    return "\n".join(lines)


def _write_extract(resolved: ResolvedFragment, out: str | None):
    data = as_artifact(resolved.fragment).content
    if out is None or out == "-":
        sys.stdout.buffer.write(data)
        sys.stdout.buffer.flush()
    else:
        Path(out).write_bytes(data)


def _report(args, output: Output, resolved: ResolvedFragment):
    if args.extract:
        _write_extract(resolved, args.out)
        if args.out is None or args.out == "-":
            return
    output.emit(resolved.report(), _format_report(resolved))


# -- commands --------------------------------------------------------------

def cmd_parse(args, output: Output) -> int:
    expr = parse_expression(args.expr)
    canonical = print_expression(expr)
    output.emit({"canonical": canonical, "segments": len(expr.segments)}, canonical)
    return EXIT_OK


def cmd_resolve(args, output: Output) -> int:
    expr = parse_expression(args.expr)
    artifact = load_artifact(args.file, args.media_type)
    _report(args, output, resolve(artifact, expr))
    return EXIT_OK


def cmd_indexers(args, output: Output) -> int:
    target = args.target
    if os.path.exists(target):
        media_type = load_artifact(target).media_type
    else:
        try:
            media_type = normalize_media_type(target)
        except UnknownMediaType:
            media_type = target
    listing = list_indexers(media_type)
    text = "\n".join(f"{e['name']:<10} {e['taxonomy']:<16} {e['signature']}" for e in listing)
    output.emit({"media_type": media_type, "indexers": listing}, text)
    return EXIT_OK


def _props(pairs) -> dict:
    props = {}
    for pair in pairs or ():
        key, sep, raw = pair.partition("=")
        if not sep or not key:
            raise UsageError(f"property {pair!r} is not key=value")
        try:
            props[key] = json.loads(raw)
        except json.JSONDecodeError:
            props[key] = raw
    return props


def _mutate(args, output: Output, change) -> int:
    model = load_model(args.model)
    result = change(model)
    save_model(model, args.model)
    output.emit(result, result.get("message", ""))
    return EXIT_OK


def cmd_hk(args, output: Output) -> int:
    action = args.hk_command
    if action == "init":
        path = Path(args.model)
        if path.exists() and not args.force:
            raise FileExistsError(f"{path} exists (use --force to overwrite)")
        save_model(HKModel(), path)
        output.emit({"model": str(path)}, f"initialized {path}")
        return EXIT_OK
    if action == "add-node":
        def change(m):
            m.add_node(args.id, args.artifact, _props(args.prop))
            return {"node": args.id, "message": f"added node {args.id}"}
        return _mutate(args, output, change)
    if action == "add-anchor":
        def change(m):
            a = m.add_anchor(args.node, args.id, args.expr, _props(args.prop))
            return {"anchor": a.ref, "expr": a.expr, "message": f"added anchor {a.ref} = {a.expr}"}
        return _mutate(args, output, change)
    if action == "add-link":
        def change(m):
            link = m.add_link(args.predicate, args.args)
            text = f"{link.predicate}({', '.join(link.args)})"
            return {"predicate": link.predicate, "args": list(link.args),
                    "message": f"added link {text}"}
        return _mutate(args, output, change)
    if action == "query":
        model = load_model(args.model)
        links = model.query_links(args.predicate, args.pattern)
        doc = {"links": [{"predicate": l.predicate, "args": list(l.args)} for l in links]}
        output.emit(doc, "\n".join(f"{l.predicate}({', '.join(l.args)})" for l in links))
        return EXIT_OK
    if action == "resolve":
        model = load_model(args.model)
        store = ArtifactStore(args.artifacts)
        _report(args, output, model.resolve_anchor(args.ref, store))
        return EXIT_OK
    raise UsageError("missing hk subcommand")


# -- argument parsing ------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--json", action="store_true", default=argparse.SUPPRESS,
                        help="machine-readable JSON output")
    common.add_argument("--quiet", action="store_true", default=argparse.SUPPRESS,
                        help="suppress non-essential output")

    parser = _Parser(prog="gfm", description="Parse and resolve fragment expressions.",
                     parents=[common])
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("parse", parents=[common], help="print the canonical form of an expression")
    p.add_argument("expr")
    p.set_defaults(func=cmd_parse)

    extract = _Parser(add_help=False)
    extract.add_argument("--extract", action="store_true",
                         help="write the fragment's content (as an artifact) to --out or stdout")
    extract.add_argument("--out", metavar="PATH")

    p = sub.add_parser("resolve", parents=[common, extract], help="resolve an expression on a file")
    p.add_argument("file")
    p.add_argument("expr")
    p.add_argument("--media-type", metavar="TYPE")
    p.set_defaults(func=cmd_resolve)

    p = sub.add_parser("indexers", parents=[common], help="list indexers for a file or media type")
    p.add_argument("target", metavar="FILE_OR_MEDIA_TYPE")
    p.set_defaults(func=cmd_indexers)

    hk = sub.add_parser("hk", parents=[common], help="hyperknowledge model operations")
    hk.set_defaults(func=cmd_hk)
    hks = hk.add_subparsers(dest="hk_command", parser_class=_Parser)
    model = _Parser(add_help=False)
    model.add_argument("--model", required=True, metavar="PATH")

    p = hks.add_parser("init", parents=[common, model])
    p.add_argument("--force", action="store_true")
    p = hks.add_parser("add-node", parents=[common, model])
    p.add_argument("id")
    p.add_argument("--artifact", metavar="RELPATH")
    p.add_argument("--prop", action="append", metavar="KEY=VALUE")
    p = hks.add_parser("add-anchor", parents=[common, model])
    p.add_argument("node")
    p.add_argument("id")
    p.add_argument("expr")
    p.add_argument("--prop", action="append", metavar="KEY=VALUE")
    p = hks.add_parser("add-link", parents=[common, model])
    p.add_argument("predicate")
    p.add_argument("args", nargs="+", metavar="REF")
    p = hks.add_parser("query", parents=[common, model])
    p.add_argument("--predicate")
    p.add_argument("pattern", nargs="*", metavar="REF_OR_*")
    p = hks.add_parser("resolve", parents=[common, model, extract])
    p.add_argument("ref")
    p.add_argument("--artifacts", required=True, metavar="DIR")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    as_json = False
    try:
        args = parser.parse_args(argv)
        as_json = getattr(args, "json", False)
        output = Output(as_json, getattr(args, "quiet", False))
        if args.command is None:
            raise UsageError("gfm: a command is required")
        return args.func(args, output)
    except UsageError as exc:
        _fail(exc, as_json)
        return EXIT_USAGE
    except IO_ERRORS as exc:
        _fail(exc, as_json)
        return EXIT_IO
    except GFMError as exc:
        _fail(exc, as_json)
        return EXIT_INVALID


def _fail(exc: BaseException, as_json: bool):
    if as_json:
        print(json.dumps(_error_doc(exc), ensure_ascii=False), file=sys.stderr)
    else:
        print(f"gfm: {type(exc).__name__}: {exc}", file=sys.stderr)


if __name__ == "__main__":
    sys.exit(main())
