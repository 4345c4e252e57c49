"""Command line entry point: ``gengraph {analyze,export,verify,tower}``.

Every command builds a JSON document first; ``text`` and ``csv`` output are
renderings of that document.  Failures print one JSON reason line on stderr.
Exit codes: 0 ok, 1 verification failure, 2 usage error, 3 cap exceeded.
"""
from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import os
import sys

from .caps import get_caps, parse_caps, set_caps
from .errors import CapExceeded, GenGraphError, LemmaViolation, PreconditionError, SpecError, UnsupportedGroup

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_CAP = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# -- documents ---------------------------------------------------------------------


def analyze_doc(spec: str) -> dict:
    from .gen_graph import degrees, generating_graph, graph_metrics, non_isolated_mask
    from .group_core.build import build_group
    from .group_core.lattice import d_rel, is_soluble
    from .local_degrees import verify_degree_bound

    G = build_group(spec)
    V = non_isolated_mask(G)
    doc: dict = {"group": str(G.spec), "order": G.order, "trivial": G.order == 1,
                 "v_count": int(V.sum()), "isolated": int((~V).sum())}
    view = generating_graph(G)
    m = graph_metrics(view)
    doc["components"] = m.components.count
    doc["component_sizes"] = m.components.sizes()
    doc["diameters"] = m.diameters
    doc["loops"] = len(view.loops()) if view.n else 0
    degs = degrees(G)[V]
    doc["degree_min"] = int(degs.min()) if len(degs) else None
    doc["degree_max"] = int(degs.max()) if len(degs) else None
    rep = verify_degree_bound(G)
    doc["t"] = rep.t
    doc["bound"] = rep.bound
    doc["bound_ok"] = rep.ok
    doc["d"] = d_rel(G)
    doc["soluble"] = is_soluble(G)
    return doc


def export_doc(spec: str, fmt: str) -> str:
    from .gen_graph import export, generating_graph
    from .group_core.build import build_group

    return export(generating_graph(build_group(spec)), fmt)


def tower_doc(args) -> tuple[dict, bool]:
    from .gen_graph import non_isolated_mask
    from .profinite_tower import (
        build_tower, degree_growth, klein_base, quotient_consistency, tower_report, v_consistency,
    )

    params = None
    if args.family == "klein-cp3":
        if not args.primes:
            raise UsageError("klein-cp3 needs --primes")
        params = _int_list(args.primes)
    elif args.family == "sl2-products":
        if args.primes:
            params = _int_list(args.primes)
        else:
            params = [2, 3][: args.levels or 1]
    elif args.family == "custom":
        if not args.group:
            raise UsageError("custom towers need --group (comma free specs separated by ';')")
    else:
        raise UsageError(f"unknown family {args.family!r}")
    groups = args.group.split(";") if args.family == "custom" else None
    T = build_tower(args.family, params, groups)
    if args.levels and args.family != "sl2-products":
        T = dataclasses.replace(T, levels=T.levels[: args.levels], maps=T.maps[: args.levels - 1])
    doc = tower_report(T, samples=args.samples, seed=args.seed)
    ok = all(lev.get("matches_prediction") is not False for lev in doc["levels"])
    top = len(T.levels) - 1
    top_group = T.levels[top].group
    if top_group is not None and T.family != "sl2-products":
        vm = non_isolated_mask(top_group)
        if vm.any():
            growth = degree_growth(T, int(vm.nonzero()[0][0]))
            doc["growth"] = growth.to_json()
            ok = ok and growth.monotone and growth.bounds_respected
    if args.check == "v-consistency":
        if top_group is None:
            raise PreconditionError("top level is not materialised")
        if top > 0:
            rep = v_consistency(T, top, 0)
        elif T.family == "klein-cp3":
            rep = quotient_consistency(top_group, klein_base(top_group))
        else:
            raise UsageError("v-consistency needs two levels")
        doc["v_consistency"] = rep.to_json()
        ok = ok and rep.ok
    doc["ok"] = ok
    return doc, ok


def _int_list(text: str) -> list[int]:
    try:
        return [int(p) for p in text.split(",") if p.strip()]
    except ValueError:
        raise UsageError(f"expected comma separated integers, got {text!r}") from None


# -- rendering ---------------------------------------------------------------------


def render_text(doc, indent: int = 0) -> str:
    """Line-per-field rendering of a JSON document (keys sorted)."""
    pad = "  " * indent
    lines = []
    if isinstance(doc, dict):
        for k in sorted(doc):
            v = doc[k]
            if isinstance(v, (dict, list)) and v and any(isinstance(e, (dict, list)) for e in _iter(v)):
                lines.append(f"{pad}{k}:")
                lines.append(render_text(v, indent + 1))
            else:
                lines.append(f"{pad}{k}: {json.dumps(v, sort_keys=True)}")
    elif isinstance(doc, list):
        for i, v in enumerate(doc):
            lines.append(f"{pad}- [{i}]")
            lines.append(render_text(v, indent + 1))
    else:
        lines.append(f"{pad}{json.dumps(doc, sort_keys=True)}")
    return "\n".join(lines)


def _iter(v):
    return v.values() if isinstance(v, dict) else v


def render_csv(rows: list[dict]) -> str:
    cols: list[str] = []
    for r in rows:
        for k in r:
            if k not in cols and (not isinstance(r[k], (dict, list)) or _flat_list(r[k])):
                cols.append(k)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(cols)
    for r in rows:
        out = []
        for c in cols:
            v = r.get(c)
            out.append(" ".join(map(str, v)) if isinstance(v, list) else ("" if v is None else v))
        w.writerow(out)
    return buf.getvalue()


def _flat_list(v) -> bool:
    return isinstance(v, list) and not any(isinstance(e, (dict, list)) for e in v)


def render(doc, fmt: str, csv_rows=None) -> str:
    if fmt == "json":
        return json.dumps(doc, sort_keys=True, indent=1) + "\n"
    if fmt == "text":
        return render_text(doc) + "\n"
    if fmt == "csv":
        return csv_rows() if csv_rows else render_csv([doc])
    raise UsageError(f"format {fmt!r} is not available for this command")


# -- main ----------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--format", choices=["json", "csv", "dot", "text"], default="json")
    common.add_argument("--out", help="write output here instead of stdout")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--workers", type=int, default=None, help="default: available CPUs")
    common.add_argument("--cap-order", type=int)
    common.add_argument("--cap-subgroups", type=int)

    p = _Parser(prog="gengraph", description="Generating graphs of finite groups and quotient towers.")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    a = sub.add_parser("analyze", parents=[common], help="order, V, components, degrees, t and bound")
    a.add_argument("--group")
    a.add_argument("--corpus")

    e = sub.add_parser("export", parents=[common], help="generating graph as JSON or DOT")
    e.add_argument("--group", required=True)

    v = sub.add_parser("verify", parents=[common], help="run a verification suite")
    v.add_argument("--suite", required=True)
    v.add_argument("--group")
    v.add_argument("--corpus")

    t = sub.add_parser("tower", parents=[common], help="densities and degree growth along a tower")
    t.add_argument("--family", required=True)
    t.add_argument("--primes")
    t.add_argument("--levels", type=int)
    t.add_argument("--group", help="';'-separated specs for --family custom")
    t.add_argument("--samples", type=int, help="Monte Carlo cross-check sample count")
    t.add_argument("--check", choices=["v-consistency"])
    return p


def _apply_caps(args) -> None:
    env = os.environ.get("GENGRAPH_CAPS")
    caps = parse_caps(env) if env else get_caps()
    upd = {}
    if args.cap_order is not None:
        upd["order"] = args.cap_order
    if args.cap_subgroups is not None:
        upd["subgroups"] = args.cap_subgroups
    set_caps(dataclasses.replace(caps, **upd))


def _specs(args) -> list[str]:
    from .corpus import load_corpus
    from .group_core.spec import parse_spec

    if args.group and args.corpus:
        raise UsageError("give --group or --corpus, not both")
    if args.group:
        return [str(parse_spec(args.group))]
    return load_corpus(args.corpus or "builtin")


def run(argv: list[str] | None = None) -> tuple[int, str, str | None]:
    """Execute a command; returns (exit code, output text, output path)."""
    args = build_parser().parse_args(argv)
    saved = get_caps()
    try:
        code, text = _dispatch(args)
    finally:
        set_caps(saved)
    return code, text, args.out


def _dispatch(args) -> tuple[int, str]:
    if args.command is None:
        raise UsageError("missing command (analyze, export, verify or tower)")
    _apply_caps(args)
    if args.command == "analyze":
        if args.format == "dot":
            raise UsageError("analyze supports json, csv and text")
        specs = _specs(args)
        docs = [analyze_doc(s) for s in specs]
        if args.group:
            return EXIT_OK, render(docs[0], args.format)
        doc = {"corpus": args.corpus or "builtin", "groups": docs}
        return EXIT_OK, render(doc, args.format, lambda: render_csv(docs))
    if args.command == "export":
        if args.format not in ("json", "dot"):
            raise UsageError("export supports json and dot")
        text = export_doc(args.group, args.format)
        return EXIT_OK, text if text.endswith("\n") else text + "\n"
    if args.command == "verify":
        from .suites import SUITES, run_suite

        if args.suite not in SUITES:
            raise UsageError(f"unknown suite {args.suite!r}; choose from {', '.join(SUITES)}")
        if args.format == "dot":
            raise UsageError("verify supports json, csv and text")
        specs = [] if args.suite == "tower" else _specs(args)
        workers = args.workers or os.cpu_count() or 1
        doc = run_suite(args.suite, specs, seed=args.seed, workers=workers)
        out = render(doc, args.format, lambda: render_csv(doc["results"]))
        return (EXIT_OK if doc["ok"] else EXIT_FAIL), out
    if args.command == "tower":
        if args.format == "dot":
            raise UsageError("tower supports json, csv and text")
        from .profinite_tower import tower_report_csv

        doc, ok = tower_doc(args)
        return (EXIT_OK if ok else EXIT_FAIL), render(doc, args.format, lambda: tower_report_csv(doc))
    raise UsageError(f"unknown command {args.command!r}")  # pragma: no cover


def _reason(kind: str, exc: BaseException) -> str:
    return json.dumps({"error": kind, "reason": str(exc).splitlines()[0] if str(exc) else kind})


def main(argv: list[str] | None = None) -> int:
    try:
        code, text, out = run(argv)
    except UsageError as exc:
        print(_reason("usage", exc), file=sys.stderr)
        return EXIT_USAGE
    except (SpecError, UnsupportedGroup, PreconditionError) as exc:
        print(_reason("usage", exc), file=sys.stderr)
        return EXIT_USAGE
    except CapExceeded as exc:
        print(_reason("cap-exceeded", exc), file=sys.stderr)
        return EXIT_CAP
    except LemmaViolation as exc:
        print(_reason("lemma-violation", exc), file=sys.stderr)
        return EXIT_FAIL
    except GenGraphError as exc:
        print(_reason("error", exc), file=sys.stderr)
        return EXIT_FAIL
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if code == EXIT_FAIL:
        print(json.dumps({"error": "verification-failed", "reason": "see report"}), file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
