"""Command-line surface: thin adapters from files and flags to the library.

Results go to stdout, diagnostics to stderr. Exit codes: 0 success, 1 for
validation violations and other domain failures (undefined ratios,
impossible evidence, incomplete specs), 2 for unparseable files or bad
usage. Every printed number carries 12 significant digits and repeated runs
on the same inputs are byte-identical.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from ._format import fmt12, json_number
from .bayesnet import eliminate, load_model_file, net_to_json
from .chart import classify_relevance, export_chart, load_case_file, validate_chart
from .compiler import annotate_from_ancillary, compile_chart, load_compilation_spec
from .errors import (
    ChartParseError,
    ModelParseError,
    SpecParseError,
    WigmoreError,
)
from .lr import (
    SecondTestimonyParams,
    SingleTestimonyParams,
    diagnose_interaction,
    lr_general,
    lr_second_given_first,
    lr_single,
)
from .sensitivity import (
    result_to_csv,
    result_to_json,
    run_sweep,
    scenarios_from_dict,
    story_table,
    sweep_spec_from_dict,
)

_PARSE_ERRORS = (ChartParseError, ModelParseError, SpecParseError)


def _parse_assignments(chunks, what: str) -> dict:
    """var=state[,var=state...] across one or more flag occurrences."""
    out: dict[str, str] = {}
    for chunk in chunks or []:
        for part in chunk.split(","):
            part = part.strip()
            if not part:
                continue
            if "=" not in part:
                raise ValueError(f"{what}: expected var=state, got {part!r}")
            key, value = (s.strip() for s in part.split("=", 1))
            if key in out:
                raise ValueError(f"{what}: {key!r} assigned twice")
            out[key] = value
    return out


def _parse_params(chunks) -> dict:
    return {k: float(v) for k, v in _parse_assignments(chunks, "--params").items()}


def _parse_hypothesis(raw: str) -> tuple[str, str]:
    if "=" in raw:
        var, state = raw.split("=", 1)
        return var.strip(), state.strip()
    return raw.strip(), "true"


def _load_validated_chart(path):
    c = load_case_file(path)
    report = validate_chart(c)
    return c, report


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def cmd_validate(args) -> int:
    c, report = _load_validated_chart(args.case)
    if args.format == "json":
        doc = {
            "ok": report.ok,
            "violations": [
                {"rule": v.rule, "locus": v.locus, "message": v.message}
                for v in report.violations
            ],
        }
        print(json.dumps(doc, indent=2))
    else:
        print(report)
    return 0 if report.ok else 1


def cmd_keylist(args) -> int:
    c, report = _load_validated_chart(args.case)
    if not report.ok:
        print(report, file=sys.stderr)
        return 1
    relevance = classify_relevance(c)
    rows = []
    for e in c.key_list:
        role = relevance.roles.get(e.id, "-") if e.kind == "evidence" else "-"
        rows.append((str(e.id), e.kind, e.evidence_form or "-", role, e.text))
    if args.format == "json":
        doc = {
            "entries": [
                {"id": int(r[0]), "kind": r[1], "form": r[2], "role": r[3], "text": r[4]}
                for r in rows
            ],
            "direct_count": relevance.direct_count,
            "ancillary_count": relevance.ancillary_count,
        }
        print(json.dumps(doc, indent=2))
        return 0
    header = ("id", "kind", "form", "role", "text")
    table = [header] + rows
    widths = [max(len(r[i]) for r in table) for i in range(4)]
    for r in table:
        lead = "  ".join(r[i].ljust(widths[i]) for i in range(4))
        print(f"{lead}  {r[4]}")
    print(
        f"{relevance.direct_count} directly relevant, "
        f"{relevance.ancillary_count} ancillary"
    )
    return 0


def cmd_export(args) -> int:
    c, report = _load_validated_chart(args.case)
    if not report.ok:
        print(report, file=sys.stderr)
        return 1
    sys.stdout.write(export_chart(c, style=args.style))
    return 0


def cmd_compile(args) -> int:
    spec = load_compilation_spec(args.spec)
    model = compile_chart(spec)
    text = net_to_json(model.net)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    n_vars = len(model.net.variables)
    print(
        f"{n_vars} variables ({len(model.report_vars)} reports)",
        file=sys.stderr,
    )
    for (u, v), label, pair in model.defaulted_arcs:
        print(
            f"arc {u}->{v}: no likelihood given, used {label} default "
            f"({fmt12(pair[0])}, {fmt12(pair[1])})",
            file=sys.stderr,
        )
    if model.default_evidence:
        assigns = ", ".join(f"{k}={v}" for k, v in sorted(model.default_evidence.items()))
        print(f"default evidence: {assigns}", file=sys.stderr)
    unsupported = annotate_from_ancillary(spec).unsupported
    if unsupported:
        print(f"{len(unsupported)} judgment(s) with no ancillary support", file=sys.stderr)
    return 0


def cmd_query(args) -> int:
    net = load_model_file(args.model)
    evidence = _parse_assignments(args.evidence, "--evidence")
    dist = eliminate(net, evidence, args.query)
    states = net.variable(args.query).states
    if args.format == "json":
        doc = {
            "variable": args.query,
            "evidence": evidence,
            "posterior": {s: json_number(float(p)) for s, p in zip(states, dist)},
        }
        print(json.dumps(doc, indent=2))
        return 0
    for s, p in zip(states, dist):
        print(f"{args.query}={s}  {fmt12(float(p))}")
    return 0


def cmd_lr(args) -> int:
    if args.single or args.second:
        if args.model or args.query or args.evidence or args.given:
            raise ValueError("closed-form mode uses --params only")
        params = _parse_params(args.params)
        try:
            if args.single:
                target = "lr_single"
                value = lr_single(SingleTestimonyParams(**params))
            else:
                target = "lr_second_given_first"
                value = lr_second_given_first(SecondTestimonyParams(**params))
        except TypeError as exc:
            raise ValueError(f"bad --params for {'--single' if args.single else '--second'}: {exc}")
    else:
        if not args.model or not args.query:
            raise ValueError("general mode needs --model and --query")
        net = load_model_file(args.model)
        target = "lr_general"
        value = lr_general(
            net,
            _parse_hypothesis(args.query),
            _parse_assignments(args.evidence, "--evidence"),
            given=_parse_assignments(args.given, "--given"),
        )
    if args.format == "json":
        print(json.dumps({"target": target, "lr": json_number(value)}, indent=2))
    else:
        print(fmt12(value))
    return 0


def cmd_interaction(args) -> int:
    net = load_model_file(args.model)
    report = diagnose_interaction(
        net,
        _parse_hypothesis(args.query),
        _parse_assignments(args.item_a, "--item-a"),
        _parse_assignments(args.item_b, "--item-b"),
    )
    if args.format == "json":
        print(json.dumps(report.to_dict(), indent=2))
    else:
        print(report)
    return 0


def _load_json_doc(path) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise SpecParseError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise SpecParseError(f"{path} is not valid JSON: {exc}") from exc


def _net_for_doc(doc: dict, spec_path):
    if "model" not in doc:
        return None
    model_path = doc["model"]
    if not os.path.isabs(model_path):
        model_path = os.path.join(os.path.dirname(os.path.abspath(spec_path)), model_path)
    return load_model_file(model_path)


def cmd_sweep(args) -> int:
    doc = _load_json_doc(args.spec)
    spec = sweep_spec_from_dict(doc, _net_for_doc(doc, args.spec))
    result = run_sweep(spec)
    if args.format == "json":
        sys.stdout.write(result_to_json(result))
    else:
        sys.stdout.write(result_to_csv(result))
    return 0


def cmd_stories(args) -> int:
    doc = _load_json_doc(args.spec)
    scenarios, output_quantity = scenarios_from_dict(doc, _net_for_doc(doc, args.spec))
    sys.stdout.write(story_table(scenarios, output_quantity))
    return 0


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="wigmore",
        description="Evidence charts, their compiled Bayes networks, and the "
        "inferential force of evidence.",
    )
    sub = p.add_subparsers(dest="subcommand", required=True)

    s = sub.add_parser("validate", help="check a case file against the chart rules")
    s.add_argument("--case", required=True)
    s.add_argument("--format", choices=("text", "json"), default="text")
    s.set_defaults(func=cmd_validate)

    s = sub.add_parser("keylist", help="list propositions with their evidential roles")
    s.add_argument("--case", required=True)
    s.add_argument("--format", choices=("text", "json"), default="text")
    s.set_defaults(func=cmd_keylist)

    s = sub.add_parser("export", help="emit the chart as a dot graph")
    s.add_argument("--case", required=True)
    s.add_argument("--style", choices=("full", "direct_only"), default="full")
    s.set_defaults(func=cmd_export)

    s = sub.add_parser("compile", help="compile a chart + spec into a model file")
    s.add_argument("--spec", required=True)
    s.add_argument("--out")
    s.set_defaults(func=cmd_compile)

    s = sub.add_parser("query", help="posterior of one variable given evidence")
    s.add_argument("--model", required=True)
    s.add_argument("--query", required=True)
    s.add_argument("--evidence", action="append")
    s.add_argument("--format", choices=("text", "json"), default="text")
    s.set_defaults(func=cmd_query)

    s = sub.add_parser("lr", help="likelihood ratio of evidence on a hypothesis")
    mode = s.add_mutually_exclusive_group()
    mode.add_argument("--single", action="store_true", help="closed-form, one source")
    mode.add_argument("--second", action="store_true", help="closed-form, second source")
    s.add_argument("--params", action="append", help="closed-form parameters, k=v[,...]")
    s.add_argument("--model")
    s.add_argument("--query")
    s.add_argument("--evidence", action="append")
    s.add_argument("--given", action="append")
    s.add_argument("--format", choices=("text", "json"), default="text")
    s.set_defaults(func=cmd_lr)

    s = sub.add_parser("interaction", help="joint vs product force of two evidence items")
    s.add_argument("--model", required=True)
    s.add_argument("--query", required=True)
    s.add_argument("--item-a", action="append", required=True)
    s.add_argument("--item-b", action="append", required=True)
    s.add_argument("--format", choices=("text", "json"), default="text")
    s.set_defaults(func=cmd_interaction)

    s = sub.add_parser("sweep", help="run a parameter sweep from a sweep file")
    s.add_argument("--spec", required=True)
    s.add_argument("--format", choices=("csv", "json"), default="csv")
    s.set_defaults(func=cmd_sweep)

    s = sub.add_parser("stories", help="side-by-side scenario table from a story file")
    s.add_argument("--spec", required=True)
    s.set_defaults(func=cmd_stories)
    return p


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except _PARSE_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except WigmoreError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
