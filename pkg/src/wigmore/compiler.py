"""Compile a validated chart into a discrete Bayesian network.

Chart arcs record the inductive direction (evidence toward hypotheses); the
network needs the generative direction, so every arc is reversed and its
likelihood pair becomes the child's CPT. Testimonial and missing evidence
expand into an event variable plus a report variable whose rows are the
source's hit/false-positive probabilities; ancillary evidence contributes no
variables at all and survives only as provenance on the CPT entries it was
used to judge.
"""

from __future__ import annotations

import itertools
import json
import os
from dataclasses import dataclass, field

from .bayesnet import BayesNet, Cpt, Variable, pair_cpt, prior_cpt
from .chart import ANCILLARY, Chart, classify_relevance, load_case_file, validate_chart
from .errors import CompileError, CompletenessError, InvalidNetworkError, SpecParseError

# Likelihood pair (if parent true, if parent false) assumed for an arc when
# the analyst supplies no explicit number. Arbitrary by design: they make a
# chart runnable, and every use is flagged so the analyst stays responsible.
DEFAULT_FORCE_LIKELIHOODS = {
    "negligible": (0.55, 0.45),
    "weak": (0.7, 0.3),
    "moderate": (0.8, 0.2),
    "strong": (0.9, 0.1),
    "provisionally_forceful": (0.95, 0.05),
}

DEFAULT_PRIOR = 0.5

# Evidence forms whose report layer is mandatory. Tangible and
# authoritative-record items get a report variable only when the analyst
# supplies an authenticity pair; otherwise their event is treated as
# directly observable.
_REPORT_REQUIRED_FORMS = ("testimonial", "missing")


@dataclass(frozen=True)
class CredibilityParams:
    """Hit / false-positive probability pair for one source.

    ``h < f`` is legal; it models a negatively credible source whose report
    argues against the event.
    """

    h: float
    f: float

    def __post_init__(self):
        for label, v in (("h", self.h), ("f", self.f)):
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"credibility {label}={v!r} outside [0, 1]")


@dataclass(frozen=True)
class EventTable:
    """Explicit conditional table for one event over declared parent nodes.

    Needed when an event has several parents (several chart arcs out of the
    node, or declared interaction parents beyond the chart arcs, which is how
    conditional nonindependence between evidence lines is modeled).
    """

    parents: tuple[int, ...]
    rows: dict[tuple[str, ...], float]


@dataclass(frozen=True)
class CompilationSpec:
    chart: Chart
    arc_likelihoods: dict[tuple[int, int], tuple[float, float]] = field(default_factory=dict)
    credibility: dict[int, CredibilityParams] = field(default_factory=dict)
    priors: dict[int, float] = field(default_factory=dict)
    event_tables: dict[int, EventTable] = field(default_factory=dict)
    force_defaults: dict[str, tuple[float, float]] = field(
        default_factory=lambda: dict(DEFAULT_FORCE_LIKELIHOODS)
    )


@dataclass(frozen=True)
class CompiledModel:
    net: BayesNet
    event_vars: dict[int, str]  # probanda and direct evidence events
    report_vars: dict[int, str]
    default_evidence: dict[str, str]
    defaulted_arcs: tuple[tuple[tuple[int, int], str, tuple[float, float]], ...]
    provenance: dict[str, tuple[int, ...]]  # CPT descriptor -> ancillary ids


def node_var_name(chart: Chart, node_id: int) -> str:
    entry = chart.by_id.get(node_id)
    if entry is not None and entry.alias:
        return entry.alias
    return f"n{node_id}"


def _bn_parents(chart: Chart, included: set[int]) -> dict[int, list[int]]:
    """Reversed chart arcs: node -> list of its network parents, arc order."""
    parents: dict[int, list[int]] = {n: [] for n in included}
    for arc in chart.arcs:
        if arc.from_id in included and arc.to_id in included:
            parents[arc.from_id].append(arc.to_id)
    return parents


def compile_chart(spec: CompilationSpec) -> CompiledModel:
    """Build the network realizing a chart under a compilation spec.

    Raises :class:`CompileError` when the chart is invalid and
    :class:`CompletenessError` when a required likelihood, table or
    credibility pair is missing.
    """
    c = spec.chart
    report = validate_chart(c)
    if not report.ok:
        raise CompileError(f"chart is invalid: {report}")
    roles = classify_relevance(c)

    probanda = [e for e in c.key_list if e.kind != "evidence"]
    direct = [
        e for e in c.key_list if e.kind == "evidence" and roles.roles[e.id] != ANCILLARY
    ]
    included = {e.id for e in probanda} | {e.id for e in direct}
    chart_parents = _bn_parents(c, included)

    names: dict[int, str] = {}
    for e in itertools.chain(probanda, direct):
        name = node_var_name(c, e.id)
        if name in names.values():
            raise CompileError(f"variable name {name!r} is not unique")
        names[e.id] = name

    variables: list[Variable] = []
    cpts: list[Cpt] = []
    defaulted: list[tuple[tuple[int, int], str, tuple[float, float]]] = []

    def arc_pair(u: int, v: int) -> tuple[float, float]:
        if (u, v) in spec.arc_likelihoods:
            return spec.arc_likelihoods[(u, v)]
        arc = c.arc((u, v))
        if arc is None or arc.force_label not in spec.force_defaults:
            raise CompletenessError(
                f"no likelihood pair for arc {u}->{v} and no force-label default"
            )
        pair = spec.force_defaults[arc.force_label]
        defaulted.append(((u, v), arc.force_label, pair))
        return pair

    ordered = sorted(probanda, key=lambda e: e.id) + sorted(direct, key=lambda e: e.id)
    for e in ordered:
        name = names[e.id]
        variables.append(Variable(name))
        bn_parents = chart_parents[e.id]
        table = spec.event_tables.get(e.id)
        if table is not None:
            clashing = [p for p in bn_parents if (e.id, p) in spec.arc_likelihoods]
            if clashing:
                raise CompileError(
                    f"node {e.id} has both an event table and arc likelihood(s) "
                    f"for parent(s) {clashing}"
                )
            missing_parents = [p for p in bn_parents if p not in table.parents]
            if missing_parents:
                raise CompileError(
                    f"event table for node {e.id} omits chart parent(s) {missing_parents}"
                )
            unknown = [p for p in table.parents if p not in included]
            if unknown:
                raise CompileError(
                    f"event table for node {e.id} references excluded node(s) {unknown}"
                )
            parent_names = [names[p] for p in table.parents]
            rows = {}
            for combo in itertools.product(("true", "false"), repeat=len(table.parents)):
                if combo not in table.rows:
                    raise CompletenessError(
                        f"event table for node {e.id} misses row {','.join(combo)}"
                    )
                p_true = table.rows[combo]
                rows[combo] = (p_true, 1.0 - p_true)
            cpts.append(Cpt(name, parent_names, rows))
        elif len(bn_parents) == 0:
            cpts.append(prior_cpt(name, spec.priors.get(e.id, DEFAULT_PRIOR)))
        elif len(bn_parents) == 1:
            a, b = arc_pair(e.id, bn_parents[0])
            cpts.append(pair_cpt(name, names[bn_parents[0]], a, b))
        else:
            raise CompletenessError(
                f"node {e.id} has several parents {bn_parents}; an explicit event table is required"
            )

    report_vars: dict[int, str] = {}
    default_evidence: dict[str, str] = {}
    for e in sorted(direct, key=lambda e: e.id):
        cred = spec.credibility.get(e.id)
        if cred is None:
            if e.evidence_form in _REPORT_REQUIRED_FORMS:
                raise CompletenessError(
                    f"{e.evidence_form} evidence node {e.id} has no credibility (h, f) pair"
                )
            # Tangible or record evidence without an authenticity pair: the
            # event itself is taken as observed.
            default_evidence[names[e.id]] = "true"
            continue
        report_name = f"{names[e.id]}_report"
        if report_name in names.values() or any(v.name == report_name for v in variables):
            raise CompileError(f"report variable name {report_name!r} collides")
        variables.append(Variable(report_name))
        cpts.append(pair_cpt(report_name, names[e.id], cred.h, cred.f))
        report_vars[e.id] = report_name
        default_evidence[report_name] = "false" if e.evidence_form == "missing" else "true"

    try:
        net = BayesNet(variables, cpts)
    except InvalidNetworkError as exc:
        raise CompileError(f"compiled network is invalid: {exc}") from exc

    provenance = {
        entry.descriptor: entry.basis
        for entry in annotate_from_ancillary(spec).entries
        if entry.basis
    }
    return CompiledModel(
        net=net,
        event_vars=names,
        report_vars=report_vars,
        default_evidence=default_evidence,
        defaulted_arcs=tuple(defaulted),
        provenance=provenance,
    )


# ---------------------------------------------------------------------------
# Provenance: which ancillary evidence backs which judged number
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AnnotationEntry:
    descriptor: str  # CPT entry, e.g. "P(sacco_at_scene | sacco_shot_berardelli)"
    source: str  # where the number came from in the spec
    basis: tuple[int, ...]  # ancillary node ids judged to support it


@dataclass(frozen=True)
class AnnotationReport:
    entries: tuple[AnnotationEntry, ...]

    @property
    def supported(self) -> tuple[AnnotationEntry, ...]:
        return tuple(e for e in self.entries if e.basis)

    @property
    def unsupported(self) -> tuple[AnnotationEntry, ...]:
        return tuple(e for e in self.entries if not e.basis)

    def __str__(self) -> str:
        lines = []
        for e in self.supported:
            ids = ", ".join(str(i) for i in e.basis)
            lines.append(f"{e.descriptor} <- ancillary {ids}")
        if self.unsupported:
            lines.append("unsupported judgments:")
            lines += [f"  {e.descriptor}" for e in self.unsupported]
        return "\n".join(lines) if lines else "no explicit likelihoods"


def annotate_from_ancillary(spec: CompilationSpec) -> AnnotationReport:
    """Audit every explicit likelihood in the spec against the attachments.

    An attachment pointing at arc (u, v) is read as the judgmental basis for
    the arc's likelihood pair, for the source node's credibility pair, and
    for an explicit event table on u, since all three quantify that chain.
    Explicit numbers nothing points at land in the unsupported list.
    """
    c = spec.chart
    report = validate_chart(c)
    if not report.ok:
        raise CompileError(f"chart is invalid: {report}")

    by_arc: dict[tuple[int, int], list[int]] = {}
    by_source: dict[int, list[int]] = {}
    for att in c.ancillary:
        by_arc.setdefault(att.target_arc, []).append(att.evidence_id)
        by_source.setdefault(att.target_arc[0], []).append(att.evidence_id)

    def name(nid: int) -> str:
        return node_var_name(c, nid)

    entries: list[AnnotationEntry] = []
    for (u, v) in sorted(spec.arc_likelihoods):
        entries.append(
            AnnotationEntry(
                descriptor=f"P({name(u)} | {name(v)})",
                source=f"arc {u}->{v}",
                basis=tuple(sorted(set(by_arc.get((u, v), ())))),
            )
        )
    for u in sorted(spec.event_tables):
        parents = ", ".join(name(p) for p in spec.event_tables[u].parents)
        entries.append(
            AnnotationEntry(
                descriptor=f"P({name(u)} | {parents})",
                source=f"table {u}",
                basis=tuple(sorted(set(by_source.get(u, ())))),
            )
        )
    for u in sorted(spec.credibility):
        entries.append(
            AnnotationEntry(
                descriptor=f"P({name(u)}_report | {name(u)})",
                source=f"credibility {u}",
                basis=tuple(sorted(set(by_source.get(u, ())))),
            )
        )
    for u in sorted(spec.priors):
        entries.append(
            AnnotationEntry(descriptor=f"P({name(u)})", source=f"prior {u}", basis=())
        )
    return AnnotationReport(tuple(entries))


# ---------------------------------------------------------------------------
# Spec file parsing
# ---------------------------------------------------------------------------


def _resolve_node(ref, c: Chart, where: str) -> int:
    aliases = {e.alias: e.id for e in c.key_list if e.alias}
    if isinstance(ref, int) and not isinstance(ref, bool):
        return ref
    if isinstance(ref, str):
        if ref in aliases:
            return aliases[ref]
        if ref.isdigit():
            return int(ref)
    raise SpecParseError(f"{where}: cannot resolve node reference {ref!r}")


def _check_unit(value, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SpecParseError(f"{where}: expected a probability, got {value!r}")
    if not 0.0 <= value <= 1.0:
        raise SpecParseError(f"{where}: probability {value!r} outside [0, 1]")
    return float(value)


def spec_from_dict(doc: dict, c: Chart) -> CompilationSpec:
    if not isinstance(doc, dict):
        raise SpecParseError("compilation spec must be a JSON object")

    arc_likelihoods: dict[tuple[int, int], tuple[float, float]] = {}
    for key, raw in doc.get("arc_likelihoods", {}).items():
        where = f"arc_likelihoods[{key!r}]"
        if "->" not in key:
            raise SpecParseError(f"{where}: key must look like 'from->to'")
        lhs, rhs = key.split("->", 1)
        pair = (_resolve_node(lhs.strip(), c, where), _resolve_node(rhs.strip(), c, where))
        if not isinstance(raw, dict) or "if_true" not in raw or "if_false" not in raw:
            raise SpecParseError(f"{where}: value needs 'if_true' and 'if_false'")
        arc_likelihoods[pair] = (
            _check_unit(raw["if_true"], where),
            _check_unit(raw["if_false"], where),
        )

    credibility: dict[int, CredibilityParams] = {}
    for key, raw in doc.get("credibility", {}).items():
        where = f"credibility[{key!r}]"
        nid = _resolve_node(key, c, where)
        if not isinstance(raw, dict) or "h" not in raw or "f" not in raw:
            raise SpecParseError(f"{where}: value needs 'h' and 'f'")
        credibility[nid] = CredibilityParams(
            _check_unit(raw["h"], where), _check_unit(raw["f"], where)
        )

    priors = {
        _resolve_node(key, c, f"priors[{key!r}]"): _check_unit(v, f"priors[{key!r}]")
        for key, v in doc.get("priors", {}).items()
    }

    event_tables: dict[int, EventTable] = {}
    for key, raw in doc.get("event_tables", {}).items():
        where = f"event_tables[{key!r}]"
        nid = _resolve_node(key, c, where)
        if not isinstance(raw, dict) or "parents" not in raw or "rows" not in raw:
            raise SpecParseError(f"{where}: value needs 'parents' and 'rows'")
        parents = tuple(_resolve_node(p, c, where) for p in raw["parents"])
        rows = {}
        for combo_key, p_true in raw["rows"].items():
            combo = tuple(s.strip() for s in combo_key.split(",")) if combo_key else ()
            if len(combo) != len(parents) or any(s not in ("true", "false") for s in combo):
                raise SpecParseError(f"{where}: bad row key {combo_key!r}")
            rows[combo] = _check_unit(p_true, f"{where}.rows[{combo_key!r}]")
        event_tables[nid] = EventTable(parents, rows)

    force_defaults = dict(DEFAULT_FORCE_LIKELIHOODS)
    if "force_defaults" in doc:
        force_defaults = {}
        for label, pair in doc["force_defaults"].items():
            where = f"force_defaults[{label!r}]"
            if not isinstance(pair, (list, tuple)) or len(pair) != 2:
                raise SpecParseError(f"{where}: expected an [if_true, if_false] pair")
            force_defaults[label] = (
                _check_unit(pair[0], where),
                _check_unit(pair[1], where),
            )

    return CompilationSpec(
        chart=c,
        arc_likelihoods=arc_likelihoods,
        credibility=credibility,
        priors=priors,
        event_tables=event_tables,
        force_defaults=force_defaults,
    )


def load_compilation_spec(path) -> CompilationSpec:
    """Load a spec file; its 'chart' key names the case file, relative paths
    resolved against the spec file's directory."""
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise SpecParseError(f"cannot read spec file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise SpecParseError(f"spec file {path} is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict) or "chart" not in doc:
        raise SpecParseError("compilation spec needs a 'chart' key naming the case file")
    chart_path = doc["chart"]
    if not os.path.isabs(chart_path):
        chart_path = os.path.join(os.path.dirname(os.path.abspath(path)), chart_path)
    return spec_from_dict(doc, load_case_file(chart_path))
