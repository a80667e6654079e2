"""Wigmorean key lists and charts: the structural layer.

A chart is a directed acyclic graph of propositions. Probanda sit at the top
(one ultimate, any number of penultimate and interim), evidence at the bottom,
and reasoning arcs run upward from evidence toward hypotheses. Ancillary
evidence does not join the graph; it attaches to arcs, because it speaks to
the strength of a reasoning step rather than to any probandum.

Charts are immutable after construction. Validation returns violations as
data; only malformed input raises.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property

from .errors import AmbiguousRoleError, ChartParseError

KINDS = ("ultimate_probandum", "penultimate_probandum", "interim_probandum", "evidence")
EVIDENCE_FORMS = ("tangible", "testimonial", "missing", "authoritative_record")
FORCE_LABELS = ("negligible", "weak", "moderate", "strong", "provisionally_forceful")

# Rank in the probative hierarchy. Arcs must not point downward; arcs between
# equals are legal only below the penultimate tier (evidence chains and
# catenated interim chains).
_RANK = {
    "evidence": 0,
    "interim_probandum": 1,
    "penultimate_probandum": 2,
    "ultimate_probandum": 3,
}

DIRECTLY_RELEVANT = "directly_relevant"
ANCILLARY = "ancillary"


@dataclass(frozen=True)
class KeyListEntry:
    """One numbered proposition on the key list."""

    id: int
    text: str
    kind: str
    evidence_form: str | None = None
    alias: str | None = None


@dataclass(frozen=True)
class ReasoningArc:
    """A single reasoning step from one proposition toward another.

    ``from_id``/``to_id`` carry the file format's "from"/"to" fields; "from"
    is a Python keyword.
    """

    from_id: int
    to_id: int
    force_label: str
    generalization: str | None = None

    @property
    def pair(self) -> tuple[int, int]:
        return (self.from_id, self.to_id)


@dataclass(frozen=True)
class AncillaryAttachment:
    """Ancillary evidence pointing at (not joining) a reasoning arc."""

    evidence_id: int
    target_arc: tuple[int, int]


@dataclass(frozen=True)
class Violation:
    rule: str
    locus: str
    message: str
    # Node id used for deterministic ordering of the report.
    locus_id: int = 0

    def __str__(self) -> str:
        return f"[{self.rule}] {self.locus}: {self.message}"


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...]

    @property
    def ok(self) -> bool:
        return not self.violations

    def __str__(self) -> str:
        if self.ok:
            return "0 violations"
        lines = [f"{len(self.violations)} violation(s)"]
        lines += [str(v) for v in self.violations]
        return "\n".join(lines)


@dataclass(frozen=True)
class Chart:
    """A key list plus the arcs and ancillary attachments drawn over it."""

    key_list: tuple[KeyListEntry, ...]
    arcs: tuple[ReasoningArc, ...]
    ancillary: tuple[AncillaryAttachment, ...]

    @cached_property
    def by_id(self) -> dict[int, KeyListEntry]:
        # First occurrence wins; duplicate ids are reported by the validator.
        out: dict[int, KeyListEntry] = {}
        for entry in self.key_list:
            out.setdefault(entry.id, entry)
        return out

    @cached_property
    def arc_pairs(self) -> frozenset[tuple[int, int]]:
        return frozenset(a.pair for a in self.arcs)

    @cached_property
    def successors(self) -> dict[int, tuple[int, ...]]:
        adj: dict[int, list[int]] = {e.id: [] for e in self.key_list}
        for a in self.arcs:
            if a.from_id in adj:
                adj[a.from_id].append(a.to_id)
        return {k: tuple(sorted(v)) for k, v in adj.items()}

    @cached_property
    def attached_ids(self) -> frozenset[int]:
        return frozenset(att.evidence_id for att in self.ancillary)

    def entries_of_kind(self, kind: str) -> tuple[KeyListEntry, ...]:
        return tuple(e for e in self.key_list if e.kind == kind)

    def arc(self, pair: tuple[int, int]) -> ReasoningArc | None:
        for a in self.arcs:
            if a.pair == pair:
                return a
        return None


def chart(key_list, arcs, ancillary=()) -> Chart:
    """Convenience constructor from plain sequences."""
    return Chart(tuple(key_list), tuple(arcs), tuple(ancillary))


# ---------------------------------------------------------------------------
# Case-file parsing
# ---------------------------------------------------------------------------


def _resolve_ref(ref, aliases: dict[str, int], where: str) -> int:
    if isinstance(ref, bool):
        raise ChartParseError(f"{where}: node reference must be an id or alias, got {ref!r}")
    if isinstance(ref, int):
        return ref
    if isinstance(ref, str):
        if ref in aliases:
            return aliases[ref]
        raise ChartParseError(f"{where}: unknown node alias {ref!r}")
    raise ChartParseError(f"{where}: node reference must be an id or alias, got {ref!r}")


def chart_from_dict(doc: dict) -> Chart:
    """Build a Chart from a parsed case-file document.

    String aliases in arcs and attachments are resolved to integer ids here;
    unknown kinds, forms and force labels are parse errors, not violations.
    """
    if not isinstance(doc, dict):
        raise ChartParseError("case file must be a JSON object")
    for key in ("key_list", "arcs", "ancillary"):
        if key not in doc:
            raise ChartParseError(f"case file missing top-level key {key!r}")

    entries: list[KeyListEntry] = []
    aliases: dict[str, int] = {}
    for i, raw in enumerate(doc["key_list"]):
        where = f"key_list[{i}]"
        if not isinstance(raw, dict):
            raise ChartParseError(f"{where}: entry must be an object")
        try:
            node_id = raw["id"]
            text = raw["text"]
            kind = raw["kind"]
        except KeyError as exc:
            raise ChartParseError(f"{where}: missing field {exc.args[0]!r}") from None
        if not isinstance(node_id, int) or isinstance(node_id, bool) or node_id <= 0:
            raise ChartParseError(f"{where}: id must be a positive integer, got {node_id!r}")
        if kind not in KINDS:
            raise ChartParseError(f"{where}: unknown kind {kind!r}")
        form = raw.get("evidence_form")
        if form is not None and form not in EVIDENCE_FORMS:
            raise ChartParseError(f"{where}: unknown evidence_form {form!r}")
        alias = raw.get("alias")
        if alias is not None:
            if not isinstance(alias, str) or not alias:
                raise ChartParseError(f"{where}: alias must be a nonempty string")
            if alias in aliases:
                raise ChartParseError(f"{where}: duplicate alias {alias!r}")
            aliases[alias] = node_id
        entries.append(KeyListEntry(node_id, str(text), kind, form, alias))

    arcs: list[ReasoningArc] = []
    for i, raw in enumerate(doc["arcs"]):
        where = f"arcs[{i}]"
        if not isinstance(raw, dict):
            raise ChartParseError(f"{where}: arc must be an object")
        for fld in ("from", "to", "force_label"):
            if fld not in raw:
                raise ChartParseError(f"{where}: missing field {fld!r}")
        label = raw["force_label"]
        if label not in FORCE_LABELS:
            raise ChartParseError(f"{where}: unknown force_label {label!r}")
        arcs.append(
            ReasoningArc(
                _resolve_ref(raw["from"], aliases, where),
                _resolve_ref(raw["to"], aliases, where),
                label,
                raw.get("generalization"),
            )
        )

    attachments: list[AncillaryAttachment] = []
    for i, raw in enumerate(doc["ancillary"]):
        where = f"ancillary[{i}]"
        if not isinstance(raw, dict):
            raise ChartParseError(f"{where}: attachment must be an object")
        for fld in ("evidence_id", "target_arc"):
            if fld not in raw:
                raise ChartParseError(f"{where}: missing field {fld!r}")
        target = raw["target_arc"]
        if not isinstance(target, (list, tuple)) or len(target) != 2:
            raise ChartParseError(f"{where}: target_arc must be a [from, to] pair")
        attachments.append(
            AncillaryAttachment(
                _resolve_ref(raw["evidence_id"], aliases, where),
                (
                    _resolve_ref(target[0], aliases, f"{where}.target_arc"),
                    _resolve_ref(target[1], aliases, f"{where}.target_arc"),
                ),
            )
        )

    return Chart(tuple(entries), tuple(arcs), tuple(attachments))


def load_case_file(path) -> Chart:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ChartParseError(f"cannot read case file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ChartParseError(f"case file {path} is not valid JSON: {exc}") from exc
    return chart_from_dict(doc)


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------


def _topological_order(node_ids, arcs) -> list[int] | None:
    """Kahn's algorithm; None when the arc graph has a cycle."""
    indeg = {n: 0 for n in node_ids}
    adj: dict[int, list[int]] = {n: [] for n in node_ids}
    for a in arcs:
        if a.from_id in adj and a.to_id in indeg:
            adj[a.from_id].append(a.to_id)
            indeg[a.to_id] += 1
    queue = sorted(n for n, d in indeg.items() if d == 0)
    order: list[int] = []
    while queue:
        n = queue.pop(0)
        order.append(n)
        for m in sorted(adj[n]):
            indeg[m] -= 1
            if indeg[m] == 0:
                queue.append(m)
        queue.sort()
    if len(order) != len(node_ids):
        return None
    return order


def _reachable_from(start: int, successors: dict[int, tuple[int, ...]]) -> set[int]:
    seen: set[int] = set()
    stack = [start]
    while stack:
        n = stack.pop()
        for m in successors.get(n, ()):
            if m not in seen:
                seen.add(m)
                stack.append(m)
    return seen


def _evidence_roles(c: Chart) -> tuple[set[int], set[int]]:
    """Return (direct, ancillary) id sets over evidence nodes.

    Direct: a directed path reaches a penultimate or ultimate probandum.
    Ancillary: the node carries an attachment, or reaches an attached node
    along arcs passing only through evidence nodes (an ancillary chain).
    A node may appear in both sets; callers decide how to report that.
    """
    probanda = {
        e.id
        for e in c.key_list
        if e.kind in ("penultimate_probandum", "ultimate_probandum")
    }
    evidence_ids = {e.id for e in c.key_list if e.kind == "evidence"}
    direct: set[int] = set()
    anc: set[int] = set(att.evidence_id for att in c.ancillary if att.evidence_id in evidence_ids)
    for eid in evidence_ids:
        if _reachable_from(eid, c.successors) & probanda:
            direct.add(eid)

    # Walk ancillary chains backwards: an evidence node whose arc target is an
    # ancillary evidence node is itself ancillary.
    pred: dict[int, set[int]] = {}
    for a in c.arcs:
        if a.from_id in evidence_ids and a.to_id in evidence_ids:
            pred.setdefault(a.to_id, set()).add(a.from_id)
    frontier = list(anc)
    while frontier:
        n = frontier.pop()
        for p in pred.get(n, ()):
            if p not in anc:
                anc.add(p)
                frontier.append(p)
    return direct, anc


def validate_chart(c: Chart) -> ValidationReport:
    """Check every chart invariant; violations are returned, never raised."""
    out: list[Violation] = []

    def add(rule: str, locus: str, message: str, locus_id: int = 0) -> None:
        out.append(Violation(rule, locus, message, locus_id))

    seen_ids: set[int] = set()
    for e in c.key_list:
        if e.id in seen_ids:
            add("duplicate_id", f"node {e.id}", "id appears more than once in the key list", e.id)
        seen_ids.add(e.id)

    for e in c.key_list:
        if e.kind == "evidence" and e.evidence_form is None:
            add("evidence_form", f"node {e.id}", "evidence node lacks an evidence_form", e.id)
        if e.kind != "evidence" and e.evidence_form is not None:
            add("evidence_form", f"node {e.id}", f"{e.kind} node carries an evidence_form", e.id)

    ultimates = c.entries_of_kind("ultimate_probandum")
    if len(ultimates) != 1:
        locus_id = ultimates[0].id if ultimates else 0
        add(
            "single_ultimate",
            "key list",
            f"expected exactly one ultimate probandum, found {len(ultimates)}",
            locus_id,
        )

    known = c.by_id
    for a in c.arcs:
        locus = f"arc {a.from_id}->{a.to_id}"
        missing = [n for n in a.pair if n not in known]
        if missing:
            add("arc_endpoints", locus, f"arc references unknown node(s) {missing}", a.from_id)
            continue
        if a.from_id == a.to_id:
            add("self_loop", locus, "arc loops a node onto itself", a.from_id)
            continue
        src, dst = known[a.from_id], known[a.to_id]
        r_src, r_dst = _RANK[src.kind], _RANK[dst.kind]
        if r_src > r_dst:
            add(
                "direction",
                locus,
                f"downward arc: {src.kind} may not point to {dst.kind}",
                a.from_id,
            )
        elif r_src == r_dst and r_src >= _RANK["penultimate_probandum"]:
            add(
                "direction",
                locus,
                f"arc between two {src.kind} nodes is not an upward step",
                a.from_id,
            )

    if _topological_order(list(known), c.arcs) is None:
        add("acyclic", "arc graph", "reasoning arcs contain a cycle", 0)

    for att in c.ancillary:
        locus = f"attachment {att.evidence_id}->({att.target_arc[0]}->{att.target_arc[1]})"
        if att.target_arc not in c.arc_pairs:
            add(
                "attachment_target",
                locus,
                "target_arc does not name an existing arc",
                att.evidence_id,
            )
        src = known.get(att.evidence_id)
        if src is None or src.kind != "evidence":
            add(
                "attachment_source",
                locus,
                "evidence_id does not name an evidence node",
                att.evidence_id,
            )
            continue
        for a in c.arcs:
            if a.from_id == att.evidence_id and known.get(a.to_id) is not None:
                if known[a.to_id].kind != "evidence":
                    add(
                        "ancillary_on_direct",
                        locus,
                        f"attached evidence {att.evidence_id} also arcs into probandum {a.to_id}",
                        att.evidence_id,
                    )

    direct, anc = _evidence_roles(c)
    for e in c.key_list:
        if e.kind != "evidence":
            continue
        if e.id in direct and e.id in anc:
            add(
                "ambiguous_role",
                f"node {e.id}",
                "evidence is both directly relevant and on an ancillary chain",
                e.id,
            )
        elif e.id not in direct and e.id not in anc:
            add(
                "orphan_evidence",
                f"node {e.id}",
                "evidence reaches no probandum and supports no ancillary attachment",
                e.id,
            )

    ultimate_id = ultimates[0].id if len(ultimates) == 1 else None
    for e in c.entries_of_kind("penultimate_probandum"):
        if ultimate_id is not None and (e.id, ultimate_id) not in c.arc_pairs:
            add(
                "penultimate_unlinked",
                f"node {e.id}",
                "penultimate probandum has no arc to the ultimate probandum",
                e.id,
            )

    for e in c.entries_of_kind("interim_probandum"):
        has_in = any(a.to_id == e.id for a in c.arcs)
        has_out = any(a.from_id == e.id for a in c.arcs)
        if not (has_in and has_out):
            add(
                "interim_disconnect",
                f"node {e.id}",
                "interim probandum must both receive and emit arcs",
                e.id,
            )

    out.sort(key=lambda v: (v.locus_id, v.rule, v.locus))
    return ValidationReport(tuple(out))


# ---------------------------------------------------------------------------
# Relevance classification
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RelevanceReport:
    roles: dict[int, str] = field(default_factory=dict)

    @property
    def direct_count(self) -> int:
        return sum(1 for r in self.roles.values() if r == DIRECTLY_RELEVANT)

    @property
    def ancillary_count(self) -> int:
        return sum(1 for r in self.roles.values() if r == ANCILLARY)

    def __str__(self) -> str:
        return f"direct: {self.direct_count}  ancillary: {self.ancillary_count}"


def classify_relevance(c: Chart) -> RelevanceReport:
    """Partition evidence nodes into directly relevant vs ancillary.

    A node holding both roles is never silently reclassified; it raises.
    """
    direct, anc = _evidence_roles(c)
    both = sorted(direct & anc)
    if both:
        raise AmbiguousRoleError(
            f"evidence node(s) {both} are both directly relevant and ancillary"
        )
    roles: dict[int, str] = {}
    for e in c.key_list:
        if e.kind != "evidence":
            continue
        if e.id in direct:
            roles[e.id] = DIRECTLY_RELEVANT
        elif e.id in anc:
            roles[e.id] = ANCILLARY
        else:
            roles[e.id] = ANCILLARY  # unreachable on validated charts
    return RelevanceReport(roles)


# ---------------------------------------------------------------------------
# Dot export
# ---------------------------------------------------------------------------

_SHAPES = {
    "ultimate_probandum": "doubleoctagon",
    "penultimate_probandum": "box",
    "interim_probandum": "circle",
    "evidence": "plaintext",
}

STYLE_FULL = "full"
STYLE_DIRECT_ONLY = "direct_only"


def _dot_escape(text: str) -> str:
    return text.replace("\\", "\\\\").replace('"', '\\"')


def export_chart(c: Chart, style: str = STYLE_FULL) -> str:
    """Render the chart as a dot-format digraph (UTF-8, LF, deterministic).

    ``direct_only`` omits ancillary evidence and attachments. In the full
    style an arc bearing attachments is split at a midpoint pseudo-node so
    the ancillary edges terminate at the arc itself, not at a probandum.
    """
    if style not in (STYLE_FULL, STYLE_DIRECT_ONLY):
        raise ValueError(f"unknown export style {style!r}")

    anc_ids: set[int] = set()
    if style == STYLE_DIRECT_ONLY:
        _, anc = _evidence_roles(c)
        anc_ids = anc

    attached_arcs: dict[tuple[int, int], list[int]] = {}
    if style == STYLE_FULL:
        for att in c.ancillary:
            attached_arcs.setdefault(att.target_arc, []).append(att.evidence_id)

    lines = ["digraph chart {", "  rankdir=BT;"]
    for e in sorted(c.key_list, key=lambda e: e.id):
        if e.id in anc_ids:
            continue
        label = f"{e.id}: {e.text}"
        if e.kind == "evidence":
            label = "∞ " + label  # evidence marker
        lines.append(f'  n{e.id} [label="{_dot_escape(label)}" shape={_SHAPES[e.kind]}];')
    for pair, ids in sorted(attached_arcs.items()):
        lines.append(f"  a{pair[0]}_{pair[1]} [shape=point];")
    for a in sorted(c.arcs, key=lambda a: a.pair):
        if a.from_id in anc_ids or a.to_id in anc_ids:
            continue
        if a.pair in attached_arcs:
            mid = f"a{a.from_id}_{a.to_id}"
            lines.append(f"  n{a.from_id} -> {mid} [label=\"{a.force_label}\" arrowhead=none];")
            lines.append(f"  {mid} -> n{a.to_id};")
        else:
            lines.append(f"  n{a.from_id} -> n{a.to_id} [label=\"{a.force_label}\"];")
    if style == STYLE_FULL:
        for att in sorted(c.ancillary, key=lambda t: (t.evidence_id, t.target_arc)):
            if att.target_arc in attached_arcs:
                mid = f"a{att.target_arc[0]}_{att.target_arc[1]}"
                lines.append(f"  n{att.evidence_id} -> {mid} [style=dashed];")
    lines.append("}")
    return "\n".join(lines) + "\n"
