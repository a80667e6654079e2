"""Parameter sweeps and side-by-side scenario tables.

A sweep varies one to three probabilities over grids and records the force
(and optionally the posterior) at every grid point in lexicographic grid
order. Points where the ratio is undefined are marked, never fabricated;
infinite ratios are reported but kept out of the gradient summary.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field

from ._format import fmt12, json_number
from .bayesnet import BayesNet, Cpt, enumerate_joint
from .errors import (
    ConditioningError,
    EmptyTableError,
    ImpossibleEvidenceError,
    SweepError,
    UndefinedForceError,
)
from .lr import (
    SecondTestimonyParams,
    SingleTestimonyParams,
    lr_general,
    lr_second_given_first,
    lr_single,
)

TARGETS = ("lr_single", "lr_second_given_first", "lr_general")
OUTPUT_QUANTITIES = ("lr", "posterior", "both")
MAX_ROWS = 10**6

_UNDEFINED_ERRORS = (UndefinedForceError, ConditioningError, ImpossibleEvidenceError)


@dataclass(frozen=True)
class SweepAxis:
    name: str
    values: tuple[float, ...]

    def __post_init__(self):
        if not self.values:
            raise SweepError(f"axis {self.name!r} has no values")
        for v in self.values:
            if not 0.0 <= v <= 1.0:
                raise SweepError(f"axis {self.name!r} value {v!r} outside [0, 1]")


def grid_axis(name: str, start: float, stop: float, step: float) -> SweepAxis:
    if step <= 0:
        raise SweepError(f"axis {name!r}: step must be positive")
    if stop < start:
        raise SweepError(f"axis {name!r}: stop below start")
    n = int(math.floor((stop - start) / step + 1e-9)) + 1
    return SweepAxis(name, tuple(start + k * step for k in range(n)))


@dataclass(frozen=True)
class SweepSpec:
    target: str
    axes: tuple[SweepAxis, ...]
    fixed: dict[str, float] = field(default_factory=dict)
    output_quantity: str = "lr"
    # lr_general only:
    net: BayesNet | None = None
    hypothesis: tuple[str, str] | None = None
    evidence: dict = field(default_factory=dict)
    given: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.target not in TARGETS:
            raise SweepError(f"unknown sweep target {self.target!r}")
        if self.output_quantity not in OUTPUT_QUANTITIES:
            raise SweepError(f"unknown output quantity {self.output_quantity!r}")
        if not 1 <= len(self.axes) <= 3:
            raise SweepError("a sweep varies between one and three parameters")
        names = [a.name for a in self.axes]
        if len(set(names)) != len(names) or set(names) & set(self.fixed):
            raise SweepError("swept and fixed parameter names must be disjoint")
        rows = math.prod(len(a.values) for a in self.axes)
        if rows > MAX_ROWS:
            raise SweepError(f"sweep would produce {rows} rows (cap {MAX_ROWS})")
        if self.target == "lr_general" and (self.net is None or self.hypothesis is None):
            raise SweepError("lr_general sweeps need a model and a hypothesis")

    @property
    def columns(self) -> tuple[str, ...]:
        if self.output_quantity == "both":
            return ("lr", "posterior")
        return (self.output_quantity,)


@dataclass(frozen=True)
class SweepRow:
    params: tuple[float, ...]
    outputs: dict | None  # column -> value; None when the point is undefined
    error: str | None = None


@dataclass(frozen=True)
class SweepSummary:
    quantity: str
    finite_count: int
    inf_count: int
    undefined_count: int
    min: float | None
    max: float | None
    argmin: tuple[float, ...] | None
    argmax: tuple[float, ...] | None
    max_abs_gradient: float | None
    gradient_axis: str | None
    gradient_at: tuple[float, ...] | None  # endpoint with the smaller axis value


@dataclass(frozen=True)
class SweepResult:
    spec: SweepSpec
    rows: tuple[SweepRow, ...]
    summary: SweepSummary


def _cell_override(net: BayesNet, name: str, p_true: float) -> tuple[str, tuple, float]:
    if "|" not in name:
        raise SweepError(
            f"parameter {name!r} must look like 'variable|parent_states' for model sweeps"
        )
    var, row_key = name.split("|", 1)
    if var not in net.variable_names:
        raise SweepError(f"parameter {name!r}: unknown variable {var!r}")
    if net.variable(var).states != ("true", "false"):
        raise SweepError(f"parameter {name!r}: only binary true/false variables supported")
    combo = tuple(s.strip() for s in row_key.split(",")) if row_key else ()
    if combo not in net.cpt(var).rows:
        raise SweepError(f"parameter {name!r}: no CPT row {row_key!r} for {var!r}")
    return var, combo, p_true


def _apply_overrides(net: BayesNet, params: dict) -> BayesNet:
    per_var: dict[str, dict[tuple, float]] = {}
    for name, value in params.items():
        var, combo, p = _cell_override(net, name, value)
        per_var.setdefault(var, {})[combo] = p
    cpts = []
    for name in net.variable_names:
        cpt = net.cpt(name)
        if name in per_var:
            rows = dict(cpt.rows)
            for combo, p in per_var[name].items():
                rows[combo] = (p, 1.0 - p)
            cpt = Cpt(name, cpt.parents, rows)
        cpts.append(cpt)
    return BayesNet(net.variables, cpts)


def _posterior_from_lr(lr: float) -> float:
    # Posterior under even prior odds; infinite force pins the hypothesis.
    if math.isinf(lr):
        return 1.0
    return lr / (1.0 + lr)


def _evaluate_point(spec: SweepSpec, params: dict) -> dict:
    """One grid point -> {column: value}; raises the undefined-family errors."""
    if spec.target == "lr_single":
        try:
            p = SingleTestimonyParams(**params)
        except TypeError as exc:
            raise SweepError(f"bad parameter set for lr_single: {exc}") from exc
        lr = lr_single(p)
        posterior = _posterior_from_lr(lr)
    elif spec.target == "lr_second_given_first":
        try:
            p = SecondTestimonyParams(**params)
        except TypeError as exc:
            raise SweepError(f"bad parameter set for lr_second_given_first: {exc}") from exc
        lr = lr_second_given_first(p)
        posterior = _posterior_from_lr(lr)
    else:
        net = _apply_overrides(spec.net, params)
        lr = lr_general(net, spec.hypothesis, spec.evidence, given=spec.given)
        hvar, hstate = spec.hypothesis
        observed = {**spec.given, **spec.evidence}
        marginal = enumerate_joint(net, observed).marginal(hvar)
        posterior = float(marginal[net.variable(hvar).states.index(hstate)])
    out = {}
    if spec.output_quantity in ("lr", "both"):
        out["lr"] = lr
    if spec.output_quantity in ("posterior", "both"):
        out["posterior"] = posterior
    return out


def _summarize(spec: SweepSpec, rows: tuple[SweepRow, ...]) -> SweepSummary:
    quantity = spec.columns[0]
    finite: list[tuple[float, tuple[float, ...]]] = []
    inf_count = 0
    undefined_count = 0
    value_by_index: dict[tuple[int, ...], float] = {}
    shape = tuple(len(a.values) for a in spec.axes)
    for flat_i, row in enumerate(rows):
        if row.outputs is None:
            undefined_count += 1
            continue
        v = row.outputs[quantity]
        if math.isinf(v):
            inf_count += 1
            continue
        finite.append((v, row.params))
        idx = []
        rem = flat_i
        for size in reversed(shape):
            idx.append(rem % size)
            rem //= size
        value_by_index[tuple(reversed(idx))] = v

    vmin = vmax = argmin = argmax = None
    if finite:
        vmin, argmin = min(finite, key=lambda t: t[0])
        vmax, argmax = max(finite, key=lambda t: t[0])

    # Forward differences along each axis, infinities and undefined points
    # skipped. The reported location is the pair endpoint with the smaller
    # swept value, which does not depend on grid traversal direction.
    best = None  # (gradient, axis_index, params_at_lower_endpoint)
    for d, axis in enumerate(spec.axes):
        for idx, v in value_by_index.items():
            nxt = list(idx)
            nxt[d] += 1
            nxt = tuple(nxt)
            if nxt not in value_by_index:
                continue
            p_lo, p_hi = axis.values[idx[d]], axis.values[nxt[d]]
            if p_hi == p_lo:
                continue
            g = abs(value_by_index[nxt] - v) / abs(p_hi - p_lo)
            lower = idx if p_lo < p_hi else nxt
            params = tuple(
                spec.axes[k].values[lower[k]] for k in range(len(spec.axes))
            )
            key = (-g, d, params)
            if best is None or key < best:
                best = key
    return SweepSummary(
        quantity=quantity,
        finite_count=len(finite),
        inf_count=inf_count,
        undefined_count=undefined_count,
        min=vmin,
        max=vmax,
        argmin=argmin,
        argmax=argmax,
        max_abs_gradient=-best[0] if best else None,
        gradient_axis=spec.axes[best[1]].name if best else None,
        gradient_at=best[2] if best else None,
    )


def run_sweep(spec: SweepSpec) -> SweepResult:
    """Evaluate the target at every grid point, lexicographic in grid indices."""
    rows: list[SweepRow] = []
    axis_names = [a.name for a in spec.axes]
    for values in itertools.product(*(a.values for a in spec.axes)):
        params = dict(spec.fixed)
        params.update(zip(axis_names, values))
        try:
            outputs = _evaluate_point(spec, params)
        except _UNDEFINED_ERRORS as exc:
            rows.append(
                SweepRow(values, None, error=f"{type(exc).__name__}: {exc}")
            )
            continue
        rows.append(SweepRow(values, outputs))
    rows = tuple(rows)
    return SweepResult(spec=spec, rows=rows, summary=_summarize(spec, rows))


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------


def result_to_csv(result: SweepResult) -> str:
    spec = result.spec
    header = [a.name for a in spec.axes] + list(spec.columns)
    lines = [",".join(header)]
    for row in result.rows:
        cells = [fmt12(v) for v in row.params]
        for col in spec.columns:
            cells.append("undefined" if row.outputs is None else fmt12(row.outputs[col]))
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def _summary_dict(s: SweepSummary) -> dict:
    opt = lambda v: None if v is None else json_number(v)
    return {
        "quantity": s.quantity,
        "finite_count": s.finite_count,
        "inf_count": s.inf_count,
        "undefined_count": s.undefined_count,
        "min": opt(s.min),
        "max": opt(s.max),
        "argmin": None if s.argmin is None else [json_number(v) for v in s.argmin],
        "argmax": None if s.argmax is None else [json_number(v) for v in s.argmax],
        "max_abs_gradient": opt(s.max_abs_gradient),
        "gradient_axis": s.gradient_axis,
        "gradient_at": None
        if s.gradient_at is None
        else [json_number(v) for v in s.gradient_at],
    }


def result_to_json(result: SweepResult) -> str:
    spec = result.spec
    doc = {
        "target": spec.target,
        "axes": [
            {"name": a.name, "values": [json_number(v) for v in a.values]}
            for a in spec.axes
        ],
        "fixed": {k: json_number(v) for k, v in sorted(spec.fixed.items())},
        "columns": list(spec.columns),
        "rows": [
            {
                "params": [json_number(v) for v in row.params],
                "outputs": None
                if row.outputs is None
                else {col: json_number(row.outputs[col]) for col in spec.columns},
                "error": row.error,
            }
            for row in result.rows
        ],
        "summary": _summary_dict(result.summary),
    }
    return json.dumps(doc, indent=2) + "\n"


# ---------------------------------------------------------------------------
# Scenario tables
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Scenario:
    """A single fully specified parameter set, labeled for comparison."""

    name: str
    target: str
    params: dict
    net: BayesNet | None = None
    hypothesis: tuple[str, str] | None = None
    evidence: dict = field(default_factory=dict)
    given: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.target not in TARGETS:
            raise SweepError(f"unknown scenario target {self.target!r}")
        if self.target == "lr_general" and (self.net is None or self.hypothesis is None):
            raise SweepError("lr_general scenarios need a model and a hypothesis")


def _scenario_spec(sc: Scenario, output_quantity: str) -> SweepSpec:
    # A scenario is the degenerate sweep over a one-point grid; evaluating it
    # through run_sweep keeps the two code paths from drifting apart.
    first = sorted(sc.params)[0]
    return SweepSpec(
        target=sc.target,
        axes=(SweepAxis(first, (sc.params[first],)),),
        fixed={k: v for k, v in sc.params.items() if k != first},
        output_quantity=output_quantity,
        net=sc.net,
        hypothesis=sc.hypothesis,
        evidence=sc.evidence,
        given=sc.given,
    )


def story_table(scenarios: list[Scenario], output_quantity: str = "lr") -> str:
    """Fixed-width comparison: one labeled column per scenario, one row per
    parameter plus one per output quantity."""
    if not scenarios:
        raise EmptyTableError("no scenarios to tabulate")
    if output_quantity not in OUTPUT_QUANTITIES:
        raise SweepError(f"unknown output quantity {output_quantity!r}")
    names = [sc.name for sc in scenarios]
    if len(set(names)) != len(names):
        raise SweepError("scenario names must be unique")
    for sc in scenarios:
        if not sc.params:
            raise SweepError(f"scenario {sc.name!r} has no parameters")

    results = [run_sweep(_scenario_spec(sc, output_quantity)).rows[0] for sc in scenarios]
    param_names = sorted({p for sc in scenarios for p in sc.params})
    columns = ["lr", "posterior"] if output_quantity == "both" else [output_quantity]

    grid: list[list[str]] = [["quantity"] + names]
    for p in param_names:
        grid.append([p] + [fmt12(sc.params[p]) if p in sc.params else "-" for sc in scenarios])
    for col in columns:
        grid.append(
            [col]
            + [
                "undefined" if row.outputs is None else fmt12(row.outputs[col])
                for row in results
            ]
        )
    widths = [max(len(r[i]) for r in grid) for i in range(len(grid[0]))]
    lines = ["  ".join(cell.ljust(w) for cell, w in zip(r, widths)).rstrip() for r in grid]
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# File formats
# ---------------------------------------------------------------------------


def _axes_from_doc(raw_axes) -> tuple[SweepAxis, ...]:
    axes = []
    for raw in raw_axes:
        if "values" in raw:
            axes.append(SweepAxis(raw["name"], tuple(float(v) for v in raw["values"])))
        elif "grid" in raw:
            g = raw["grid"]
            axes.append(grid_axis(raw["name"], g["start"], g["stop"], g["step"]))
        else:
            raise SweepError(f"axis {raw.get('name')!r} needs 'values' or a 'grid'")
    return tuple(axes)


def _hypothesis_from_doc(raw: str) -> tuple[str, str]:
    if "=" in raw:
        var, state = raw.split("=", 1)
        return var.strip(), state.strip()
    return raw.strip(), "true"


def sweep_spec_from_dict(doc: dict, net: BayesNet | None = None) -> SweepSpec:
    """Build a sweep from a parsed JSON document; the caller supplies the
    loaded model when the document names one."""
    if "target" not in doc or "axes" not in doc:
        raise SweepError("sweep document needs 'target' and 'axes'")
    hypothesis = _hypothesis_from_doc(doc["hypothesis"]) if "hypothesis" in doc else None
    return SweepSpec(
        target=doc["target"],
        axes=_axes_from_doc(doc["axes"]),
        fixed={k: float(v) for k, v in doc.get("fixed", {}).items()},
        output_quantity=doc.get("output_quantity", "lr"),
        net=net,
        hypothesis=hypothesis,
        evidence=dict(doc.get("evidence", {})),
        given=dict(doc.get("given", {})),
    )


def scenarios_from_dict(doc: dict, net: BayesNet | None = None) -> tuple[list[Scenario], str]:
    raw = doc.get("scenarios")
    if not raw:
        raise EmptyTableError("story document has no scenarios")
    scenarios = []
    for item in raw:
        hypothesis = (
            _hypothesis_from_doc(item["hypothesis"]) if "hypothesis" in item else None
        )
        scenarios.append(
            Scenario(
                name=item["name"],
                target=item["target"],
                params={k: float(v) for k, v in item["params"].items()},
                net=net,
                hypothesis=hypothesis,
                evidence=dict(item.get("evidence", {})),
                given=dict(item.get("given", {})),
            )
        )
    return scenarios, doc.get("output_quantity", "lr")
