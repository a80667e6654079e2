"""Likelihood ratios on charts' compiled networks.

Two independent routes to the same numbers: closed forms for the
one-witness and catenated two-witness patterns, and ``lr_general``, which
only knows how to clamp evidence and enumerate. Ratios live on the extended
reals: a possible report that is impossible under the complement hypothesis
has infinite force, and 0/0 is refused rather than guessed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .bayesnet import BayesNet, probability_of
from .chart import KeyListEntry, ReasoningArc, chart
from .compiler import CompilationSpec, CompiledModel, CredibilityParams, compile_chart
from .errors import ConditioningError, UndefinedForceError, WigmoreError

_CHAIN_TOL = 1e-9


def _check_unit_fields(obj, fields):
    for name in fields:
        v = getattr(obj, name)
        if not 0.0 <= v <= 1.0:
            raise ValueError(f"{name}={v!r} outside [0, 1]")


@dataclass(frozen=True)
class SingleTestimonyParams:
    """One source reporting one event bearing on the hypothesis.

    p_e_given_h / p_e_given_not_h describe the event under each branch of
    the hypothesis; h and f are the source's hit and false-positive rates.
    """

    p_e_given_h: float
    p_e_given_not_h: float
    h: float
    f: float

    def __post_init__(self):
        _check_unit_fields(self, ("p_e_given_h", "p_e_given_not_h", "h", "f"))


@dataclass(frozen=True)
class SecondTestimonyParams:
    """A second source whose event bears on the first source's event.

    The first four fields parameterize the first testimony exactly as in
    :class:`SingleTestimonyParams`; p_f_given_e / p_f_given_not_e condition
    the second event on the first, and (h2, f2) judge the second source.
    """

    p_e_given_h: float
    p_e_given_not_h: float
    h1: float
    f1: float
    p_f_given_e: float
    p_f_given_not_e: float
    h2: float
    f2: float

    def __post_init__(self):
        _check_unit_fields(
            self,
            (
                "p_e_given_h",
                "p_e_given_not_h",
                "h1",
                "f1",
                "p_f_given_e",
                "p_f_given_not_e",
                "h2",
                "f2",
            ),
        )

    @property
    def first(self) -> SingleTestimonyParams:
        return SingleTestimonyParams(self.p_e_given_h, self.p_e_given_not_h, self.h1, self.f1)


def _ratio(num: float, den: float) -> float:
    if den == 0.0:
        if num == 0.0:
            raise UndefinedForceError("0/0: report impossible under both branches")
        return math.inf
    return num / den


def lr_single(params: SingleTestimonyParams) -> float:
    """Force of the first report on the hypothesis.

    P(report | branch) = P(E | branch) * h + P(not E | branch) * f, so the
    ratio folds event uncertainty and source credibility into one number.
    """
    p1, p0 = params.p_e_given_h, params.p_e_given_not_h
    num = p1 * params.h + (1.0 - p1) * params.f
    den = p0 * params.h + (1.0 - p0) * params.f
    return _ratio(num, den)


def lr_second_given_first(params: SecondTestimonyParams) -> float:
    """Force of the second report once the first report is already in.

    Conditioning the first event on its own report requires that report to be
    possible under both hypothesis branches; otherwise the posterior used in
    the chain is undefined and a ConditioningError names the dead branch.
    """
    p1, p0 = params.p_e_given_h, params.p_e_given_not_h
    a1 = p1 * params.h1 + (1.0 - p1) * params.f1  # P(first report | H)
    a0 = p0 * params.h1 + (1.0 - p0) * params.f1
    if a1 == 0.0:
        raise ConditioningError("first report impossible under the hypothesis branch")
    if a0 == 0.0:
        raise ConditioningError("first report impossible under the complement branch")
    pe1 = p1 * params.h1 / a1  # P(E | first report, H)
    pe0 = p0 * params.h1 / a0
    q1 = pe1 * params.p_f_given_e + (1.0 - pe1) * params.p_f_given_not_e
    q0 = pe0 * params.p_f_given_e + (1.0 - pe0) * params.p_f_given_not_e
    num = q1 * params.h2 + (1.0 - q1) * params.f2
    den = q0 * params.h2 + (1.0 - q0) * params.f2
    return _ratio(num, den)


# ---------------------------------------------------------------------------
# Enumeration route
# ---------------------------------------------------------------------------


def _check_assignment(net: BayesNet, assignment: dict, where: str):
    known = set(net.variable_names)
    for var, state in assignment.items():
        if var not in known:
            raise ValueError(f"{where}: unknown variable {var!r}")
        if state not in net.variable(var).states:
            raise ValueError(f"{where}: variable {var!r} has no state {state!r}")


def lr_general(
    net: BayesNet,
    hypothesis: tuple[str, str],
    evidence: dict,
    given: dict | None = None,
) -> float:
    """P(evidence | given, H) / P(evidence | given, not H) by enumeration.

    H is a variable/state pair; the complement aggregates every other state.
    Either branch being impossible under ``given`` alone is a conditioning
    error, distinct from an undefined 0/0 force.
    """
    given = dict(given or {})
    evidence = dict(evidence)
    hvar, hstate = hypothesis
    if hvar not in net.variable_names:
        raise ValueError(f"unknown hypothesis variable {hvar!r}")
    states = net.variable(hvar).states
    if hstate not in states:
        raise ValueError(f"hypothesis variable {hvar!r} has no state {hstate!r}")
    if hvar in evidence or hvar in given:
        raise ValueError(f"hypothesis variable {hvar!r} cannot also be observed")
    overlap = sorted(set(evidence) & set(given))
    if overlap:
        raise ValueError(f"evidence and given overlap on {overlap}")
    _check_assignment(net, evidence, "evidence")
    _check_assignment(net, given, "given")

    complement = [s for s in states if s != hstate]
    p_given_h = probability_of(net, {**given, hvar: hstate})
    p_given_not = sum(probability_of(net, {**given, hvar: s}) for s in complement)
    if p_given_h == 0.0:
        raise ConditioningError("hypothesis branch impossible under the given assignment")
    if p_given_not == 0.0:
        raise ConditioningError("complement branch impossible under the given assignment")

    joint = {**given, **evidence}
    num = probability_of(net, {**joint, hvar: hstate}) / p_given_h
    den = sum(probability_of(net, {**joint, hvar: s}) for s in complement) / p_given_not
    return _ratio(num, den)


# ---------------------------------------------------------------------------
# Reports
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LikelihoodReport:
    lr: float
    decomposition: tuple[tuple[str, float], ...] | None = None

    def to_dict(self) -> dict:
        from ._format import json_number

        out: dict = {"lr": json_number(self.lr)}
        if self.decomposition is not None:
            out["decomposition"] = [
                {"item": label, "lr": json_number(v)} for label, v in self.decomposition
            ]
        return out

    def __str__(self) -> str:
        from ._format import fmt12

        lines = [f"lr = {fmt12(self.lr)}"]
        if self.decomposition:
            for label, v in self.decomposition:
                lines.append(f"  {label}: {fmt12(v)}")
        return "\n".join(lines)


def decompose(
    net: BayesNet,
    hypothesis: tuple[str, str],
    items: list[tuple[str, dict]],
    given: dict | None = None,
) -> LikelihoodReport:
    """Chain-rule split of the joint force into per-item conditional terms.

    Item order is the conditioning order; the terms multiply back to the
    joint ratio (checked, since both sides come from the same enumerations).
    """
    if not items:
        raise ValueError("nothing to decompose")
    given = dict(given or {})
    seen: set[str] = set(given)
    union: dict = dict(given)
    terms: list[tuple[str, float]] = []
    for label, assignment in items:
        clash = sorted(set(assignment) & seen)
        if clash:
            raise ValueError(f"item {label!r} re-observes {clash}")
        terms.append((label, lr_general(net, hypothesis, assignment, given=dict(union))))
        union.update(assignment)
        seen |= set(assignment)
    total_evidence = {k: v for k, v in union.items() if k not in given}
    total = lr_general(net, hypothesis, total_evidence, given=given)
    product = math.prod(v for _, v in terms)
    if math.isfinite(total) and math.isfinite(product):
        if not math.isclose(total, product, rel_tol=_CHAIN_TOL, abs_tol=_CHAIN_TOL):
            raise WigmoreError(
                f"chain-rule identity violated: product {product!r} vs joint {total!r}"
            )
    return LikelihoodReport(lr=total, decomposition=tuple(terms))


@dataclass(frozen=True)
class InteractionReport:
    lr_a: float
    lr_b: float
    lr_a_given_b: float
    lr_b_given_a: float
    joint_lr: float
    product_lr: float
    classification: str  # synergistic | redundant | independent

    def to_dict(self) -> dict:
        from ._format import json_number

        return {
            "lr_a": json_number(self.lr_a),
            "lr_b": json_number(self.lr_b),
            "lr_a_given_b": json_number(self.lr_a_given_b),
            "lr_b_given_a": json_number(self.lr_b_given_a),
            "joint_lr": json_number(self.joint_lr),
            "product_lr": json_number(self.product_lr),
            "classification": self.classification,
        }

    def __str__(self) -> str:
        from ._format import fmt12

        return "\n".join(
            [
                f"lr(a)         = {fmt12(self.lr_a)}",
                f"lr(b)         = {fmt12(self.lr_b)}",
                f"lr(a | b)     = {fmt12(self.lr_a_given_b)}",
                f"lr(b | a)     = {fmt12(self.lr_b_given_a)}",
                f"joint lr      = {fmt12(self.joint_lr)}",
                f"product lr    = {fmt12(self.product_lr)}",
                f"classification: {self.classification}",
            ]
        )


def diagnose_interaction(
    net: BayesNet,
    hypothesis: tuple[str, str],
    item_a: dict,
    item_b: dict,
) -> InteractionReport:
    """Compare the joint force of two evidence items against the product of
    their marginal forces.

    Joint above product means the items corroborate beyond independence
    (synergistic); below means they overlap (redundant); within 1e-9 they are
    independent contributions. Both chain-rule orders are checked against the
    joint as an internal consistency guard.
    """
    clash = sorted(set(item_a) & set(item_b))
    if clash:
        raise ValueError(f"items overlap on {clash}")
    lr_a = lr_general(net, hypothesis, item_a)
    lr_b = lr_general(net, hypothesis, item_b)
    lr_b_given_a = lr_general(net, hypothesis, item_b, given=item_a)
    lr_a_given_b = lr_general(net, hypothesis, item_a, given=item_b)
    joint = lr_general(net, hypothesis, {**item_a, **item_b})

    for first_lr, cond_lr in ((lr_a, lr_b_given_a), (lr_b, lr_a_given_b)):
        chained = first_lr * cond_lr
        if math.isfinite(joint) and math.isfinite(chained):
            if not math.isclose(joint, chained, rel_tol=_CHAIN_TOL, abs_tol=_CHAIN_TOL):
                raise WigmoreError(
                    f"chain-rule identity violated: {chained!r} vs joint {joint!r}"
                )

    if math.isinf(lr_a) and lr_b == 0.0 or math.isinf(lr_b) and lr_a == 0.0:
        raise UndefinedForceError("product of 0 and infinite forces is undefined")
    product = lr_a * lr_b
    if math.isinf(joint) or math.isinf(product):
        if math.isinf(joint) and math.isinf(product):
            classification = "independent"
        elif math.isinf(joint):
            classification = "synergistic"
        else:
            classification = "redundant"
    elif joint > product + _CHAIN_TOL:
        classification = "synergistic"
    elif joint < product - _CHAIN_TOL:
        classification = "redundant"
    else:
        classification = "independent"
    return InteractionReport(
        lr_a=lr_a,
        lr_b=lr_b,
        lr_a_given_b=lr_a_given_b,
        lr_b_given_a=lr_b_given_a,
        joint_lr=joint,
        product_lr=product,
        classification=classification,
    )


# ---------------------------------------------------------------------------
# Canonical one- and two-witness networks, built through the real compiler
# ---------------------------------------------------------------------------

_SINGLE_CHART = chart(
    [
        KeyListEntry(1, "the principal hypothesis", "ultimate_probandum", None, "hypothesis"),
        KeyListEntry(
            2, "the event reported by the first source", "evidence", "testimonial", "event_a"
        ),
    ],
    [ReasoningArc(2, 1, "moderate", None)],
)

_SECOND_CHART = chart(
    [
        KeyListEntry(1, "the principal hypothesis", "ultimate_probandum", None, "hypothesis"),
        KeyListEntry(
            2, "the event reported by the first source", "evidence", "testimonial", "event_a"
        ),
        KeyListEntry(
            3,
            "the corroborating event reported by the second source",
            "evidence",
            "testimonial",
            "event_b",
        ),
    ],
    [ReasoningArc(2, 1, "moderate", None), ReasoningArc(3, 2, "moderate", None)],
)


def single_testimony_net(params: SingleTestimonyParams) -> CompiledModel:
    """hypothesis -> event_a -> event_a_report, ready for lr_general."""
    spec = CompilationSpec(
        chart=_SINGLE_CHART,
        arc_likelihoods={(2, 1): (params.p_e_given_h, params.p_e_given_not_h)},
        credibility={2: CredibilityParams(params.h, params.f)},
        priors={1: 0.5},
    )
    return compile_chart(spec)


def second_testimony_net(params: SecondTestimonyParams) -> CompiledModel:
    """Catenated pair: the second event bears on the first event, each with
    its own report variable."""
    spec = CompilationSpec(
        chart=_SECOND_CHART,
        arc_likelihoods={
            (2, 1): (params.p_e_given_h, params.p_e_given_not_h),
            (3, 2): (params.p_f_given_e, params.p_f_given_not_e),
        },
        credibility={
            2: CredibilityParams(params.h1, params.f1),
            3: CredibilityParams(params.h2, params.f2),
        },
        priors={1: 0.5},
    )
    return compile_chart(spec)
