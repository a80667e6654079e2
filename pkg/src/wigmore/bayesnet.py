"""Discrete Bayesian networks with exact inference.

Two independent inference routes are provided on purpose:

* :func:`enumerate_joint` — brute-force summation over the full joint state
  space (guarded at 2^22 states). Dumb, obviously correct, and fast enough at
  desk scale thanks to the compiled kernel; this is the oracle everything
  else is checked against.
* :func:`eliminate` — variable elimination over numpy factors with a
  min-degree heuristic; the production query path.

Networks are immutable after construction; inference calls are pure.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass

import numpy as np

from ._backend import kernels
from ._flat import FlatNet, build_flat
from .errors import CapacityError, ImpossibleEvidenceError, InvalidNetworkError, ModelParseError

MAX_STATE_SPACE = 2**22
ROW_SUM_TOL = 1e-9

BINARY_STATES = ("true", "false")


@dataclass(frozen=True)
class Variable:
    """A named discrete variable with ordered state labels."""

    name: str
    states: tuple[str, ...] = BINARY_STATES

    def __post_init__(self):
        if not self.name or not isinstance(self.name, str):
            raise InvalidNetworkError(f"variable name must be a nonempty string, got {self.name!r}")
        if len(self.states) < 2:
            raise InvalidNetworkError(f"variable {self.name!r} needs at least two states")
        if len(set(self.states)) != len(self.states):
            raise InvalidNetworkError(f"variable {self.name!r} has duplicate state labels")
        for s in self.states:
            if not s or not isinstance(s, str) or "," in s:
                raise InvalidNetworkError(
                    f"variable {self.name!r}: state labels must be nonempty, comma-free strings"
                )

    @property
    def card(self) -> int:
        return len(self.states)


class Cpt:
    """Conditional probability table for one child variable.

    ``rows`` maps each full parent-state tuple to a distribution over the
    child's states. Row sums are checked against 1 within 1e-9 and then
    renormalized exactly; worse rows are rejected.
    """

    __slots__ = ("child", "parents", "rows")

    def __init__(self, child: str, parents, rows):
        self.child = child
        self.parents = tuple(parents)
        if len(set(self.parents)) != len(self.parents):
            raise InvalidNetworkError(f"cpt for {child!r} lists a duplicate parent")
        norm: dict[tuple[str, ...], np.ndarray] = {}
        for combo, dist in rows.items():
            key = tuple(combo)
            if len(key) != len(self.parents):
                raise InvalidNetworkError(
                    f"cpt for {child!r}: row key {key} does not match parents {self.parents}"
                )
            vec = np.asarray(dist, dtype=np.float64)
            if vec.ndim != 1:
                raise InvalidNetworkError(f"cpt for {child!r}: row {key} is not a vector")
            if np.any(vec < 0.0) or np.any(vec > 1.0):
                raise InvalidNetworkError(
                    f"cpt for {child!r}: row {key} has probabilities outside [0, 1]"
                )
            total = float(vec.sum())
            if abs(total - 1.0) > ROW_SUM_TOL:
                raise InvalidNetworkError(
                    f"cpt for {child!r}: row {key} sums to {total!r}, beyond tolerance"
                )
            norm[key] = vec / total
        self.rows = norm

    def row(self, combo) -> np.ndarray:
        return self.rows[tuple(combo)]


def prior_cpt(name: str, p_true: float) -> Cpt:
    """Root CPT for a binary variable."""
    return Cpt(name, (), {(): (p_true, 1.0 - p_true)})


def pair_cpt(child: str, parent: str, if_true: float, if_false: float) -> Cpt:
    """Binary child given one binary parent: P(child=true | parent)."""
    return Cpt(
        child,
        (parent,),
        {("true",): (if_true, 1.0 - if_true), ("false",): (if_false, 1.0 - if_false)},
    )


class BayesNet:
    """An immutable discrete network: variables plus one CPT per variable."""

    def __init__(self, variables, cpts):
        self._variables: tuple[Variable, ...] = tuple(variables)
        names = [v.name for v in self._variables]
        if len(set(names)) != len(names):
            raise InvalidNetworkError("duplicate variable names")
        self._by_name = {v.name: v for v in self._variables}

        self._cpts: dict[str, Cpt] = {}
        for cpt in cpts:
            if cpt.child not in self._by_name:
                raise InvalidNetworkError(f"cpt for unknown variable {cpt.child!r}")
            if cpt.child in self._cpts:
                raise InvalidNetworkError(f"more than one cpt for {cpt.child!r}")
            self._cpts[cpt.child] = cpt
        missing = [n for n in names if n not in self._cpts]
        if missing:
            raise InvalidNetworkError(f"missing cpt(s) for {missing}")

        for cpt in self._cpts.values():
            for p in cpt.parents:
                if p not in self._by_name:
                    raise InvalidNetworkError(
                        f"cpt for {cpt.child!r} references unknown parent {p!r}"
                    )
            expected = list(itertools.product(*(self._by_name[p].states for p in cpt.parents)))
            if set(cpt.rows) != set(expected) or len(cpt.rows) != len(expected):
                raise InvalidNetworkError(
                    f"cpt for {cpt.child!r} must cover every parent combination exactly once"
                )
            for combo, vec in cpt.rows.items():
                if len(vec) != self._by_name[cpt.child].card:
                    raise InvalidNetworkError(
                        f"cpt for {cpt.child!r}: row {combo} has wrong length"
                    )

        self._topo = self._toposort()
        self._flat: FlatNet | None = None

    def _toposort(self) -> tuple[str, ...]:
        indeg = {v.name: 0 for v in self._variables}
        children: dict[str, list[str]] = {v.name: [] for v in self._variables}
        for cpt in self._cpts.values():
            for p in cpt.parents:
                children[p].append(cpt.child)
                indeg[cpt.child] += 1
        queue = sorted(n for n, d in indeg.items() if d == 0)
        order: list[str] = []
        while queue:
            n = queue.pop(0)
            order.append(n)
            for m in sorted(children[n]):
                indeg[m] -= 1
                if indeg[m] == 0:
                    queue.append(m)
            queue.sort()
        if len(order) != len(self._variables):
            raise InvalidNetworkError("parent relation contains a cycle")
        return tuple(order)

    # -- introspection ----------------------------------------------------

    @property
    def variables(self) -> tuple[Variable, ...]:
        return self._variables

    @property
    def variable_names(self) -> tuple[str, ...]:
        return tuple(v.name for v in self._variables)

    @property
    def topological_order(self) -> tuple[str, ...]:
        return self._topo

    def variable(self, name: str) -> Variable:
        try:
            return self._by_name[name]
        except KeyError:
            raise KeyError(f"no variable named {name!r}") from None

    def cpt(self, name: str) -> Cpt:
        return self._cpts[name]

    def parents(self, name: str) -> tuple[str, ...]:
        return self._cpts[name].parents

    @property
    def state_space(self) -> int:
        size = 1
        for v in self._variables:
            size *= v.card
        return size

    # -- flat layout for the kernels --------------------------------------

    def flat(self) -> FlatNet:
        if self._flat is None:
            names = self.variable_names
            index = {n: i for i, n in enumerate(names)}
            cards = [self._by_name[n].card for n in names]
            parent_lists = [[index[p] for p in self._cpts[n].parents] for n in names]
            tables = [self._cpt_array(n) for n in names]
            self._flat = build_flat(names, cards, parent_lists, tables)
        return self._flat

    def _cpt_array(self, name: str) -> np.ndarray:
        """Rows in C-order over the parent state tuples."""
        cpt = self._cpts[name]
        combos = list(itertools.product(*(self._by_name[p].states for p in cpt.parents)))
        return np.stack([cpt.rows[c] for c in combos]) if combos else cpt.rows[()].reshape(1, -1)

    def evidence_vector(self, evidence) -> np.ndarray:
        ev = np.full(len(self._variables), -1, dtype=np.int32)
        index = {n: i for i, n in enumerate(self.variable_names)}
        for name, state in evidence.items():
            if name not in index:
                raise KeyError(f"evidence names unknown variable {name!r}")
            var = self._by_name[name]
            if state not in var.states:
                raise KeyError(f"variable {name!r} has no state {state!r}")
            ev[index[name]] = var.states.index(state)
        return ev


# ---------------------------------------------------------------------------
# Model file format
# ---------------------------------------------------------------------------


def net_from_dict(doc) -> BayesNet:
    if not isinstance(doc, dict):
        raise ModelParseError("model file must be a JSON object")
    for key in ("variables", "cpts"):
        if key not in doc:
            raise ModelParseError(f"model file missing top-level key {key!r}")
    try:
        variables = [Variable(v["name"], tuple(v.get("states", BINARY_STATES))) for v in doc["variables"]]
    except (TypeError, KeyError, InvalidNetworkError) as exc:
        raise ModelParseError(f"bad variable declaration: {exc}") from exc
    cpts = []
    for raw in doc["cpts"]:
        try:
            child = raw["child"]
            parents = tuple(raw.get("parents", ()))
            table = raw["table"]
            rows = {}
            for key, dist in table.items():
                combo = tuple(key.split(",")) if key else ()
                rows[combo] = dist
            cpts.append(Cpt(child, parents, rows))
        except (TypeError, KeyError, AttributeError, InvalidNetworkError) as exc:
            raise ModelParseError(f"bad cpt declaration: {exc}") from exc
    try:
        return BayesNet(variables, cpts)
    except InvalidNetworkError as exc:
        raise ModelParseError(str(exc)) from exc


def net_to_dict(net: BayesNet) -> dict:
    out_vars = [{"name": v.name, "states": list(v.states)} for v in net.variables]
    out_cpts = []
    for name in net.variable_names:
        cpt = net.cpt(name)
        combos = list(itertools.product(*(net.variable(p).states for p in cpt.parents)))
        if not combos:
            combos = [()]
        table = {",".join(c): [float(x) for x in cpt.rows[c]] for c in combos}
        out_cpts.append({"child": name, "parents": list(cpt.parents), "table": table})
    return {"variables": out_vars, "cpts": out_cpts}


def net_to_json(net: BayesNet) -> str:
    return json.dumps(net_to_dict(net), indent=2) + "\n"


def load_model_file(path) -> BayesNet:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ModelParseError(f"cannot read model file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ModelParseError(f"model file {path} is not valid JSON: {exc}") from exc
    return net_from_dict(doc)


# ---------------------------------------------------------------------------
# Brute-force enumeration (the oracle)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EnumerationResult:
    p_evidence: float
    marginals: dict[str, np.ndarray]

    def marginal(self, name: str) -> np.ndarray:
        return self.marginals[name]


def enumerate_joint(net: BayesNet, evidence=None) -> EnumerationResult:
    """Exact summation over every joint configuration consistent with evidence.

    Returns the evidence probability and normalized posterior marginals for
    all unobserved variables. Zero-probability evidence raises; state spaces
    beyond 2^22 raise before any work is done.
    """
    evidence = dict(evidence or {})
    if net.state_space > MAX_STATE_SPACE:
        raise CapacityError(
            f"state space {net.state_space} exceeds enumeration guard {MAX_STATE_SPACE}"
        )
    flat = net.flat()
    ev = net.evidence_vector(evidence)
    sums = np.zeros(int(flat.sums_off[-1]), dtype=np.float64)
    total = kernels.enumerate_accumulate(
        flat.cards,
        flat.parents_off,
        flat.parents_flat,
        flat.strides_flat,
        flat.cpt_off,
        flat.cpt_flat,
        flat.sums_off,
        ev,
        sums,
    )
    if total == 0.0:
        raise ImpossibleEvidenceError(f"evidence has probability zero: {evidence}")
    marginals = {}
    for i, name in enumerate(flat.names):
        if ev[i] >= 0:
            continue
        lo, hi = int(flat.sums_off[i]), int(flat.sums_off[i + 1])
        marginals[name] = sums[lo:hi] / total
    return EnumerationResult(float(total), marginals)


def probability_of(net: BayesNet, evidence) -> float:
    """P(evidence); 0.0 instead of raising when the assignment is impossible."""
    try:
        return enumerate_joint(net, evidence).p_evidence
    except ImpossibleEvidenceError:
        return 0.0


# ---------------------------------------------------------------------------
# Variable elimination
# ---------------------------------------------------------------------------


class _Factor:
    __slots__ = ("scope", "values")

    def __init__(self, scope: tuple[str, ...], values: np.ndarray):
        self.scope = scope
        self.values = values


def _cpt_factor(net: BayesNet, name: str) -> _Factor:
    cpt = net.cpt(name)
    scope = cpt.parents + (name,)
    shape = tuple(net.variable(v).card for v in scope)
    return _Factor(scope, net._cpt_array(name).reshape(shape))


def _reduce(f: _Factor, observed: dict[str, int]) -> _Factor:
    scope = list(f.scope)
    values = f.values
    for var in [v for v in f.scope if v in observed]:
        axis = scope.index(var)
        values = np.take(values, observed[var], axis=axis)
        scope.pop(axis)
    return _Factor(tuple(scope), values)


def _product(factors: list[_Factor], cards: dict[str, int]) -> _Factor:
    union = tuple(sorted(set().union(*(f.scope for f in factors))))
    pos = {v: i for i, v in enumerate(union)}
    out = np.ones(tuple(cards[v] for v in union), dtype=np.float64)
    for f in factors:
        if not f.scope:
            out = out * f.values
            continue
        perm = sorted(range(len(f.scope)), key=lambda i: pos[f.scope[i]])
        arr = np.transpose(f.values, perm)
        shape = tuple(cards[v] if v in f.scope else 1 for v in union)
        out = out * arr.reshape(shape)
    return _Factor(union, out)


def _min_degree_order(scopes: list[tuple[str, ...]], to_eliminate: set[str]) -> list[str]:
    """Greedy min-degree on the moral graph; ties broken lexicographically."""
    all_vars = set().union(*scopes) if scopes else set()
    neighbors: dict[str, set[str]] = {v: set() for v in all_vars}
    for scope in scopes:
        for a in scope:
            neighbors[a].update(v for v in scope if v != a)
    order = sorted(set(to_eliminate) - all_vars)  # vars in no factor: any order
    remaining = set(to_eliminate) & all_vars
    while remaining:
        var = min(remaining, key=lambda v: (len(neighbors[v]), v))
        order.append(var)
        nbrs = neighbors.pop(var)
        for a in nbrs:
            neighbors[a].discard(var)
            neighbors[a].update(x for x in nbrs if x != a)
        remaining.discard(var)
    return order


def eliminate(net: BayesNet, evidence, query: str) -> np.ndarray:
    """Posterior distribution over ``query``'s states given evidence.

    Matches :func:`enumerate_joint`'s marginal for the query; the elimination
    order is the deterministic min-degree heuristic, so repeated runs produce
    identical floating-point output.
    """
    evidence = dict(evidence or {})
    var = net.variable(query)
    if query in evidence:
        raise ValueError(f"query variable {query!r} is observed")
    ev = net.evidence_vector(evidence)
    observed = {
        name: int(ev[i]) for i, name in enumerate(net.variable_names) if ev[i] >= 0
    }
    cards = {v.name: v.card for v in net.variables}

    factors = [_reduce(_cpt_factor(net, n), observed) for n in net.variable_names]
    to_eliminate = {
        v.name for v in net.variables if v.name != query and v.name not in observed
    }
    order = _min_degree_order([f.scope for f in factors], to_eliminate)

    for name in order:
        bucket = [f for f in factors if name in f.scope]
        rest = [f for f in factors if name not in f.scope]
        if not bucket:
            continue
        prod = _product(bucket, cards)
        axis = prod.scope.index(name)
        summed = _Factor(
            tuple(v for v in prod.scope if v != name), prod.values.sum(axis=axis)
        )
        factors = rest + [summed]

    final = _product(factors, cards)
    if final.scope == ():
        raise ValueError(f"query variable {query!r} vanished during elimination")
    values = final.values.reshape(var.card)
    total = float(values.sum())
    if total == 0.0:
        raise ImpossibleEvidenceError(f"evidence has probability zero: {evidence}")
    return values / total
