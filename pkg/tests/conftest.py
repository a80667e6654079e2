import itertools
import json
import re
from importlib.resources import files
from pathlib import Path

import pytest

from wigmore.bayesnet import BayesNet, Cpt, Variable
from wigmore.chart import AncillaryAttachment, KeyListEntry, ReasoningArc, chart


def random_net(rng, max_nodes=10, allow_ternary=False, p_arc=0.4, max_fan_in=3):
    """Seeded random DAG over v0..vN with CPT cells bounded away from 0/1 so
    every joint assignment keeps positive probability."""
    n = int(rng.integers(2, max_nodes + 1))
    variables = []
    for i in range(n):
        if allow_ternary and rng.random() < 0.2:
            variables.append(Variable(f"v{i}", ("a", "b", "c")))
        else:
            variables.append(Variable(f"v{i}"))
    cpts = []
    for i, v in enumerate(variables):
        pool = [j for j in range(i) if rng.random() < p_arc][:max_fan_in]
        parents = [variables[j] for j in pool]
        rows = {}
        for combo in itertools.product(*(p.states for p in parents)):
            dist = rng.uniform(0.05, 0.95, size=v.card)
            rows[combo] = dist / dist.sum()
        cpts.append(Cpt(v.name, [p.name for p in parents], rows))
    return BayesNet(variables, cpts)


def data_path(name: str) -> Path:
    return Path(str(files("wigmore").joinpath("data", name)))


def entry(node_id, kind="evidence", form="testimonial", alias=None, text=None):
    if kind != "evidence":
        form = None
    return KeyListEntry(node_id, text or f"proposition {node_id}", kind, form, alias)


def arc(from_id, to_id, force="moderate", generalization=None):
    return ReasoningArc(from_id, to_id, force, generalization)


def attach(evidence_id, target):
    return AncillaryAttachment(evidence_id, tuple(target))


@pytest.fixture
def small_chart():
    """One ultimate, one penultimate, one interim, two direct chains, one
    attached ancillary item."""
    return chart(
        [
            entry(1, "ultimate_probandum"),
            entry(2, "penultimate_probandum"),
            entry(3, "interim_probandum"),
            entry(10),
            entry(11),
            entry(20),
        ],
        [arc(2, 1), arc(3, 2), arc(10, 3), arc(11, 2)],
        [attach(20, (10, 3))],
    )


@pytest.fixture
def identification_doc():
    with open(data_path("sacco_identification.chart.json"), encoding="utf-8") as fh:
        return json.load(fh)


@pytest.fixture
def bullet3_doc():
    with open(data_path("sacco_bullet3.chart.json"), encoding="utf-8") as fh:
        return json.load(fh)


# ---------------------------------------------------------------------------
# Acceptance-gate reporting: one pass/fail line per numbered criterion,
# printed as a terminal section so it survives output capture.
# ---------------------------------------------------------------------------

_CRITERION = re.compile(r"test_criterion_(\d+)")
_criterion_outcomes: dict[int, str] = {}


def pytest_runtest_logreport(report):
    m = _CRITERION.search(report.nodeid)
    if m is None:
        return
    n = int(m.group(1))
    if report.when == "call":
        _criterion_outcomes[n] = "PASS" if report.passed else "FAIL"
    elif report.failed:  # setup error or teardown failure
        _criterion_outcomes[n] = "FAIL"


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _criterion_outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_criterion_outcomes):
        terminalreporter.write_line(f"criterion {n}: {_criterion_outcomes[n]}")
