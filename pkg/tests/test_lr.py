"""Inferential force: closed forms, the enumeration route, and their laws."""

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from wigmore.bayesnet import BayesNet, Variable, Cpt, pair_cpt, prior_cpt
from wigmore.errors import ConditioningError, UndefinedForceError
from wigmore.lr import (
    SecondTestimonyParams,
    SingleTestimonyParams,
    decompose,
    diagnose_interaction,
    lr_general,
    lr_second_given_first,
    lr_single,
    second_testimony_net,
    single_testimony_net,
)

from conftest import random_net

unit_open = st.floats(min_value=0.01, max_value=0.99)

PELSER = SingleTestimonyParams(p_e_given_h=1.0, p_e_given_not_h=0.1, h=0.8, f=0.2)
PELSER_WADE = SecondTestimonyParams(
    p_e_given_h=1.0,
    p_e_given_not_h=0.1,
    h1=0.8,
    f1=0.2,
    p_f_given_e=1.0,
    p_f_given_not_e=0.15,
    h2=0.7,
    f2=0.3,
)


class TestWorkedExample:
    def test_first_witness_force(self):
        assert lr_single(PELSER) == pytest.approx(0.8 / 0.26, rel=1e-14)

    def test_second_witness_conditional_force(self):
        assert lr_second_given_first(PELSER_WADE) == pytest.approx(
            1.5066225165562912, rel=1e-12
        )

    def test_second_witness_marginal_force(self):
        model = second_testimony_net(PELSER_WADE)
        marginal = lr_general(
            model.net, ("hypothesis", "true"), {"event_b_report": "true"}
        )
        assert marginal == pytest.approx(1.7766497461928936, rel=1e-12)

    def test_pair_classified_redundant(self):
        model = second_testimony_net(PELSER_WADE)
        report = diagnose_interaction(
            model.net,
            ("hypothesis", "true"),
            {"event_a_report": "true"},
            {"event_b_report": "true"},
        )
        assert report.classification == "redundant"
        assert report.joint_lr < report.product_lr


class TestClosedFormLaws:
    @given(p1=unit_open, p0=unit_open, hf=unit_open)
    def test_neutral_witness_has_no_force(self, p1, p0, hf):
        params = SingleTestimonyParams(p1, p0, h=hf, f=hf)
        assert lr_single(params) == pytest.approx(1.0, abs=1e-12)

    @given(p1=unit_open, p0=unit_open, h1=unit_open, f1=unit_open, hf=unit_open)
    def test_neutral_second_witness_has_no_force(self, p1, p0, h1, f1, hf):
        params = SecondTestimonyParams(p1, p0, h1, f1, 0.9, 0.3, h2=hf, f2=hf)
        assert lr_second_given_first(params) == pytest.approx(1.0, abs=1e-12)

    @given(p1=unit_open, p0=unit_open)
    def test_perfect_credibility_reduces_to_event_ratio(self, p1, p0):
        params = SingleTestimonyParams(p1, p0, h=1.0, f=0.0)
        assert lr_single(params) == pytest.approx(p1 / p0, rel=1e-12)

    @given(p0=unit_open, pf0=unit_open, h2=unit_open, f2=unit_open)
    def test_fully_determined_first_chain_silences_second(self, p0, pf0, h2, f2):
        # With a perfectly credible first witness reporting a certain event,
        # the second report on the same chain adds nothing.
        params = SecondTestimonyParams(1.0, p0, 1.0, 0.0, 1.0, pf0, h2, f2)
        assert lr_second_given_first(params) == pytest.approx(1.0, abs=1e-12)

    @given(p1=unit_open, p0=unit_open, f=unit_open, data=st.data())
    def test_force_monotone_in_hit_rate(self, p1, p0, f, data):
        if p1 <= p0:
            p1, p0 = p0, p1
        if p1 == p0:
            p1 = min(0.99, p0 + 0.01)
        h_lo = data.draw(st.floats(min_value=0.01, max_value=0.98))
        h_hi = data.draw(st.floats(min_value=h_lo + 0.01, max_value=0.99))
        lo = lr_single(SingleTestimonyParams(p1, p0, h_lo, f))
        hi = lr_single(SingleTestimonyParams(p1, p0, h_hi, f))
        assert hi >= lo

    def test_contradicting_source_inverts_force(self):
        # h < f: the report argues against the event it claims.
        params = SingleTestimonyParams(0.9, 0.1, h=0.2, f=0.8)
        assert lr_single(params) < 1.0

    def test_infinite_force(self):
        assert lr_single(SingleTestimonyParams(0.9, 0.0, 1.0, 0.0)) == math.inf

    def test_zero_over_zero_refused(self):
        with pytest.raises(UndefinedForceError):
            lr_single(SingleTestimonyParams(0.0, 0.0, 1.0, 0.0))

    def test_dead_branch_conditioning_refused(self):
        # First report impossible under the complement branch.
        params = SecondTestimonyParams(1.0, 0.0, 1.0, 0.0, 1.0, 0.5, 0.7, 0.3)
        with pytest.raises(ConditioningError, match="complement"):
            lr_second_given_first(params)

    def test_params_validated(self):
        with pytest.raises(ValueError):
            SingleTestimonyParams(1.2, 0.1, 0.8, 0.2)


class TestClosedFormVsEnumeration:
    def test_single_agrees_on_random_draws(self):
        rng = np.random.default_rng(41)
        for _ in range(100):
            p1, p0, h, f = rng.uniform(0.0, 1.0, size=4)
            params = SingleTestimonyParams(p1, p0, h, f)
            model = single_testimony_net(params)
            direct = lr_single(params)
            routed = lr_general(
                model.net, ("hypothesis", "true"), {"event_a_report": "true"}
            )
            assert abs(direct - routed) <= 1e-12

    def test_second_agrees_on_random_draws(self):
        rng = np.random.default_rng(43)
        for _ in range(100):
            vals = rng.uniform(0.0, 1.0, size=8)
            params = SecondTestimonyParams(*vals)
            model = second_testimony_net(params)
            direct = lr_second_given_first(params)
            routed = lr_general(
                model.net,
                ("hypothesis", "true"),
                {"event_b_report": "true"},
                given={"event_a_report": "true"},
            )
            assert abs(direct - routed) <= 1e-12


class TestGeneralRoute:
    def test_empty_evidence_is_unit_force(self):
        model = single_testimony_net(PELSER)
        assert lr_general(model.net, ("hypothesis", "true"), {}) == 1.0

    def test_unknown_variable(self):
        model = single_testimony_net(PELSER)
        with pytest.raises(ValueError, match="unknown"):
            lr_general(model.net, ("hypothesis", "true"), {"ghost": "true"})

    def test_hypothesis_cannot_be_observed(self):
        model = single_testimony_net(PELSER)
        with pytest.raises(ValueError, match="observed"):
            lr_general(model.net, ("hypothesis", "true"), {"hypothesis": "true"})

    def test_evidence_given_overlap(self):
        model = second_testimony_net(PELSER_WADE)
        with pytest.raises(ValueError, match="overlap"):
            lr_general(
                model.net,
                ("hypothesis", "true"),
                {"event_a_report": "true"},
                given={"event_a_report": "true"},
            )

    def test_dead_given_branch(self):
        net = BayesNet(
            [Variable("H"), Variable("E")],
            [prior_cpt("H", 0.5), pair_cpt("E", "H", 1.0, 0.5)],
        )
        with pytest.raises(ConditioningError, match="hypothesis branch"):
            lr_general(net, ("H", "true"), {}, given={"E": "false"})

    def test_ternary_hypothesis_aggregates_complement(self):
        h = Variable("H", ("a", "b", "c"))
        e = Variable("E")
        net = BayesNet(
            [h, e],
            [
                Cpt("H", (), {(): (0.2, 0.3, 0.5)}),
                Cpt(
                    "E",
                    ("H",),
                    {("a",): (0.9, 0.1), ("b",): (0.4, 0.6), ("c",): (0.1, 0.9)},
                ),
            ],
        )
        # P(E|a) / P(E | not a) with P(not a) split 0.3/0.5 between b and c.
        expected = 0.9 / ((0.3 * 0.4 + 0.5 * 0.1) / 0.8)
        got = lr_general(net, ("H", "a"), {"E": "true"})
        assert got == pytest.approx(expected, rel=1e-12)


class TestDecomposition:
    def test_terms_multiply_to_joint(self):
        model = second_testimony_net(PELSER_WADE)
        report = decompose(
            model.net,
            ("hypothesis", "true"),
            [
                ("first", {"event_a_report": "true"}),
                ("second", {"event_b_report": "true"}),
            ],
        )
        product = math.prod(v for _, v in report.decomposition)
        assert report.lr == pytest.approx(product, rel=1e-9)

    def test_order_changes_terms_not_total(self):
        model = second_testimony_net(PELSER_WADE)
        ab = decompose(
            model.net,
            ("hypothesis", "true"),
            [("a", {"event_a_report": "true"}), ("b", {"event_b_report": "true"})],
        )
        ba = decompose(
            model.net,
            ("hypothesis", "true"),
            [("b", {"event_b_report": "true"}), ("a", {"event_a_report": "true"})],
        )
        assert ab.lr == pytest.approx(ba.lr, rel=1e-12)
        assert ab.decomposition[0][1] != ba.decomposition[0][1]

    def test_reobservation_rejected(self):
        model = second_testimony_net(PELSER_WADE)
        with pytest.raises(ValueError, match="re-observes"):
            decompose(
                model.net,
                ("hypothesis", "true"),
                [
                    ("a", {"event_a_report": "true"}),
                    ("a again", {"event_a_report": "true"}),
                ],
            )

    def test_chain_rule_on_random_nets(self):
        rng = np.random.default_rng(47)
        for _ in range(60):
            net = random_net(rng, max_nodes=8)
            names = list(net.variable_names)
            if len(names) < 3:
                continue
            hyp = names[0]
            a_var, b_var = names[1], names[2]
            item_a = {a_var: "true"}
            item_b = {b_var: "false"}
            joint = lr_general(net, (hyp, "true"), {**item_a, **item_b})
            chained = lr_general(net, (hyp, "true"), item_a) * lr_general(
                net, (hyp, "true"), item_b, given=item_a
            )
            assert joint == pytest.approx(chained, rel=1e-9, abs=1e-9)


class TestInteraction:
    def test_independent_witnesses(self):
        # Two witnesses reporting separate events that bear on H through
        # disjoint chains are conditionally independent given H.
        net = BayesNet(
            [Variable("H"), Variable("E1"), Variable("E2")],
            [
                prior_cpt("H", 0.5),
                pair_cpt("E1", "H", 0.8, 0.3),
                pair_cpt("E2", "H", 0.7, 0.2),
            ],
        )
        report = diagnose_interaction(
            net, ("H", "true"), {"E1": "true"}, {"E2": "true"}
        )
        assert report.classification == "independent"
        assert report.joint_lr == pytest.approx(report.product_lr, abs=1e-12)

    def test_overlapping_items_rejected(self):
        model = second_testimony_net(PELSER_WADE)
        with pytest.raises(ValueError, match="overlap"):
            diagnose_interaction(
                model.net,
                ("hypothesis", "true"),
                {"event_a_report": "true"},
                {"event_a_report": "false"},
            )

    def test_report_fields_consistent(self):
        model = second_testimony_net(PELSER_WADE)
        report = diagnose_interaction(
            model.net,
            ("hypothesis", "true"),
            {"event_a_report": "true"},
            {"event_b_report": "true"},
        )
        assert report.joint_lr == pytest.approx(
            report.lr_a * report.lr_b_given_a, rel=1e-12
        )
        assert report.joint_lr == pytest.approx(
            report.lr_b * report.lr_a_given_b, rel=1e-12
        )
        assert report.product_lr == pytest.approx(report.lr_a * report.lr_b, rel=1e-15)
