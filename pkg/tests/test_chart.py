"""Structural layer: key lists, arcs, validation rules, relevance, export."""

import pytest

from wigmore.chart import (
    ANCILLARY,
    DIRECTLY_RELEVANT,
    chart,
    chart_from_dict,
    classify_relevance,
    export_chart,
    load_case_file,
    validate_chart,
)
from wigmore.errors import AmbiguousRoleError, ChartParseError

from conftest import arc, attach, data_path, entry


def rules(report):
    return {v.rule for v in report.violations}


class TestParsing:
    def test_bundled_files_load(self):
        for name in ("sacco_identification.chart.json", "sacco_bullet3.chart.json"):
            c = load_case_file(data_path(name))
            assert c.key_list and c.arcs

    def test_missing_top_level_key(self, identification_doc):
        del identification_doc["arcs"]
        with pytest.raises(ChartParseError, match="arcs"):
            chart_from_dict(identification_doc)

    def test_unknown_kind(self, identification_doc):
        identification_doc["key_list"][0]["kind"] = "hunch"
        with pytest.raises(ChartParseError, match="hunch"):
            chart_from_dict(identification_doc)

    def test_unknown_force_label(self, identification_doc):
        identification_doc["arcs"][0]["force_label"] = "overwhelming"
        with pytest.raises(ChartParseError, match="overwhelming"):
            chart_from_dict(identification_doc)

    def test_unknown_evidence_form(self, identification_doc):
        identification_doc["key_list"][1]["evidence_form"] = "vibes"
        with pytest.raises(ChartParseError, match="vibes"):
            chart_from_dict(identification_doc)

    def test_nonpositive_id(self, identification_doc):
        identification_doc["key_list"][0]["id"] = 0
        with pytest.raises(ChartParseError, match="positive"):
            chart_from_dict(identification_doc)

    def test_bool_id_rejected(self, identification_doc):
        identification_doc["key_list"][0]["id"] = True
        with pytest.raises(ChartParseError):
            chart_from_dict(identification_doc)

    def test_unknown_alias_in_arc(self, identification_doc):
        identification_doc["arcs"][0]["from"] = "no_such_node"
        with pytest.raises(ChartParseError, match="no_such_node"):
            chart_from_dict(identification_doc)

    def test_duplicate_alias(self, identification_doc):
        identification_doc["key_list"][1]["alias"] = identification_doc["key_list"][0][
            "alias"
        ]
        with pytest.raises(ChartParseError, match="duplicate alias"):
            chart_from_dict(identification_doc)

    def test_missing_file_names_path(self, tmp_path):
        path = tmp_path / "gone.json"
        with pytest.raises(ChartParseError, match="gone.json"):
            load_case_file(path)

    def test_malformed_json_names_path(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{not json", encoding="utf-8")
        with pytest.raises(ChartParseError, match="broken.json"):
            load_case_file(path)


class TestValidationRules:
    def test_small_chart_clean(self, small_chart):
        report = validate_chart(small_chart)
        assert report.ok
        assert str(report) == "0 violations"

    def test_bundled_charts_clean(self):
        for name in ("sacco_identification.chart.json", "sacco_bullet3.chart.json"):
            assert validate_chart(load_case_file(data_path(name))).ok

    def test_duplicate_id(self):
        c = chart(
            [entry(1, "ultimate_probandum"), entry(10), entry(10)], [arc(10, 1)], []
        )
        assert "duplicate_id" in rules(validate_chart(c))

    def test_evidence_without_form(self):
        c = chart(
            [
                entry(1, "ultimate_probandum"),
                entry(10, form=None),
            ],
            [arc(10, 1)],
            [],
        )
        assert "evidence_form" in rules(validate_chart(c))

    def test_probandum_with_form(self):
        bad = entry(1, "ultimate_probandum")
        bad = type(bad)(bad.id, bad.text, bad.kind, "testimonial", None)
        c = chart([bad, entry(10)], [arc(10, 1)], [])
        assert "evidence_form" in rules(validate_chart(c))

    def test_no_ultimate(self):
        c = chart([entry(2, "penultimate_probandum"), entry(10)], [arc(10, 2)], [])
        assert "single_ultimate" in rules(validate_chart(c))

    def test_two_ultimates(self):
        c = chart(
            [entry(1, "ultimate_probandum"), entry(2, "ultimate_probandum"), entry(10)],
            [arc(10, 1)],
            [],
        )
        assert "single_ultimate" in rules(validate_chart(c))

    def test_arc_to_unknown_node(self):
        c = chart([entry(1, "ultimate_probandum"), entry(10)], [arc(10, 99)], [])
        got = rules(validate_chart(c))
        assert "arc_endpoints" in got

    def test_self_loop(self):
        c = chart(
            [entry(1, "ultimate_probandum"), entry(10)], [arc(10, 1), arc(10, 10)], []
        )
        assert "self_loop" in rules(validate_chart(c))

    def test_downward_arc(self):
        c = chart(
            [entry(1, "ultimate_probandum"), entry(10)], [arc(10, 1), arc(1, 10)], []
        )
        got = validate_chart(c)
        assert "direction" in rules(got)

    def test_lateral_arc_between_penultimates(self):
        c = chart(
            [
                entry(1, "ultimate_probandum"),
                entry(2, "penultimate_probandum"),
                entry(3, "penultimate_probandum"),
                entry(10),
                entry(11),
            ],
            [arc(2, 1), arc(3, 1), arc(2, 3), arc(10, 2), arc(11, 3)],
            [],
        )
        assert "direction" in rules(validate_chart(c))

    def test_evidence_catenation_is_legal(self):
        c = chart(
            [entry(1, "ultimate_probandum"), entry(10), entry(11)],
            [arc(10, 1), arc(11, 10)],
            [],
        )
        assert validate_chart(c).ok

    def test_cycle_detected(self):
        c = chart(
            [entry(1, "ultimate_probandum"), entry(10), entry(11)],
            [arc(10, 1), arc(11, 10), arc(10, 11)],
            [],
        )
        got = validate_chart(c)
        assert rules(got) == {"acyclic"}

    def test_attachment_to_missing_arc(self, small_chart):
        c = chart(small_chart.key_list, small_chart.arcs, [attach(20, (11, 3))])
        assert "attachment_target" in rules(validate_chart(c))

    def test_attachment_from_probandum(self, small_chart):
        c = chart(
            small_chart.key_list,
            small_chart.arcs,
            list(small_chart.ancillary) + [attach(3, (10, 3))],
        )
        assert "attachment_source" in rules(validate_chart(c))

    def test_attached_node_arcing_into_probandum(self, small_chart):
        c = chart(
            small_chart.key_list,
            list(small_chart.arcs) + [arc(20, 2)],
            small_chart.ancillary,
        )
        got = rules(validate_chart(c))
        assert "ancillary_on_direct" in got
        assert "ambiguous_role" in got

    def test_orphan_evidence(self, small_chart):
        c = chart(list(small_chart.key_list) + [entry(30)], small_chart.arcs,
                  small_chart.ancillary)
        got = validate_chart(c)
        assert "orphan_evidence" in rules(got)
        assert any(v.locus_id == 30 for v in got.violations)

    def test_penultimate_unlinked(self):
        c = chart(
            [
                entry(1, "ultimate_probandum"),
                entry(2, "penultimate_probandum"),
                entry(10),
                entry(11),
            ],
            [arc(10, 1), arc(11, 2)],
            [],
        )
        assert "penultimate_unlinked" in rules(validate_chart(c))

    def test_interim_disconnect(self):
        c = chart(
            [entry(1, "ultimate_probandum"), entry(3, "interim_probandum"), entry(10)],
            [arc(10, 1), arc(3, 1)],
            [],
        )
        assert "interim_disconnect" in rules(validate_chart(c))

    def test_report_ordering_deterministic(self):
        c = chart(
            [entry(1, "ultimate_probandum"), entry(10, form=None), entry(9, form=None)],
            [arc(10, 1), arc(9, 1)],
            [],
        )
        r1 = validate_chart(c)
        r2 = validate_chart(c)
        assert [v.locus for v in r1.violations] == [v.locus for v in r2.violations]
        ids = [v.locus_id for v in r1.violations]
        assert ids == sorted(ids)


class TestRelevance:
    def test_identification_counts(self):
        c = load_case_file(data_path("sacco_identification.chart.json"))
        rel = classify_relevance(c)
        assert rel.direct_count == 7
        assert rel.ancillary_count == 5

    def test_bullet3_counts(self):
        c = load_case_file(data_path("sacco_bullet3.chart.json"))
        rel = classify_relevance(c)
        assert rel.direct_count == 4
        assert rel.ancillary_count == 1

    def test_chain_into_attached_node_is_ancillary(self):
        c = load_case_file(data_path("sacco_identification.chart.json"))
        roles = classify_relevance(c).roles
        assert roles[319] == ANCILLARY  # supports 318, itself attached
        assert roles[26] == DIRECTLY_RELEVANT  # catenated direct chain

    def test_ambiguous_role_raises(self, small_chart):
        c = chart(
            small_chart.key_list,
            list(small_chart.arcs) + [arc(20, 2)],
            small_chart.ancillary,
        )
        with pytest.raises(AmbiguousRoleError, match="20"):
            classify_relevance(c)


class TestExport:
    def test_deterministic(self, small_chart):
        assert export_chart(small_chart) == export_chart(small_chart)

    def test_unix_newlines_and_trailer(self, small_chart):
        text = export_chart(small_chart)
        assert "\r" not in text
        assert text.endswith("}\n")

    def test_direct_only_omits_ancillary(self):
        c = load_case_file(data_path("sacco_identification.chart.json"))
        full = export_chart(c, style="full")
        direct = export_chart(c, style="direct_only")
        assert "n317" in full and "n317" not in direct
        assert "style=dashed" in full and "style=dashed" not in direct

    def test_attached_arc_is_split_at_midpoint(self):
        c = load_case_file(data_path("sacco_identification.chart.json"))
        full = export_chart(c)
        assert "a25_3 [shape=point];" in full
        assert "n25 -> a25_3" in full
        assert "a25_3 -> n3;" in full

    def test_unknown_style_rejected(self, small_chart):
        with pytest.raises(ValueError):
            export_chart(small_chart, style="fancy")

    def test_quotes_escaped(self):
        c = chart(
            [
                entry(1, "ultimate_probandum", text='he said "run"'),
                entry(10),
            ],
            [arc(10, 1)],
            [],
        )
        assert '\\"run\\"' in export_chart(c)
