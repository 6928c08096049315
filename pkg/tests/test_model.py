from __future__ import annotations

import pytest

from redorank.errors import DataError, DuplicateIdeal, EmptySnippet, MissingLabels
from redorank.model import FEATURE_SCHEMA, FeatureTable, JudgedList, LtrRow, Resource, ScoreTriple, gain, validate_list

from conftest import make_list


def test_gain_mapping():
    assert [gain(l) for l in (0, 1, 2)] == [0.0, 1.0, 3.0]
    assert [gain(l, "linear") for l in (0, 1, 2)] == [0.0, 1.0, 2.0]


def test_valid_list_returned_unchanged():
    judged = make_list()
    assert judged.labels() == [2, 1, 1, 0]
    assert validate_list(judged) is judged


def test_duplicate_ideal():
    judged = make_list()
    extra = Resource("http://ideal/2", "x", "y", 9, label=2, is_ideal=True)
    with pytest.raises(DuplicateIdeal) as exc:
        validate_list(JudgedList("q", "t", judged.resources + (extra,)))
    assert exc.value.doc_id == "http://ideal/2"


def test_missing_labels():
    res = (Resource("http://a", "a", "a", 1, label=1), Resource("http://b", "b", "b", 2))
    with pytest.raises(MissingLabels):
        validate_list(JudgedList("q", "t", res))


def test_empty_snippet_only_for_known_bad():
    ok = (Resource("http://a", "a", "a", 1, label=1), Resource("http://b", "b", "", 2, label=0, is_known_bad=True))
    validate_list(JudgedList("q", "t", ok))
    bad = (Resource("http://a", "a", "", 1, label=1),)
    with pytest.raises(EmptySnippet):
        validate_list(JudgedList("q", "t", bad))


@pytest.mark.parametrize(
    "kwargs",
    [dict(source_rank=0), dict(label=3), dict(is_ideal=True, label=1), dict(is_known_bad=True, label=1)],
)
def test_resource_invariants(kwargs):
    base = dict(url="http://a", title="a", snippet="a", source_rank=1)
    base.update(kwargs)
    with pytest.raises(DataError):
        Resource(**base)


def test_doc_id_defaults_to_url():
    assert Resource("http://a", "a", "a", 1).doc_id == "http://a"
    assert Resource("http://a", "a", "a", 1, id="x7").doc_id == "x7"


def test_score_triple_ranges():
    ScoreTriple(13.0, 1.0, 0.0)
    for args in ((13.5, 0.5, 0.5), (1, -0.1, 0.5), (1, 0.5, 1.1)):
        with pytest.raises(DataError):
            ScoreTriple(*args)


def test_ltr_row_cost_defaults_to_s_bad():
    scores = {"s_read": 3.5, "s_edu": 0.9, "s_bad": 0.1, "mixer": 1.0}
    row = LtrRow.from_scores("q1", "u1", 2, scores, FEATURE_SCHEMA)
    assert row.cost == 0.1
    assert row.features == (3.5, 0.9, 0.1, 1.0)
    with pytest.raises(DataError):
        LtrRow("q", "d", 1, (1.0,), cost=1.5)


def test_feature_table_groups_by_query_in_order():
    rows = [LtrRow(q, f"{q}{i}", 1, (0.0,)) for q in ("b", "a") for i in range(2)]
    table = FeatureTable(("x",), rows)
    grouped = table.by_query()
    assert list(grouped) == ["b", "a"]
    assert [r.doc_id for r in grouped["a"]] == ["a0", "a1"]
