import json

import pytest

from triagelab.corpus import (
    BugRecord,
    CleaningRule,
    clean_bugs,
    compute_horizon_L,
    fixing_time_threshold,
    load_events,
    quartiles,
    record_to_obj,
    select_active_developers,
    split_train_test,
)
from triagelab.errors import ParseError, ValidationError

from conftest import make_bug


def test_quartiles_linear_interpolation():
    assert quartiles([1, 2, 3, 4]) == (1.75, 3.25)
    assert quartiles([5]) == (5.0, 5.0)


def test_quartiles_empty_rejected():
    with pytest.raises(ValidationError):
        quartiles([])


def test_outlier_threshold_hand_value():
    # Q1=1, Q3=26 -> 26 + 1.5 * 25 = 63.5
    sample = [1, 1, 1, 26, 26]
    assert fixing_time_threshold(sample) == 63.5
    assert compute_horizon_L(sample) == 26.0


def test_horizon_empty_rejected():
    with pytest.raises(ValidationError):
        compute_horizon_L([])


def test_fixing_time_inclusive_of_both_days():
    rec = make_bug(1, reported=5, assigned=7, resolved=9, dev=1)
    assert rec.fixing_time == 3
    assert make_bug(2, reported=5).fixing_time is None


def test_record_validation():
    with pytest.raises(ValidationError):
        make_bug(1, reported=5, assigned=3, resolved=9, dev=1)
    with pytest.raises(ValidationError):
        make_bug(1, status="RESOLVED_MAYBE")
    with pytest.raises(ValidationError):
        make_bug(1, deps=[(3, "BAD_KIND", 7)])


def test_active_developer_iqr_rule():
    records = (
        [make_bug(i, dev=1) for i in range(10)]
        + [make_bug(10, dev=2), make_bug(11, dev=3), make_bug(12, dev=4)]
    )
    profiles = {p.dev_id: p for p in select_active_developers(records)}
    # counts [10, 1, 1, 1]: IQR = 3.25 - 1 = 2.25 -> only dev 1 active
    assert profiles[1].is_active
    assert not any(profiles[d].is_active for d in (2, 3, 4))
    assert profiles[1].fixed_bug_count == 10


def test_active_single_developer_is_active():
    profiles = select_active_developers([make_bug(1, dev=9)])
    assert profiles[0].is_active  # IQR 0, count 1 > 0


def test_clean_bugs_hand_fixture(clean20):
    kept, summary = clean_bugs(clean20)
    assert summary.counts_by_step == [20, 18, 16, 14, 13]
    assert summary.active_dev_ids == frozenset({1, 2})
    assert summary.max_fix_threshold == pytest.approx(6.375)
    assert all(r.fixing_time <= 6.375 for r in kept)


def test_clean_bugs_idempotent_under_frozen_rule(clean20):
    kept, summary = clean_bugs(clean20)
    frozen = CleaningRule(
        active_dev_ids=summary.active_dev_ids,
        max_fix_threshold=summary.max_fix_threshold,
    )
    again, summary2 = clean_bugs(kept, frozen)
    assert [r.bug_id for r in again] == [r.bug_id for r in kept]
    assert summary2.counts_by_step[-1] == len(kept)


def test_clean_bugs_boundary_restricts_active_pool(clean20):
    # test-phase fixes (after the boundary) must not create activity
    late = clean20 + [
        make_bug(100 + i, reported=200, assigned=200, resolved=202, dev=7)
        for i in range(30)
    ]
    _, summary = clean_bugs(late, CleaningRule(boundary_day=100))
    assert 7 not in summary.active_dev_ids


def test_split_train_test_boundary_goes_to_train():
    records = [make_bug(1, reported=9), make_bug(2, reported=10), make_bug(3, reported=11)]
    train, test = split_train_test(records, 10)
    assert [r.bug_id for r in train] == [1, 2]
    assert [r.bug_id for r in test] == [3]


def test_load_events_roundtrip(tmp_path, clean20):
    path = tmp_path / "bugs.jsonl"
    path.write_text(
        "\n".join(json.dumps(record_to_obj(r), sort_keys=True) for r in clean20)
    )
    loaded = load_events(path)
    assert sorted(r.bug_id for r in loaded) == sorted(r.bug_id for r in clean20)
    by_id = {r.bug_id: r for r in loaded}
    for rec in clean20:
        assert by_id[rec.bug_id] == rec


def test_load_events_sorted_by_report_day(tmp_path):
    path = tmp_path / "bugs.jsonl"
    recs = [make_bug(1, reported=9), make_bug(2, reported=3)]
    path.write_text("\n".join(json.dumps(record_to_obj(r)) for r in recs))
    assert [r.bug_id for r in load_events(path)] == [2, 1]


def test_load_events_parse_error_carries_line_number(tmp_path):
    path = tmp_path / "bad.jsonl"
    path.write_text('{"bug_id": 1, "summary": "s", "description": "d", '
                    '"component": "c", "reported_at": 1, "status_final": "FIXED"}\n'
                    "not json\n")
    with pytest.raises(ParseError, match="line 2"):
        load_events(path)


def test_load_events_missing_field(tmp_path):
    path = tmp_path / "bad.jsonl"
    path.write_text('{"bug_id": 1}\n')
    with pytest.raises(ParseError, match="reported_at|summary"):
        load_events(path)


def test_load_events_duplicate_id(tmp_path):
    path = tmp_path / "dup.jsonl"
    line = json.dumps(record_to_obj(make_bug(5)))
    path.write_text(line + "\n" + line + "\n")
    with pytest.raises(ValidationError, match="duplicate"):
        load_events(path)


def test_dependency_events_roundtrip(tmp_path):
    rec = make_bug(1, deps=[(4, "ADD_BLOCKS", 9), (6, "REMOVE_BLOCKS", 9)])
    path = tmp_path / "dep.jsonl"
    path.write_text(json.dumps(record_to_obj(rec)))
    assert load_events(path)[0].dependency_events == rec.dependency_events
