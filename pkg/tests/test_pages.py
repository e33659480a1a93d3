"""Stage-one pagination tests.

The uniqueness oracle recomputes effective labels from the raw scan and
assignment structures, bypassing ``effective_labels()`` entirely, so the
randomized-operation property checks the engine against an independent
reading of the rule.
"""

from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bibcap.codec import PageLabelKind, normalize_page_label
from bibcap.errors import (
    AlreadyMarked,
    CaptureError,
    DuplicateLabel,
    DuplicateScanId,
    EmptyNote,
    NoAssignment,
    NotMarked,
    ScanIsDuplicate,
    UnknownScan,
)
from bibcap.pages import Pagination, parse_page_label, successor_label

# --- oracle -------------------------------------------------------------------


def oracle_effective_labels(p: Pagination) -> list[tuple]:
    """Recompute (kind, components) pairs straight from the data structures."""
    labels = []
    for scan_id, scan in p.scans.items():
        if scan.status.value != "active":
            continue
        assignment = p.assignments.get(scan_id)
        if assignment is None:
            continue
        label = assignment.override.label if assignment.override else assignment.label
        labels.append((label.kind.value, label.components))
    return labels


def oracle_no_duplicates(p: Pagination) -> bool:
    labels = oracle_effective_labels(p)
    return len(labels) == len(set(labels))


def paginate(labels: list[str]) -> Pagination:
    p = Pagination()
    for i, text in enumerate(labels):
        scan_id = f"s{i}"
        p.add_scan(scan_id)
        if text:
            p.assign(scan_id, parse_page_label(text, i))
    return p


# --- label grammar extension ----------------------------------------------------


def test_keyword_labels_take_film_position():
    label = parse_page_label("plate", sequence_index=7)
    assert label.kind == PageLabelKind.PLATE
    assert label.components == (7,)
    assert parse_page_label("unnumbered", 3).components == (3,)


def test_keyword_labels_accept_explicit_ordinal():
    assert parse_page_label("plate 12", 0).components == (12,)
    assert parse_page_label("Unnumbered 4", 9).components == (4,)


def test_keyword_labels_are_case_insensitive():
    assert parse_page_label("PLATE 2", 0) == parse_page_label("plate 2", 5)


def test_non_keyword_falls_through_to_identifier_grammar():
    assert parse_page_label("D:17", 0).kind == PageLabelKind.LETTER_PREFIXED
    assert parse_page_label("xiv", 0).kind == PageLabelKind.ROMAN


# --- successor ------------------------------------------------------------------


@pytest.mark.parametrize("text,expected", [
    ("41", "42"),
    ("D:17", "D:18"),
    ("D17", "D18"),
    ("1.1", "1.2"),
    ("xiv", "xv"),
    ("XIV", "XV"),
])
def test_successor_forms(text, expected):
    succ = successor_label(parse_page_label(text, 0))
    assert succ is not None and succ.text == expected
    # successor re-parses to the same typed label
    assert parse_page_label(succ.text, 0) == succ


def test_successor_of_plate_is_none():
    assert successor_label(parse_page_label("plate 3", 0)) is None
    assert successor_label(parse_page_label("unnumbered", 5)) is None


# --- assignment -------------------------------------------------------------------


def test_assign_stores_and_reassign_corrects():
    p = paginate(["1"])
    assert p.assignments["s0"].label.text == "1"
    p.assign("s0", parse_page_label("2", 0))  # operator correction
    assert p.assignments["s0"].label.text == "2"
    assert oracle_no_duplicates(p)


def test_assign_duplicate_names_conflicting_scan():
    p = paginate(["1"])
    p.add_scan("s9")
    with pytest.raises(DuplicateLabel) as err:
        p.assign("s9", normalize_page_label("1"))
    assert err.value.details["conflicting_scan"] == "s0"


def test_assign_same_value_different_kind_allowed():
    p = paginate(["4", "iv"])
    assert oracle_no_duplicates(p)
    assert len(p.effective_labels()) == 2


def test_letter_pages_distinct_by_number():
    p = paginate(["D:1", "D:305"])
    assert len(p.effective_labels()) == 2


def test_colon_and_compact_letter_forms_collide():
    p = paginate(["D:4"])
    p.add_scan("s9")
    with pytest.raises(DuplicateLabel):
        p.assign("s9", normalize_page_label("D4"))


def test_assign_unknown_scan():
    with pytest.raises(UnknownScan):
        Pagination().assign("ghost", normalize_page_label("1"))


def test_assign_to_marked_scan_rejected():
    p = paginate(["1"])
    p.mark_duplicate("s0")
    with pytest.raises(ScanIsDuplicate):
        p.assign("s0", normalize_page_label("2"))


def test_add_scan_duplicate_id():
    p = paginate(["1"])
    with pytest.raises(DuplicateScanId):
        p.add_scan("s0")


# --- suggestions ------------------------------------------------------------------


def test_suggest_arabic_successor():
    p = paginate(["41", ""])
    assert p.suggest_next("s1").text == "42"


def test_suggest_letter_prefixed():
    p = paginate(["D:17", ""])
    assert p.suggest_next("s1").text == "D:18"


def test_suggest_nothing_for_first_scan():
    p = paginate([""])
    assert p.suggest_next("s0") is None


def test_suggest_skips_marked_scans():
    p = paginate(["5", "6", ""])
    p.mark_duplicate("s1")
    assert p.suggest_next("s2").text == "6"


def test_suggest_uses_nearest_preceding_not_following():
    p = paginate(["10", "", "30"])
    assert p.suggest_next("s1").text == "11"


def test_suggest_uses_override_label():
    p = paginate(["17", ""])
    p.set_override("s0", normalize_page_label("19"), "erratum notice")
    assert p.suggest_next("s1").text == "20"


def test_accepted_suggestions_never_conflict():
    p = paginate(["1"])
    for i in range(1, 40):
        scan_id = f"s{i}"
        p.add_scan(scan_id)
        suggestion = p.suggest_next(scan_id)
        assert suggestion is not None
        p.assign(scan_id, suggestion)  # must not raise DuplicateLabel
    assert oracle_no_duplicates(p)
    assert p.verify().complete


# --- duplicate marking ------------------------------------------------------------


def test_mark_releases_label_for_reuse():
    p = paginate(["5", ""])
    p.mark_duplicate("s0")
    p.assign("s1", normalize_page_label("5"))
    assert oracle_no_duplicates(p)


def test_mark_unmark_restores_exactly():
    p = paginate(["5"])
    before_assignment = p.assignments["s0"]
    p.mark_duplicate("s0")
    p.unmark_duplicate("s0")
    assert p.scans["s0"].status.value == "active"
    assert p.assignments["s0"] is before_assignment


def test_unmark_conflicts_when_label_was_claimed():
    p = paginate(["5", ""])
    p.mark_duplicate("s0")
    p.assign("s1", normalize_page_label("5"))
    with pytest.raises(DuplicateLabel):
        p.unmark_duplicate("s0")
    assert p.scans["s0"].status.value == "marked_duplicate"


def test_mark_twice_and_unmark_unmarked():
    p = paginate(["1"])
    p.mark_duplicate("s0")
    with pytest.raises(AlreadyMarked):
        p.mark_duplicate("s0")
    p.unmark_duplicate("s0")
    with pytest.raises(NotMarked):
        p.unmark_duplicate("s0")


# --- overrides --------------------------------------------------------------------


def test_override_changes_effective_label():
    p = paginate(["17"])
    p.set_override("s0", normalize_page_label("19"), "handwritten renumbering")
    assert p.assignments["s0"].effective_label.text == "19"
    assert p.assignments["s0"].label.text == "17"  # printed label kept


def test_override_equal_to_printed_label_accepted():
    p = paginate(["17"])
    p.set_override("s0", normalize_page_label("17"), "confirmed against errata")
    assert p.assignments["s0"].effective_label.text == "17"


def test_override_to_used_label_rejected():
    p = paginate(["17", "19"])
    with pytest.raises(DuplicateLabel):
        p.set_override("s0", normalize_page_label("19"), "erratum")


def test_override_requires_note_and_assignment():
    p = paginate(["17", ""])
    with pytest.raises(EmptyNote):
        p.set_override("s0", normalize_page_label("19"), "   ")
    with pytest.raises(NoAssignment):
        p.set_override("s1", normalize_page_label("19"), "note")


def test_override_frees_printed_label():
    p = paginate(["17", ""])
    p.set_override("s0", normalize_page_label("19"), "erratum")
    p.assign("s1", normalize_page_label("17"))
    assert oracle_no_duplicates(p)


# --- verification -----------------------------------------------------------------


def test_verify_complete_volume():
    p = paginate([str(n) for n in range(1, 11)])
    report = p.verify()
    assert report.complete and not report.unlabeled and not report.conflicts


def test_verify_lists_unlabeled_active_scans():
    p = paginate(["1", "", "3"])
    report = p.verify()
    assert not report.complete
    assert report.unlabeled == ["s1"]


def test_verify_ignores_marked_scans():
    p = paginate(["1", "", "3"])
    p.mark_duplicate("s1")
    assert p.verify().complete


def test_verify_is_read_only():
    p = paginate(["1", ""])
    before = (dict(p.scans), dict(p.assignments))
    p.verify()
    assert (p.scans, p.assignments) == before


# --- randomized operations vs oracle ------------------------------------------------

_LABEL_POOL = ([str(n) for n in range(1, 15)]
               + [f"D:{n}" for n in range(1, 6)]
               + ["1.1", "1.2", "2.1", "iv", "xiv", "plate 1", "plate 2"])


def random_ops_run(seed: int, scan_count: int, op_count: int) -> Pagination:
    rng = random.Random(seed)
    p = Pagination()
    ids = [f"v{seed}-s{i}" for i in range(scan_count)]
    for scan_id in ids:
        p.add_scan(scan_id)
    for _ in range(op_count):
        scan_id = rng.choice(ids)
        op = rng.choice(("assign", "assign", "assign", "mark", "unmark",
                         "override"))
        try:
            if op == "assign":
                p.assign(scan_id, parse_page_label(
                    rng.choice(_LABEL_POOL), p.scans[scan_id].sequence_index))
            elif op == "mark":
                p.mark_duplicate(scan_id)
            elif op == "unmark":
                p.unmark_duplicate(scan_id)
            else:
                p.set_override(scan_id, parse_page_label(
                    rng.choice(_LABEL_POOL), p.scans[scan_id].sequence_index),
                    "research note")
        except CaptureError:
            pass  # rejected operations must leave the volume consistent
        assert oracle_no_duplicates(p), f"duplicate labels after {op}"
        report = p.verify()
        assert report.complete == (not report.unlabeled and not report.conflicts)
        assert not report.conflicts
    return p


@given(st.integers(0, 10_000))
@settings(max_examples=60, deadline=None)
def test_random_operations_never_break_uniqueness(seed):
    random_ops_run(seed, scan_count=8, op_count=40)


def test_verify_matches_oracle_on_dense_volume():
    p = random_ops_run(seed=424242, scan_count=12, op_count=400)
    labels = oracle_effective_labels(p)
    assert len(labels) == len(set(labels))
    assert len(p.effective_labels()) == len(labels)
