"""Stage-one capture: sequential page labeling over scan images.

A volume's scans are viewed in film order; each gets a page label, and
duplicate scans are flagged (never deleted) so they drop out of the
uniqueness rule.  The effective label of a scan is its override when one
was recorded (handwritten renumberings need a provenance note), otherwise
the printed label.  Effective labels must be unique among active scans,
compared by ``(kind, components)``, so an arabic "4" and a roman "iv" can
coexist.

Label strings use the identifier grammar from :mod:`bibcap.codec`,
extended with the keywords ``plate`` and ``unnumbered``; those carry an
ordinal (explicit, or the scan's film position) to keep them unique.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum

from . import codec
from .codec import PageLabel, PageLabelKind
from .errors import (
    AlreadyMarked,
    DuplicateLabel,
    DuplicateScanId,
    EmptyNote,
    NoAssignment,
    NotMarked,
    ScanIsDuplicate,
    UnknownScan,
)

_KEYWORD_RE = re.compile(r"^(plate|unnumbered)(?: ([0-9]+))?$", re.IGNORECASE)


class ScanStatus(str, Enum):
    ACTIVE = "active"
    MARKED_DUPLICATE = "marked_duplicate"


@dataclass
class ScanImage:
    scan_id: str
    sequence_index: int
    image_ref: str = ""
    status: ScanStatus = ScanStatus.ACTIVE


@dataclass(frozen=True)
class Override:
    label: PageLabel
    note: str


@dataclass
class PageAssignment:
    scan_id: str
    label: PageLabel
    override: Override | None = None

    @property
    def effective_label(self) -> PageLabel:
        return self.override.label if self.override else self.label


@dataclass
class PaginationReport:
    complete: bool
    unlabeled: list[str] = field(default_factory=list)
    conflicts: list[tuple[str, str, str]] = field(default_factory=list)


def parse_page_label(raw: str, sequence_index: int = 0) -> PageLabel:
    """Identifier grammar plus the plate/unnumbered keywords.

    A bare keyword takes the scan's film position as its ordinal.
    """
    m = _KEYWORD_RE.match(raw)
    if m:
        kind = PageLabelKind(m.group(1).lower())
        ordinal = int(m.group(2)) if m.group(2) else sequence_index
        return PageLabel(kind, (ordinal,), raw)
    return codec.normalize_page_label(raw)


def successor_label(label: PageLabel) -> PageLabel | None:
    """The next label in the same sequence, or None for one-off kinds."""
    kind, parts = label.kind, label.components
    if kind == PageLabelKind.ARABIC:
        return PageLabel(kind, (parts[0] + 1,), str(parts[0] + 1))
    if kind == PageLabelKind.ROMAN:
        text = codec.int_to_roman(parts[0] + 1)
        return PageLabel(kind, (parts[0] + 1,),
                         text if label.text.isupper() else text.lower())
    if kind == PageLabelKind.LETTER_PREFIXED:
        letter, number = parts
        sep = ":" if ":" in label.text else ""
        return PageLabel(kind, (letter, number + 1), f"{letter}{sep}{number + 1}")
    if kind == PageLabelKind.COMPOSITE:
        major, minor = parts
        return PageLabel(kind, (major, minor + 1), f"{major}.{minor + 1}")
    return None


class Pagination:
    """Scans and assignments of one volume, with the uniqueness rule enforced."""

    def __init__(self) -> None:
        self.scans: dict[str, ScanImage] = {}
        self.assignments: dict[str, PageAssignment] = {}

    # -- scan registration ---------------------------------------------------

    def add_scan(self, scan_id: str, image_ref: str = "") -> ScanImage:
        if scan_id in self.scans:
            raise DuplicateScanId(f"scan {scan_id!r} already ingested",
                                  scan_id=scan_id)
        scan = ScanImage(scan_id, sequence_index=len(self.scans),
                         image_ref=image_ref)
        self.scans[scan_id] = scan
        return scan

    def _scan(self, scan_id: str) -> ScanImage:
        try:
            return self.scans[scan_id]
        except KeyError:
            raise UnknownScan(f"no scan {scan_id!r}", scan_id=scan_id) from None

    def in_film_order(self) -> list[ScanImage]:
        return sorted(self.scans.values(), key=lambda s: s.sequence_index)

    # -- the uniqueness rule ---------------------------------------------------

    def effective_labels(self) -> dict[PageLabel, str]:
        """Effective label -> scan_id over active scans."""
        out: dict[PageLabel, str] = {}
        for scan_id, assignment in self.assignments.items():
            if self.scans[scan_id].status == ScanStatus.ACTIVE:
                out[assignment.effective_label] = scan_id
        return out

    def _claim_check(self, label: PageLabel, scan_id: str) -> None:
        holder = self.effective_labels().get(label)
        if holder is not None and holder != scan_id:
            raise DuplicateLabel(
                f"label {label.text!r} already on scan {holder!r}",
                label=label.text, conflicting_scan=holder)

    def find_by_label(self, label: PageLabel) -> ScanImage | None:
        scan_id = self.effective_labels().get(label)
        return self.scans[scan_id] if scan_id else None

    # -- operations -------------------------------------------------------------

    def assign(self, scan_id: str, label: PageLabel) -> PageAssignment:
        """Record (or correct) the printed label of an active scan."""
        scan = self._scan(scan_id)
        if scan.status != ScanStatus.ACTIVE:
            raise ScanIsDuplicate(f"scan {scan_id!r} is marked duplicate",
                                  scan_id=scan_id)
        self._claim_check(label, scan_id)
        assignment = PageAssignment(scan_id, label)
        self.assignments[scan_id] = assignment
        return assignment

    def suggest_next(self, scan_id: str) -> PageLabel | None:
        """Successor of the nearest preceding active assignment, if any."""
        scan = self._scan(scan_id)
        best: PageAssignment | None = None
        best_index = -1
        for other_id, assignment in self.assignments.items():
            other = self.scans[other_id]
            if (other.status == ScanStatus.ACTIVE
                    and best_index < other.sequence_index < scan.sequence_index):
                best, best_index = assignment, other.sequence_index
        if best is None:
            return None
        return successor_label(best.effective_label)

    def mark_duplicate(self, scan_id: str) -> ScanImage:
        """Flag a redundant scan; its label leaves the uniqueness set."""
        scan = self._scan(scan_id)
        if scan.status == ScanStatus.MARKED_DUPLICATE:
            raise AlreadyMarked(f"scan {scan_id!r} already marked", scan_id=scan_id)
        scan.status = ScanStatus.MARKED_DUPLICATE
        return scan

    def unmark_duplicate(self, scan_id: str) -> ScanImage:
        """Reverse a duplicate mark, restoring the prior assignment exactly."""
        scan = self._scan(scan_id)
        if scan.status != ScanStatus.MARKED_DUPLICATE:
            raise NotMarked(f"scan {scan_id!r} is not marked", scan_id=scan_id)
        assignment = self.assignments.get(scan_id)
        if assignment is not None:
            # The label may have been claimed by another scan while marked.
            self._claim_check(assignment.effective_label, scan_id)
        scan.status = ScanStatus.ACTIVE
        return scan

    def set_override(self, scan_id: str, label: PageLabel, note: str) -> PageAssignment:
        """Replace the effective label, e.g. for handwritten renumberings.

        The note records where the correction came from and is mandatory.
        """
        scan = self._scan(scan_id)
        if not note.strip():
            raise EmptyNote("override provenance note must not be empty",
                            scan_id=scan_id)
        assignment = self.assignments.get(scan_id)
        if assignment is None:
            raise NoAssignment(f"scan {scan_id!r} has no assignment to override",
                               scan_id=scan_id)
        if scan.status == ScanStatus.ACTIVE:
            self._claim_check(label, scan_id)
        assignment.override = Override(label, note)
        return assignment

    def verify(self) -> PaginationReport:
        """Completeness and uniqueness over active scans; read-only."""
        unlabeled = [s.scan_id for s in self.in_film_order()
                     if s.status == ScanStatus.ACTIVE
                     and s.scan_id not in self.assignments]
        seen: dict[PageLabel, str] = {}
        conflicts: list[tuple[str, str, str]] = []
        for scan in self.in_film_order():
            if scan.status != ScanStatus.ACTIVE:
                continue
            assignment = self.assignments.get(scan.scan_id)
            if assignment is None:
                continue
            label = assignment.effective_label
            if label in seen:
                conflicts.append((seen[label], scan.scan_id, label.text))
            else:
                seen[label] = scan.scan_id
        return PaginationReport(
            complete=not unlabeled and not conflicts,
            unlabeled=unlabeled, conflicts=conflicts)
