"""Journal-abbreviation (bibstem) registry.

Maps publication titles, series designations, and year/volume ranges to
stems of at most five characters.  Name changes are tracked as
predecessor/successor continuity links; a title split into several series
keeps one entry per series so volume numbers in identifiers stay aligned
with the printed page.

Registries are immutable snapshots: mutations return a new value and
append an audit line.  The on-disk form is a UTF-8 TSV with columns

    stem  full_title  series  year_start  year_end  vol_start  vol_end
    predecessor  successor

where empty means "none"/"open" and ``#`` starts a comment line.  Loading
then serializing a canonical file reproduces it byte for byte.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, replace

from .codec import STEM_CHARS
from .errors import (
    AmbiguousStem,
    BrokenContinuityLink,
    DuplicateStem,
    OverlappingRanges,
    RegistryParseError,
    StemNotFound,
)

COLUMNS = ("stem", "full_title", "series_designation", "year_start", "year_end",
           "vol_start", "vol_end", "predecessor", "successor")

_WS_RE = re.compile(r"\s+")


def normalize_title(text: str) -> str:
    """Case-insensitive comparison key with collapsed whitespace."""
    return _WS_RE.sub(" ", text.strip()).casefold()


@dataclass(frozen=True)
class BibstemEntry:
    stem: str
    full_title: str
    series_designation: str | None = None
    year_start: int | None = None
    year_end: int | None = None
    vol_start: int | None = None
    vol_end: int | None = None
    predecessor: str | None = None
    successor: str | None = None

    def __post_init__(self) -> None:
        if not 1 <= len(self.stem) <= 5 or not set(self.stem) <= STEM_CHARS:
            raise RegistryParseError(
                f"stem must be 1-5 chars of [A-Za-z&+-], got {self.stem!r}")
        if not self.full_title.strip():
            raise RegistryParseError(f"entry {self.stem!r} has an empty title")
        for lo, hi, what in ((self.year_start, self.year_end, "year"),
                             (self.vol_start, self.vol_end, "volume")):
            if lo is not None and hi is not None and lo > hi:
                raise RegistryParseError(
                    f"entry {self.stem!r} has inverted {what} range {lo}-{hi}")

    def admits_year(self, year: int) -> bool:
        return ((self.year_start is None or year >= self.year_start)
                and (self.year_end is None or year <= self.year_end))

    def admits_volume(self, volume: int) -> bool:
        return ((self.vol_start is None or volume >= self.vol_start)
                and (self.vol_end is None or volume <= self.vol_end))


def _ranges_disjoint(a_lo, a_hi, b_lo, b_hi) -> bool:
    """True when both ranges are bounded enough to be provably disjoint."""
    if a_hi is not None and b_lo is not None and a_hi < b_lo:
        return True
    if b_hi is not None and a_lo is not None and b_hi < a_lo:
        return True
    return False


def _entries_separable(a: BibstemEntry, b: BibstemEntry) -> bool:
    """Same-title entries must differ by series or by a disjoint range axis."""
    a_series = normalize_title(a.series_designation) if a.series_designation else None
    b_series = normalize_title(b.series_designation) if b.series_designation else None
    if a_series != b_series:
        return True
    if _ranges_disjoint(a.year_start, a.year_end, b.year_start, b.year_end):
        return True
    return _ranges_disjoint(a.vol_start, a.vol_end, b.vol_start, b.vol_end)


class Registry:
    """Immutable stem registry snapshot.

    ``_lines`` preserves file order and comments so serialization is
    deterministic and comment-preserving.
    """

    def __init__(self, entries: dict[str, BibstemEntry],
                 lines: tuple[tuple[str, str], ...],
                 version: int = 1, audit: tuple[str, ...] = ()):
        self._entries = dict(entries)
        self._lines = lines
        self.version = version
        self.audit = audit
        self._check_invariants()

    def _check_invariants(self) -> None:
        by_title: dict[str, list[BibstemEntry]] = {}
        for entry in self._entries.values():
            by_title.setdefault(normalize_title(entry.full_title), []).append(entry)
        for family in by_title.values():
            for i, a in enumerate(family):
                for b in family[i + 1:]:
                    if not _entries_separable(a, b):
                        raise OverlappingRanges(
                            f"entries {a.stem!r} and {b.stem!r} share a title but "
                            "no series or disjoint range separates them",
                            stems=[a.stem, b.stem])
        for entry in self._entries.values():
            for link, back in ((entry.predecessor, "successor"),
                               (entry.successor, "predecessor")):
                if link is None:
                    continue
                other = self._entries.get(link)
                if other is None:
                    raise BrokenContinuityLink(
                        f"{entry.stem!r} links to missing stem {link!r}",
                        stem=entry.stem, target=link)
                if getattr(other, back) != entry.stem:
                    raise BrokenContinuityLink(
                        f"{entry.stem!r} -> {link!r} is not mirrored by "
                        f"{link!r}.{back}", stem=entry.stem, target=link)
        for stem in self._entries:
            seen = {stem}
            cursor = self._entries[stem].successor
            while cursor is not None:
                if cursor in seen:
                    raise BrokenContinuityLink(
                        f"continuity cycle through {cursor!r}", stem=cursor)
                seen.add(cursor)
                cursor = self._entries[cursor].successor

    def __len__(self) -> int:
        return len(self._entries)

    def __contains__(self, stem: str) -> bool:
        return stem in self._entries

    def get(self, stem: str) -> BibstemEntry:
        try:
            return self._entries[stem]
        except KeyError:
            raise StemNotFound(f"no entry for stem {stem!r}", stem=stem) from None

    def entries(self) -> list[BibstemEntry]:
        """Entries in file order."""
        return [self._entries[ref] for kind, ref in self._lines if kind == "entry"]

    def resolve(self, title: str, series: str | None = None,
                year: int | None = None, volume: int | None = None) -> str:
        """Stem of the unique entry admitting the query.

        Matching is exact after normalization; a query without a series only
        matches entries without one.  Series decides before year, year before
        volume, so a series designation wins over a conflicting volume.
        """
        title_key = normalize_title(title)
        series_key = normalize_title(series) if series else None
        candidates = [e for e in self.entries()
                      if normalize_title(e.full_title) == title_key]
        if not candidates:
            raise StemNotFound(f"no entry titled {title!r}", title=title)
        candidates = [
            e for e in candidates
            if (normalize_title(e.series_designation)
                if e.series_designation else None) == series_key]
        for narrowing in (
            (lambda e: e.admits_year(year)) if year is not None else None,
            (lambda e: e.admits_volume(volume)) if volume is not None else None,
        ):
            if len(candidates) == 1:
                return candidates[0].stem
            if narrowing is not None:
                candidates = [e for e in candidates if narrowing(e)]
        if len(candidates) == 1:
            return candidates[0].stem
        if not candidates:
            raise StemNotFound(
                f"no entry admits title {title!r} with the given constraints",
                title=title, series=series, year=year, volume=volume)
        raise AmbiguousStem(
            f"{len(candidates)} entries admit title {title!r}; add series, year "
            f"or volume constraints", title=title,
            stems=[e.stem for e in candidates])

    def register(self, entry: BibstemEntry) -> "Registry":
        """New snapshot containing ``entry``; back-fills continuity links."""
        if entry.stem in self._entries:
            raise DuplicateStem(f"stem {entry.stem!r} already registered",
                                stem=entry.stem)
        entries = dict(self._entries)
        for link, field_on_other in ((entry.predecessor, "successor"),
                                     (entry.successor, "predecessor")):
            if link is None:
                continue
            if link not in entries:
                raise BrokenContinuityLink(
                    f"{entry.stem!r} links to missing stem {link!r}",
                    stem=entry.stem, target=link)
            other = entries[link]
            current = getattr(other, field_on_other)
            if current is None:
                entries[link] = replace(other, **{field_on_other: entry.stem})
            elif current != entry.stem:
                raise BrokenContinuityLink(
                    f"{link!r} already has a {field_on_other} ({current!r})",
                    stem=entry.stem, target=link)
        entries[entry.stem] = entry
        return Registry(
            entries, self._lines + (("entry", entry.stem),),
            version=self.version + 1,
            audit=self.audit + (f"v{self.version + 1} add {entry.stem}",))

    def continuity_chain(self, stem: str) -> list[str]:
        """Maximal predecessor-to-successor chain containing ``stem``, oldest first."""
        entry = self.get(stem)
        chain = [stem]
        cursor = entry.predecessor
        while cursor is not None:
            chain.insert(0, cursor)
            cursor = self.get(cursor).predecessor
        cursor = entry.successor
        while cursor is not None:
            chain.append(cursor)
            cursor = self.get(cursor).successor
        return chain

    def to_tsv(self) -> str:
        """Serialize; comments and entry order are preserved."""
        out: list[str] = []
        for kind, ref in self._lines:
            if kind == "comment":
                out.append(ref)
            else:
                e = self._entries[ref]
                out.append("\t".join([
                    e.stem, e.full_title, e.series_designation or "",
                    _fmt(e.year_start), _fmt(e.year_end),
                    _fmt(e.vol_start), _fmt(e.vol_end),
                    e.predecessor or "", e.successor or "",
                ]))
        return "".join(line + "\n" for line in out)


def _fmt(value: int | None) -> str:
    return "" if value is None else str(value)


def _parse_int(raw: str, line_no: int, column: int) -> int | None:
    if raw == "":
        return None
    if not raw.isdigit():
        raise RegistryParseError(
            f"line {line_no}, column {column}: expected an integer, got {raw!r}",
            line=line_no, column=column)
    return int(raw)


def load_registry(source: str) -> Registry:
    """Parse TSV registry content and verify every invariant."""
    entries: dict[str, BibstemEntry] = {}
    lines: list[tuple[str, str]] = []
    for line_no, raw in enumerate(source.splitlines(), start=1):
        if raw.startswith("#"):
            lines.append(("comment", raw))
            continue
        if raw.strip() == "":
            if raw == "":
                lines.append(("comment", raw))  # blank separator line
                continue
            raise RegistryParseError(f"line {line_no}: whitespace-only line",
                                     line=line_no, column=1)
        fields = raw.split("\t")
        if len(fields) != len(COLUMNS):
            raise RegistryParseError(
                f"line {line_no}: expected {len(COLUMNS)} columns, got {len(fields)}",
                line=line_no, column=len(fields))
        stem = fields[0]
        if stem in entries:
            raise DuplicateStem(f"line {line_no}: duplicate stem {stem!r}",
                                stem=stem, line=line_no)
        try:
            entry = BibstemEntry(
                stem=stem,
                full_title=fields[1],
                series_designation=fields[2] or None,
                year_start=_parse_int(fields[3], line_no, 4),
                year_end=_parse_int(fields[4], line_no, 5),
                vol_start=_parse_int(fields[5], line_no, 6),
                vol_end=_parse_int(fields[6], line_no, 7),
                predecessor=fields[7] or None,
                successor=fields[8] or None,
            )
        except RegistryParseError as exc:
            raise RegistryParseError(f"line {line_no}: {exc.message}",
                                     line=line_no) from None
        entries[stem] = entry
        lines.append(("entry", stem))
    return Registry(entries, tuple(lines))
