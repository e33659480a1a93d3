"""19-character bibliographic identifier codec and page-label grammar.

The identifier packs six fields into fixed positions, padded with ``.``:

    position  width  field            alignment
    0-3       4      year             four digits, 1000-9999
    4-8       5      journal stem     left, 1-5 chars of [A-Za-z&+-]
    9-12      4      volume           right, 1-9999, or a 4-letter
                                      lowercase type tag (e.g. "conf")
    13        1      qualifier        'L' letter flag, 'A'-'P' page
                                      designator, 'Q'-'Z' dedup, '.' unused
    14-17     4      page             right, 1-9999
    18        1      author initial   'A'-'Z', or '.' when unknown

``format_bibcode`` and ``parse_bibcode`` are exact inverses over valid
values.  ``normalize_page_label`` turns a printed page designation ("305",
"D4", "D:305", "1.1", "xiv") into a typed :class:`PageLabel`, whose
``bibcode_fields()`` yields the (qualifier, page) pair for the identifier.
``assign_dedup_qualifier`` resolves collisions between otherwise-identical
codes by claiming the first free letter in Q-Z.
"""

from __future__ import annotations

import re
import string
import unicodedata
from dataclasses import dataclass, field
from enum import Enum

from .errors import (
    BibcodeError,
    DedupExhausted,
    QualifierOccupied,
    UnparseableLabel,
    UnsupportedForBibcode,
)

CODE_LENGTH = 19

STEM_CHARS = frozenset(string.ascii_letters + "&+-")
DESIGNATOR_LETTERS = frozenset("ABCDEFGHIJKMNOP")  # A-P minus the letter flag
LETTER_FLAG = "L"
DEDUP_LETTERS = "QRSTUVWXYZ"

_TYPE_CODE_RE = re.compile(r"^[a-z]{4}$")
_PADDED_NUMBER_RE = re.compile(r"^\.*([1-9][0-9]*)$")


class Diagnostic(str, Enum):
    """Stable codes for identifier validation findings."""

    WRONG_LENGTH = "WrongLength"
    INVALID_YEAR = "InvalidYear"
    INVALID_STEM = "InvalidStem"
    INVALID_VOLUME = "InvalidVolume"
    INVALID_QUALIFIER = "InvalidQualifier"
    INVALID_PAGE = "InvalidPage"
    INVALID_AUTHOR = "InvalidAuthorChar"


@dataclass(frozen=True)
class Finding:
    """One violated rule, located by half-open character range."""

    code: Diagnostic
    start: int
    end: int
    message: str

    def __str__(self) -> str:
        return f"{self.code.value} at chars {self.start}-{self.end - 1}: {self.message}"


class QualifierKind(Enum):
    NONE = "none"
    LETTER = "letter"
    PAGE_DESIGNATOR = "page_designator"
    DEDUP = "dedup"


def qualifier_kind(qualifier: str | None) -> QualifierKind:
    if qualifier is None:
        return QualifierKind.NONE
    if qualifier == LETTER_FLAG:
        return QualifierKind.LETTER
    if qualifier in DESIGNATOR_LETTERS:
        return QualifierKind.PAGE_DESIGNATOR
    if qualifier in DEDUP_LETTERS:
        return QualifierKind.DEDUP
    raise BibcodeError(Diagnostic.INVALID_QUALIFIER.value,
                       f"not a qualifier character: {qualifier!r}")


@dataclass(frozen=True)
class Bibcode:
    """Decomposed identifier; construction validates every field."""

    year: int
    bibstem: str
    volume: int | str
    page: int
    qualifier: str | None = None
    author_initial: str | None = None

    def __post_init__(self) -> None:
        if not isinstance(self.year, int) or not 1000 <= self.year <= 9999:
            raise BibcodeError(Diagnostic.INVALID_YEAR.value,
                               f"year must be 1000-9999, got {self.year!r}")
        stem = self.bibstem
        if not isinstance(stem, str) or not 1 <= len(stem) <= 5 or not set(stem) <= STEM_CHARS:
            raise BibcodeError(Diagnostic.INVALID_STEM.value,
                               f"stem must be 1-5 chars of [A-Za-z&+-], got {stem!r}")
        vol = self.volume
        if isinstance(vol, int):
            if not 1 <= vol <= 9999:
                raise BibcodeError(Diagnostic.INVALID_VOLUME.value,
                                   f"volume must be 1-9999, got {vol!r}")
        elif not (isinstance(vol, str) and _TYPE_CODE_RE.match(vol)):
            raise BibcodeError(Diagnostic.INVALID_VOLUME.value,
                               f"volume must be an integer or 4-letter type code, got {vol!r}")
        qualifier_kind(self.qualifier)  # raises on anything outside A-Z/None
        if not isinstance(self.page, int) or not 1 <= self.page <= 9999:
            raise BibcodeError(Diagnostic.INVALID_PAGE.value,
                               f"page must be 1-9999, got {self.page!r}")
        a = self.author_initial
        if a is not None and (len(a) != 1 or a not in string.ascii_uppercase):
            raise BibcodeError(Diagnostic.INVALID_AUTHOR.value,
                               f"author initial must be A-Z, got {a!r}")

    def __str__(self) -> str:
        return format_bibcode(self)


def format_bibcode(code: Bibcode) -> str:
    """Render the 19-character form of a valid :class:`Bibcode`."""
    vol = code.volume if isinstance(code.volume, str) else str(code.volume).rjust(4, ".")
    return (
        f"{code.year:04d}"
        f"{code.bibstem.ljust(5, '.')}"
        f"{vol}"
        f"{code.qualifier or '.'}"
        f"{str(code.page).rjust(4, '.')}"
        f"{code.author_initial or '.'}"
    )


def _scan_fields(text: str) -> tuple[list[Finding], dict]:
    """Check every field of a candidate code; return findings and parsed values."""
    findings: list[Finding] = []
    if len(text) != CODE_LENGTH:
        return [Finding(Diagnostic.WRONG_LENGTH, 0, len(text),
                        f"expected {CODE_LENGTH} characters, got {len(text)}")], {}

    values: dict = {}

    year_field = text[0:4]
    if not year_field.isdigit() or int(year_field) < 1000:
        findings.append(Finding(Diagnostic.INVALID_YEAR, 0, 4,
                                f"year field {year_field!r} is not a four-digit year"))
    else:
        values["year"] = int(year_field)

    stem_field = text[4:9]
    stem = stem_field.rstrip(".")
    if not stem or "." in stem or not set(stem) <= STEM_CHARS:
        findings.append(Finding(Diagnostic.INVALID_STEM, 4, 9,
                                f"stem field {stem_field!r} is not a dot-padded stem"))
    else:
        values["bibstem"] = stem

    vol_field = text[9:13]
    if _TYPE_CODE_RE.match(vol_field):
        values["volume"] = vol_field
    else:
        m = _PADDED_NUMBER_RE.match(vol_field)
        if m:
            values["volume"] = int(m.group(1))
        else:
            findings.append(Finding(
                Diagnostic.INVALID_VOLUME, 9, 13,
                f"volume field {vol_field!r} is neither right-aligned digits nor a type code"))

    q = text[13]
    if q == ".":
        values["qualifier"] = None
    elif q in string.ascii_uppercase:
        values["qualifier"] = q
    else:
        findings.append(Finding(Diagnostic.INVALID_QUALIFIER, 13, 14,
                                f"qualifier {q!r} is not '.' or A-Z"))

    page_field = text[14:18]
    m = _PADDED_NUMBER_RE.match(page_field)
    if m:
        values["page"] = int(m.group(1))
    else:
        findings.append(Finding(Diagnostic.INVALID_PAGE, 14, 18,
                                f"page field {page_field!r} is not right-aligned digits"))

    a = text[18]
    if a == ".":
        values["author_initial"] = None
    elif a in string.ascii_uppercase:
        values["author_initial"] = a
    else:
        findings.append(Finding(Diagnostic.INVALID_AUTHOR, 18, 19,
                                f"author character {a!r} is not '.' or A-Z"))

    return findings, values


def validate_bibcode_string(text: str) -> list[Finding]:
    """All rule violations in ``text``; empty iff :func:`parse_bibcode` accepts it."""
    findings, _ = _scan_fields(text)
    return findings


def parse_bibcode(text: str) -> Bibcode:
    """Decompose a 19-character code; raises :class:`BibcodeError` on the first violation."""
    findings, values = _scan_fields(text)
    if findings:
        first = findings[0]
        raise BibcodeError(first.code.value, str(first), findings=findings)
    return Bibcode(**values)


def assign_dedup_qualifier(existing: set[str], candidate: Bibcode) -> Bibcode:
    """Return ``candidate``, re-qualified with the first free Q-Z letter on collision.

    ``existing`` holds formatted 19-character codes already claimed under the
    same stem.  A candidate that collides while already carrying a qualifier
    cannot be unduplicated here; the pagination has to resolve it.
    """
    if format_bibcode(candidate) not in existing:
        return candidate
    if candidate.qualifier is not None:
        raise QualifierOccupied(
            f"{format_bibcode(candidate)} collides but qualifier "
            f"{candidate.qualifier!r} is already in use",
            bibcode=format_bibcode(candidate), qualifier=candidate.qualifier)
    for letter in DEDUP_LETTERS:
        requalified = Bibcode(
            year=candidate.year, bibstem=candidate.bibstem, volume=candidate.volume,
            page=candidate.page, qualifier=letter,
            author_initial=candidate.author_initial)
        if format_bibcode(requalified) not in existing:
            return requalified
    raise DedupExhausted(
        f"all dedup letters {DEDUP_LETTERS[0]}-{DEDUP_LETTERS[-1]} taken for "
        f"{format_bibcode(candidate)}", bibcode=format_bibcode(candidate))


# --- page labels --------------------------------------------------------------

class PageLabelKind(str, Enum):
    ARABIC = "arabic"
    ROMAN = "roman"
    LETTER_PREFIXED = "letter"
    COMPOSITE = "composite"
    PLATE = "plate"
    UNNUMBERED = "unnumbered"


@dataclass(frozen=True)
class PageLabel:
    """A typed page designation.

    Labels compare (and hash) by ``(kind, components)`` so that the uniqueness
    rule sees "D4" and "D:4" as the same page while keeping the printed text
    for display.  Components per kind:

        arabic     (number,)
        roman      (value,)
        letter     (letter, number)
        composite  (major, minor)
        plate      (ordinal,)
        unnumbered (ordinal,)
    """

    kind: PageLabelKind
    components: tuple
    text: str = field(compare=False)

    @property
    def number(self) -> int:
        """Primary numeric value (the leading component for composites)."""
        if self.kind == PageLabelKind.LETTER_PREFIXED:
            return self.components[1]
        return self.components[0]

    @property
    def sublabel(self) -> int | None:
        if self.kind == PageLabelKind.COMPOSITE:
            return self.components[1]
        return None

    @property
    def qualifier(self) -> str | None:
        """Page-designator letter destined for the identifier qualifier slot."""
        if self.kind == PageLabelKind.LETTER_PREFIXED:
            return self.components[0]
        return None

    def bibcode_fields(self) -> tuple[str | None, int]:
        """(qualifier, page) for the identifier, or UnsupportedForBibcode."""
        if self.kind in (PageLabelKind.ROMAN, PageLabelKind.PLATE,
                         PageLabelKind.UNNUMBERED):
            raise UnsupportedForBibcode(
                f"{self.kind.value} label {self.text!r} cannot populate the page "
                "field without an override", label=self.text, kind=self.kind.value)
        if self.kind == PageLabelKind.LETTER_PREFIXED:
            letter, number = self.components
            if letter not in DESIGNATOR_LETTERS:
                raise UnsupportedForBibcode(
                    f"letter {letter!r} is reserved and cannot serve as a page "
                    "designator", label=self.text, kind=self.kind.value)
            qualifier = letter
        else:
            qualifier, number = None, self.number
        if not 1 <= number <= 9999:
            raise UnsupportedForBibcode(
                f"page value {number} outside 1-9999", label=self.text,
                kind=self.kind.value)
        return qualifier, number

    def render(self) -> str:
        """Canonical display form ("D:305", "1.1", "xiv", "plate 3")."""
        if self.kind == PageLabelKind.ARABIC:
            return str(self.components[0])
        if self.kind == PageLabelKind.ROMAN:
            return int_to_roman(self.components[0]).lower()
        if self.kind == PageLabelKind.LETTER_PREFIXED:
            return f"{self.components[0]}:{self.components[1]}"
        if self.kind == PageLabelKind.COMPOSITE:
            return f"{self.components[0]}.{self.components[1]}"
        return f"{self.kind.value} {self.components[0]}"


_ARABIC_RE = re.compile(r"^([0-9]+)$")
_COMPOSITE_RE = re.compile(r"^([0-9]+)\.([0-9]+)$")
_LETTER_RE = re.compile(r"^([A-Za-z]):?([0-9]+)$")
_ROMAN_FORM_RE = re.compile(r"^M{0,4}(CM|CD|D?C{0,3})(XC|XL|L?X{0,3})(IX|IV|V?I{0,3})$")

_ROMAN_VALUES = {"I": 1, "V": 5, "X": 10, "L": 50, "C": 100, "D": 500, "M": 1000}


def roman_to_int(text: str) -> int | None:
    """Value of a canonical roman numeral (all-upper or all-lower), else None."""
    if not text or not (text.isupper() or text.islower()):
        return None
    upper = text.upper()
    if not _ROMAN_FORM_RE.match(upper):
        return None
    total = 0
    for ch, nxt in zip(upper, upper[1:] + " "):
        value = _ROMAN_VALUES[ch]
        total += -value if nxt != " " and _ROMAN_VALUES.get(nxt, 0) > value else value
    return total


def int_to_roman(value: int) -> str:
    if not 1 <= value <= 4999:
        raise ValueError(f"roman numerals cover 1-4999, got {value}")
    out = []
    for amount, symbol in ((1000, "M"), (900, "CM"), (500, "D"), (400, "CD"),
                           (100, "C"), (90, "XC"), (50, "L"), (40, "XL"),
                           (10, "X"), (9, "IX"), (5, "V"), (4, "IV"), (1, "I")):
        while value >= amount:
            out.append(symbol)
            value -= amount
    return "".join(out)


def normalize_page_label(raw: str) -> PageLabel:
    """Parse a printed page designation.

    Grammar: decimal digits; letter+digits; letter+':'+digits; digits '.'
    digits; roman numerals (homogeneous case).  Raises
    :class:`UnparseableLabel` otherwise.  Surrounding whitespace is the
    caller's problem and is rejected, not stripped.
    """
    if not raw or raw != raw.strip():
        raise UnparseableLabel(f"empty or whitespace-wrapped label {raw!r}", label=raw)
    m = _ARABIC_RE.match(raw)
    if m:
        return PageLabel(PageLabelKind.ARABIC, (int(m.group(1)),), raw)
    m = _COMPOSITE_RE.match(raw)
    if m:
        return PageLabel(PageLabelKind.COMPOSITE,
                         (int(m.group(1)), int(m.group(2))), raw)
    m = _LETTER_RE.match(raw)
    if m:
        return PageLabel(PageLabelKind.LETTER_PREFIXED,
                         (m.group(1).upper(), int(m.group(2))), raw)
    value = roman_to_int(raw)
    if value is not None:
        return PageLabel(PageLabelKind.ROMAN, (value,), raw)
    raise UnparseableLabel(f"no page-label grammar matches {raw!r}", label=raw)


# --- author initials -----------------------------------------------------------

# NFKD strips combining marks but leaves these letters intact.
_FOLD_MAP = str.maketrans({
    "Ø": "O", "ø": "o", "Æ": "AE", "æ": "ae", "Œ": "OE", "œ": "oe",
    "Ð": "D", "ð": "d", "Þ": "Th", "þ": "th", "ß": "ss",
    "Ł": "L", "ł": "l", "Đ": "D", "đ": "d", "Ħ": "H", "ħ": "h",
    "Ŋ": "N", "ŋ": "n", "Ŧ": "T", "ŧ": "t", "ı": "i",
})


def fold_to_ascii(text: str) -> str:
    """Strip diacritics and map stroked/ligature letters to ASCII."""
    decomposed = unicodedata.normalize("NFKD", text.translate(_FOLD_MAP))
    return "".join(ch for ch in decomposed if ord(ch) < 128
                   and not unicodedata.combining(ch))


def author_initial(last_name: str) -> str | None:
    """Uppercase first alphabetic character of the folded surname, or None."""
    for ch in fold_to_ascii(last_name):
        if ch.isalpha():
            return ch.upper()
    return None
