"""Stage-two capture: article records and identifier derivation.

An article carries title, authors, first/last page labels, and an optional
abstract.  Its identifier takes the year the volume was *published*, never
a report year mentioned in the title; report years are extracted only for
display and search fields.  The (qualifier, page) pair comes from the
first-page label, the author initial from the first author's folded
surname, and collisions with previously issued codes under the same stem
get a dedup letter.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from . import codec
from .codec import Bibcode, PageLabel
from .errors import PageOrderViolation, StemUnresolved, UnknownPageLabel
from .pages import Pagination

_FORBIDDEN_IN_NAMES = ("\t", "\n", ";")


@dataclass(frozen=True)
class Author:
    last_name: str
    rest: str = ""

    def __post_init__(self) -> None:
        for part in (self.last_name, self.rest):
            if any(ch in part for ch in _FORBIDDEN_IN_NAMES):
                raise ValueError(f"name part {part!r} contains a reserved character")

    def display(self) -> str:
        return f"{self.last_name}, {self.rest}" if self.rest else self.last_name


@dataclass
class ArticleRecord:
    article_id: str
    volume_id: str
    title: str
    authors: list[Author]
    first_page: PageLabel
    last_page: PageLabel
    abstract: str | None = None
    bibcode: Bibcode | None = None


def resolve_article_pages(pagination: Pagination, first_text: str,
                          last_text: str) -> tuple[PageLabel, PageLabel]:
    """Map entered first/last labels onto the volume's effective labels.

    Both must exist among active scans and the first page's scan must not
    come after the last page's.
    """
    labels = []
    for text in (first_text, last_text):
        label = codec.normalize_page_label(text)
        scan = pagination.find_by_label(label)
        if scan is None:
            raise UnknownPageLabel(f"no active scan carries label {text!r}",
                                   label=text)
        labels.append((label, scan))
    (first, first_scan), (last, last_scan) = labels
    if first_scan.sequence_index > last_scan.sequence_index:
        raise PageOrderViolation(
            f"first page {first_text!r} comes after last page {last_text!r}",
            first=first_text, last=last_text)
    return first, last


def derive_bibcode(article: ArticleRecord, *, publication_year: int,
                   stem: str, volume: int | str,
                   existing_codes: set[str]) -> Bibcode:
    """Build the article's identifier and unduplicate it against ``existing_codes``.

    The year is always the volume's publication year, even when the title
    names the report years.
    """
    if not stem:
        raise StemUnresolved("volume has no resolved stem", article=article.article_id)
    qualifier, page = article.first_page.bibcode_fields()
    initial = (codec.author_initial(article.authors[0].last_name)
               if article.authors else None)
    candidate = Bibcode(year=publication_year, bibstem=stem, volume=volume,
                        page=page, qualifier=qualifier, author_initial=initial)
    return codec.assign_dedup_qualifier(existing_codes, candidate)


def format_journal_ref(*, full_title: str, volume: int | str,
                       first_page: PageLabel, last_page: PageLabel) -> str:
    """Human-readable source line: title, volume, page range."""
    if first_page == last_page:
        pages = f"p. {first_page.render()}"
    else:
        pages = f"pp. {first_page.render()}-{last_page.render()}"
    return f"{full_title}, vol. {volume}, {pages}"


_REPORT_YEARS_RE = re.compile(
    r"for\s+the\s+years?\s+(\d{4})(?:\s*(?:to|-|–)\s*(\d{4}))?",
    re.IGNORECASE)


@dataclass(frozen=True)
class ReportYears:
    start_year: int
    end_year: int


def extract_report_years(title: str) -> ReportYears | None:
    """Span of report years named in a title, for display and search only.

    Recognizes "for the year 1923", "for the years 1900 to 1904" and
    "for the years 1900-1904"; a single year yields start == end.
    """
    m = _REPORT_YEARS_RE.search(title)
    if not m:
        return None
    start = int(m.group(1))
    end = int(m.group(2)) if m.group(2) else start
    return ReportYears(start, end)
