"""Metadata capture and bibliographic identifiers for scanned publications.

The package splits into five layers: ``codec`` (the 19-character
identifier and page-label grammar), ``registry`` (publication stems and
their continuity links), ``pages`` (stage one: numbering scans),
``articles`` (stage two: article records and identifier derivation), and
``workflow`` (persistence, state machine, export) with ``service`` and
``cli`` on top.
"""

from . import errors
from .articles import (
    ArticleRecord,
    Author,
    ReportYears,
    derive_bibcode,
    extract_report_years,
    format_journal_ref,
    resolve_article_pages,
)
from .codec import (
    Bibcode,
    Finding,
    PageLabel,
    PageLabelKind,
    assign_dedup_qualifier,
    author_initial,
    fold_to_ascii,
    format_bibcode,
    normalize_page_label,
    parse_bibcode,
    validate_bibcode_string,
)
from .pages import (
    Pagination,
    PaginationReport,
    ScanStatus,
    parse_page_label,
    successor_label,
)
from .registry import BibstemEntry, Registry, load_registry, normalize_title
from .workflow import (
    CaptureStore,
    ExportRecord,
    Volume,
    VolumeState,
    build_export_records,
    serialize_export,
)

__all__ = [
    "ArticleRecord",
    "Author",
    "Bibcode",
    "BibstemEntry",
    "CaptureStore",
    "ExportRecord",
    "Finding",
    "PageLabel",
    "PageLabelKind",
    "Pagination",
    "PaginationReport",
    "Registry",
    "ReportYears",
    "ScanStatus",
    "Volume",
    "VolumeState",
    "assign_dedup_qualifier",
    "author_initial",
    "build_export_records",
    "derive_bibcode",
    "errors",
    "extract_report_years",
    "fold_to_ascii",
    "format_bibcode",
    "format_journal_ref",
    "load_registry",
    "normalize_page_label",
    "normalize_title",
    "parse_bibcode",
    "parse_page_label",
    "resolve_article_pages",
    "serialize_export",
    "successor_label",
    "validate_bibcode_string",
]

__version__ = "0.1.0"
