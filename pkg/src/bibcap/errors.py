"""Domain error hierarchy.

Every error carries a stable machine-readable ``code`` string; the HTTP
layer and the CLI surface that code verbatim, so the class names here are
a public contract.
"""

from __future__ import annotations

from typing import Any


class CaptureError(Exception):
    """Base class for all domain errors."""

    code = "CaptureError"

    def __init__(self, message: str, **details: Any):
        super().__init__(message)
        self.message = message
        self.details = details


# --- bibcode codec ---------------------------------------------------------

class BibcodeError(CaptureError, ValueError):
    """Invalid bibcode string or field; ``code`` names the violated rule."""

    def __init__(self, code: str, message: str, **details: Any):
        super().__init__(message, **details)
        self.code = code


class UnparseableLabel(CaptureError):
    code = "Unparseable"


class UnsupportedForBibcode(CaptureError):
    code = "UnsupportedForBibcode"


class QualifierOccupied(CaptureError):
    code = "QualifierOccupied"


class DedupExhausted(CaptureError):
    code = "DedupExhausted"


# --- bibstem registry ------------------------------------------------------

class RegistryParseError(CaptureError):
    code = "ParseError"


class DuplicateStem(CaptureError):
    code = "DuplicateStem"


class OverlappingRanges(CaptureError):
    code = "OverlappingRanges"


class BrokenContinuityLink(CaptureError):
    code = "BrokenContinuityLink"


class StemNotFound(CaptureError):
    code = "NotFound"


class AmbiguousStem(CaptureError):
    code = "Ambiguous"


# --- pagination ------------------------------------------------------------

class UnknownScan(CaptureError):
    code = "UnknownScan"


class DuplicateScanId(CaptureError):
    code = "DuplicateScanId"


class DuplicateLabel(CaptureError):
    code = "DuplicateLabel"


class ScanIsDuplicate(CaptureError):
    code = "ScanIsDuplicate"


class AlreadyMarked(CaptureError):
    code = "AlreadyMarked"


class NotMarked(CaptureError):
    code = "NotMarked"


class NoAssignment(CaptureError):
    code = "NoAssignment"


class EmptyNote(CaptureError):
    code = "EmptyNote"


# --- articles ---------------------------------------------------------------

class UnknownPageLabel(CaptureError):
    code = "UnknownPageLabel"


class PageOrderViolation(CaptureError):
    code = "PageOrderViolation"


class StemUnresolved(CaptureError):
    code = "StemUnresolved"


# --- workflow ----------------------------------------------------------------

class WrongState(CaptureError):
    code = "WrongState"


class InvalidYear(CaptureError):
    code = "InvalidYear"


class PaginationIncomplete(CaptureError):
    code = "PaginationIncomplete"


class VersionConflict(CaptureError):
    code = "VersionConflict"


class NoArticles(CaptureError):
    code = "NoArticles"


class UnderivedBibcodes(CaptureError):
    code = "UnderivedBibcodes"


class ArticlesExist(CaptureError):
    code = "ArticlesExist"


class UnknownVolume(CaptureError):
    code = "UnknownVolume"


class UnknownArticle(CaptureError):
    code = "UnknownArticle"


class BadRequest(CaptureError):
    """Malformed request at the transport layer (bad action or target name)."""

    code = "BadRequest"
