"""Volume workflow: two-stage state machine, event log, and export.

Capture happens in two stages.  A volume starts in page-numbering mode;
once every active scan carries a unique effective label it may transition
to article-entry mode, and after at least one article with a derived
identifier exists it can be finalized, which freezes it and registers its
codes under the stem's global code set.

Every volume is persisted as an append-only JSONL event log plus derived
snapshots (``meta.json``, ``pages.tsv``, ``articles.tsv``).  The log is
the source of truth: replaying it reconstructs the exact same state,
including the version counter, so snapshots can always be rebuilt.
Mutations are serialized per volume and carry an optional expected
version; a stale version is rejected without side effects.
"""

from __future__ import annotations

import hashlib
import json
import threading
import uuid
from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import Enum
from pathlib import Path
from typing import Any, Callable, Iterable

from . import articles as articles_mod
from . import codec
from .articles import ArticleRecord, Author
from .codec import Bibcode, PageLabel
from .errors import (
    AmbiguousStem,
    ArticlesExist,
    DuplicateScanId,
    InvalidYear,
    NoArticles,
    PaginationIncomplete,
    StemNotFound,
    StemUnresolved,
    UnderivedBibcodes,
    UnknownArticle,
    UnknownScan,
    UnknownVolume,
    VersionConflict,
    WrongState,
)
from .pages import Pagination, PaginationReport, PageAssignment, ScanStatus, parse_page_label
from .registry import Registry

EXPORT_ORIGIN = "ADS"

_MEDIA_EXT = {"image/png": ".png", "image/tiff": ".tif"}
_EXT_MEDIA = {ext: mt for mt, ext in _MEDIA_EXT.items()}


class VolumeState(str, Enum):
    PAGE_NUMBERING = "page_numbering"
    ARTICLE_ENTRY = "article_entry"
    FINALIZED = "finalized"


@dataclass
class Volume:
    volume_id: str
    full_title: str
    stem: str
    volume_number: int | str
    publication_year: int
    publication_month: int = 0
    series: str | None = None
    state: VolumeState = VolumeState.PAGE_NUMBERING
    version: int = 0
    pagination: Pagination = field(default_factory=Pagination)
    articles: dict[str, ArticleRecord] = field(default_factory=dict)

    @property
    def pub_date(self) -> str:
        return f"{self.publication_month:02d}/{self.publication_year:04d}"

    def derived_codes(self) -> set[str]:
        return {codec.format_bibcode(a.bibcode)
                for a in self.articles.values() if a.bibcode is not None}

    def articles_in_page_order(self) -> list[ArticleRecord]:
        by_label = self.pagination.effective_labels()
        scans = self.pagination.scans

        def key(item: tuple[int, ArticleRecord]) -> tuple[int, int]:
            index, article = item
            scan_id = by_label.get(article.first_page)
            position = scans[scan_id].sequence_index if scan_id else 10 ** 9
            return position, index

        ordered = sorted(enumerate(self.articles.values()), key=key)
        return [article for _, article in ordered]


@dataclass(frozen=True)
class ExportRecord:
    bibcode: str
    title: str
    authors: str
    journal_ref: str
    pub_date: str
    origin: str = EXPORT_ORIGIN


EXPORT_FIELDS = (
    ("Title", "title"),
    ("Authors", "authors"),
    ("Journal", "journal_ref"),
    ("Publication Date", "pub_date"),
    ("Origin", "origin"),
    ("Bibliographic Code", "bibcode"),
)


def serialize_export(records: Iterable[ExportRecord]) -> str:
    """Blank-line-separated field blocks, one per record."""
    blocks = ["\n".join(f"{label}: {getattr(record, attr)}"
                        for label, attr in EXPORT_FIELDS)
              for record in records]
    return "\n\n".join(blocks) + "\n" if blocks else ""


def build_export_records(volume: Volume) -> list[ExportRecord]:
    records = []
    for article in volume.articles_in_page_order():
        assert article.bibcode is not None
        records.append(ExportRecord(
            bibcode=codec.format_bibcode(article.bibcode),
            title=article.title,
            authors="; ".join(a.display() for a in article.authors),
            journal_ref=articles_mod.format_journal_ref(
                full_title=volume.full_title, volume=volume.volume_number,
                first_page=article.first_page, last_page=article.last_page),
            pub_date=volume.pub_date,
        ))
    return records


def _now() -> str:
    return datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%S.%fZ")


def _apply_event(volume: Volume, event: dict) -> None:
    """Single mutation path shared by live operations and log replay.

    Raises before touching state, so a rejected operation leaves the
    volume (and its version) unchanged.
    """
    op = event["op"]
    data = event["data"]

    if op == "scans_ingested":
        _require_state(volume, op, VolumeState.PAGE_NUMBERING)
        for entry in data["scans"]:
            if entry["scan_id"] in volume.pagination.scans:
                raise DuplicateScanId(
                    f"scan {entry['scan_id']!r} already ingested",
                    scan_id=entry["scan_id"])
        for entry in data["scans"]:
            volume.pagination.add_scan(entry["scan_id"], entry["image_ref"])
    elif op == "page_assigned":
        _require_state(volume, op, VolumeState.PAGE_NUMBERING)
        scan = volume.pagination.scans.get(data["scan_id"])
        if scan is None:
            raise UnknownScan(f"no scan {data['scan_id']!r}", scan_id=data["scan_id"])
        label = parse_page_label(data["label"], scan.sequence_index)
        volume.pagination.assign(data["scan_id"], label)
    elif op == "duplicate_marked":
        _require_state(volume, op, VolumeState.PAGE_NUMBERING)
        volume.pagination.mark_duplicate(data["scan_id"])
    elif op == "duplicate_unmarked":
        _require_state(volume, op, VolumeState.PAGE_NUMBERING)
        volume.pagination.unmark_duplicate(data["scan_id"])
    elif op == "override_set":
        # Overrides stay legal during article entry: handwritten-number
        # research can conclude after the stage gate.
        _require_state(volume, op, VolumeState.PAGE_NUMBERING,
                       VolumeState.ARTICLE_ENTRY)
        scan = volume.pagination.scans.get(data["scan_id"])
        if scan is None:
            raise UnknownScan(f"no scan {data['scan_id']!r}", scan_id=data["scan_id"])
        label = parse_page_label(data["label"], scan.sequence_index)
        volume.pagination.set_override(data["scan_id"], label, data["note"])
    elif op == "transitioned":
        if data["target"] == VolumeState.ARTICLE_ENTRY.value:
            _require_state(volume, op, VolumeState.PAGE_NUMBERING)
            report = volume.pagination.verify()
            if not report.complete:
                raise PaginationIncomplete(
                    "pagination is not complete",
                    unlabeled=report.unlabeled, conflicts=report.conflicts)
            volume.state = VolumeState.ARTICLE_ENTRY
        elif data["target"] == VolumeState.PAGE_NUMBERING.value:
            _require_state(volume, op, VolumeState.ARTICLE_ENTRY)
            if volume.articles:
                raise ArticlesExist(
                    "cannot reopen page numbering while articles exist",
                    count=len(volume.articles))
            volume.state = VolumeState.PAGE_NUMBERING
        else:
            raise WrongState(f"unknown transition target {data['target']!r}")
    elif op == "article_created":
        _require_state(volume, op, VolumeState.ARTICLE_ENTRY)
        first, last = articles_mod.resolve_article_pages(
            volume.pagination, data["first_page"], data["last_page"])
        volume.articles[data["article_id"]] = ArticleRecord(
            article_id=data["article_id"], volume_id=volume.volume_id,
            title=data["title"],
            authors=[Author(last, rest) for last, rest in data["authors"]],
            first_page=first, last_page=last,
            abstract=data["abstract"] or None)
    elif op == "bibcode_derived":
        _require_state(volume, op, VolumeState.ARTICLE_ENTRY)
        article = volume.articles.get(data["article_id"])
        if article is None:
            raise UnknownArticle(f"no article {data['article_id']!r}",
                                 article_id=data["article_id"])
        article.bibcode = codec.parse_bibcode(data["bibcode"])
    elif op == "finalized":
        _require_state(volume, op, VolumeState.ARTICLE_ENTRY)
        if not volume.articles:
            raise NoArticles("volume has no articles")
        underived = [a.article_id for a in volume.articles.values()
                     if a.bibcode is None]
        if underived:
            raise UnderivedBibcodes(
                f"{len(underived)} article(s) lack identifiers",
                article_ids=underived)
        volume.state = VolumeState.FINALIZED
    else:
        raise ValueError(f"unknown event op {op!r}")

    volume.version = event["seq"]


def _require_state(volume: Volume, op: str, *allowed: VolumeState) -> None:
    if volume.state not in allowed:
        raise WrongState(
            f"{op} requires state {' or '.join(s.value for s in allowed)}, "
            f"volume is {volume.state.value}",
            state=volume.state.value, operation=op)


class CaptureStore:
    """Event-sourced store for volumes, scan blobs, and per-stem code sets."""

    def __init__(self, data_dir: str | Path, registry: Registry | None = None):
        self.data_dir = Path(data_dir)
        self.volumes_dir = self.data_dir / "volumes"
        self.blobs_dir = self.data_dir / "blobs"
        self.codes_dir = self.data_dir / "codes"
        for path in (self.volumes_dir, self.blobs_dir, self.codes_dir):
            path.mkdir(parents=True, exist_ok=True)
        if registry is not None:
            self.registry = registry
        else:
            registry_path = self.data_dir / "registry.tsv"
            if registry_path.exists():
                from .registry import load_registry
                self.registry = load_registry(registry_path.read_text("utf-8"))
            else:
                self.registry = Registry({}, ())
        self._volumes: dict[str, Volume] = {}
        self._scan_volume: dict[str, str] = {}
        self._global_lock = threading.Lock()
        self._locks: dict[str, threading.RLock] = {}
        for events_file in sorted(self.volumes_dir.glob("*/events.jsonl")):
            self._load_into_cache(events_file.parent.name)

    # -- cache and locking -----------------------------------------------------

    def _lock_for(self, volume_id: str) -> threading.RLock:
        # reentrant: derive holds it while _mutate re-acquires
        with self._global_lock:
            return self._locks.setdefault(volume_id, threading.RLock())

    def _events_path(self, volume_id: str) -> Path:
        return self.volumes_dir / volume_id / "events.jsonl"

    def _load_into_cache(self, volume_id: str) -> Volume:
        volume = self.replay_volume(volume_id)
        self._volumes[volume_id] = volume
        for scan_id in volume.pagination.scans:
            self._scan_volume[scan_id] = volume_id
        return volume

    def replay_volume(self, volume_id: str) -> Volume:
        """Rebuild a volume from its event log alone."""
        path = self._events_path(volume_id)
        if not path.exists():
            raise UnknownVolume(f"no volume {volume_id!r}", volume_id=volume_id)
        volume: Volume | None = None
        with path.open(encoding="utf-8") as handle:
            for line in handle:
                event = json.loads(line)
                if event["op"] == "volume_created":
                    data = event["data"]
                    volume = Volume(
                        volume_id=data["volume_id"],
                        full_title=data["full_title"],
                        stem=data["stem"],
                        volume_number=data["volume_number"],
                        publication_year=data["publication_year"],
                        publication_month=data["publication_month"],
                        series=data["series"],
                        version=event["seq"])
                else:
                    assert volume is not None, "log must start with volume_created"
                    _apply_event(volume, event)
        if volume is None:
            raise UnknownVolume(f"empty event log for {volume_id!r}",
                                volume_id=volume_id)
        return volume

    def get_volume(self, volume_id: str) -> Volume:
        volume = self._volumes.get(volume_id)
        if volume is None:
            raise UnknownVolume(f"no volume {volume_id!r}", volume_id=volume_id)
        return volume

    def list_volumes(self) -> list[Volume]:
        return [self._volumes[k] for k in sorted(self._volumes)]

    # -- persistence --------------------------------------------------------------

    def _append_event(self, volume_id: str, event: dict) -> None:
        line = json.dumps(event, sort_keys=True, ensure_ascii=False,
                          separators=(",", ":"))
        with self._events_path(volume_id).open("a", encoding="utf-8") as handle:
            handle.write(line + "\n")

    def _write_atomic(self, path: Path, content: str) -> None:
        tmp = path.with_suffix(path.suffix + ".tmp")
        tmp.write_text(content, encoding="utf-8")
        tmp.replace(path)

    def write_snapshots(self, volume: Volume) -> None:
        """Derive meta.json, pages.tsv and articles.tsv from current state."""
        vol_dir = self.volumes_dir / volume.volume_id
        meta = {
            "volume_id": volume.volume_id,
            "full_title": volume.full_title,
            "series": volume.series,
            "stem": volume.stem,
            "volume_number": volume.volume_number,
            "publication_year": volume.publication_year,
            "publication_month": volume.publication_month,
            "state": volume.state.value,
            "version": volume.version,
        }
        self._write_atomic(vol_dir / "meta.json",
                           json.dumps(meta, sort_keys=True, indent=2) + "\n")

        pages = ["# scan_id\tsequence_index\tstatus\tlabel_kind\tlabel_text"
                 "\toverride_text\toverride_note"]
        for scan in volume.pagination.in_film_order():
            assignment = volume.pagination.assignments.get(scan.scan_id)
            label_kind = assignment.label.kind.value if assignment else ""
            label_text = assignment.label.text if assignment else ""
            override_text = override_note = ""
            if assignment and assignment.override:
                override_text = assignment.override.label.text
                override_note = assignment.override.note
            pages.append("\t".join([
                scan.scan_id, str(scan.sequence_index), scan.status.value,
                label_kind, label_text, override_text, override_note]))
        self._write_atomic(vol_dir / "pages.tsv",
                           "".join(line + "\n" for line in pages))

        rows = ["# article_id\tbibcode\ttitle\tauthors\tfirst_page\tlast_page"
                "\tabstract_ref"]
        for article in volume.articles_in_page_order():
            abstract_ref = ""
            if article.abstract:
                abstract_ref = hashlib.sha256(
                    article.abstract.encode("utf-8")).hexdigest()
            rows.append("\t".join([
                article.article_id,
                codec.format_bibcode(article.bibcode) if article.bibcode else "",
                article.title,
                "; ".join(a.display() for a in article.authors),
                article.first_page.text, article.last_page.text,
                abstract_ref]))
        self._write_atomic(vol_dir / "articles.tsv",
                           "".join(line + "\n" for line in rows))

    def rebuild_snapshots(self, volume_id: str) -> Volume:
        volume = self._load_into_cache(volume_id)
        self.write_snapshots(volume)
        return volume

    def _mutate(self, volume_id: str, op: str, operator: str,
                expected_version: int | None,
                build_data: Callable[[Volume], dict]) -> Volume:
        with self._lock_for(volume_id):
            volume = self.get_volume(volume_id)
            if expected_version is not None and expected_version != volume.version:
                raise VersionConflict(
                    f"expected version {expected_version}, volume is at "
                    f"{volume.version}",
                    expected=expected_version, actual=volume.version)
            event = {
                "seq": volume.version + 1,
                "op": op,
                "operator": operator,
                "ts": _now(),
                "data": build_data(volume),
            }
            _apply_event(volume, event)
            self._append_event(volume_id, event)
            self.write_snapshots(volume)
            return volume

    # -- blobs -----------------------------------------------------------------

    def put_image(self, data: bytes, media_type: str = "image/png") -> str:
        ext = _MEDIA_EXT.get(media_type)
        if ext is None:
            raise ValueError(f"unsupported media type {media_type!r}")
        ref = hashlib.sha256(data).hexdigest() + ext
        path = self.blobs_dir / ref
        if not path.exists():
            path.write_bytes(data)
        return ref

    def scan_image(self, scan_id: str) -> tuple[bytes, str]:
        """Image bytes and media type for a scan, across all volumes."""
        volume_id = self._scan_volume.get(scan_id)
        if volume_id is None:
            raise UnknownScan(f"no scan {scan_id!r}", scan_id=scan_id)
        scan = self._volumes[volume_id].pagination.scans[scan_id]
        path = self.blobs_dir / scan.image_ref
        if not scan.image_ref or not path.exists():
            raise UnknownScan(f"scan {scan_id!r} has no stored image",
                              scan_id=scan_id)
        return path.read_bytes(), _EXT_MEDIA.get(path.suffix, "application/octet-stream")

    # -- volume lifecycle ---------------------------------------------------------

    def create_volume(self, *, full_title: str, volume_number: int | str,
                      publication_year: int, publication_month: int = 0,
                      series: str | None = None, volume_id: str | None = None,
                      operator: str = "anonymous") -> Volume:
        if not 1000 <= publication_year <= 9999:
            raise InvalidYear(f"publication year must be 1000-9999, got "
                              f"{publication_year}", year=publication_year)
        if not 0 <= publication_month <= 12:
            raise InvalidYear(f"publication month must be 0-12, got "
                              f"{publication_month}", month=publication_month)
        try:
            stem = self.registry.resolve(
                full_title, series=series, year=publication_year,
                volume=volume_number if isinstance(volume_number, int) else None)
        except (StemNotFound, AmbiguousStem) as exc:
            raise StemUnresolved(exc.message, **exc.details) from exc
        volume_id = volume_id or "vol-" + uuid.uuid4().hex[:12]
        if volume_id in self._volumes:
            raise UnknownVolume(f"volume id {volume_id!r} already exists",
                                volume_id=volume_id)
        (self.volumes_dir / volume_id).mkdir(parents=True, exist_ok=True)
        event = {
            "seq": 1, "op": "volume_created", "operator": operator, "ts": _now(),
            "data": {
                "volume_id": volume_id, "full_title": full_title,
                "series": series, "stem": stem, "volume_number": volume_number,
                "publication_year": publication_year,
                "publication_month": publication_month,
            },
        }
        volume = Volume(volume_id=volume_id, full_title=full_title, stem=stem,
                        volume_number=volume_number,
                        publication_year=publication_year,
                        publication_month=publication_month, series=series,
                        version=1)
        self._append_event(volume_id, event)
        self._volumes[volume_id] = volume
        self.write_snapshots(volume)
        return volume

    def ingest_scans(self, volume_id: str,
                     scans: list[tuple[str, bytes, str]],
                     expected_version: int | None = None,
                     operator: str = "anonymous") -> Volume:
        """Register scan images in film order; an empty list still bumps the version."""
        described = []
        for scan_id, data, media_type in scans:
            owner = self._scan_volume.get(scan_id)
            if owner is not None and owner != volume_id:
                raise DuplicateScanId(
                    f"scan {scan_id!r} already belongs to volume {owner!r}",
                    scan_id=scan_id, volume_id=owner)
            described.append({"scan_id": scan_id,
                              "image_ref": self.put_image(data, media_type),
                              "media_type": media_type})
        volume = self._mutate(volume_id, "scans_ingested", operator,
                              expected_version,
                              lambda _v: {"scans": described})
        for entry in described:
            self._scan_volume[entry["scan_id"]] = volume_id
        return volume

    def assign_page(self, volume_id: str, scan_id: str, label: str,
                    expected_version: int | None = None,
                    operator: str = "anonymous") -> Volume:
        return self._mutate(volume_id, "page_assigned", operator, expected_version,
                            lambda _v: {"scan_id": scan_id, "label": label})

    def mark_duplicate(self, volume_id: str, scan_id: str,
                       expected_version: int | None = None,
                       operator: str = "anonymous") -> Volume:
        return self._mutate(volume_id, "duplicate_marked", operator,
                            expected_version, lambda _v: {"scan_id": scan_id})

    def unmark_duplicate(self, volume_id: str, scan_id: str,
                         expected_version: int | None = None,
                         operator: str = "anonymous") -> Volume:
        return self._mutate(volume_id, "duplicate_unmarked", operator,
                            expected_version, lambda _v: {"scan_id": scan_id})

    def set_override(self, volume_id: str, scan_id: str, label: str, note: str,
                     expected_version: int | None = None,
                     operator: str = "anonymous") -> Volume:
        return self._mutate(volume_id, "override_set", operator, expected_version,
                            lambda _v: {"scan_id": scan_id, "label": label,
                                        "note": note})

    def suggest_next_label(self, volume_id: str, scan_id: str) -> PageLabel | None:
        """Pre-fill for sequential entry; only meaningful while page numbering."""
        volume = self.get_volume(volume_id)
        if volume.state != VolumeState.PAGE_NUMBERING:
            return None
        return volume.pagination.suggest_next(scan_id)

    def verify_pagination(self, volume_id: str) -> PaginationReport:
        return self.get_volume(volume_id).pagination.verify()

    def transition_to_article_mode(self, volume_id: str,
                                   expected_version: int | None = None,
                                   operator: str = "anonymous") -> Volume:
        return self._mutate(volume_id, "transitioned", operator, expected_version,
                            lambda _v: {"target": VolumeState.ARTICLE_ENTRY.value})

    def reopen_page_numbering(self, volume_id: str,
                              expected_version: int | None = None,
                              operator: str = "anonymous") -> Volume:
        return self._mutate(volume_id, "transitioned", operator, expected_version,
                            lambda _v: {"target": VolumeState.PAGE_NUMBERING.value})

    # -- articles --------------------------------------------------------------------

    def create_article(self, volume_id: str, *, title: str,
                       authors: list[tuple[str, str]] | list[Author],
                       first_page: str, last_page: str,
                       abstract: str | None = None,
                       article_id: str | None = None,
                       expected_version: int | None = None,
                       operator: str = "anonymous") -> ArticleRecord:
        if "\t" in title or "\n" in title:
            raise ValueError("title must not contain tabs or newlines")
        pairs = []
        for author in authors:
            if isinstance(author, Author):
                pairs.append((author.last_name, author.rest))
            else:
                last, *rest = author
                pairs.append((last, rest[0] if rest else ""))
        for last, rest in pairs:
            Author(last, rest)  # reject reserved characters up front
        article_id = article_id or "art-" + uuid.uuid4().hex[:12]
        volume = self._mutate(
            volume_id, "article_created", operator, expected_version,
            lambda _v: {"article_id": article_id, "title": title,
                        "authors": [list(p) for p in pairs],
                        "first_page": first_page, "last_page": last_page,
                        "abstract": abstract or ""})
        return volume.articles[article_id]

    def _family_codes(self, stem: str) -> set[str]:
        path = self.codes_dir / f"{stem}.codes"
        if not path.exists():
            return set()
        return {line for line in path.read_text("utf-8").splitlines() if line}

    def derive_article_bibcode(self, volume_id: str, article_id: str,
                               expected_version: int | None = None,
                               operator: str = "anonymous") -> Bibcode:
        with self._lock_for(volume_id):
            volume = self.get_volume(volume_id)
            article = volume.articles.get(article_id)
            if article is None:
                raise UnknownArticle(f"no article {article_id!r}",
                                     article_id=article_id)
            if article.bibcode is not None:
                return article.bibcode
            existing = self._family_codes(volume.stem) | volume.derived_codes()
            derived = articles_mod.derive_bibcode(
                article, publication_year=volume.publication_year,
                stem=volume.stem, volume=volume.volume_number,
                existing_codes=existing)
            self._mutate(volume_id, "bibcode_derived", operator, expected_version,
                         lambda _v: {"article_id": article_id,
                                     "bibcode": codec.format_bibcode(derived)})
            return derived

    def finalize_volume(self, volume_id: str,
                        expected_version: int | None = None,
                        operator: str = "anonymous") -> list[ExportRecord]:
        volume = self._mutate(volume_id, "finalized", operator, expected_version,
                              lambda _v: {})
        codes_path = self.codes_dir / f"{volume.stem}.codes"
        merged = sorted(self._family_codes(volume.stem) | volume.derived_codes())
        self._write_atomic(codes_path, "".join(c + "\n" for c in merged))
        return build_export_records(volume)

    def export_records(self, volume_id: str) -> list[ExportRecord]:
        volume = self.get_volume(volume_id)
        if volume.state != VolumeState.FINALIZED:
            raise WrongState("export requires a finalized volume",
                             state=volume.state.value, operation="export")
        return build_export_records(volume)

    def export_text(self, volume_id: str) -> str:
        return serialize_export(self.export_records(volume_id))
