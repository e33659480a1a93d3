"""HTTP API over the capture store.

Thin JSON layer: every route maps onto one store call and every domain
error surfaces as ``{"error": {"code": ..., "message": ...}}`` with the
code taken verbatim from the raised error class.  Version conflicts map
to HTTP 409 so clients can refresh and retry; unknown entities map to
404; all other domain failures are 400.
"""

from __future__ import annotations

from fastapi import FastAPI, Request, Response
from fastapi.responses import JSONResponse, PlainTextResponse
from pydantic import BaseModel, Field

from . import codec
from .articles import ArticleRecord
from .errors import (
    BadRequest,
    CaptureError,
    StemNotFound,
    UnknownArticle,
    UnknownPageLabel,
    UnknownScan,
    UnknownVolume,
    VersionConflict,
)
from .pages import ScanImage
from .workflow import CaptureStore, Volume, VolumeState, serialize_export

_NOT_FOUND = (UnknownVolume, UnknownScan, UnknownArticle, UnknownPageLabel,
              StemNotFound)

PAGE_ACTIONS = ("assign", "override", "mark_duplicate", "unmark_duplicate")


class CreateVolumeBody(BaseModel):
    full_title: str
    volume_number: int | str
    publication_year: int
    publication_month: int = 0
    series: str | None = None
    volume_id: str | None = None
    operator: str = "anonymous"


class PageActionBody(BaseModel):
    action: str
    scan_id: str
    expected_version: int
    label: str | None = None
    note: str | None = None
    operator: str = "anonymous"


class TransitionBody(BaseModel):
    target: str
    expected_version: int
    operator: str = "anonymous"


class AuthorBody(BaseModel):
    last_name: str
    rest: str = ""


class CreateArticleBody(BaseModel):
    title: str
    # empty means author unknown; the identifier then ends in '.'
    authors: list[AuthorBody] = Field(default_factory=list)
    first_page: str
    last_page: str
    abstract: str | None = None
    expected_version: int
    operator: str = "anonymous"


class FinalizeBody(BaseModel):
    expected_version: int
    operator: str = "anonymous"


def _label_json(label: codec.PageLabel | None) -> dict | None:
    if label is None:
        return None
    return {"kind": label.kind.value, "text": label.text}


def _scan_json(store: CaptureStore, volume: Volume, scan: ScanImage) -> dict:
    assignment = volume.pagination.assignments.get(scan.scan_id)
    suggested = store.suggest_next_label(volume.volume_id, scan.scan_id)
    return {
        "scan_id": scan.scan_id,
        "sequence_index": scan.sequence_index,
        "status": scan.status.value,
        "image_url": f"/scans/{scan.scan_id}/image",
        "label": _label_json(assignment.label if assignment else None),
        "override": (
            {"label": _label_json(assignment.override.label),
             "note": assignment.override.note}
            if assignment and assignment.override else None),
        "effective_label": _label_json(
            assignment.effective_label if assignment else None),
        "suggested_label": _label_json(suggested),
    }


def _article_json(article: ArticleRecord) -> dict:
    return {
        "article_id": article.article_id,
        "title": article.title,
        "authors": [{"last_name": a.last_name, "rest": a.rest,
                     "display": a.display()} for a in article.authors],
        "first_page": article.first_page.text,
        "last_page": article.last_page.text,
        "abstract": article.abstract,
        "bibcode": codec.format_bibcode(article.bibcode)
                   if article.bibcode else None,
    }


def _volume_json(volume: Volume) -> dict:
    report = volume.pagination.verify()
    return {
        "volume_id": volume.volume_id,
        "full_title": volume.full_title,
        "series": volume.series,
        "stem": volume.stem,
        "volume_number": volume.volume_number,
        "publication_year": volume.publication_year,
        "publication_month": volume.publication_month,
        "pub_date": volume.pub_date,
        "state": volume.state.value,
        "version": volume.version,
        "scan_count": len(volume.pagination.scans),
        "article_count": len(volume.articles),
        "pagination": {
            "complete": report.complete,
            "unlabeled": list(report.unlabeled),
            "conflicts": [list(c) for c in report.conflicts],
        },
    }


def create_app(store: CaptureStore) -> FastAPI:
    app = FastAPI(title="bibcap capture service")

    @app.exception_handler(CaptureError)
    async def capture_error_handler(_request: Request, exc: CaptureError):
        if isinstance(exc, VersionConflict):
            status = 409
        elif isinstance(exc, _NOT_FOUND):
            status = 404
        else:
            status = 400
        body = {"error": {"code": exc.code, "message": exc.message,
                          **exc.details}}
        return JSONResponse(status_code=status, content=body)

    @app.get("/volumes")
    def list_volumes():
        return {"volumes": [_volume_json(v) for v in store.list_volumes()]}

    @app.post("/volumes", status_code=201)
    def create_volume(body: CreateVolumeBody):
        volume = store.create_volume(
            full_title=body.full_title, volume_number=body.volume_number,
            publication_year=body.publication_year,
            publication_month=body.publication_month, series=body.series,
            volume_id=body.volume_id, operator=body.operator)
        return _volume_json(volume)

    @app.get("/volumes/{volume_id}")
    def get_volume(volume_id: str):
        return _volume_json(store.get_volume(volume_id))

    @app.get("/volumes/{volume_id}/scans")
    def list_scans(volume_id: str):
        volume = store.get_volume(volume_id)
        return {"volume_id": volume.volume_id,
                "version": volume.version,
                "state": volume.state.value,
                "scans": [_scan_json(store, volume, scan)
                          for scan in volume.pagination.in_film_order()]}

    @app.get("/scans/{scan_id}/image")
    def scan_image(scan_id: str):
        data, media_type = store.scan_image(scan_id)
        return Response(content=data, media_type=media_type)

    @app.post("/volumes/{volume_id}/pages")
    def page_action(volume_id: str, body: PageActionBody):
        if body.action == "assign":
            if body.label is None:
                raise UnknownPageLabel("assign requires a label")
            volume = store.assign_page(volume_id, body.scan_id, body.label,
                                       body.expected_version, body.operator)
        elif body.action == "override":
            if body.label is None:
                raise UnknownPageLabel("override requires a label")
            volume = store.set_override(volume_id, body.scan_id, body.label,
                                        body.note or "",
                                        body.expected_version, body.operator)
        elif body.action == "mark_duplicate":
            volume = store.mark_duplicate(volume_id, body.scan_id,
                                          body.expected_version, body.operator)
        elif body.action == "unmark_duplicate":
            volume = store.unmark_duplicate(volume_id, body.scan_id,
                                            body.expected_version, body.operator)
        else:
            raise BadRequest(
                f"action must be one of {', '.join(PAGE_ACTIONS)}",
                action=body.action)
        scan = volume.pagination.scans[body.scan_id]
        return {"volume_id": volume.volume_id, "version": volume.version,
                "state": volume.state.value,
                "scan": _scan_json(store, volume, scan)}

    @app.post("/volumes/{volume_id}/transition")
    def transition(volume_id: str, body: TransitionBody):
        if body.target == VolumeState.ARTICLE_ENTRY.value:
            volume = store.transition_to_article_mode(
                volume_id, body.expected_version, body.operator)
        elif body.target == VolumeState.PAGE_NUMBERING.value:
            volume = store.reopen_page_numbering(
                volume_id, body.expected_version, body.operator)
        else:
            raise BadRequest(
                f"target must be {VolumeState.ARTICLE_ENTRY.value} or "
                f"{VolumeState.PAGE_NUMBERING.value}", target=body.target)
        return _volume_json(volume)

    @app.get("/volumes/{volume_id}/articles")
    def list_articles(volume_id: str):
        volume = store.get_volume(volume_id)
        return {"volume_id": volume.volume_id, "version": volume.version,
                "articles": [_article_json(a)
                             for a in volume.articles_in_page_order()]}

    @app.post("/volumes/{volume_id}/articles", status_code=201)
    def create_article(volume_id: str, body: CreateArticleBody):
        article = store.create_article(
            volume_id, title=body.title,
            authors=[(a.last_name, a.rest) for a in body.authors],
            first_page=body.first_page, last_page=body.last_page,
            abstract=body.abstract, expected_version=body.expected_version,
            operator=body.operator)
        store.derive_article_bibcode(volume_id, article.article_id,
                                     operator=body.operator)
        volume = store.get_volume(volume_id)
        return {"volume_id": volume.volume_id, "version": volume.version,
                "article": _article_json(volume.articles[article.article_id])}

    @app.post("/volumes/{volume_id}/finalize")
    def finalize(volume_id: str, body: FinalizeBody):
        records = store.finalize_volume(volume_id, body.expected_version,
                                        body.operator)
        volume = store.get_volume(volume_id)
        return {"volume_id": volume.volume_id, "version": volume.version,
                "state": volume.state.value,
                "records": [record.__dict__ for record in records],
                "text": serialize_export(records)}

    @app.get("/volumes/{volume_id}/export")
    def export(volume_id: str):
        return PlainTextResponse(store.export_text(volume_id))

    return app
