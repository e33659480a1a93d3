"""Shared fixtures: registry file, scan bytes, and prebuilt volumes."""

from __future__ import annotations

import pytest

from bibcap import CaptureStore, load_registry

REGISTRY_TSV = (
    "# stem\tfull_title\tseries_designation\tyear_start\tyear_end"
    "\tvol_start\tvol_end\tpredecessor\tsuccessor\n"
    "AnWie\tAnnalen der Universitaets-Sternwarte Wien\t\t1821\t1905\t1\t20\t\tAnWiD\n"
    "AnWiD\tAnnalen der Universitaets-Sternwarte Wien\tDritte Folge\t1906\t1940\t1\t30\tAnWie\t\n"
    "BuAst\tBulletin Astronomique\t\t1884\t1919\t1\t36\t\t\n"
    "BuAsI\tBulletin Astronomique\tSerie I\t1920\t1928\t1\t5\t\t\n"
    "BuAsR\tBulletin Astronomique\tRevue Generale des Travaux Astronomiques"
    "\t1920\t1968\t1\t26\t\t\n"
    "YalRY\tReports for the year presented by the Board of Managers of the "
    "Observatory of Yale University to the President and Fellows\t\t\t\t\t\t\t\n"
    "PUSNO\tPublications of the U.S. Naval Observatory Second Series\t\t\t\t\t\t\t\n"
)

YALE_JOURNAL_TITLE = (
    "Reports for the year presented by the Board of Managers of the "
    "Observatory of Yale University to the President and Fellows")
YALE_ARTICLE_TITLE = (
    "Reports for the Years 1900 to 1904, Presented by the Board of Managers "
    "of the Observatory of Yale University to the President and Fellows")
PUSNO_TITLE = "Publications of the U.S. Naval Observatory Second Series"

YALE_LABELS = ["1.1", "1.2", "1.3", "1.4", "1.5", "1.6", "1.7", "1.8",
               "2.1", "2.2"]

# 1x1 black pixel
TINY_PNG = bytes.fromhex(
    "89504e470d0a1a0a0000000d4948445200000001000000010802000000907753de"
    "0000000c4944415408d763f8cfc00000030101a371c38c0000000049454e44ae426082")
TINY_TIFF = b"II*\x00\x08\x00\x00\x00\x00\x00"


@pytest.fixture()
def registry():
    return load_registry(REGISTRY_TSV)


@pytest.fixture()
def store(tmp_path):
    data = tmp_path / "data"
    data.mkdir()
    (data / "registry.tsv").write_text(REGISTRY_TSV, encoding="utf-8")
    return CaptureStore(data)


def ingest_yale_scans(store: CaptureStore, volume_id: str, version: int,
                      prefix: str = "s") -> int:
    scans = [(f"{volume_id}-{prefix}{i:02d}", TINY_PNG, "image/png")
             for i in range(10)]
    return store.ingest_scans(volume_id, scans, expected_version=version).version


def build_yale(store: CaptureStore, *, through: str = "paginated",
               volume_id: str = "yale-1"):
    """Yale fixture volume at a chosen stage.

    through: "created" | "ingested" | "paginated" | "article_entry"
             | "entered" | "finalized"
    """
    volume = store.create_volume(
        full_title=YALE_JOURNAL_TITLE, volume_number=1,
        publication_year=1910, publication_month=0, volume_id=volume_id)
    if through == "created":
        return volume
    version = ingest_yale_scans(store, volume_id, volume.version)
    if through == "ingested":
        return store.get_volume(volume_id)
    for i, label in enumerate(YALE_LABELS):
        version = store.assign_page(volume_id, f"{volume_id}-s{i:02d}", label,
                                    expected_version=version).version
    if through == "paginated":
        return store.get_volume(volume_id)
    volume = store.transition_to_article_mode(volume_id,
                                              expected_version=version)
    if through == "article_entry":
        return volume
    article = store.create_article(
        volume_id, title=YALE_ARTICLE_TITLE,
        authors=[("Elkin", "William L.")], first_page="1.1", last_page="1.8",
        article_id="yale-art-1", expected_version=volume.version)
    store.derive_article_bibcode(volume_id, article.article_id)
    if through == "entered":
        return store.get_volume(volume_id)
    store.finalize_volume(volume_id)
    return store.get_volume(volume_id)


def build_pusno(store: CaptureStore, *, volume_id: str = "pusno-4"):
    """PUSNO volume: letter-prefixed pages D:1..D:5, finalized."""
    volume = store.create_volume(
        full_title=PUSNO_TITLE, volume_number=4, publication_year=1906,
        volume_id=volume_id)
    scans = [(f"{volume_id}-s{i}", TINY_PNG, "image/png") for i in range(5)]
    version = store.ingest_scans(volume_id, scans,
                                 expected_version=volume.version).version
    for i in range(5):
        version = store.assign_page(volume_id, f"{volume_id}-s{i}",
                                    f"D:{i + 1}",
                                    expected_version=version).version
    volume = store.transition_to_article_mode(volume_id,
                                              expected_version=version)
    article = store.create_article(
        volume_id, title="Report of observations", authors=[],
        first_page="D:1", last_page="D:5", expected_version=volume.version)
    store.derive_article_bibcode(volume_id, article.article_id)
    store.finalize_volume(volume_id)
    return store.get_volume(volume_id)
