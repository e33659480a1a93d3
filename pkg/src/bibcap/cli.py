"""Command-line tooling: validate, derive, registry maintenance, serve.

Exit codes are a stable contract: 0 success, 1 domain error, 2
environment or usage error.  Data goes to stdout so pipelines can
consume it; diagnostics go to stderr.
"""

from __future__ import annotations

import sys
from pathlib import Path

import click

from . import codec
from .errors import CaptureError
from .registry import BibstemEntry, Registry, load_registry
from .workflow import CaptureStore, VolumeState, serialize_export

_EXIT_DOMAIN = 1
_EXIT_ENV = 2


def _fail(error: CaptureError) -> None:
    click.echo(f"{error.code}: {error.message}", err=True)
    sys.exit(_EXIT_DOMAIN)


def _load_registry_file(path: Path) -> Registry:
    try:
        text = path.read_text("utf-8")
    except OSError as exc:
        click.echo(f"cannot read registry {path}: {exc}", err=True)
        sys.exit(_EXIT_ENV)
    try:
        return load_registry(text)
    except CaptureError as exc:
        _fail(exc)
        raise AssertionError("unreachable")


@click.group()
@click.option("--registry", "registry_path", type=click.Path(path_type=Path),
              default=None, help="Registry TSV file.")
@click.option("--data", "data_dir", type=click.Path(path_type=Path),
              default=None, help="Data directory for volume storage.")
@click.option("--format", "output_format",
              type=click.Choice(["tsv", "export-block"]), default=None,
              help="Output format where a command supports both.")
@click.pass_context
def cli(ctx: click.Context, registry_path: Path | None, data_dir: Path | None,
        output_format: str | None) -> None:
    """Bibliographic capture tools for scanned observatory publications."""
    ctx.obj = {"registry": registry_path, "data": data_dir,
               "format": output_format}


@cli.command()
@click.argument("input_file", type=click.File("r"))
def validate(input_file) -> None:
    """Check one identifier per line; report each violation with its rule."""
    failures = 0
    try:
        lines = input_file.read().splitlines()
    except OSError as exc:
        click.echo(f"cannot read input: {exc}", err=True)
        sys.exit(_EXIT_ENV)
    for lineno, line in enumerate(lines, start=1):
        code = line.strip()
        if not code:
            continue
        findings = codec.validate_bibcode_string(code)
        if findings:
            failures += 1
            detail = "; ".join(
                f"{f.code.value} at {f.start}-{f.end}: {f.message}"
                for f in findings)
            click.echo(f"line {lineno}: {detail}", err=True)
    sys.exit(_EXIT_DOMAIN if failures else 0)


def _store_for_volume_dir(ctx: click.Context, volume_dir: Path) -> tuple[CaptureStore, str]:
    # layout: <data>/volumes/<volume_id>
    data_dir = volume_dir.parent.parent
    registry_path = ctx.obj.get("registry")
    registry = _load_registry_file(registry_path) if registry_path else None
    return CaptureStore(data_dir, registry=registry), volume_dir.name


@cli.command()
@click.argument("volume_dir",
                type=click.Path(exists=True, file_okay=False, path_type=Path))
@click.pass_context
def derive(ctx: click.Context, volume_dir: Path) -> None:
    """Drive a volume to its finalized export and print it.

    Transitions out of page numbering if needed, derives any missing
    identifiers, finalizes, then writes the export block to stdout.
    """
    store, volume_id = _store_for_volume_dir(ctx, volume_dir)
    try:
        volume = store.get_volume(volume_id)
        if volume.state == VolumeState.PAGE_NUMBERING:
            store.transition_to_article_mode(volume_id, operator="cli")
        if volume.state == VolumeState.ARTICLE_ENTRY:
            for article_id in list(volume.articles):
                store.derive_article_bibcode(volume_id, article_id,
                                             operator="cli")
            store.finalize_volume(volume_id, operator="cli")
        if ctx.obj.get("format") == "tsv":
            snapshot = store.volumes_dir / volume_id / "articles.tsv"
            click.echo(snapshot.read_text("utf-8"), nl=False)
        else:
            click.echo(store.export_text(volume_id), nl=False)
    except CaptureError as exc:
        _fail(exc)
    except OSError as exc:
        click.echo(f"storage failure: {exc}", err=True)
        sys.exit(_EXIT_ENV)


@cli.group()
def registry() -> None:
    """Inspect and edit the publication stem registry."""


def _registry_path(ctx: click.Context) -> Path:
    path = ctx.obj.get("registry")
    if path is None:
        data_dir = ctx.obj.get("data")
        if data_dir is not None:
            path = data_dir / "registry.tsv"
    if path is None:
        click.echo("no registry file given (use --registry)", err=True)
        sys.exit(_EXIT_ENV)
    return path


@registry.command("list")
@click.pass_context
def registry_list(ctx: click.Context) -> None:
    """Print the registry as TSV, comments included."""
    reg = _load_registry_file(_registry_path(ctx))
    click.echo(reg.to_tsv(), nl=False)


@registry.command("resolve")
@click.argument("title")
@click.option("--series", default=None, help="Series designation, exact.")
@click.option("--year", type=int, default=None)
@click.option("--volume", type=int, default=None)
@click.pass_context
def registry_resolve(ctx: click.Context, title: str, series: str | None,
                     year: int | None, volume: int | None) -> None:
    """Print the stem for a full publication title."""
    reg = _load_registry_file(_registry_path(ctx))
    try:
        click.echo(reg.resolve(title, series=series, year=year, volume=volume))
    except CaptureError as exc:
        _fail(exc)


@registry.command("add")
@click.argument("stem")
@click.argument("full_title")
@click.option("--series", default=None)
@click.option("--year-start", type=int, default=None)
@click.option("--year-end", type=int, default=None)
@click.option("--vol-start", type=int, default=None)
@click.option("--vol-end", type=int, default=None)
@click.option("--predecessor", default=None)
@click.option("--successor", default=None)
@click.pass_context
def registry_add(ctx: click.Context, stem: str, full_title: str,
                 series: str | None, year_start: int | None,
                 year_end: int | None, vol_start: int | None,
                 vol_end: int | None, predecessor: str | None,
                 successor: str | None) -> None:
    """Append an entry and rewrite the file, preserving comment lines."""
    path = _registry_path(ctx)
    reg = _load_registry_file(path)
    try:
        entry = BibstemEntry(stem=stem, full_title=full_title, series_designation=series,
                             year_start=year_start, year_end=year_end,
                             vol_start=vol_start, vol_end=vol_end,
                             predecessor=predecessor, successor=successor)
        updated = reg.register(entry)
    except CaptureError as exc:
        _fail(exc)
        raise AssertionError("unreachable")
    try:
        path.write_text(updated.to_tsv(), encoding="utf-8")
    except OSError as exc:
        click.echo(f"cannot write registry {path}: {exc}", err=True)
        sys.exit(_EXIT_ENV)
    click.echo(f"added {stem} (registry version {updated.version})", err=True)


@cli.command()
@click.option("--listen", default="127.0.0.1:8000", show_default=True,
              help="host:port to bind.")
@click.option("--data", "data_override", type=click.Path(path_type=Path),
              default=None, help="Data directory (overrides the global flag).")
@click.pass_context
def serve(ctx: click.Context, listen: str, data_override: Path | None) -> None:
    """Run the capture HTTP service."""
    import uvicorn

    from .service import create_app

    data_dir = data_override or ctx.obj.get("data")
    if data_dir is None:
        click.echo("no data directory given (use --data)", err=True)
        sys.exit(_EXIT_ENV)
    registry_path = ctx.obj.get("registry")
    registry = _load_registry_file(registry_path) if registry_path else None
    host, _, port = listen.rpartition(":")
    store = CaptureStore(data_dir, registry=registry)
    uvicorn.run(create_app(store), host=host or "127.0.0.1", port=int(port))


main = cli


if __name__ == "__main__":
    main()
