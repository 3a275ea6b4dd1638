"""Command-line interface.

Exit codes: 0 on success, 1 for tool errors (bad manifest, malformed trace,
invalid partition file, ...), 2 for usage errors.
"""

from __future__ import annotations

import logging
from pathlib import Path

import click

from . import pipeline, report, service
from .errors import KnownClassListInvalid, TracepartError


@click.group()
def main() -> None:
    """Recommend microservice partitions from use-case-labeled runtime traces."""
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")


def _read_known_classes(path: str | None) -> list[str] | None:
    if path is None:
        return None
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    names = [line.strip() for line in lines if line.strip() and not line.lstrip().startswith("#")]
    if len(set(names)) != len(names):
        dup = sorted({n for n in names if names.count(n) > 1})
        raise KnownClassListInvalid(f"duplicate class names in known-class list: {dup}")
    return names


@main.command("partition")
@click.option("--manifest", "manifest_path", required=True, type=click.Path(), help="Manifest JSON path.")
@click.option("--n", type=int, default=None, help="Target partition count (default: min(5, classes)).")
@click.option("--sweep", is_flag=True, help="Emit one report per recommended size instead of a single n.")
@click.option("--known-classes", "known_path", type=click.Path(), default=None, help="Text file with one known class per line, for coverage reporting.")
@click.option("--out", "out_dir", required=True, type=click.Path(), help="Output directory.")
def cmd_partition(manifest_path: str, n: int | None, sweep: bool, known_path: str | None, out_dir: str) -> None:
    """Analyze traces and write partition reports."""
    try:
        known = _read_known_classes(known_path)
        written = pipeline.run_partition(manifest_path, out_dir, n=n, sweep=sweep, known_classes=known)
    except TracepartError as exc:
        click.echo(f"error: {exc}", err=True)
        raise SystemExit(1)
    for path in written:
        click.echo(str(path))


@main.command("metrics")
@click.option("--partitions", "partition_file", required=True, type=click.Path(), help="Partition or report JSON to score.")
@click.option("--manifest", "manifest_path", required=True, type=click.Path(), help="Manifest JSON path.")
def cmd_metrics(partition_file: str, manifest_path: str) -> None:
    """Re-score an edited partition file against the same traces."""
    try:
        doc = pipeline.run_metrics(partition_file, manifest_path)
    except TracepartError as exc:
        click.echo(f"error: {exc}", err=True)
        raise SystemExit(1)
    click.echo(report.dumps_fixed(doc))


@main.command("serve")
@click.option("--out", "out_dir", required=True, type=click.Path(), help="Output directory of a partition run.")
@click.option("--port", required=True, type=int, help="Port to listen on (0 picks a free one).")
@click.option("--n", type=int, default=None, help="Which report-n<k>.json to load when several exist.")
@click.option("--assets", "assets_dir", type=click.Path(), default=None, help="Static assets directory for the refinement UI.")
def cmd_serve(out_dir: str, port: int, n: int | None, assets_dir: str | None) -> None:
    """Serve the refinement API (and UI, when assets are given)."""
    try:
        server = service.serve(out_dir, port, n=n, assets_dir=assets_dir)
    except TracepartError as exc:
        click.echo(f"error: {exc}", err=True)
        raise SystemExit(1)
    host, actual_port = server.server_address[:2]
    click.echo(f"serving on http://{host}:{actual_port}/ (Ctrl-C to stop)")
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        server.shutdown()


if __name__ == "__main__":
    main()
