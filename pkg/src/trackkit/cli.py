"""Command-line interface: ingest, eval, serve, convert."""

from __future__ import annotations

import json
import pathlib
import sys

import click

from . import ingest, metrics, store
from .model import Interval, Session, TrackId


def _parse_track_arg(spec: str) -> tuple:
    """kind:class_label:author:version, e.g. classifier:Walking:John:1.0"""
    parts = spec.split(":")
    if len(parts) != 4:
        raise click.BadParameter(
            "expected kind:class_label:author:version", param_hint=spec)
    kind, class_label, author, version = parts
    return kind, TrackId(class_label, author, version)


@click.group()
def main():
    """Analyze and compare temporal classifier predictions."""


@main.command("ingest")
@click.argument("csv_files", nargs=-1, required=True,
                type=click.Path(exists=True, path_type=pathlib.Path))
@click.option("--track", "tracks", multiple=True, required=True,
              help="kind:class_label:author:version, one per CSV in order")
@click.option("--manifest", type=click.Path(exists=True, path_type=pathlib.Path))
@click.option("-o", "--output", required=True,
              type=click.Path(path_type=pathlib.Path), help="output .bsx path")
def ingest_cmd(csv_files, tracks, manifest, output):
    """Build a BSX session from CSV files."""
    if len(csv_files) != len(tracks):
        raise click.UsageError("need exactly one --track per CSV file")
    session = Session(domain=Interval(0, 1))
    for path, spec in zip(csv_files, tracks):
        kind, tid = _parse_track_arg(spec)
        session.add(ingest.import_csv(path.read_bytes(), kind, tid))
    if manifest:
        for warning in store.load_manifest(manifest.read_bytes(), session):
            click.echo(f"warning: {warning}", err=True)
    output.write_bytes(store.bsx_write(session))
    click.echo(f"wrote {output} ({len(session.tracks)} tracks)")


@main.command("eval")
@click.argument("bsx", type=click.Path(exists=True, path_type=pathlib.Path))
@click.option("--prediction", "-p", required=True, help="canonical track id")
@click.option("--truth", "-g", required=True, help="canonical track id")
@click.option("--what", type=click.Choice(["report", "roc", "score", "jaccard", "all"]),
              default="all")
def eval_cmd(bsx, prediction, truth, what):
    """Print evaluation metrics for a prediction/truth track pair."""
    session = store.bsx_read(bsx.read_bytes())
    p = session.get(prediction)
    g = session.get(truth)
    if p is None or g is None:
        missing = prediction if p is None else truth
        raise click.ClickException(f"no track {missing!r} in session")
    out = {}
    if what in ("report", "all"):
        rep = metrics.report(p, g, session.domain)
        out["report"] = {"accuracy": rep.accuracy, "precision": rep.precision,
                         "recall": rep.recall, "f1": rep.f1}
    if what in ("roc", "all") and p.kind == "classifier":
        curve = metrics.roc(p, g, session.domain)
        out["roc"] = {"auc": curve.auc, "points": len(curve.points)}
    if what in ("score", "all"):
        es = metrics.event_score(p, g)
        out["score"] = {"detected": es.detected, "total": es.total, "value": es.score}
    if what in ("jaccard", "all"):
        out["jaccard"] = metrics.jaccard(p, g)
    click.echo(json.dumps(out, indent=2))


@main.command("serve")
@click.option("--host", default="127.0.0.1")
@click.option("--port", default=8000, type=int)
@click.option("--bsx", "bsx_files", multiple=True,
              type=click.Path(exists=True, path_type=pathlib.Path),
              help="preload sessions from BSX files")
def serve_cmd(host, port, bsx_files):
    """Run the HTTP service."""
    import uvicorn

    from .service import SessionRegistry, create_app

    registry = SessionRegistry()
    for path in bsx_files:
        sid = registry.create(store.bsx_read(path.read_bytes()))
        click.echo(f"loaded {path} as session {sid}")
    uvicorn.run(create_app(registry), host=host, port=port)


@main.command("convert")
@click.argument("source", type=click.Path(exists=True, path_type=pathlib.Path))
@click.argument("dest", type=click.Path(path_type=pathlib.Path))
@click.option("--track", "track_spec", default=None,
              help="kind:class_label:author:version (CSV -> BSX)")
@click.option("--extract", default=None,
              help="canonical track id to dump (BSX -> CSV)")
def convert_cmd(source, dest, track_spec, extract):
    """Convert between CSV and BSX."""
    if source.suffix.lower() == ".csv":
        if not track_spec:
            raise click.UsageError("CSV -> BSX needs --track")
        kind, tid = _parse_track_arg(track_spec)
        session = Session(domain=Interval(0, 1))
        session.add(ingest.import_csv(source.read_bytes(), kind, tid))
        dest.write_bytes(store.bsx_write(session))
    else:
        session = store.bsx_read(source.read_bytes())
        if not extract:
            raise click.UsageError("BSX -> CSV needs --extract <track id>")
        track = session.get(extract)
        if track is None:
            raise click.ClickException(f"no track {extract!r}")
        attr_names = sorted({k for ev in track.events for k in ev.attrs})
        lines = ["start,end,score,label," + ",".join(f"attr:{a}" for a in attr_names)]
        for ev in track.events:
            cells = [str(ev.start / 1e6), str(ev.end / 1e6),
                     "" if ev.score is None else str(ev.score),
                     ev.label or ""]
            cells += [str(ev.attrs.get(a, "")) for a in attr_names]
            lines.append(",".join(cells))
        dest.write_text("\n".join(lines) + "\n")
    click.echo(f"wrote {dest}")


if __name__ == "__main__":
    main()
