"""Command-line front-end: generate / noise / downsample / eval / stats /
heuristics, all reproducible from a single --seed."""

from __future__ import annotations

import json
import os
import sys
from pathlib import Path

import click

from . import __version__
from .assets import AssetPool, load_asset_dir
from .corpus import (
    NoiseConfig,
    corpus_stats,
    downsample,
    generate_corpus,
    inject_label_noise,
    load_manifest,
    save_manifest,
)
from .evaluation import apply_heuristics, evaluate, load_predictions, save_predictions
from .fonts import load_font_map
from .render import RenderSpec
from .style import bundled_profile, load_style_profile


def _resolve_profile(name_or_path):
    if os.path.exists(name_or_path):
        return load_style_profile(name_or_path)
    return bundled_profile(name_or_path)


def _write_run_config(out_dir, subcommand, params):
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "run.json", "w") as fh:
        json.dump({"tool": "synthpages", "version": __version__,
                   "subcommand": subcommand, "params": params}, fh, indent=1)
        fh.write("\n")


def _render_spec(page_width, page_height):
    spec = RenderSpec(width=page_width, height=page_height)
    font_map_path = os.environ.get("SYNTHPAGES_FONT_MAP")
    if font_map_path:
        spec.font_map = load_font_map(font_map_path)
    return spec


@click.group()
@click.version_option(__version__)
def main():
    """Synthetic scholarly-page corpora and detection evaluation."""


def _fail(exc):
    click.echo(f"error: {exc}", err=True)
    sys.exit(1)


@main.command()
@click.option("--profile", required=True,
              help="bundled profile name (acl, vis, cs150, acl+vis) or a file path")
@click.option("--train", "n_train", type=click.IntRange(min=0), required=True)
@click.option("--val", "n_val", type=click.IntRange(min=0), required=True)
@click.option("--seed", type=int, required=True)
@click.option("--out", "out_dir", type=click.Path(), required=True)
@click.option("--images/--no-images", default=True,
              help="rasterize pages to PNG (manifests are always written)")
@click.option("--asset-dir", type=click.Path(exists=True), default=None,
              help="external asset directory (<class>/<file>.png); default procedural")
@click.option("--asset-policy", type=click.Choice(["once", "with-replacement"]),
              default="with-replacement")
@click.option("--page-width", type=int, default=1275, show_default=True)
@click.option("--page-height", type=int, default=1650, show_default=True)
@click.option("--jobs", type=int, default=os.cpu_count(), show_default="logical cores")
def generate(profile, n_train, n_val, seed, out_dir, images, asset_dir,
             asset_policy, page_width, page_height, jobs):
    """Generate a train/val corpus with ground-truth manifests."""
    try:
        style = _resolve_profile(profile)
        pool = (load_asset_dir(asset_dir, policy=asset_policy)
                if asset_dir else AssetPool(policy=asset_policy))
        spec = _render_spec(page_width, page_height)
        _write_run_config(out_dir, "generate", {
            "profile": profile, "train": n_train, "val": n_val, "seed": seed,
            "out": str(out_dir), "images": images, "asset_dir": asset_dir,
            "asset_policy": asset_policy, "page_width": page_width,
            "page_height": page_height, "jobs": jobs,
        })
        generate_corpus(style, n_train, n_val, seed, assets=pool,
                        render_spec=spec, out_dir=out_dir,
                        write_images=images, jobs=jobs)
        click.echo(f"wrote {n_train} train / {n_val} val pages to {out_dir}")
    except Exception as exc:
        _fail(exc)


@main.command()
@click.option("--manifest", "manifest_path", type=click.Path(exists=True), required=True)
@click.option("--rate", type=float, required=True, help="per-annotation flip probability")
@click.option("--seed", type=int, default=0)
@click.option("--out", "out_path", type=click.Path(), required=True)
def noise(manifest_path, rate, seed, out_path):
    """Inject uniform label noise into the non-body-text classes."""
    try:
        manifest = load_manifest(manifest_path)
        noisy = inject_label_noise(manifest, NoiseConfig(rate=rate, seed=seed))
        save_manifest(noisy, out_path)
        _write_run_config(Path(out_path).parent, "noise", {
            "manifest": str(manifest_path), "rate": rate, "seed": seed,
            "out": str(out_path)})
        click.echo(f"flipped {noisy['info']['noise_flipped']} labels -> {out_path}")
    except Exception as exc:
        _fail(exc)


@main.command("downsample")
@click.option("--manifest", "manifest_path", type=click.Path(exists=True), required=True)
@click.option("--fraction", type=float, required=True)
@click.option("--seed", type=int, default=0)
@click.option("--out", "out_path", type=click.Path(), required=True)
def downsample_cmd(manifest_path, fraction, seed, out_path):
    """Retain a uniform page subset of the manifest."""
    try:
        manifest = load_manifest(manifest_path)
        sub = downsample(manifest, fraction, seed)
        save_manifest(sub, out_path)
        _write_run_config(Path(out_path).parent, "downsample", {
            "manifest": str(manifest_path), "fraction": fraction,
            "seed": seed, "out": str(out_path)})
        click.echo(f"kept {len(sub['images'])} of {len(manifest['images'])} pages")
    except Exception as exc:
        _fail(exc)


@main.command("eval")
@click.option("--pred", "pred_path", type=click.Path(exists=True), required=True,
              help="JSON-lines detections: {image_id, category_id, bbox, score}")
@click.option("--manifest", "manifest_path", type=click.Path(exists=True), required=True)
@click.option("--iou", "thresholds", type=float, multiple=True, default=(0.8,),
              show_default=True)
@click.option("--space", type=click.Choice(["pixel", "normalized"]), default="pixel")
@click.option("--json", "json_out", type=click.Path(), default=None,
              help="also write the full report as JSON")
def eval_cmd(pred_path, manifest_path, thresholds, space, json_out):
    """Score detections against a ground-truth manifest."""
    try:
        manifest = load_manifest(manifest_path)
        preds = load_predictions(pred_path, space=space)
        reports = evaluate(preds, manifest, thresholds)
        for report in reports:
            click.echo(f"IoU {report.iou_threshold}:  mAP {report.map:.4f}")
            header = f"{'class':<12}{'TP':>6}{'FP':>6}{'FN':>6}" \
                     f"{'P':>9}{'R':>9}{'F1':>9}{'AP':>9}"
            click.echo(header)
            for name, m in report.per_class.items():
                def fmt(v):
                    return f"{v:9.4f}" if v is not None else f"{'--':>9}"
                click.echo(f"{name:<12}{m.tp:>6}{m.fp:>6}{m.fn:>6}"
                           f"{fmt(m.precision)}{fmt(m.recall)}{fmt(m.f1)}{fmt(m.ap)}")
        if json_out:
            with open(json_out, "w") as fh:
                json.dump([r.to_dict() for r in reports], fh, indent=1)
        _write_run_config(Path(pred_path).parent, "eval", {
            "pred": str(pred_path), "manifest": str(manifest_path),
            "iou": list(thresholds), "space": space, "json": json_out})
    except Exception as exc:
        _fail(exc)


@main.command()
@click.option("--manifest", "manifest_path", type=click.Path(exists=True), required=True)
@click.option("--out", "out_prefix", type=click.Path(), required=True,
              help="prefix for <prefix>_centroids.csv and <prefix>_counts.csv")
def stats(manifest_path, out_prefix):
    """Per-class centroid/extent statistics as CSV."""
    try:
        table = corpus_stats(load_manifest(manifest_path))
        table.to_csv(f"{out_prefix}_centroids.csv")
        table.counts_to_csv(f"{out_prefix}_counts.csv")
        _write_run_config(Path(out_prefix).parent or ".", "stats", {
            "manifest": str(manifest_path), "out": str(out_prefix)})
        click.echo(f"{len(table.rows)} annotations over "
                   f"{len(table.counts_per_page)} pages")
    except Exception as exc:
        _fail(exc)


@main.command()
@click.option("--pred", "pred_path", type=click.Path(exists=True), required=True)
@click.option("--manifest", "manifest_path", type=click.Path(exists=True), required=True)
@click.option("--which", type=click.Choice(["page-order", "position"]),
              multiple=True, default=("page-order", "position"), show_default=True)
@click.option("--space", type=click.Choice(["pixel", "normalized"]), default="pixel")
@click.option("--out", "out_path", type=click.Path(), required=True)
def heuristics(pred_path, manifest_path, which, space, out_path):
    """Filter structurally impossible detections from a prediction file."""
    try:
        manifest = load_manifest(manifest_path)
        preds = load_predictions(pred_path, space=space)
        filtered = apply_heuristics(preds, manifest, which=set(which))
        save_predictions(filtered, out_path)
        _write_run_config(Path(out_path).parent, "heuristics", {
            "pred": str(pred_path), "manifest": str(manifest_path),
            "which": list(which), "space": space, "out": str(out_path)})
        click.echo(f"removed {len(filtered.removed)} detections -> {out_path}")
    except Exception as exc:
        _fail(exc)


if __name__ == "__main__":
    main()
