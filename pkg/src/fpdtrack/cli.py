"""Command-line interface: ``fpd <command> ...``.

Machine-readable reports (JSON, CSV) go to stdout or ``--out``; human
summaries and logs go to stderr.
"""

from __future__ import annotations

import argparse
import asyncio
import csv
import io
import json
import os
import sys
from dataclasses import replace
from pathlib import Path
from typing import Any, Sequence

from rich.console import Console
from rich.markup import escape
from rich.table import Table

from src.fpdtrack import __version__
from src.fpdtrack.correction.dtc import FusionPolicy, fuse
from src.fpdtrack.errors import ConfigError, FpdError, InvariantError
from src.fpdtrack.log import setup_logging
from src.fpdtrack.metrics.batch import evaluate_directory
from src.fpdtrack.metrics.jaccard import average_jaccard
from src.fpdtrack.perception.mcmd import classify_profile, compute_ssim_profile, detect_camera_motion
from src.fpdtrack.perception.mpd import detect_static_points
from src.fpdtrack.pipeline.config import PipelineConfig
from src.fpdtrack.pipeline.runner import PipelineResult, run_batch, run_pipeline
from src.fpdtrack.pipeline.sweep import SWEEP_PARAMS, ScoreRow, ablation, compare, sweep
from src.fpdtrack.runtime import configure_threads
from src.fpdtrack.settings import Settings
from src.fpdtrack.synth.export import write_scene
from src.fpdtrack.synth.scene import SceneDocument, generate_scene
from src.fpdtrack.tracks.io import load_tracks, save_tracks
from src.fpdtrack.video.io import load_frame_sequence

console = Console(stderr=True)
stdout_console = Console()


# ---- helpers ----

def parse_floats(text: str) -> list[float]:
    try:
        return [float(part) for part in text.split(",") if part.strip()]
    except ValueError as e:
        raise ConfigError(f"expected comma-separated numbers, got {text!r}") from e


def parse_sources(items: Sequence[str]) -> dict[str, Path]:
    sources: dict[str, Path] = {}
    for item in items:
        label, sep, path = item.partition("=")
        if not sep or not label or not path:
            raise ConfigError(f"--source expects NAME=FILE, got {item!r}")
        if label in sources:
            raise ConfigError(f"duplicate source label '{label}'")
        sources[label] = Path(path)
    return sources


def write_output(path: str | Path, text: str) -> Path:
    """Write a report file, creating parent directories."""
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
    except OSError as e:
        raise ConfigError(f"cannot write {path}: {e}") from e
    return path


def emit_text(text: str, out: str | None) -> None:
    if out:
        write_output(out, text)
        console.print(f"[dim]Wrote {escape(out)}[/dim]")
    else:
        sys.stdout.write(text)


def emit_json(payload: dict[str, Any], out: str | None) -> None:
    emit_text(json.dumps(payload, indent=2) + "\n", out)


def _fmt(value: float | None) -> str:
    return "-" if value is None else f"{value:.4f}"


def score_table(title: str, first_column: str, rows: Sequence[ScoreRow], with_static: bool = False) -> Table:
    table = Table(title=title)
    table.add_column(first_column, style="cyan")
    for name in ("SC-SP AJ", "SC-MP AJ", "MC-MP AJ", "AJ"):
        table.add_column(name, justify="right")
    if with_static:
        table.add_column("static pts", justify="right")
    for row in rows:
        cells = [row.key, _fmt(row.sc_sp), _fmt(row.sc_mp), _fmt(row.mc_mp), _fmt(row.aj)]
        if with_static:
            cells.append(str(row.num_static))
        table.add_row(*cells)
    return table


# ---- commands ----

def cmd_detect_camera(args: argparse.Namespace, settings: Settings) -> int:
    overrides = {
        key: value for key, value in (
            ("lambda_coarse", args.lambda_coarse),
            ("lambda_fine", args.lambda_fine),
            ("eta", args.eta),
            ("clip_seconds", args.clip_seconds),
        ) if value is not None
    }
    cfg = replace(settings.mcmd, **overrides).validate()
    video = load_frame_sequence(args.frames, args.manifest, default_fps=settings.default_fps)
    profile = compute_ssim_profile(video, cfg)
    result = classify_profile(profile, cfg)

    if args.dump_ssim:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(["index", "ssim"])
        for index, value in enumerate(profile.coarse):
            writer.writerow([index, repr(float(value))])
        write_output(args.dump_ssim, buffer.getvalue())

    console.print(f"Camera: [bold]{'moving' if result.moving else 'static'}[/bold] "
                  f"(coarse {result.coarse_fraction:.3f}, "
                  f"{sum(c.moving for c in result.clip_results)}/{len(result.clip_results)} clips moving)")
    emit_json({**result.to_dict(), "video": video.describe()}, args.out)
    return 0


def cmd_detect_points(args: argparse.Namespace, settings: Settings) -> int:
    overrides = {k: v for k, v in (("rho", args.rho), ("min_visible", args.min_visible)) if v is not None}
    cfg = replace(settings.mpd, **overrides).validate()
    tracks = load_tracks(args.tracks)
    flags = detect_static_points(tracks, cfg)
    console.print(f"{flags.num_static}/{tracks.num_points} points static (rho={cfg.rho:g})")
    emit_json(flags.to_dict(), args.out)
    return 0


def cmd_tracks_info(args: argparse.Namespace, settings: Settings) -> int:
    tracks = load_tracks(args.file)
    stats = tracks.visibility_stats()
    table = Table(title=f"{Path(args.file).name}", show_header=False)
    table.add_column("field", style="cyan")
    table.add_column("value", justify="right")
    table.add_row("source", tracks.source_name or "-")
    table.add_row("resolution", f"{tracks.width}x{tracks.height}")
    for key, value in stats.items():
        if key in ("width", "height"):
            continue
        table.add_row(key.replace("_", " "), f"{value:.4f}" if isinstance(value, float) else str(value))
    visible = tracks.to_pixels()[tracks.visibility]
    for axis, name in enumerate(("x", "y")):
        extent = "-" if visible.size == 0 else f"{visible[:, axis].min():.1f} .. {visible[:, axis].max():.1f}"
        table.add_row(f"{name} extent (px)", extent)
    stdout_console.print(table)
    return 0


def cmd_tracks_convert(args: argparse.Namespace, settings: Settings) -> int:
    tracks = load_tracks(args.input)
    path = save_tracks(tracks, args.output, args.format)
    console.print(f"[green]Converted[/green] {escape(str(args.input))} -> {escape(str(path))}")
    return 0


def cmd_fuse(args: argparse.Namespace, settings: Settings) -> int:
    video = load_frame_sequence(args.frames, args.manifest, default_fps=settings.default_fps)
    sources = {label: load_tracks(path).with_name(label) for label, path in parse_sources(args.source).items()}
    policy = FusionPolicy.load(args.policy)
    if args.stabilize:
        policy = policy.model_copy(update={"stabilize_static": True})
    mpd = replace(settings.mpd, rho=args.rho) if args.rho is not None else settings.mpd

    camera = detect_camera_motion(video, settings.mcmd)
    fused, flags = fuse(sources, camera, policy, mpd)
    save_tracks(fused, args.out)

    summary = {
        "output": str(args.out),
        "camera_moving": camera.moving,
        "num_points": fused.num_points,
        "num_static": flags.num_static if flags is not None else None,
        "source": fused.source_name,
    }
    console.print(f"[green]Fused[/green] {fused.num_points} points -> {escape(str(args.out))}")
    emit_json(summary, args.report)
    return 0


def cmd_evaluate(args: argparse.Namespace, settings: Settings) -> int:
    cfg = settings.metrics
    if args.thresholds:
        cfg = replace(cfg, thresholds=tuple(parse_floats(args.thresholds)))
    if args.include_query_frame:
        cfg = replace(cfg, exclude_query_frame=False)
    cfg.validate()

    if args.pred_dir or args.gt_dir:
        if not (args.pred_dir and args.gt_dir):
            raise ConfigError("--pred-dir and --gt-dir go together")
        report = asyncio.run(evaluate_directory(args.pred_dir, args.gt_dir, cfg))
        console.print(f"{len(report.videos)} videos, mean AJ [bold]{report.mean_average_jaccard:.4f}[/bold]")
        emit_text(report.to_csv(), args.out)
        return 0

    if not (args.pred and args.gt):
        raise ConfigError("evaluate needs --pred and --gt, or --pred-dir and --gt-dir")
    report = average_jaccard(load_tracks(args.pred), load_tracks(args.gt), cfg)
    console.print(f"AJ [bold]{report.average_jaccard:.4f}[/bold]")
    emit_json(report.to_dict(), args.out)
    return 0


def cmd_synth(args: argparse.Namespace, settings: Settings) -> int:
    document = SceneDocument.load(args.spec)
    scene = generate_scene(document.scene)
    written = write_scene(scene, args.out_dir, document.degradations)
    console.print(f"[green]Wrote[/green] {len(written)} artifacts to {escape(str(args.out_dir))}")
    return 0


def _result_summary(result: PipelineResult) -> dict[str, Any]:
    return {
        "camera_moving": result.camera.moving,
        "num_points": result.fused.num_points,
        "num_static": result.flags.num_static if result.flags is not None else None,
        "average_jaccard": result.average_jaccard,
        "categories": result.categories,
    }


def cmd_pipeline(args: argparse.Namespace, settings: Settings) -> int:
    configs = [PipelineConfig.load(path, settings) for path in args.config]
    if args.gt and len(configs) > 1:
        raise ConfigError("--gt applies to a single --config")
    if len(configs) == 1:
        results = [run_pipeline(configs[0], ground_truth=args.gt)]
    else:
        results = asyncio.run(run_batch(configs))
    for result in results:
        verdict = "moving" if result.camera.moving else "static"
        aj = f", AJ {result.average_jaccard:.4f}" if result.average_jaccard is not None else ""
        console.print(f"[cyan]{escape(result.name)}[/cyan]: camera {verdict}{aj}")
    emit_json({result.name: _result_summary(result) for result in results}, args.out)
    return 0


def cmd_sweep(args: argparse.Namespace, settings: Settings) -> int:
    configs = [PipelineConfig.load(path, settings) for path in args.config]
    table = sweep(configs, args.param, parse_floats(args.values))
    console.print(score_table(f"Sensitivity of {args.param}", args.param, table.rows, with_static=True))
    emit_text(table.to_csv(), args.out)
    return 0


def cmd_compare(args: argparse.Namespace, settings: Settings) -> int:
    configs = [PipelineConfig.load(path, settings) for path in args.config]
    if args.ablation:
        table = ablation(configs)
        console.print(score_table("Component ablation", "method", table.rows))
    else:
        table = compare(configs)
        console.print(score_table("Sources vs fused", "method", table.rows))
    emit_text(table.to_csv(), args.out)
    return 0


# ---- parser ----

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fpd", description="Fine-grained point discrimination for point tracks.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--threads", type=int, help="Worker cap (0 = one per CPU) when FPD_THREADS is unset.")
    parser.add_argument("--log-level", help="DEBUG, INFO, WARNING or ERROR.")
    parser.add_argument("--settings", help="Alternative settings YAML (default: FPD_CONFIG or bundled fpd.yaml).")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("detect-camera", help="Classify the camera as static or moving.")
    p.add_argument("--frames", required=True)
    p.add_argument("--manifest")
    p.add_argument("--lambda-coarse", type=float)
    p.add_argument("--lambda-fine", type=float)
    p.add_argument("--eta", type=float)
    p.add_argument("--clip-seconds", type=float)
    p.add_argument("--dump-ssim", help="Write the whole-video SSIM series as CSV (index,ssim).")
    p.add_argument("--out")
    p.set_defaults(handler=cmd_detect_camera)

    p = sub.add_parser("detect-points", help="Flag each track as static or moving.")
    p.add_argument("--tracks", required=True)
    p.add_argument("--rho", type=float)
    p.add_argument("--min-visible", type=int)
    p.add_argument("--out")
    p.set_defaults(handler=cmd_detect_points)

    tracks = sub.add_parser("tracks", help="Inspect or convert track files.")
    tracks_sub = tracks.add_subparsers(dest="tracks_command", required=True)
    p = tracks_sub.add_parser("info")
    p.add_argument("file")
    p.set_defaults(handler=cmd_tracks_info)
    p = tracks_sub.add_parser("convert")
    p.add_argument("input")
    p.add_argument("output")
    p.add_argument("--format", choices=("json", "binary"), help="Default: from the output suffix.")
    p.set_defaults(handler=cmd_tracks_convert)

    p = sub.add_parser("fuse", help="Fuse named track sources under a policy.")
    p.add_argument("--frames", required=True)
    p.add_argument("--manifest")
    p.add_argument("--source", action="append", required=True, metavar="NAME=FILE")
    p.add_argument("--policy", required=True)
    p.add_argument("--stabilize", action="store_true")
    p.add_argument("--rho", type=float)
    p.add_argument("--out", required=True)
    p.add_argument("--report", help="Write the fusion summary JSON here instead of stdout.")
    p.set_defaults(handler=cmd_fuse)

    p = sub.add_parser("evaluate", help="Average Jaccard against ground truth.")
    p.add_argument("--pred")
    p.add_argument("--gt")
    p.add_argument("--pred-dir")
    p.add_argument("--gt-dir")
    p.add_argument("--thresholds", help="Comma-separated pixel thresholds.")
    p.add_argument("--include-query-frame", action="store_true")
    p.add_argument("--out")
    p.set_defaults(handler=cmd_evaluate)

    p = sub.add_parser("synth", help="Render a synthetic scene with ground truth.")
    p.add_argument("--spec", required=True)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(handler=cmd_synth)

    p = sub.add_parser("pipeline", help="Run MCMD -> MPD -> DTC (-> evaluation).")
    p.add_argument("--config", required=True, nargs="+")
    p.add_argument("--gt")
    p.add_argument("--out")
    p.set_defaults(handler=cmd_pipeline)

    p = sub.add_parser("sweep", help="Sensitivity of one threshold over a suite.")
    p.add_argument("--config", required=True, nargs="+")
    p.add_argument("--param", required=True, choices=SWEEP_PARAMS)
    p.add_argument("--values", required=True, help="Comma-separated values (at least two).")
    p.add_argument("--out")
    p.set_defaults(handler=cmd_sweep)

    p = sub.add_parser("compare", help="Single sources vs fused output over a suite.")
    p.add_argument("--config", required=True, nargs="+")
    p.add_argument("--ablation", action="store_true",
                   help="Base source, + point replacement, + camera-aware correction instead.")
    p.add_argument("--out")
    p.set_defaults(handler=cmd_compare)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        settings = Settings.load(args.settings)
        setup_logging(args.log_level or settings.log_level)
        configure_threads(args.threads if args.threads is not None else settings.threads)
        return args.handler(args, settings)
    except FpdError as e:
        console.print(f"[red]Error: {escape(str(e))}[/red]")
        if os.getenv("FPD_DEBUG"):
            console.print_exception()
        return e.exit_code
    except Exception as e:
        console.print(f"[red]Error: {escape(f'{type(e).__name__}: {e}')}[/red]")
        if os.getenv("FPD_DEBUG"):
            console.print_exception()
        return InvariantError.exit_code


if __name__ == "__main__":
    sys.exit(main())
