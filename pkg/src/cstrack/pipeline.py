"""End-to-end experiment: degrade, reconstruct, track, and score at several retention levels."""

from __future__ import annotations

import csv
import io
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from contextlib import contextmanager
from dataclasses import dataclass, field, fields
from pathlib import Path

import numpy as np

from .constants import DEFAULT_PERCENTS
from .errors import FormatError, ParameterError
from .frames import Frame, SceneSpec, VideoMeta, generate_scene, load_sequence, quantize, save_sequence
from .measurement import frame_masks, sample
from .metrics import QualityReport, mean_psnr, psnr, trajectory_rmse
from .recovery import SolverParams, reconstruct_frame
from .svg import overlay_svg
from .tracker import Detection, TrackerParams, Trajectory, track

log = logging.getLogger(__name__)

TRAJECTORY_HEADER = ["frame", "t", "x", "y", "vx", "vy", "ax", "ay", "found", "interpolated"]


@dataclass
class RunConfig:
    input: Path | SceneSpec
    out_dir: Path
    percents: tuple[float, ...] = DEFAULT_PERCENTS
    master_seed: int = 0
    solver: SolverParams = field(default_factory=SolverParams)
    tracker: TrackerParams = field(default_factory=TrackerParams)
    shared_mask: bool = False
    workers: int = 1

    def __post_init__(self):
        pcts = sorted({float(p) for p in self.percents})
        if not pcts:
            raise ParameterError("at least one percent level is required")
        for p in pcts:
            if not 0.0 < p <= 100.0:
                raise ParameterError(f"percent must lie in (0, 100], got {p:g}")
        self.percents = tuple(pcts)
        self.out_dir = Path(self.out_dir)
        if self.workers < 1:
            raise ParameterError("workers must be >= 1")


def percent_label(p: float) -> str:
    return f"p{p:g}"


def _num(v) -> str:
    if v is None or (isinstance(v, float) and math.isnan(v)):
        return ""
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return f"{v:.6f}"


# --- CSV I/O -----------------------------------------------------------------


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def _write_rows(path, header, rows) -> None:
    Path(path).write_bytes(_csv_text(header, rows).encode("ascii"))


def trajectory_csv_text(traj: Trajectory) -> str:
    fps = traj.meta.fps
    rows = []
    for i, p in enumerate(traj.points):
        x, y = p.centroid if p.centroid is not None else (None, None)
        vx, vy = traj.velocity[i]
        ax, ay = traj.acceleration[i]
        rows.append([
            p.frame_index, _num(p.frame_index / fps), _num(x), _num(y),
            _num(vx), _num(vy), _num(ax), _num(ay), int(p.found), int(p.interpolated),
        ])
    return _csv_text(TRAJECTORY_HEADER, rows)


def write_trajectory_csv(path, traj: Trajectory) -> None:
    Path(path).write_bytes(trajectory_csv_text(traj).encode("ascii"))


def read_trajectory_csv(path, fps: float | None = None) -> Trajectory:
    text = Path(path).read_text(encoding="ascii")
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames != TRAJECTORY_HEADER:
        raise FormatError(f"{path}: unexpected header {reader.fieldnames}")

    def val(s):
        return float(s) if s != "" else math.nan

    points, vel, acc, times = [], [], [], []
    for row in reader:
        x, y = val(row["x"]), val(row["y"])
        centroid = None if math.isnan(x) or math.isnan(y) else (x, y)
        points.append(Detection(int(row["frame"]), centroid, None,
                                row["found"] == "1", row["interpolated"] == "1"))
        vel.append((val(row["vx"]), val(row["vy"])))
        acc.append((val(row["ax"]), val(row["ay"])))
        times.append(val(row["t"]))
    if not points:
        raise FormatError(f"{path}: no rows")
    if fps is None:
        fps = points[1].frame_index / times[1] if len(points) > 1 and times[1] > 0 else 1.0
    return Trajectory(VideoMeta(len(points), fps, 1, 1), points, np.array(vel), np.array(acc))


def write_metrics_csv(path, reports) -> None:
    rows = []
    for rep in reports:
        label = f"{rep.percent:g}"
        rows += [[label, i, _num(v)] for i, v in enumerate(rep.per_frame_psnr)]
        rows.append([label, "mean", _num(rep.mean_psnr)])
    _write_rows(path, ["percent", "frame", "psnr_db"], rows)


def write_timing_csv(path, reports, frame_count) -> None:
    rows = [
        [f"{r.percent:g}", f"{r.elapsed_cs_seconds:.6f}", frame_count,
         f"{r.elapsed_cs_seconds / frame_count:.6f}"]
        for r in reports
    ]
    _write_rows(path, ["percent", "total_cs_seconds", "frames", "seconds_per_frame"], rows)


def write_summary_csv(path, reports) -> None:
    rows = [[f"{r.percent:g}", _num(r.mean_psnr), _num(r.trajectory_rmse)] for r in reports]
    _write_rows(path, ["percent", "mean_psnr_db", "trajectory_rmse_px"], rows)


def describe_config(config: RunConfig) -> str:
    lines = []
    if isinstance(config.input, SceneSpec):
        spec = config.input
        lines.append("input=synthetic")
        for f in fields(spec):
            lines.append(f"scene.{f.name}={getattr(spec, f.name)!r}")
    else:
        lines.append(f"input={config.input}")
    lines.append("percents=" + ",".join(f"{p:g}" for p in config.percents))
    lines.append(f"master_seed={config.master_seed}")
    lines.append(f"shared_mask={config.shared_mask}")
    for f in fields(config.solver):
        lines.append(f"solver.{f.name}={getattr(config.solver, f.name)!r}")
    for f in fields(config.tracker):
        lines.append(f"tracker.{f.name}={getattr(config.tracker, f.name)!r}")
    return "\n".join(lines) + "\n"


# --- stages ------------------------------------------------------------------


@contextmanager
def _stage(name: str, out_dir: Path):
    try:
        yield
    except Exception as exc:
        out_dir.mkdir(parents=True, exist_ok=True)
        (out_dir / "FAILED").write_text(f"stage={name}\nerror={type(exc).__name__}: {exc}\n")
        exc.stage = name
        raise


def requantized(frame: Frame) -> Frame:
    return Frame(quantize(frame.data) / 255.0, frame.index)


def _reconstruct_one(args):
    frame, mask, params = args
    rec, report = reconstruct_frame(sample(frame, mask), params)
    return requantized(rec), report.elapsed_seconds


def reconstruct_sequence(frames, percent, master_seed, params, shared_mask=False, workers=1):
    """Reconstruct every frame from its own random mask; returns (frames, solver seconds)."""
    h, w = frames[0].shape
    masks = frame_masks(w, h, percent, master_seed, len(frames), shared=shared_mask)
    jobs = [(f, m, params) for f, m in zip(frames, masks)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_reconstruct_one, jobs))
    else:
        results = [_reconstruct_one(j) for j in jobs]
    return [r[0] for r in results], math.fsum(r[1] for r in results)


@dataclass
class PipelineResult:
    meta: VideoMeta
    original: Trajectory
    trajectories: dict[float, Trajectory]
    reports: list[QualityReport]


def run_pipeline(config: RunConfig) -> PipelineResult:
    out = config.out_dir
    out.mkdir(parents=True, exist_ok=True)
    (out / "run_config.txt").write_text(describe_config(config), encoding="ascii")

    with _stage("input", out):
        if isinstance(config.input, SceneSpec):
            meta = config.input.meta
            frames = [requantized(f) for f in generate_scene(config.input, config.master_seed)]
            save_sequence(frames, meta, out / "original")
        else:
            meta, frames = load_sequence(config.input)

    with _stage("track-original", out):
        original = track(frames, config.tracker, meta.fps)
        write_trajectory_csv(out / "trajectory_original.csv", original)
    ref_points = [p.centroid for p in original.points]

    reports, trajectories = [], {}
    for pct in config.percents:
        label = percent_label(pct)
        log.info("reconstructing %d frames at %g%%", len(frames), pct)
        with _stage(f"reconstruct-{label}", out):
            rec, seconds = reconstruct_sequence(
                frames, pct, config.master_seed, config.solver, config.shared_mask, config.workers
            )
            save_sequence(rec, meta, out / label)
        with _stage(f"track-{label}", out):
            traj = track(rec, config.tracker, meta.fps)
            write_trajectory_csv(out / f"trajectory_{label}.csv", traj)
        with _stage(f"metrics-{label}", out):
            per_frame = [psnr(a, b) for a, b in zip(frames, rec)]
            report = QualityReport(
                pct, per_frame, mean_psnr(per_frame), trajectory_rmse(original, traj),
                max(seconds, 1e-9),
            )
            svg = overlay_svg(
                meta.width, meta.height, ref_points, [p.centroid for p in traj.points],
                title=f"trajectory, {pct:g}% of pixels retained",
            )
            (out / f"overlay_{label}.svg").write_text(svg, encoding="ascii")
        log.info("%g%%: mean PSNR %.2f dB, trajectory RMSE %.3f px",
                 pct, report.mean_psnr, report.trajectory_rmse)
        reports.append(report)
        trajectories[pct] = traj

    with _stage("write-metrics", out):
        write_metrics_csv(out / "metrics.csv", reports)
        write_timing_csv(out / "timing.csv", reports, len(frames))
        write_summary_csv(out / "summary.csv", reports)
    return PipelineResult(meta, original, trajectories, reports)
