"""Command-line interface.

Exit codes: 0 success, 2 bad arguments, 3 I/O or format error,
4 numeric/solver error, 5 tracking error.
"""

from __future__ import annotations

import argparse
import logging
import math
import sys
from pathlib import Path

from . import constants as C
from .errors import CSTrackError, ParameterError
from .frames import SceneSpec, VideoMeta, generate_scene, load_sequence, save_sequence
from .measurement import MeasurementSet, embed, frame_masks, read_mask, sample, write_mask
from .metrics import mean_psnr, psnr, trajectory_rmse
from .pipeline import (
    RunConfig,
    read_trajectory_csv,
    requantized,
    run_pipeline,
    trajectory_csv_text,
    write_trajectory_csv,
)
from .recovery import SolverParams, reconstruct_frame
from .tracker import BACKGROUND_MODES, TrackerParams, track

log = logging.getLogger("cstrack")

MASK_DIR = "masks"
MASK_PATTERN = "mask_{:05d}.txt"


def _percent_list(text: str) -> list[float]:
    try:
        return [float(s) for s in text.split(",") if s.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of numbers: {text!r}") from None


def add_scene_args(p: argparse.ArgumentParser) -> None:
    d = SceneSpec()
    g = p.add_argument_group("synthetic scene")
    g.add_argument("--width", type=int, default=d.meta.width, help="frame width in pixels (default %(default)s)")
    g.add_argument("--height", type=int, default=d.meta.height, help="frame height in pixels (default %(default)s)")
    g.add_argument("--frames", type=int, default=d.meta.frame_count, help="number of frames (default %(default)s)")
    g.add_argument("--fps", type=float, default=d.meta.fps, help="frame rate (default %(default)s)")
    g.add_argument("--radius", type=float, default=d.ball_radius, help="ball radius in pixels (default %(default)s)")
    g.add_argument("--x0", type=float, default=d.initial_position[0], help="initial ball x (default %(default)s)")
    g.add_argument("--y0", type=float, default=d.initial_position[1], help="initial ball y (default %(default)s)")
    g.add_argument("--vx", type=float, default=d.initial_velocity[0], help="initial x velocity, px/frame (default %(default)s)")
    g.add_argument("--vy", type=float, default=d.initial_velocity[1], help="initial y velocity, px/frame (default %(default)s)")
    g.add_argument("--gx", type=float, default=d.gravity[0], help="x acceleration, px/frame^2 (default %(default)s)")
    g.add_argument("--gy", type=float, default=d.gravity[1], help="y acceleration, px/frame^2 (default %(default)s)")
    g.add_argument("--intensity", type=float, default=d.ball_intensity, help="ball intensity in [0, 1] (default %(default)s)")
    g.add_argument("--background", choices=("blank", "textured"), default="blank",
                   help="blank or fixed smoothed-noise background (default %(default)s)")
    g.add_argument("--texture-seed", type=int, default=1, help="texture seed for a textured background (default %(default)s)")


def scene_from_args(args) -> SceneSpec:
    spec = SceneSpec(
        meta=VideoMeta(args.frames, args.fps, args.width, args.height),
        ball_radius=args.radius,
        initial_position=(args.x0, args.y0),
        initial_velocity=(args.vx, args.vy),
        gravity=(args.gx, args.gy),
        ball_intensity=args.intensity,
        texture_seed=args.texture_seed if args.background == "textured" else None,
    )
    spec.validate()
    return spec


def add_solver_args(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("solver")
    g.add_argument("--lambda", dest="lam", type=float, default=C.DEFAULT_LAMBDA,
                   help="l1 weight (default %(default)s)")
    g.add_argument("--iters", type=int, default=C.DEFAULT_MAX_ITERS, help="maximum iterations (default %(default)s)")
    g.add_argument("--tol", type=float, default=C.DEFAULT_TOL,
                   help="relative objective change that stops the solver (default %(default)s)")
    g.add_argument("--no-data-consistency", action="store_true",
                   help="do not overwrite retained pixels with their measured values")
    g.add_argument("--no-continuation", action="store_true",
                   help="solve at the target lambda directly instead of lowering it gradually")
    g.add_argument("--no-accel", action="store_true",
                   help="plain iterative soft-thresholding instead of the monotone accelerated variant")
    g.add_argument("--workers", type=int, default=1, help="processes used per retention level (default %(default)s)")


def solver_from_args(args) -> SolverParams:
    return SolverParams(
        lam=args.lam, max_iters=args.iters, tol=args.tol,
        enforce_data_consistency=not args.no_data_consistency,
        continuation=not args.no_continuation,
        accelerated=not args.no_accel,
    )


def add_tracker_args(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("tracker")
    g.add_argument("--threshold", type=float, default=C.DEFAULT_DIFF_THRESHOLD,
                   help="foreground threshold on |frame - background| (default %(default)s)")
    g.add_argument("--min-area", type=int, default=C.DEFAULT_MIN_BLOB_AREA,
                   help="smallest blob accepted, in pixels (default %(default)s)")
    g.add_argument("--background", dest="background_mode", choices=BACKGROUND_MODES,
                   default=C.DEFAULT_BACKGROUND_MODE, help="background estimate (default %(default)s)")


def tracker_from_args(args) -> TrackerParams:
    return TrackerParams(args.threshold, args.min_area, args.background_mode)


# --- subcommands -------------------------------------------------------------


def cmd_synth(args) -> int:
    spec = scene_from_args(args)
    frames = [requantized(f) for f in generate_scene(spec, args.seed)]
    save_sequence(frames, spec.meta, args.out)
    print(f"wrote {len(frames)} frames to {args.out}")
    return 0


def cmd_degrade(args) -> int:
    if not 0.0 < args.percent <= 100.0:
        raise ParameterError(f"--percent must lie in (0, 100], got {args.percent:g}")
    meta, frames = load_sequence(args.input)
    masks = frame_masks(meta.width, meta.height, args.percent, args.seed, len(frames), shared=args.shared_mask)
    out = Path(args.out)
    degraded = [embed(sample(f, m)) for f, m in zip(frames, masks)]
    save_sequence(degraded, meta, out)
    (out / MASK_DIR).mkdir(exist_ok=True)
    for t, m in enumerate(masks):
        write_mask(out / MASK_DIR / MASK_PATTERN.format(t), m)
    print(f"kept {masks[0].indices.size} of {meta.width * meta.height} pixels per frame; wrote {out}")
    return 0


def load_measurements(dir_path) -> tuple[VideoMeta, list[MeasurementSet]]:
    meta, frames = load_sequence(dir_path)
    sets = []
    for f in frames:
        mask = read_mask(Path(dir_path) / MASK_DIR / MASK_PATTERN.format(f.index))
        sets.append(MeasurementSet(mask, f.data.ravel()[mask.indices], f.index))
    return meta, sets


def cmd_reconstruct(args) -> int:
    params = solver_from_args(args)
    meta, sets = load_measurements(args.input)
    recs, seconds = [], 0.0
    for meas in sets:
        rec, report = reconstruct_frame(meas, params)
        recs.append(requantized(rec))
        seconds += report.elapsed_seconds
    save_sequence(recs, meta, args.out)
    print(f"reconstructed {len(recs)} frames in {seconds:.3f} s of solver time")
    if args.reference:
        _, ref = load_sequence(args.reference)
        values = [psnr(a, b) for a, b in zip(ref, recs)]
        print(f"mean PSNR: {mean_psnr(values):.2f} dB")
    return 0


def cmd_track(args) -> int:
    meta, frames = load_sequence(args.input)
    traj = track(frames, tracker_from_args(args), meta.fps)
    if args.out:
        write_trajectory_csv(args.out, traj)
    else:
        sys.stdout.write(trajectory_csv_text(traj))
    found = sum(p.found for p in traj.points)
    print(f"object found in {found} of {len(frames)} frames", file=sys.stderr)
    return 0


def cmd_metrics(args) -> int:
    ref, test = Path(args.reference), Path(args.test)
    if ref.is_file() and test.is_file():
        rmse = trajectory_rmse(read_trajectory_csv(ref), read_trajectory_csv(test))
        print(f"trajectory RMSE: {rmse:.4f} px")
        return 0
    _, a = load_sequence(ref)
    _, b = load_sequence(test)
    if len(a) != len(b):
        raise ParameterError(f"sequences have {len(a)} and {len(b)} frames")
    values = [psnr(x, y) for x, y in zip(a, b)]
    for i, v in enumerate(values):
        print(f"frame {i}: {v:.2f} dB" if math.isfinite(v) else f"frame {i}: inf")
    m = mean_psnr(values)
    print(f"mean PSNR: {m:.2f} dB" if math.isfinite(m) else "mean PSNR: inf")
    return 0


def cmd_pipeline(args) -> int:
    source = Path(args.input) if args.input else scene_from_args(args)
    config = RunConfig(
        input=source,
        out_dir=Path(args.out),
        percents=tuple(args.percents),
        master_seed=args.seed,
        solver=solver_from_args(args),
        tracker=tracker_from_args(args),
        shared_mask=args.shared_mask,
        workers=args.workers,
    )
    result = run_pipeline(config)
    print(f"{'percent':>8} {'mean PSNR dB':>13} {'RMSE px':>9} {'CS seconds':>11}")
    for r in result.reports:
        print(f"{r.percent:>8g} {r.mean_psnr:>13.2f} {r.trajectory_rmse:>9.3f} {r.elapsed_cs_seconds:>11.3f}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cstrack",
        description="Degrade videos by random pixel retention, reconstruct them by l1 recovery "
                    "in the DCT domain, and compare object trajectories.",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="render a synthetic bouncing-ball sequence")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--seed", type=int, default=0, help="master seed (default %(default)s)")
    add_scene_args(p)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("degrade", help="keep a random percentage of pixels in every frame")
    p.add_argument("--input", required=True, help="input sequence directory")
    p.add_argument("--out", required=True, help="output directory (zero-filled frames plus masks)")
    p.add_argument("--percent", type=float, required=True, help="retention percentage in (0, 100]")
    p.add_argument("--seed", type=int, default=0, help="master seed for the masks (default %(default)s)")
    p.add_argument("--shared-mask", action="store_true", help="use one mask for all frames")
    p.set_defaults(func=cmd_degrade)

    p = sub.add_parser("reconstruct", help="reconstruct a degraded sequence")
    p.add_argument("--input", required=True, help="directory written by 'degrade'")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--reference", help="original sequence; prints the mean PSNR when given")
    add_solver_args(p)
    p.set_defaults(func=cmd_reconstruct)

    p = sub.add_parser("track", help="track the moving object through a sequence")
    p.add_argument("--input", required=True, help="sequence directory")
    p.add_argument("--out", help="trajectory CSV path (stdout when omitted)")
    add_tracker_args(p)
    p.set_defaults(func=cmd_track)

    p = sub.add_parser("metrics", help="PSNR between two sequences, or RMSE between two trajectory CSVs")
    p.add_argument("--reference", required=True, help="reference sequence directory or trajectory CSV")
    p.add_argument("--test", required=True, help="test sequence directory or trajectory CSV")
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("pipeline", help="full experiment over a schedule of retention percentages")
    p.add_argument("--input", help="sequence directory; a synthetic scene is rendered when omitted")
    p.add_argument("--out", required=True, help="run output directory")
    p.add_argument("--percents", type=_percent_list, default=list(C.DEFAULT_PERCENTS),
                   help="comma-separated retention percentages (default 1,5,10,20,30,45)")
    p.add_argument("--seed", type=int, default=0, help="master seed (default %(default)s)")
    p.add_argument("--shared-mask", action="store_true", help="use one mask for all frames")
    add_scene_args(p)
    add_solver_args(p)
    # the scene group already owns --background, so the tracker's is renamed here
    g = p.add_argument_group("tracker")
    g.add_argument("--threshold", type=float, default=C.DEFAULT_DIFF_THRESHOLD,
                   help="foreground threshold on |frame - background| (default %(default)s)")
    g.add_argument("--min-area", type=int, default=C.DEFAULT_MIN_BLOB_AREA,
                   help="smallest blob accepted, in pixels (default %(default)s)")
    g.add_argument("--background-mode", dest="background_mode", choices=BACKGROUND_MODES,
                   default=C.DEFAULT_BACKGROUND_MODE, help="background estimate (default %(default)s)")
    p.set_defaults(func=cmd_pipeline)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except CSTrackError as exc:
        stage = getattr(exc, "stage", None)
        prefix = f"error in stage {stage}" if stage else "error"
        print(f"{prefix}: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        stage = getattr(exc, "stage", None)
        prefix = f"error in stage {stage}" if stage else "error"
        print(f"{prefix}: {exc}", file=sys.stderr)
        return C.EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
