"""Compressive-sampling reconstruction and ball tracking for short grayscale videos."""

from .frames import Frame, SceneSpec, VideoMeta, generate_scene, load_sequence, save_sequence
from .measurement import MeasurementSet, PixelMask, make_mask, sample
from .metrics import mean_psnr, psnr, trajectory_rmse
from .pipeline import RunConfig, run_pipeline
from .recovery import SolverParams, reconstruct_frame, solve_l1
from .tracker import TrackerParams, Trajectory, track

__version__ = "0.1.0"

__all__ = [
    "Frame", "SceneSpec", "VideoMeta", "generate_scene", "load_sequence", "save_sequence",
    "MeasurementSet", "PixelMask", "make_mask", "sample",
    "mean_psnr", "psnr", "trajectory_rmse",
    "RunConfig", "run_pipeline",
    "SolverParams", "reconstruct_frame", "solve_l1",
    "TrackerParams", "Trajectory", "track",
]
