"""Reconstruction quality (PSNR) and trajectory fidelity."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import MetricError, ParameterError
from .frames import Frame


@dataclass
class QualityReport:
    percent: float
    per_frame_psnr: list[float]
    mean_psnr: float
    trajectory_rmse: float
    elapsed_cs_seconds: float


def psnr(reference: Frame, test: Frame) -> float:
    """PSNR in dB with peak 1.0; ``math.inf`` for identical frames."""
    if reference.shape != test.shape:
        raise ParameterError(f"frame shapes differ: {reference.shape} vs {test.shape}")
    mse = float(np.mean((reference.data - test.data) ** 2))
    if mse == 0.0:
        return math.inf
    return 10.0 * math.log10(1.0 / mse)


def mean_psnr(values) -> float:
    """Mean over finite entries; ``math.inf`` when every entry is infinite."""
    values = list(values)
    if not values:
        raise MetricError("mean of an empty PSNR list")
    finite = [v for v in values if math.isfinite(v)]
    if not finite:
        return math.inf
    return math.fsum(finite) / len(finite)


def _positions(traj) -> np.ndarray:
    return traj.positions() if hasattr(traj, "positions") else np.asarray(traj, dtype=float)


def trajectory_rmse(ref, test) -> float:
    """RMS Euclidean distance over frames where both trajectories have a position.

    Accepts Trajectory objects or (n, 2) arrays with NaN for missing frames.
    """
    a = _positions(ref)
    b = _positions(test)
    if a.shape != b.shape:
        raise ParameterError(f"trajectories cover {len(a)} and {len(b)} frames")
    both = ~np.isnan(a).any(axis=1) & ~np.isnan(b).any(axis=1)
    if not both.any():
        raise MetricError("no frames where both trajectories have a position")
    d2 = np.sum((a[both] - b[both]) ** 2, axis=1)
    return math.sqrt(math.fsum(d2) / len(d2))
