"""Single-object tracking by background subtraction, plus block matching."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .constants import DEFAULT_BACKGROUND_MODE, DEFAULT_DIFF_THRESHOLD, DEFAULT_MIN_BLOB_AREA
from .errors import ParameterError, TrackingError
from .frames import Frame, VideoMeta

BACKGROUND_MODES = ("first_frame", "temporal_median")
_FOUR_CONNECTED = np.array([[0, 1, 0], [1, 1, 1], [0, 1, 0]])


@dataclass(frozen=True)
class Detection:
    """Object position in one frame.

    ``centroid`` is set when the object was found, or when ``fill_gaps``
    interpolated it (then ``interpolated`` is true and ``found`` false).
    """

    frame_index: int
    centroid: tuple[float, float] | None = None
    blob_area: int | None = None
    found: bool = False
    interpolated: bool = False

    @property
    def has_position(self) -> bool:
        return self.centroid is not None


@dataclass(frozen=True)
class TrackerParams:
    diff_threshold: float = DEFAULT_DIFF_THRESHOLD
    min_blob_area: int = DEFAULT_MIN_BLOB_AREA
    background_mode: str = DEFAULT_BACKGROUND_MODE

    def __post_init__(self):
        if not 0.0 < self.diff_threshold < 1.0:
            raise ParameterError("diff_threshold must lie in (0, 1)")
        if self.min_blob_area < 1:
            raise ParameterError("min_blob_area must be >= 1")
        if self.background_mode not in BACKGROUND_MODES:
            raise ParameterError(f"background_mode must be one of {BACKGROUND_MODES}")


@dataclass
class Trajectory:
    meta: VideoMeta
    points: list[Detection]
    velocity: np.ndarray          # (n, 2) px/s, NaN where undefined
    acceleration: np.ndarray      # (n, 2) px/s^2, NaN where undefined

    @property
    def interpolated_flags(self) -> list[bool]:
        return [p.interpolated for p in self.points]

    def positions(self) -> np.ndarray:
        """(n, 2) array of (x, y); NaN rows where there is no position."""
        return positions_of(self.points)


def positions_of(points) -> np.ndarray:
    out = np.full((len(points), 2), np.nan)
    for i, p in enumerate(points):
        if p.centroid is not None:
            out[i] = p.centroid
    return out


def estimate_background(frames, mode: str = DEFAULT_BACKGROUND_MODE) -> Frame:
    if not frames:
        raise ParameterError("need at least one frame")
    if mode == "first_frame":
        return Frame(frames[0].data.copy(), 0)
    if mode != "temporal_median":
        raise ParameterError(f"unknown background mode {mode!r}")
    if len(frames) < 3:
        raise ParameterError("temporal_median needs at least 3 frames")
    stack = np.stack([f.data for f in frames])
    k = (len(frames) - 1) // 2  # lower median for even counts
    return Frame(np.partition(stack, k, axis=0)[k], 0)


def detect(frame: Frame, background: Frame, params: TrackerParams = TrackerParams()) -> Detection:
    if frame.shape != background.shape:
        raise ParameterError("frame and background dimensions differ")
    fg = np.abs(frame.data - background.data) > params.diff_threshold
    labels, count = ndimage.label(fg, structure=_FOUR_CONNECTED)
    if count == 0:
        return Detection(frame.index)
    flat = labels.ravel()
    areas = np.bincount(flat, minlength=count + 1)
    areas[0] = 0
    # first occurrence in raster order is each component's minimum linear index
    _, first = np.unique(flat, return_index=True)
    best = None
    for label in range(1, count + 1):
        area = int(areas[label])
        if area < params.min_blob_area:
            continue
        key = (-area, first[label])
        if best is None or key < best[0]:
            best = (key, label)
    if best is None:
        return Detection(frame.index)
    label = best[1]
    ys, xs = np.nonzero(labels == label)
    return Detection(
        frame.index, (float(xs.mean()), float(ys.mean())), int(areas[label]), found=True
    )


def fill_gaps(points) -> list[Detection]:
    """Linearly interpolate interior runs of missing detections."""
    out = list(points)
    known = [i for i, p in enumerate(out) if p.has_position]
    for a, b in zip(known, known[1:]):
        if b - a < 2:
            continue
        xa, ya = out[a].centroid
        xb, yb = out[b].centroid
        for t in range(a + 1, b):
            s = (t - a) / (b - a)
            out[t] = Detection(
                out[t].frame_index,
                (xa + s * (xb - xa), ya + s * (yb - ya)),
                found=False,
                interpolated=True,
            )
    return out


def kinematics(positions, fps: float) -> tuple[np.ndarray, np.ndarray]:
    """Finite-difference velocity (px/s) and acceleration (px/s^2).

    ``positions`` is (n, 2) with NaN for missing frames (or a list of
    Detection).  Central differences inside, one-sided at the two ends;
    NaN wherever a needed neighbor is missing.
    """
    p = positions_of(positions) if not isinstance(positions, np.ndarray) else np.asarray(positions, float)
    n = len(p)
    vel = np.full_like(p, np.nan)
    acc = np.full_like(p, np.nan)
    if n >= 3:
        vel[1:-1] = (p[2:] - p[:-2]) * fps / 2
        acc[1:-1] = (p[2:] - 2 * p[1:-1] + p[:-2]) * fps**2
        acc[0] = (p[2] - 2 * p[1] + p[0]) * fps**2
        acc[-1] = (p[-1] - 2 * p[-2] + p[-3]) * fps**2
    if n >= 2:
        vel[0] = (p[1] - p[0]) * fps
        vel[-1] = (p[-1] - p[-2]) * fps
    return vel, acc


def track(frames, params: TrackerParams = TrackerParams(), fps: float = 30.0) -> Trajectory:
    if len(frames) < 3:
        raise ParameterError("tracking needs at least 3 frames")
    background = estimate_background(frames, params.background_mode)
    points = [detect(f, background, params) for f in frames]
    if sum(p.found for p in points) < 2:
        raise TrackingError("insufficient detections")
    points = fill_gaps(points)
    vel, acc = kinematics(positions_of(points), fps)
    h, w = frames[0].shape
    return Trajectory(VideoMeta(len(frames), fps, w, h), points, vel, acc)


def block_match(prev: Frame, curr: Frame, box, search_radius: int) -> tuple[int, int]:
    """Displacement of the ``box`` = (x, y, w, h) block from ``prev`` to ``curr``.

    Exhaustive search minimizing the sum of absolute differences.  Ties go
    to the smallest |dx| + |dy|, then to the lexicographically smallest
    (dy, dx).
    """
    x, y, w, h = (int(v) for v in box)
    r = int(search_radius)
    ph, pw = prev.shape
    ch, cw = curr.shape
    if w <= 0 or h <= 0 or r < 0:
        raise ParameterError("box size must be positive and search radius non-negative")
    if x < 0 or y < 0 or x + w > pw or y + h > ph:
        raise ParameterError("box lies outside the previous frame")
    if x - r < 0 or y - r < 0 or x + w + r > cw or y + h + r > ch:
        raise ParameterError("search window leaves the current frame")
    block = prev.data[y:y + h, x:x + w]
    best = None
    for dy in range(-r, r + 1):
        for dx in range(-r, r + 1):
            sad = float(np.abs(curr.data[y + dy:y + dy + h, x + dx:x + dx + w] - block).sum())
            key = (sad, abs(dx) + abs(dy), dy, dx)
            if best is None or key < best:
                best = key
    return best[3], best[2]
