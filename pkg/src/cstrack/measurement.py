"""Random pixel-retention masks and the sampling operator they define.

The measurement operator is never stored as a matrix: ``sample`` gathers the
retained pixels and ``embed`` is its adjoint (scatter with zero fill).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import FormatError, ParameterError
from .frames import Frame
from .rng import XorShift64Star, derive_seed


@dataclass(frozen=True, eq=False)
class PixelMask:
    width: int
    height: int
    percent: float
    seed: int
    indices: np.ndarray

    @property
    def size(self) -> int:
        return self.width * self.height

    def __eq__(self, other):
        if not isinstance(other, PixelMask):
            return NotImplemented
        return (
            (self.width, self.height, self.percent, self.seed)
            == (other.width, other.height, other.percent, other.seed)
            and np.array_equal(self.indices, other.indices)
        )

    def boolean(self) -> np.ndarray:
        keep = np.zeros(self.size, dtype=bool)
        keep[self.indices] = True
        return keep.reshape(self.height, self.width)


@dataclass(frozen=True, eq=False)
class MeasurementSet:
    mask: PixelMask
    values: np.ndarray
    frame_index: int = 0

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        if values.shape != self.mask.indices.shape:
            raise ParameterError(
                f"{values.size} values for a mask of {self.mask.indices.size} indices"
            )
        object.__setattr__(self, "values", values)


def retained_count(percent: float, n_pixels: int) -> int:
    """max(1, round(percent/100 * N)) with halves rounded away from zero."""
    return max(1, math.floor(percent / 100.0 * n_pixels + 0.5))


def make_mask(width: int, height: int, percent: float, seed: int) -> PixelMask:
    """Uniform random subset of pixel positions via partial Fisher-Yates."""
    if not (0.0 < percent <= 100.0):
        raise ParameterError(f"percent must lie in (0, 100], got {percent}")
    if width <= 0 or height <= 0:
        raise ParameterError("mask dimensions must be positive")
    n = width * height
    m = retained_count(percent, n)
    if m == n:
        indices = np.arange(n, dtype=np.int64)
    else:
        rng = XorShift64Star(seed)
        pool = list(range(n))
        for i in range(m):
            j = i + rng.below(n - i)
            pool[i], pool[j] = pool[j], pool[i]
        indices = np.sort(np.array(pool[:m], dtype=np.int64))
    return PixelMask(width, height, float(percent), int(seed), indices)


def frame_masks(width, height, percent, master_seed, frame_count, shared=False):
    """One mask per frame; seeds derived per frame unless ``shared``."""
    if shared:
        mask = make_mask(width, height, percent, derive_seed(master_seed, 0))
        return [mask] * frame_count
    return [
        make_mask(width, height, percent, derive_seed(master_seed, t))
        for t in range(frame_count)
    ]


def sample(frame: Frame, mask: PixelMask) -> MeasurementSet:
    if (frame.width, frame.height) != (mask.width, mask.height):
        raise ParameterError(
            f"mask is {mask.width}x{mask.height}, frame is {frame.width}x{frame.height}"
        )
    return MeasurementSet(mask, frame.data.ravel()[mask.indices].copy(), frame.index)


def embed(meas: MeasurementSet) -> Frame:
    mask = meas.mask
    flat = np.zeros(mask.size)
    flat[mask.indices] = meas.values
    return Frame(flat.reshape(mask.height, mask.width), meas.frame_index)


# --- mask files --------------------------------------------------------------


def write_mask(path, mask: PixelMask) -> None:
    lines = [f"{mask.width} {mask.height} {mask.percent!r} {mask.seed} {mask.indices.size}"]
    lines.extend(str(int(i)) for i in mask.indices)
    Path(path).write_bytes(("\n".join(lines) + "\n").encode("ascii"))


def read_mask(path) -> PixelMask:
    lines = Path(path).read_text(encoding="ascii").split("\n")
    try:
        w, h, pct, seed, count = lines[0].split()
        width, height, percent, seed, count = int(w), int(h), float(pct), int(seed), int(count)
        indices = np.array([int(s) for s in lines[1:] if s.strip()], dtype=np.int64)
    except ValueError:
        raise FormatError(f"{path}: malformed mask file") from None
    if indices.size != count:
        raise FormatError(f"{path}: header declares {count} indices, found {indices.size}")
    if indices.size and (
        np.any(np.diff(indices) <= 0) or indices[0] < 0 or indices[-1] >= width * height
    ):
        raise FormatError(f"{path}: indices must be strictly increasing and in range")
    return PixelMask(width, height, percent, seed, indices)
