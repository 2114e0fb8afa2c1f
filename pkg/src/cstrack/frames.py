"""Grayscale frame sequences: PGM storage and the synthetic bouncing-ball scene."""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .constants import FRAME_PATTERN, META_NAME, PGM_MAXVAL
from .errors import ConfigurationError, FormatError, ParameterError
from .rng import XorShift64Star, derive_seed

_FRAME_RE = re.compile(r"^frame_(\d{5})\.pgm$")


@dataclass(frozen=True, eq=False)
class Frame:
    """One grayscale image. ``data`` has shape (height, width), values in [0, 1]."""

    data: np.ndarray
    index: int = 0

    def __post_init__(self):
        data = np.asarray(self.data, dtype=np.float64)
        if data.ndim != 2 or data.size == 0:
            raise ParameterError(f"frame data must be a non-empty 2-D array, got shape {data.shape}")
        object.__setattr__(self, "data", data)
        if self.index < 0:
            raise ParameterError("frame index must be >= 0")

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.data.shape

    def clamped(self) -> Frame:
        return Frame(np.clip(self.data, 0.0, 1.0), self.index)


@dataclass(frozen=True)
class VideoMeta:
    frame_count: int
    fps: float
    width: int
    height: int

    def __post_init__(self):
        if self.frame_count <= 0:
            raise ParameterError("frame_count must be positive")
        if not (self.fps > 0 and math.isfinite(self.fps)):
            raise ParameterError("fps must be a positive finite number")
        if self.width <= 0 or self.height <= 0:
            raise ParameterError("frame dimensions must be positive")

    @property
    def duration(self) -> float:
        return self.frame_count / self.fps


@dataclass(frozen=True)
class SceneSpec:
    """A ball moving under constant acceleration, bouncing off the frame borders.

    Units are pixels and frames.  ``texture_seed`` of None gives a blank
    (zero) background; otherwise a fixed smoothed-noise texture spanning
    ``texture_range``.
    """

    meta: VideoMeta = field(default_factory=lambda: VideoMeta(30, 30.0, 64, 64))
    ball_radius: float = 5.0
    initial_position: tuple[float, float] = (16.0, 16.0)
    initial_velocity: tuple[float, float] = (1.0, 0.0)
    gravity: tuple[float, float] = (0.0, 0.05)
    ball_intensity: float = 1.0
    texture_seed: int | None = None
    texture_range: tuple[float, float] = (0.0, 0.7)

    @property
    def background_kind(self) -> str:
        return "blank" if self.texture_seed is None else "textured"

    def validate(self) -> None:
        w, h = self.meta.width, self.meta.height
        r = self.ball_radius
        x, y = self.initial_position
        if r <= 0:
            raise ParameterError("ball_radius must be positive")
        if not (r <= x <= w - 1 - r and r <= y <= h - 1 - r):
            raise ParameterError(f"ball at ({x}, {y}) with radius {r} does not fit in a {w}x{h} frame")
        if not 0.0 <= self.ball_intensity <= 1.0:
            raise ParameterError("ball_intensity must lie in [0, 1]")
        lo, hi = self.texture_range
        if not 0.0 <= lo <= hi <= 1.0:
            raise ParameterError("texture_range must satisfy 0 <= lo <= hi <= 1")


# --- PGM ---------------------------------------------------------------------


def _pgm_tokens(buf: bytes, count: int) -> tuple[list[bytes], int]:
    """Read ``count`` whitespace-separated header tokens, skipping comments."""
    tokens = []
    pos = 0
    n = len(buf)
    while len(tokens) < count:
        while pos < n and buf[pos:pos + 1].isspace():
            pos += 1
        if pos < n and buf[pos:pos + 1] == b"#":
            while pos < n and buf[pos:pos + 1] not in (b"\n", b"\r"):
                pos += 1
            continue
        start = pos
        while pos < n and not buf[pos:pos + 1].isspace() and buf[pos:pos + 1] != b"#":
            pos += 1
        if start == pos:
            raise FormatError("truncated PGM header")
        tokens.append(buf[start:pos])
    # exactly one whitespace byte separates the header from the raster
    return tokens, pos + 1


def read_pgm(path) -> np.ndarray:
    """Read a binary 8-bit PGM and return intensities scaled to [0, 1]."""
    buf = Path(path).read_bytes()
    tokens, offset = _pgm_tokens(buf, 4)
    if tokens[0] != b"P5":
        raise FormatError(f"{path}: not a binary PGM (magic {tokens[0]!r})")
    try:
        width, height, maxval = (int(t) for t in tokens[1:])
    except ValueError:
        raise FormatError(f"{path}: malformed PGM header") from None
    if width <= 0 or height <= 0 or not 0 < maxval <= 255:
        raise FormatError(f"{path}: unsupported PGM geometry or maxval {maxval}")
    raster = buf[offset:offset + width * height]
    if len(raster) != width * height:
        raise FormatError(f"{path}: expected {width * height} bytes of pixel data, got {len(raster)}")
    pixels = np.frombuffer(raster, dtype=np.uint8).reshape(height, width)
    return np.clip(pixels / float(maxval), 0.0, 1.0)


def quantize(data: np.ndarray) -> np.ndarray:
    return np.rint(np.clip(data, 0.0, 1.0) * PGM_MAXVAL).astype(np.uint8)


def write_pgm(path, data: np.ndarray) -> None:
    pixels = quantize(data)
    h, w = pixels.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{w} {h}\n{PGM_MAXVAL}\n".encode("ascii"))
        fh.write(pixels.tobytes())


# --- sequences ---------------------------------------------------------------


def read_meta(path) -> dict[str, str]:
    entries = {}
    for line in Path(path).read_text(encoding="ascii").splitlines():
        line = line.strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ConfigurationError(f"{path}: malformed line {line!r}")
        entries[key.strip()] = value.strip()
    return entries


def write_meta(path, meta: VideoMeta) -> None:
    text = (
        f"fps={meta.fps!r}\n"
        f"frames={meta.frame_count}\n"
        f"width={meta.width}\n"
        f"height={meta.height}\n"
    )
    Path(path).write_bytes(text.encode("ascii"))


def load_sequence(dir_path) -> tuple[VideoMeta, list[Frame]]:
    """Load ``frame_%05d.pgm`` files and the ``meta.txt`` sidecar from ``dir_path``."""
    root = Path(dir_path)
    meta_path = root / META_NAME
    if not meta_path.is_file():
        raise ConfigurationError(f"{root}: missing {META_NAME} sidecar")
    entries = read_meta(meta_path)
    try:
        fps = float(entries["fps"])
    except (KeyError, ValueError):
        raise ConfigurationError(f"{meta_path}: missing or invalid fps") from None

    indexed = []
    for p in root.iterdir():
        m = _FRAME_RE.match(p.name)
        if m:
            indexed.append((int(m.group(1)), p))
    if not indexed:
        raise FormatError(f"{root}: no frame_%05d.pgm files")
    indexed.sort()
    for expected, (idx, _) in enumerate(indexed):
        if idx != expected:
            raise FormatError(f"{root}: gap at index {expected}")

    frames = []
    for idx, p in indexed:
        data = read_pgm(p)
        if frames and data.shape != frames[0].shape:
            raise FormatError(f"{p}: dimensions {data.shape[::-1]} differ from {frames[0].shape[::-1]}")
        frames.append(Frame(data, idx))

    if "frames" in entries and int(entries["frames"]) != len(frames):
        raise FormatError(f"{meta_path}: declares {entries['frames']} frames, found {len(frames)}")
    height, width = frames[0].shape
    return VideoMeta(len(frames), fps, width, height), frames


def save_sequence(frames, meta: VideoMeta, dir_path) -> None:
    if not frames:
        raise ParameterError("cannot save an empty frame sequence")
    shape = frames[0].shape
    if any(f.shape != shape for f in frames):
        raise ParameterError("frames must share dimensions")
    root = Path(dir_path)
    root.mkdir(parents=True, exist_ok=True)
    for i, f in enumerate(frames):
        write_pgm(root / FRAME_PATTERN.format(i), f.data)
    h, w = shape
    write_meta(root / META_NAME, VideoMeta(len(frames), meta.fps, w, h))


# --- synthetic scene ---------------------------------------------------------


def box_filter3(img: np.ndarray) -> np.ndarray:
    """3x3 mean filter with edge replication."""
    padded = np.pad(img, 1, mode="edge")
    h, w = img.shape
    acc = np.zeros_like(img)
    for dy in range(3):
        for dx in range(3):
            acc += padded[dy:dy + h, dx:dx + w]
    return acc / 9.0


def make_background(spec: SceneSpec, master_seed: int) -> np.ndarray:
    h, w = spec.meta.height, spec.meta.width
    if spec.texture_seed is None:
        return np.zeros((h, w))
    rng = XorShift64Star(derive_seed(master_seed, spec.texture_seed))
    noise = np.array([rng.uniform() for _ in range(h * w)]).reshape(h, w)
    smooth = box_filter3(noise)
    lo, hi = spec.texture_range
    span = smooth.max() - smooth.min()
    unit = (smooth - smooth.min()) / span if span > 0 else np.zeros_like(smooth)
    return lo + (hi - lo) * unit


def ball_path(spec: SceneSpec) -> tuple[np.ndarray, np.ndarray]:
    """Ball centers per frame, shape (frame_count, 2) as (x, y), and bounce flags.

    Stepping x += v + g/2, v += g reproduces p0 + v0 t + g t^2 / 2 exactly
    between bounces.  A bounce reflects the center about the contact line and
    negates that velocity component; its frame is flagged.
    """
    spec.validate()
    w, h = spec.meta.width, spec.meta.height
    r = spec.ball_radius
    lo = np.array([r, r])
    hi = np.array([w - 1 - r, h - 1 - r])
    pos = np.array(spec.initial_position, dtype=float)
    vel = np.array(spec.initial_velocity, dtype=float)
    g = np.array(spec.gravity, dtype=float)

    n = spec.meta.frame_count
    centers = np.empty((n, 2))
    bounced = np.zeros(n, dtype=bool)
    centers[0] = pos
    for t in range(1, n):
        pos = pos + vel + 0.5 * g
        vel = vel + g
        for k in range(2):
            if pos[k] < lo[k]:
                pos[k] = 2 * lo[k] - pos[k]
                vel[k] = -vel[k]
                bounced[t] = True
            elif pos[k] > hi[k]:
                pos[k] = 2 * hi[k] - pos[k]
                vel[k] = -vel[k]
                bounced[t] = True
        centers[t] = pos
    return centers, bounced


def render_ball(background: np.ndarray, center, radius: float, intensity: float) -> np.ndarray:
    h, w = background.shape
    ys, xs = np.mgrid[0:h, 0:w]
    inside = (xs - center[0]) ** 2 + (ys - center[1]) ** 2 <= radius * radius
    out = background.copy()
    out[inside] = intensity
    return out


def generate_scene(spec: SceneSpec, master_seed: int = 0) -> list[Frame]:
    centers, _ = ball_path(spec)
    background = make_background(spec, master_seed)
    return [
        Frame(render_ball(background, c, spec.ball_radius, spec.ball_intensity), t)
        for t, c in enumerate(centers)
    ]
