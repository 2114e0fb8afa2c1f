import numpy as np
import pytest

from cstrack.errors import ConfigurationError, FormatError, ParameterError
from cstrack.frames import (
    Frame,
    SceneSpec,
    VideoMeta,
    ball_path,
    box_filter3,
    generate_scene,
    load_sequence,
    read_pgm,
    save_sequence,
    write_meta,
)


def write_raw_pgm(path, pixels, maxval=255, comment=False):
    h, w = pixels.shape
    header = b"P5\n" + (b"# made by a test\n" if comment else b"") + f"{w} {h}\n{maxval}\n".encode()
    path.write_bytes(header + pixels.astype(np.uint8).tobytes())


def test_load_three_blank_frames(tmp_path):
    for i in range(3):
        write_raw_pgm(tmp_path / f"frame_{i:05d}.pgm", np.zeros((4, 4)))
    write_meta(tmp_path / "meta.txt", VideoMeta(3, 30.0, 4, 4))
    meta, frames = load_sequence(tmp_path)
    assert meta == VideoMeta(3, 30.0, 4, 4)
    assert [f.index for f in frames] == [0, 1, 2]
    assert all(np.all(f.data == 0.0) for f in frames)


def test_normalization(tmp_path):
    write_raw_pgm(tmp_path / "a.pgm", np.array([[255, 128, 0]]), comment=True)
    data = read_pgm(tmp_path / "a.pgm")
    assert data[0, 0] == 1.0
    assert data[0, 1] == pytest.approx(128 / 255)
    assert data[0, 2] == 0.0


def test_gap_is_named(tmp_path):
    for i in (0, 2):
        write_raw_pgm(tmp_path / f"frame_{i:05d}.pgm", np.zeros((2, 2)))
    (tmp_path / "meta.txt").write_text("fps=30\n")
    with pytest.raises(FormatError, match="gap at index 1"):
        load_sequence(tmp_path)


def test_missing_sidecar(tmp_path):
    write_raw_pgm(tmp_path / "frame_00000.pgm", np.zeros((2, 2)))
    with pytest.raises(ConfigurationError):
        load_sequence(tmp_path)


def test_dimension_mismatch(tmp_path):
    write_raw_pgm(tmp_path / "frame_00000.pgm", np.zeros((2, 2)))
    write_raw_pgm(tmp_path / "frame_00001.pgm", np.zeros((3, 2)))
    (tmp_path / "meta.txt").write_text("fps=30\n")
    with pytest.raises(FormatError):
        load_sequence(tmp_path)


def test_truncated_raster(tmp_path):
    (tmp_path / "x.pgm").write_bytes(b"P5\n4 4\n255\n" + bytes(10))
    with pytest.raises(FormatError):
        read_pgm(tmp_path / "x.pgm")


def test_round_trip_constant(tmp_path):
    save_sequence([Frame(np.full((5, 7), 0.5))], VideoMeta(1, 24.32, 7, 5), tmp_path)
    meta, frames = load_sequence(tmp_path)
    assert meta.fps == 24.32
    assert np.max(np.abs(frames[0].data - 0.5)) <= 1 / 510


def test_round_trip_random(tmp_path):
    rng = np.random.default_rng(3)
    f = Frame(rng.random((64, 64)))
    save_sequence([f], VideoMeta(1, 30, 64, 64), tmp_path)
    _, (g,) = load_sequence(tmp_path)
    assert np.max(np.abs(g.data - f.data)) <= 1 / 510


def test_save_empty_rejected(tmp_path):
    with pytest.raises(ParameterError):
        save_sequence([], VideoMeta(1, 30, 1, 1), tmp_path)


def test_meta_duration():
    assert VideoMeta(61, 24.32, 8, 8).duration == pytest.approx(61 / 24.32)
    with pytest.raises(ParameterError):
        VideoMeta(0, 30, 8, 8)


def scene(**kw):
    base = dict(meta=VideoMeta(10, 30.0, 64, 64), ball_radius=4.0, initial_position=(20.0, 20.0),
                initial_velocity=(0.0, 0.0), gravity=(0.0, 0.0))
    base.update(kw)
    return SceneSpec(**base)


def test_static_scene_identical_frames():
    frames = generate_scene(scene())
    assert all(np.array_equal(frames[0].data, f.data) for f in frames)


def test_constant_velocity_path():
    centers, bounced = ball_path(scene(initial_velocity=(1.0, 0.0)))
    assert not bounced.any()
    assert np.array_equal(centers[:, 0], 20.0 + np.arange(10))


def test_gravity_path():
    centers, _ = ball_path(scene(meta=VideoMeta(5, 30, 64, 64), gravity=(0.0, 0.5)))
    assert np.allclose(centers[:, 1] - 20.0, [0, 0.25, 1.0, 2.25, 4.0], atol=1e-12)


def test_bounce_reflects_velocity():
    centers, bounced = ball_path(scene(meta=VideoMeta(20, 30, 32, 32), initial_velocity=(3.0, 0.0),
                                       initial_position=(20.0, 10.0)))
    assert bounced.any()
    assert np.all(centers[:, 0] >= 4.0) and np.all(centers[:, 0] <= 31 - 4.0)


def test_ball_must_fit():
    with pytest.raises(ParameterError):
        scene(initial_position=(2.0, 20.0)).validate()


def test_generation_deterministic():
    s = scene(texture_seed=5, initial_velocity=(1.0, 0.5))
    a = generate_scene(s, 11)
    b = generate_scene(s, 11)
    assert all(np.array_equal(x.data, y.data) for x, y in zip(a, b))
    c = generate_scene(s, 12)
    assert not np.array_equal(a[0].data, c[0].data)


def test_textured_background_is_fixed_and_in_range():
    frames = generate_scene(scene(texture_seed=2, initial_velocity=(2.0, 0.0)))
    # a corner far from the ball's path never changes
    assert np.array_equal(frames[0].data[50:, 50:], frames[-1].data[50:, 50:])
    lo, hi = SceneSpec().texture_range
    bg = frames[0].data[50:, 50:]
    assert bg.min() >= lo and bg.max() <= hi


def test_box_filter_preserves_constant():
    assert np.allclose(box_filter3(np.full((5, 6), 0.3)), 0.3)


@pytest.mark.parametrize("center", [(20.0, 20.0), (20.3, 31.7), (40.5, 12.25)])
def test_threshold_centroid_matches_center(center):
    s = scene(initial_position=center, ball_radius=5.0)
    f = generate_scene(s)[0]
    ys, xs = np.nonzero(f.data > 0.5 * s.ball_intensity)
    assert abs(xs.mean() - center[0]) <= 0.5
    assert abs(ys.mean() - center[1]) <= 0.5
