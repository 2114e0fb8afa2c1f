import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cstrack.errors import ParameterError, TrackingError
from cstrack.frames import Frame, SceneSpec, VideoMeta, ball_path, generate_scene
from cstrack.tracker import (
    Detection,
    TrackerParams,
    block_match,
    detect,
    estimate_background,
    fill_gaps,
    kinematics,
    track,
)


def blank(h=10, w=10):
    return Frame(np.zeros((h, w)))


def with_square(x, y, size, h=10, w=10, value=1.0):
    d = np.zeros((h, w))
    d[y:y + size, x:x + size] = value
    return Frame(d)


def test_median_background_of_blank_scene():
    frames = [blank(64, 64)] * 30
    assert np.all(estimate_background(frames).data == 0)


def test_median_rejects_transient_outlier():
    frames = [Frame(np.full((4, 4), 0.2)) for _ in range(5)]
    frames[2] = Frame(np.ones((4, 4)))
    assert np.allclose(estimate_background(frames).data, 0.2)


def test_median_even_count_takes_lower():
    frames = [Frame(np.full((2, 2), v)) for v in (0.4, 0.1, 0.3, 0.2)]
    assert np.allclose(estimate_background(frames).data, 0.2)


def test_first_frame_background():
    frames = [with_square(0, 0, 3), blank(), blank()]
    bg = estimate_background(frames, "first_frame")
    assert np.array_equal(bg.data, frames[0].data)


def test_background_errors():
    with pytest.raises(ParameterError):
        estimate_background([blank(), blank()], "temporal_median")
    with pytest.raises(ParameterError):
        estimate_background([blank()] * 3, "mode_of_the_day")
    with pytest.raises(ParameterError):
        TrackerParams(background_mode="nope")


def test_detect_corner_square():
    d = detect(with_square(0, 0, 3), blank())
    assert d.found and d.centroid == (1.0, 1.0) and d.blob_area == 9


def test_detect_nothing():
    d = detect(Frame(np.full((10, 10), 0.3)), Frame(np.full((10, 10), 0.3)))
    assert not d.found and d.centroid is None


def test_detect_picks_largest_blob():
    d = np.zeros((20, 20))
    d[1:4, 1:4] = 1.0            # area 9
    d[10:15, 12:17] = 1.0        # area 25
    det = detect(Frame(d), blank(20, 20))
    assert det.blob_area == 25
    assert det.centroid == (14.0, 12.0)


def test_detect_tie_goes_to_first_in_raster_order():
    d = np.zeros((20, 20))
    d[10:13, 1:4] = 1.0
    d[2:5, 15:18] = 1.0
    det = detect(Frame(d), blank(20, 20))
    assert det.centroid == (16.0, 3.0)


def test_detect_ignores_small_blobs_and_diagonals():
    d = np.zeros((10, 10))
    # a diagonal line is four 1-pixel components under 4-connectivity
    for i in range(4):
        d[i, i] = 1.0
    assert not detect(Frame(d), blank()).found


def test_detect_threshold_is_strict():
    frame = with_square(2, 2, 3, value=0.15)
    assert not detect(frame, blank()).found
    assert detect(with_square(2, 2, 3, value=0.16), blank()).found


def test_detect_dark_object_on_bright_background():
    bg = Frame(np.full((10, 10), 0.9))
    frame = Frame(np.where(with_square(4, 5, 2).data > 0, 0.1, 0.9))
    assert detect(frame, bg).centroid == (4.5, 5.5)


@settings(max_examples=40, deadline=None)
@given(x=st.integers(0, 20), y=st.integers(0, 20), size=st.integers(2, 6), dx=st.integers(-5, 5),
       dy=st.integers(-5, 5))
def test_centroid_translation_equivariance(x, y, size, dx, dy):
    h = w = 32
    a = detect(with_square(x + 5, y + 5, size, h, w), blank(h, w))
    b = detect(with_square(x + 5 + dx, y + 5 + dy, size, h, w), blank(h, w))
    assert b.centroid == (a.centroid[0] + dx, a.centroid[1] + dy)


def test_fill_gaps_single():
    pts = [Detection(0, (0.0, 0.0), found=True), Detection(1), Detection(2, (2.0, 4.0), found=True)]
    out = fill_gaps(pts)
    assert out[1].centroid == (1.0, 2.0)
    assert out[1].interpolated and not out[1].found


def test_fill_gaps_run_is_collinear():
    pts = [Detection(0, (1.0, 1.0), found=True)] + [Detection(i) for i in range(1, 4)]
    pts.append(Detection(4, (9.0, 5.0), found=True))
    out = fill_gaps(pts)
    xs = np.array([p.centroid for p in out])
    assert np.allclose(np.diff(xs, axis=0), [[2.0, 1.0]] * 4)


def test_fill_gaps_leaves_edges():
    pts = [Detection(0), Detection(1, (1.0, 1.0), found=True), Detection(2, (2.0, 1.0), found=True),
           Detection(3)]
    out = fill_gaps(pts)
    assert out[0].centroid is None and out[3].centroid is None


def test_kinematics_constant_position():
    vel, acc = kinematics(np.tile([3.0, 4.0], (6, 1)), 30.0)
    assert np.all(vel == 0) and np.all(acc == 0)


def test_kinematics_linear():
    p = np.stack([np.arange(8.0), np.zeros(8)], axis=1)
    vel, acc = kinematics(p, 30.0)
    assert np.allclose(vel[:, 0], 30.0) and np.allclose(acc, 0.0)


def test_kinematics_quadratic():
    t = np.arange(7.0)
    p = np.stack([np.zeros(7), t**2], axis=1)
    vel, acc = kinematics(p, 1.0)
    assert np.allclose(acc[:, 1], 2.0)
    # central difference is exact for a quadratic
    assert np.allclose(vel[1:-1, 1], 2 * t[1:-1])


def test_kinematics_missing_neighbor_gives_nan():
    p = np.stack([np.arange(5.0), np.zeros(5)], axis=1)
    p[2] = np.nan
    vel, _ = kinematics(p, 10.0)
    assert np.isnan(vel[1, 0]) and np.isnan(vel[3, 0])
    assert vel[0, 0] == pytest.approx(10.0)


def test_block_match_identity():
    f = Frame(np.random.default_rng(0).random((20, 20)))
    assert block_match(f, f, (6, 6, 5, 5), 3) == (0, 0)


def test_block_match_shift():
    d = np.random.default_rng(1).random((24, 24))
    prev = Frame(d)
    curr = Frame(np.roll(np.roll(d, 1, axis=0), 3, axis=1))
    assert block_match(prev, curr, (8, 8, 6, 6), 4) == (3, 1)


def test_block_match_flat_prefers_zero():
    f = Frame(np.full((16, 16), 0.5))
    assert block_match(f, f, (5, 5, 4, 4), 3) == (0, 0)


def test_block_match_window_outside():
    f = blank(16, 16)
    with pytest.raises(ParameterError):
        block_match(f, f, (1, 1, 4, 4), 3)
    with pytest.raises(ParameterError):
        block_match(f, f, (14, 14, 4, 4), 0)


def gt_scene(**kw):
    base = dict(meta=VideoMeta(30, 30.0, 64, 64), ball_radius=5.0, initial_position=(10.0, 32.0),
                initial_velocity=(1.0, 0.0), gravity=(0.0, 0.0))
    base.update(kw)
    return SceneSpec(**base)


def test_track_stationary_scene_has_no_detections():
    frames = generate_scene(gt_scene(initial_velocity=(0.0, 0.0)))
    with pytest.raises(TrackingError):
        track(frames)


def test_track_stationary_first_frame_background():
    frames = generate_scene(gt_scene(initial_velocity=(0.0, 0.0)))
    with pytest.raises(TrackingError, match="insufficient"):
        track(frames, TrackerParams(background_mode="first_frame"))


def test_track_needs_three_frames():
    with pytest.raises(ParameterError):
        track([blank(), blank()])


def test_track_constant_velocity():
    spec = gt_scene()
    traj = track(generate_scene(spec), fps=30.0)
    centers, bounced = ball_path(spec)
    assert not bounced.any()
    assert all(p.found for p in traj.points)
    assert np.allclose(traj.velocity[1:-1, 0], 30.0, rtol=0.05)
    assert np.max(np.abs(traj.positions() - centers)) <= 0.5


def test_track_gravity_mean_acceleration():
    spec = SceneSpec()
    centers, bounced = ball_path(spec)
    assert not bounced.any()
    traj = track(generate_scene(spec), fps=spec.meta.fps)
    g = spec.gravity[1] * spec.meta.fps**2
    assert np.mean(traj.acceleration[1:-1, 1]) == pytest.approx(g, rel=0.05)
    assert np.max(np.abs(traj.positions() - centers)) <= 0.5


def test_track_fills_occluded_frames():
    frames = generate_scene(gt_scene())
    frames[10] = Frame(np.zeros((64, 64)), 10)
    traj = track(frames)
    p = traj.points[10]
    assert p.interpolated and not p.found
    assert p.centroid[0] == pytest.approx(20.0, abs=0.5)
