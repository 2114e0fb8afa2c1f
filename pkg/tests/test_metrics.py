import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from cstrack.errors import MetricError, ParameterError
from cstrack.frames import Frame
from cstrack.metrics import mean_psnr, psnr, trajectory_rmse


def test_identical_frames_are_infinite():
    f = Frame(np.random.default_rng(0).random((8, 8)))
    assert psnr(f, f) == math.inf


def test_hand_case():
    # mse = (16/255)^2 -> 20 log10(255/16)
    a, b = Frame(np.zeros((4, 4))), Frame(np.full((4, 4), 16 / 255))
    assert psnr(a, b) == pytest.approx(24.05, abs=0.01)
    assert psnr(a, b) == pytest.approx(20 * math.log10(255 / 16), rel=1e-12)


def test_shape_mismatch():
    with pytest.raises(ParameterError):
        psnr(Frame(np.zeros((4, 4))), Frame(np.zeros((4, 5))))


@settings(max_examples=50, deadline=None)
@given(arrays(np.float64, (6, 6), elements=st.floats(0, 1)), arrays(np.float64, (6, 6), elements=st.floats(0, 1)))
def test_psnr_symmetric(a, b):
    assert psnr(Frame(a), Frame(b)) == psnr(Frame(b), Frame(a))


def test_more_noise_lowers_psnr():
    rng = np.random.default_rng(3)
    ref = Frame(np.full((32, 32), 0.5))
    noise = rng.standard_normal((32, 32))
    values = [psnr(ref, Frame(ref.data + s * noise)) for s in (0.01, 0.02, 0.05, 0.1)]
    assert all(x > y for x, y in zip(values, values[1:]))


def test_mean_psnr():
    assert mean_psnr([30.0, 40.0]) == 35.0
    assert mean_psnr([math.inf, 40.0]) == 40.0
    assert mean_psnr([math.inf, math.inf]) == math.inf
    with pytest.raises(MetricError):
        mean_psnr([])


def test_rmse_cases():
    a = np.array([[0.0, 0.0], [1.0, 1.0], [2.0, 2.0]])
    assert trajectory_rmse(a, a) == 0.0
    assert trajectory_rmse(a, a + [3.0, 0.0]) == pytest.approx(3.0)
    assert trajectory_rmse(a, a + [2.0, 2.0]) == pytest.approx(math.sqrt(8))


def test_rmse_skips_missing_frames():
    a = np.array([[0.0, 0.0], [np.nan, np.nan], [2.0, 2.0]])
    b = np.array([[1.0, 0.0], [50.0, 50.0], [3.0, 2.0]])
    assert trajectory_rmse(a, b) == pytest.approx(1.0)


def test_rmse_errors():
    a = np.array([[np.nan, np.nan], [1.0, 1.0]])
    b = np.array([[0.0, 0.0], [np.nan, np.nan]])
    with pytest.raises(MetricError):
        trajectory_rmse(a, b)
    with pytest.raises(ParameterError):
        trajectory_rmse(np.zeros((3, 2)), np.zeros((4, 2)))


paths = arrays(np.float64, (5, 2), elements=st.floats(-100, 100))


@settings(max_examples=60, deadline=None)
@given(paths, paths, paths)
def test_rmse_is_a_pseudometric(a, b, c):
    assert trajectory_rmse(a, a) == 0.0
    assert trajectory_rmse(a, b) == pytest.approx(trajectory_rmse(b, a))
    assert trajectory_rmse(a, c) <= trajectory_rmse(a, b) + trajectory_rmse(b, c) + 1e-9
