import numpy as np
import pytest

from emodesk.kernels import BACKEND, _ref

try:
    from emodesk.kernels import _accel
except ImportError:
    _accel = None


def test_a_backend_is_selected():
    assert BACKEND in ("compiled", "python")


@pytest.mark.parametrize("shape", [(1, 64), (20, 400), (7, 113)])
def test_reference_kernel_shape_and_range(rng, shape):
    frames = rng.normal(size=shape)
    out = _ref.nacf_matrix(frames, 2, shape[1] - 1)
    assert out.shape == (shape[0], shape[1] - 2)
    assert np.all(np.abs(out) <= 1.0 + 1e-9)  # Cauchy-Schwarz


def test_reference_kernel_periodic_signal(rng):
    # a 50-sample period puts a unit peak at lag 50
    t = np.arange(400)
    frame = np.sin(2 * np.pi * t / 50.0)
    out = _ref.nacf_matrix(frame[None, :], 25, 200)[0]
    assert out[50 - 25] == pytest.approx(1.0, abs=1e-9)
    assert out[75 - 25] == pytest.approx(-1.0, abs=0.05)


def test_reference_kernel_silence_is_zero():
    out = _ref.nacf_matrix(np.zeros((3, 100)), 5, 50)
    assert np.all(out == 0.0)


def test_lag_range_validation():
    frames = np.zeros((2, 50))
    for min_lag, max_lag in [(0, 10), (5, 50), (11, 10)]:
        with pytest.raises(ValueError):
            _ref.nacf_matrix(frames, min_lag, max_lag)


@pytest.mark.skipif(_accel is None, reason="compiled kernel not built")
def test_backend_parity(rng):
    for shape, lags in [((30, 400), (27, 320)), ((5, 64), (2, 60)), ((1, 1000), (10, 999))]:
        frames = rng.normal(size=shape)
        ours = _accel.nacf_matrix(frames, *lags)
        ref = _ref.nacf_matrix(frames, *lags)
        np.testing.assert_allclose(ours, ref, rtol=1e-12, atol=1e-12)


@pytest.mark.skipif(_accel is None, reason="compiled kernel not built")
def test_backend_parity_on_tones(rng):
    sr = 16000
    t = np.arange(sr // 4) / sr
    clip = 0.5 * np.sin(2 * np.pi * 173.0 * t)
    width = 400
    starts = np.arange(0, clip.size - width, 160)
    frames = np.stack([clip[s : s + width] for s in starts])
    np.testing.assert_allclose(
        _accel.nacf_matrix(frames, 27, 320), _ref.nacf_matrix(frames, 27, 320), rtol=1e-12, atol=1e-12
    )


@pytest.mark.skipif(_accel is None, reason="compiled kernel not built")
def test_lag_validation_agrees_across_backends():
    frames = np.zeros((2, 50))
    for args in [(0, 10), (5, 50)]:
        with pytest.raises(ValueError):
            _accel.nacf_matrix(frames, *args)
