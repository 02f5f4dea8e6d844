import numpy as np
import pytest

from emodesk.body import features as bf
from emodesk.body.features import SkeletonFrame, extract_features, segment_gestures

BASE_POSE = {
    "head": (0.0, 1.7, 0.0),
    "neck": (0.0, 1.5, 0.0),
    "l_shoulder": (-0.2, 1.4, 0.0),
    "r_shoulder": (0.2, 1.4, 0.0),
    "l_elbow": (-0.3, 1.2, 0.0),
    "r_elbow": (0.3, 1.2, 0.0),
    "l_hand": (-0.35, 1.0, 0.0),
    "r_hand": (0.35, 1.0, 0.0),
    "torso": (0.0, 1.1, 0.0),
    "l_hip": (-0.15, 0.9, 0.0),
    "r_hip": (0.15, 0.9, 0.0),
}


def make_trace(n=30, dt_ms=33.0, mover=None, t0_ms=0.0):
    """Uniformly sampled trace; ``mover(t_s, joints)`` mutates a pose copy."""
    trace = []
    for i in range(n):
        t_ms = t0_ms + i * dt_ms
        joints = {k: np.array(v) for k, v in BASE_POSE.items()}
        if mover is not None:
            mover(t_ms / 1000.0, joints)
        trace.append(SkeletonFrame(timestamp_ms=t_ms, joints={k: tuple(v) for k, v in joints.items()}))
    return trace


def test_static_trace_limits():
    f = extract_features(make_trace())
    assert f.ke_hands == 0.0 and f.ke_head == 0.0 and f.ke_upper == 0.0
    assert f.impulsivity == 1.0
    assert f.directness == 1.0
    assert f.sway == 0.0
    assert f.fluidity == 1.0


def test_too_few_frames():
    with pytest.raises(bf.TooFewFrames):
        extract_features(make_trace(n=2))
    with pytest.raises(bf.TooFewFrames):
        extract_features(make_trace(n=5, dt_ms=10.0))  # spans only 40 ms


def test_non_monotone_timestamps():
    frames = list(make_trace(n=30))
    frames[2] = SkeletonFrame(timestamp_ms=frames[1].timestamp_ms, joints=frames[2].joints)
    with pytest.raises(bf.NonMonotoneTimestamps):
        extract_features(frames)


def test_mirror_symmetric_gesture_full_symmetry():
    def mover(t, joints):
        joints["r_hand"] = np.array([0.35 + 0.2 * np.sin(3 * t), 1.0 + 0.3 * t, 0.1 * np.cos(2 * t)])
        # exact sagittal mirror about the torso plane (axis is +x here)
        x, y, z = joints["r_hand"]
        joints["l_hand"] = np.array([2 * joints["torso"][0] - x, y, z])

    f = extract_features(make_trace(mover=mover))
    assert f.symmetry == pytest.approx(1.0, abs=1e-9)


def test_asymmetric_gesture_lowers_symmetry():
    def mover(t, joints):
        joints["r_hand"] = np.array([0.35 + 0.5 * np.sin(6 * t), 1.0, 0.0])

    f = extract_features(make_trace(mover=mover))
    assert f.symmetry < 0.5


def test_straight_line_move_is_direct_and_fluid():
    def straight(t, joints):
        joints["r_hand"] = np.array([0.35 + 0.5 * t, 1.0 + 0.2 * t, 0.0])

    def jerky(t, joints):
        joints["r_hand"] = np.array([0.35 + 0.5 * t + 0.05 * np.sin(40 * t), 1.0, 0.0])

    f_straight = extract_features(make_trace(mover=straight))
    f_jerky = extract_features(make_trace(mover=jerky))
    assert f_straight.directness == pytest.approx(1.0, abs=1e-9)
    assert f_straight.fluidity > f_jerky.fluidity
    assert f_straight.fluidity == pytest.approx(1.0, abs=1e-6)
    assert f_jerky.directness < 1.0


def test_forward_lean_is_positive():
    def lean(t, joints):
        joints["neck"] = np.array([0.0, 1.45, 0.25])  # toward +z = cross(+x, +y)... forward

    f = extract_features(make_trace(mover=lean))
    upright = extract_features(make_trace())
    assert upright.lean_angle == pytest.approx(0.0, abs=1e-9)
    assert abs(f.lean_angle) > 0.1


def test_openness_orders_poses():
    def open_pose(t, joints):
        joints["l_hand"] = np.array([-0.9, 1.4, 0.0])
        joints["r_hand"] = np.array([0.9, 1.4, 0.0])

    def closed_pose(t, joints):
        joints["l_hand"] = np.array([-0.05, 1.1, 0.05])
        joints["r_hand"] = np.array([0.05, 1.1, 0.05])

    f_open = extract_features(make_trace(mover=open_pose))
    f_closed = extract_features(make_trace(mover=closed_pose))
    assert 0.0 <= f_closed.openness < f_open.openness <= 1.0


def test_sway_measures_oscillation_amplitude():
    amp, cycles, n = 0.07, 4, 64

    def sway(t, joints):
        dx = amp * np.sin(2 * np.pi * cycles * t / (n * 0.033))
        for k in joints:
            joints[k] = joints[k] + np.array([dx, 0.0, 0.0])

    f = extract_features(make_trace(n=n, mover=sway))
    assert f.sway == pytest.approx(amp, rel=0.05)


def _wiggly(t, joints):
    joints["r_hand"] = np.array([0.35 + 0.2 * np.sin(5 * t), 1.0 + 0.1 * np.cos(3 * t), 0.05 * t])
    joints["l_hand"] = np.array([-0.35 - 0.15 * np.sin(4 * t), 1.0, 0.0])
    joints["head"] = np.array([0.02 * np.sin(2 * t), 1.7, 0.0])
    joints["torso"] = np.array([0.01 * np.sin(1.5 * t), 1.1, 0.0])


def test_translation_invariance():
    base = extract_features(make_trace(mover=_wiggly))
    offset = np.array([1.234, -2.5, 0.75])

    def shifted(t, joints):
        _wiggly(t, joints)
        for k in joints:
            joints[k] = joints[k] + offset

    moved = extract_features(make_trace(mover=shifted))
    for name in bf.FEATURE_NAMES:
        assert abs(getattr(base, name) - getattr(moved, name)) <= 1e-9, name


def test_time_rescaling_quarters_kinetic_energy():
    trace = make_trace(mover=_wiggly)
    doubled = [SkeletonFrame(timestamp_ms=f.timestamp_ms * 2.0, joints=f.joints) for f in trace]
    fast, slow = extract_features(trace), extract_features(doubled)
    for name in ("ke_hands", "ke_head", "ke_upper"):
        assert getattr(slow, name) == pytest.approx(getattr(fast, name) / 4.0, rel=1e-6)
    assert slow.directness == pytest.approx(fast.directness, abs=1e-12)
    assert slow.symmetry == pytest.approx(fast.symmetry, abs=1e-12)


# -- segmentation ------------------------------------------------------------


def oracle_segments(trace, threshold=0.01, min_ms=300.0, pad_ms=100.0):
    """Independent energy-profile segmentation written against the contract."""
    t = np.array([f.timestamp_ms for f in trace]) / 1000.0
    p = np.array([[f.joints[j] for j in bf.JOINTS] for f in trace])
    n = len(trace)
    v = np.zeros_like(p)
    v[0] = (p[1] - p[0]) / (t[1] - t[0])
    v[-1] = (p[-1] - p[-2]) / (t[-1] - t[-2])
    for i in range(1, n - 1):
        v[i] = (p[i + 1] - p[i - 1]) / (t[i + 1] - t[i - 1])
    energy = 0.5 * (np.linalg.norm(v, axis=2) ** 2).sum(axis=1)
    t_ms = t * 1000
    runs, start = [], None
    for i in range(n + 1):
        on = i < n and energy[i] > threshold
        if on and start is None:
            start = i
        elif not on and start is not None:
            if t_ms[i - 1] - t_ms[start] >= min_ms:
                runs.append((max(t_ms[start] - pad_ms, t_ms[0]), min(t_ms[i - 1] + pad_ms, t_ms[-1])))
            start = None
    merged = []
    for b, e in runs:
        if merged and b <= merged[-1][1]:
            merged[-1] = (merged[-1][0], max(merged[-1][1], e))
        else:
            merged.append((b, e))
    return merged


def burst_mover(windows):
    def mover(t, joints):
        for lo, hi in windows:
            if lo <= t < hi:
                joints["r_hand"] = joints["r_hand"] + np.array([0.4 * np.sin(40 * (t - lo)), 0.0, 0.0])

    return mover


def test_static_stream_has_no_gestures():
    assert segment_gestures(make_trace(n=60)) == []


def test_single_burst_segmentation_matches_oracle():
    trace = make_trace(n=91, dt_ms=33.0, mover=burst_mover([(1.0, 2.0)]))
    got = segment_gestures(trace)
    expected = oracle_segments(trace)
    assert got == expected
    assert len(got) == 1
    start, end = got[0]
    assert start == pytest.approx(900, abs=70)  # burst start 1000 ms minus padding
    assert end == pytest.approx(2100, abs=70)


def test_two_bursts_give_two_segments():
    trace = make_trace(n=150, dt_ms=33.0, mover=burst_mover([(0.8, 1.4), (3.0, 3.8)]))
    got = segment_gestures(trace)
    assert got == oracle_segments(trace)
    assert len(got) == 2


def test_short_burst_is_dropped():
    trace = make_trace(n=120, dt_ms=33.0, mover=burst_mover([(1.0, 1.15)]))
    assert segment_gestures(trace) == oracle_segments(trace) == []


def test_segments_are_disjoint_ordered_in_bounds(rng):
    for _ in range(10):
        k = int(rng.integers(0, 4))
        windows = []
        cursor = 0.3
        for _ in range(k):
            lo = cursor + float(rng.uniform(0, 0.8))
            hi = lo + float(rng.uniform(0.1, 1.0))
            windows.append((lo, hi))
            cursor = hi + 0.2
        trace = make_trace(n=220, dt_ms=33.0, mover=burst_mover(windows))
        segments = segment_gestures(trace)
        assert segments == oracle_segments(trace)
        t0, t1 = trace[0].timestamp_ms, trace[-1].timestamp_ms
        for (b1, e1), (b2, e2) in zip(segments, segments[1:]):
            assert e1 < b2
        for b, e in segments:
            assert t0 <= b < e <= t1
