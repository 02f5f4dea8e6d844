"""On-disk formats for the body analyzer.

Skeleton traces are CSV with header ``t_ms,joint,x,y,z``, one row per joint
per frame.  Centroid models are key:value text with comma-separated vectors.
"""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from .classifier import BASIC_EMOTIONS, EmotionCentroidModel
from .features import JOINTS, SkeletonFrame

TRACE_HEADER = ["t_ms", "joint", "x", "y", "z"]


class TraceFormatError(Exception):
    pass


def read_trace(path: str | Path) -> list[SkeletonFrame]:
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header != TRACE_HEADER:
            raise TraceFormatError(f"{path}: expected header {','.join(TRACE_HEADER)}")
        rows: dict[float, dict[str, tuple[float, float, float]]] = {}
        order: list[float] = []
        for lineno, row in enumerate(reader, 2):
            if not row:
                continue
            try:
                t_ms = float(row[0])
                joint = row[1]
                x, y, z = (float(c) for c in row[2:5])
            except (ValueError, IndexError):
                raise TraceFormatError(f"{path}:{lineno}: bad row {row!r}") from None
            if joint not in JOINTS:
                raise TraceFormatError(f"{path}:{lineno}: unknown joint {joint!r}")
            if t_ms not in rows:
                rows[t_ms] = {}
                order.append(t_ms)
            rows[t_ms][joint] = (x, y, z)
    try:
        return [SkeletonFrame(timestamp_ms=t, joints=rows[t]) for t in order]
    except ValueError as exc:
        raise TraceFormatError(f"{path}: {exc}") from None


def write_trace(path: str | Path, trace: list[SkeletonFrame]) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(TRACE_HEADER)
        for frame in trace:
            for joint in JOINTS:
                x, y, z = frame.joints[joint]
                writer.writerow([repr(float(frame.timestamp_ms)), joint, repr(float(x)), repr(float(y)), repr(float(z))])


def save_model(path: str | Path, model: EmotionCentroidModel) -> None:
    lines = [
        "labels:" + ",".join(model.labels),
        "feature_mean:" + ",".join(repr(float(v)) for v in model.feature_mean),
        "feature_scale:" + ",".join(repr(float(v)) for v in model.feature_scale),
    ]
    for label, centroid in zip(model.labels, model.centroids):
        lines.append(f"centroid.{label}:" + ",".join(repr(float(v)) for v in centroid))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_model(path: str | Path) -> EmotionCentroidModel:
    path = Path(path)
    values: dict[str, str] = {}
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition(":")
        if not sep:
            raise TraceFormatError(f"{path}:{lineno}: expected key:value")
        values[key.strip()] = value.strip()
    try:
        labels = tuple(values["labels"].split(","))
        if labels != BASIC_EMOTIONS:
            raise TraceFormatError(f"{path}: labels must be {','.join(BASIC_EMOTIONS)}")
        mean = np.array([float(v) for v in values["feature_mean"].split(",")])
        scale = np.array([float(v) for v in values["feature_scale"].split(",")])
        centroids = np.vstack(
            [[float(v) for v in values[f"centroid.{label}"].split(",")] for label in labels]
        )
    except (KeyError, ValueError) as exc:
        raise TraceFormatError(f"{path}: bad or missing field ({exc})") from None
    return EmotionCentroidModel(labels=labels, centroids=centroids, feature_mean=mean, feature_scale=scale)
