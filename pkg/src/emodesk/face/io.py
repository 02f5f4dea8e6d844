"""CSV and model-file formats for the face analyzer.

Feature streams: header ``t_ms,f1..f34``.  Training data: ``f1..f34,valence,
arousal``.  Models: key:value text with one weight vector and bias per output.
"""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from .regression import N_FEATURES, OUTPUT_NAMES, FaceFeatureFrame, LinearAVModel

STREAM_HEADER = ["t_ms"] + [f"f{i}" for i in range(1, N_FEATURES + 1)]
TRAINING_HEADER = [f"f{i}" for i in range(1, N_FEATURES + 1)] + list(OUTPUT_NAMES)


class FaceFormatError(Exception):
    pass


def read_stream(path: str | Path) -> list[FaceFeatureFrame]:
    path = Path(path)
    frames = []
    with path.open(newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header != STREAM_HEADER:
            raise FaceFormatError(f"{path}: expected header t_ms,f1..f{N_FEATURES}")
        for lineno, row in enumerate(reader, 2):
            if not row:
                continue
            try:
                values = [float(c) for c in row]
            except ValueError:
                raise FaceFormatError(f"{path}:{lineno}: non-numeric cell") from None
            if len(values) != N_FEATURES + 1:
                raise FaceFormatError(f"{path}:{lineno}: expected {N_FEATURES + 1} columns")
            try:
                frames.append(FaceFeatureFrame(timestamp_ms=values[0], features=np.array(values[1:])))
            except ValueError as exc:
                raise FaceFormatError(f"{path}:{lineno}: {exc}") from None
    if not frames:
        raise FaceFormatError(f"{path}: no feature frames")
    if np.any(np.diff([f.timestamp_ms for f in frames]) <= 0):
        raise FaceFormatError(f"{path}: timestamps must strictly increase")
    return frames


def write_stream(path: str | Path, frames: list[FaceFeatureFrame]) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(STREAM_HEADER)
        for frame in frames:
            writer.writerow([repr(float(frame.timestamp_ms))] + [repr(float(v)) for v in frame.features])


def read_training_csv(path: str | Path) -> tuple[np.ndarray, np.ndarray]:
    path = Path(path)
    X_rows, y_rows = [], []
    with path.open(newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header != TRAINING_HEADER:
            raise FaceFormatError(f"{path}: expected header f1..f{N_FEATURES},valence,arousal")
        for lineno, row in enumerate(reader, 2):
            if not row:
                continue
            try:
                values = [float(c) for c in row]
            except ValueError:
                raise FaceFormatError(f"{path}:{lineno}: non-numeric cell") from None
            if len(values) != N_FEATURES + 2:
                raise FaceFormatError(f"{path}:{lineno}: expected {N_FEATURES + 2} columns")
            X_rows.append(values[:N_FEATURES])
            y_rows.append(values[N_FEATURES:])
    if not X_rows:
        raise FaceFormatError(f"{path}: no training rows")
    return np.array(X_rows), np.array(y_rows)


def save_model(path: str | Path, model: LinearAVModel) -> None:
    lines = [f"ridge_lambda:{model.ridge_lambda!r}"]
    for column, name in enumerate(OUTPUT_NAMES):
        lines.append(f"{name}_weights:" + ",".join(repr(float(v)) for v in model.weights[:, column]))
        lines.append(f"{name}_bias:{float(model.bias[column])!r}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_model(path: str | Path) -> LinearAVModel:
    path = Path(path)
    values: dict[str, str] = {}
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition(":")
        if not sep:
            raise FaceFormatError(f"{path}:{lineno}: expected key:value")
        values[key.strip()] = value.strip()
    try:
        weights = np.column_stack(
            [[float(v) for v in values[f"{name}_weights"].split(",")] for name in OUTPUT_NAMES]
        )
        bias = np.array([float(values[f"{name}_bias"]) for name in OUTPUT_NAMES])
        ridge_lambda = float(values.get("ridge_lambda", "1.0"))
    except (KeyError, ValueError) as exc:
        raise FaceFormatError(f"{path}: bad or missing field ({exc})") from None
    return LinearAVModel(weights=weights, bias=bias, ridge_lambda=ridge_lambda)
