"""Track file formats.

Binary (little-endian), 32-byte header::

    magic  "FPDT"        4 bytes
    version u32 = 1
    M u32, T u32, width u32, height u32
    flags u32            bit0: coordinates normalized
    reserved u32

followed by coords as float32 [point][frame][x, y], visibility as u8
[point][frame], then M query records (u32 frame, float32 x, float32 y).

JSON::

    {"width": .., "height": .., "normalized": bool, "source": "..",
     "points": [{"query": {"frame": e, "x": .., "y": ..},
                 "xy": [[x, y], ..], "visible": [true, ..]}, ..]}

Pixel-space files are normalized on load. A point not visible at its query
frame is repaired (set visible) with a warning.
"""

from __future__ import annotations

import json
import logging
import struct
from pathlib import Path
from typing import Any, Literal

import numpy as np

from src.fpdtrack.errors import ConfigError, TrackFormatError
from src.fpdtrack.tracks.models import QueryPoint, TrackSet

logger = logging.getLogger(__name__)

MAGIC = b"FPDT"
VERSION = 1
HEADER = struct.Struct("<4sIIIIIII")
QUERY_RECORD = np.dtype([("frame", "<u4"), ("x", "<f4"), ("y", "<f4")])
FLAG_NORMALIZED = 0x1
JSON_DIGITS = 9

TrackFormat = Literal["json", "binary"]


def binary_size(num_points: int, num_frames: int) -> int:
    """Exact byte size of a binary track file."""
    slots = num_points * num_frames
    return HEADER.size + 8 * slots + slots + QUERY_RECORD.itemsize * num_points


def _repair_query_visibility(visibility: np.ndarray, frames: list[int], path: Path) -> None:
    for i, e in enumerate(frames):
        if 0 <= e < visibility.shape[1] and not visibility[i, e]:
            logger.warning("%s: point %d invisible at its query frame %d; marking visible", path.name, i, e)
            visibility[i, e] = True


def _build(
    coords: np.ndarray,
    visibility: np.ndarray,
    frames: list[int],
    qx: np.ndarray,
    qy: np.ndarray,
    width: int,
    height: int,
    normalized: bool,
    name: str,
    path: Path,
) -> TrackSet:
    if width < 1 or height < 1:
        raise TrackFormatError(f"{path.name}: malformed header, resolution {width}x{height}")
    if not normalized:
        scale = np.array([width, height], dtype=np.float64)
        coords = coords / scale
        qx = qx / width
        qy = qy / height
    _repair_query_visibility(visibility, frames, path)
    queries = tuple(QueryPoint(int(e), float(x), float(y)) for e, x, y in zip(frames, qx, qy))
    return TrackSet(coords, visibility, queries, source_name=name, width=width, height=height)


def _load_binary(data: bytes, path: Path) -> TrackSet:
    if len(data) < HEADER.size:
        raise TrackFormatError(f"{path.name}: malformed header (file is {len(data)} bytes)")
    magic, version, m, t, width, height, flags, _reserved = HEADER.unpack_from(data, 0)
    if magic != MAGIC:
        raise TrackFormatError(f"{path.name}: malformed header, bad magic {magic!r}")
    if version != VERSION:
        raise TrackFormatError(f"{path.name}: unsupported version {version}")
    if m < 1 or t < 1:
        raise TrackFormatError(f"{path.name}: malformed header, M={m} T={t}")
    expected = binary_size(m, t)
    if len(data) != expected:
        raise TrackFormatError(f"{path.name}: shape mismatch, expected {expected} bytes for M={m} T={t}, got {len(data)}")

    offset = HEADER.size
    coords = np.frombuffer(data, dtype="<f4", count=m * t * 2, offset=offset).astype(np.float64).reshape(m, t, 2)
    offset += 8 * m * t
    visibility = np.frombuffer(data, dtype=np.uint8, count=m * t, offset=offset).reshape(m, t) != 0
    offset += m * t
    records = np.frombuffer(data, dtype=QUERY_RECORD, count=m, offset=offset)
    if not np.all(np.isfinite(coords)):
        raise TrackFormatError(f"{path.name}: non-finite coordinate")
    return _build(
        coords,
        visibility.copy(),
        [int(e) for e in records["frame"]],
        records["x"].astype(np.float64),
        records["y"].astype(np.float64),
        int(width),
        int(height),
        bool(flags & FLAG_NORMALIZED),
        path.stem,
        path,
    )


def _load_json(text: str, path: Path) -> TrackSet:
    try:
        doc = json.loads(text)
        width = int(doc["width"])
        height = int(doc["height"])
        normalized = bool(doc.get("normalized", True))
        points = doc["points"]
        if not isinstance(points, list) or not points:
            raise TrackFormatError(f"{path.name}: 'points' must be a non-empty list")
        coords = np.array([p["xy"] for p in points], dtype=np.float64)
        visibility = np.array([p["visible"] for p in points], dtype=bool)
        frames = [int(p["query"]["frame"]) for p in points]
        qx = np.array([p["query"]["x"] for p in points], dtype=np.float64)
        qy = np.array([p["query"]["y"] for p in points], dtype=np.float64)
    except TrackFormatError:
        raise
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as e:
        raise TrackFormatError(f"{path.name}: malformed header or shape mismatch: {e}") from e

    if coords.ndim != 3 or coords.shape[2] != 2 or visibility.shape != coords.shape[:2]:
        raise TrackFormatError(f"{path.name}: shape mismatch, coords {coords.shape} visibility {visibility.shape}")
    if not np.all(np.isfinite(coords)):
        raise TrackFormatError(f"{path.name}: non-finite coordinate")
    return _build(coords, visibility, frames, qx, qy, width, height, normalized,
                  str(doc.get("source") or path.stem), path)


def load_tracks(path: str | Path) -> TrackSet:
    """Load a track file, detecting the format from its first bytes."""
    path = Path(path)
    try:
        data = path.read_bytes()
    except FileNotFoundError as e:
        raise ConfigError(f"track file not found: {path}") from e
    if data[:4] == MAGIC:
        return _load_binary(data, path)
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as e:
        raise TrackFormatError(f"{path.name}: malformed header, neither FPDT binary nor JSON") from e
    return _load_json(text, path)


def _round(value: float) -> float:
    return float(format(value, f".{JSON_DIGITS}g"))


def tracks_to_json(ts: TrackSet) -> dict[str, Any]:
    """JSON document for a track set (normalized coordinates, 9 significant digits)."""
    points = []
    for i, query in enumerate(ts.queries):
        points.append({
            "query": {"frame": query.frame, "x": _round(query.x), "y": _round(query.y)},
            "xy": [[_round(x), _round(y)] for x, y in ts.coords[i]],
            "visible": [bool(v) for v in ts.visibility[i]],
        })
    return {
        "width": ts.width,
        "height": ts.height,
        "normalized": True,
        "source": ts.source_name,
        "points": points,
    }


def tracks_to_bytes(ts: TrackSet) -> bytes:
    """Binary encoding of a track set."""
    header = HEADER.pack(MAGIC, VERSION, ts.num_points, ts.num_frames, ts.width, ts.height, FLAG_NORMALIZED, 0)
    records = np.zeros(ts.num_points, dtype=QUERY_RECORD)
    records["frame"] = [q.frame for q in ts.queries]
    records["x"] = [q.x for q in ts.queries]
    records["y"] = [q.y for q in ts.queries]
    return b"".join([
        header,
        ts.coords.astype("<f4").tobytes(order="C"),
        ts.visibility.astype(np.uint8).tobytes(order="C"),
        records.tobytes(),
    ])


def infer_format(path: str | Path) -> TrackFormat:
    return "json" if Path(path).suffix.lower() == ".json" else "binary"


def save_tracks(ts: TrackSet, path: str | Path, fmt: TrackFormat | None = None) -> Path:
    """Write ``ts`` to ``path``; the format defaults from the suffix (.json or binary)."""
    path = Path(path)
    fmt = fmt or infer_format(path)
    if fmt not in ("json", "binary"):
        raise ConfigError(f"unknown track format {fmt!r}")
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        if fmt == "json":
            path.write_text(json.dumps(tracks_to_json(ts)) + "\n", encoding="utf-8")
        else:
            path.write_bytes(tracks_to_bytes(ts))
    except OSError as e:
        raise ConfigError(f"cannot write track file {path}: {e}") from e
    return path
