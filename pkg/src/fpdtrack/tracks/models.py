"""Point-track data model.

Coordinates are stored normalized to [0, 1] (x / width, y / height) as
float64 holding float32-representable values, the precision of the binary
format; pixel space only appears at file and metric boundaries.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Any, Sequence

import numpy as np

from src.fpdtrack.errors import TrackFormatError


@dataclass(frozen=True)
class QueryPoint:
    """A point to track, given at the frame where it emerges."""
    frame: int
    x: float
    y: float

    def to_dict(self) -> dict[str, Any]:
        return {"frame": self.frame, "x": self.x, "y": self.y}


def _quantize_query(query: QueryPoint) -> QueryPoint:
    with np.errstate(over="ignore", invalid="ignore"):
        x, y = np.float32(query.x), np.float32(query.y)
    return QueryPoint(int(query.frame), float(x), float(y))


@dataclass(frozen=True, eq=False)
class TrackSet:
    """M trajectories over T frames with per-frame visibility.

    ``coords`` has shape (M, T, 2) and ``visibility`` (M, T). Arrays are
    copied and frozen on construction; derive new sets with ``replace_rows``
    or ``dataclasses.replace``.
    """
    coords: np.ndarray
    visibility: np.ndarray
    queries: tuple[QueryPoint, ...]
    source_name: str = ""
    width: int = 256
    height: int = 256

    def __post_init__(self) -> None:
        coords = np.array(self.coords, dtype=np.float64, copy=True)
        visibility = np.array(self.visibility, dtype=bool, copy=True)
        queries = tuple(self.queries)

        if coords.ndim != 3 or coords.shape[2] != 2 or coords.shape[0] < 1 or coords.shape[1] < 1:
            raise TrackFormatError(f"shape mismatch: coords must be MxTx2, got {coords.shape}")
        if visibility.shape != coords.shape[:2]:
            raise TrackFormatError(
                f"shape mismatch: visibility {visibility.shape} vs coords {coords.shape[:2]}"
            )
        if len(queries) != coords.shape[0]:
            raise TrackFormatError(f"shape mismatch: {len(queries)} queries for {coords.shape[0]} points")
        if not np.all(np.isfinite(coords)):
            raise TrackFormatError("non-finite coordinate in track set")
        with np.errstate(over="ignore"):
            coords = coords.astype(np.float32).astype(np.float64)
        if not np.all(np.isfinite(coords)):
            raise TrackFormatError("coordinate outside float32 range in track set")
        queries = tuple(_quantize_query(q) for q in queries)
        if self.width < 1 or self.height < 1:
            raise TrackFormatError(f"invalid resolution {self.width}x{self.height}")

        num_frames = coords.shape[1]
        for i, query in enumerate(queries):
            if not 0 <= query.frame < num_frames:
                raise TrackFormatError(f"point {i}: query frame {query.frame} outside [0, {num_frames})")
            if not (np.isfinite(query.x) and np.isfinite(query.y)):
                raise TrackFormatError(f"point {i}: non-finite query location")
            if not (0.0 <= query.x <= 1.0 and 0.0 <= query.y <= 1.0):
                raise TrackFormatError(
                    f"point {i}: query location ({query.x:g}, {query.y:g}) outside the unit square"
                )
            if not visibility[i, query.frame]:
                raise TrackFormatError(f"point {i}: not visible at its query frame {query.frame}")

        coords.setflags(write=False)
        visibility.setflags(write=False)
        object.__setattr__(self, "coords", coords)
        object.__setattr__(self, "visibility", visibility)
        object.__setattr__(self, "queries", queries)
        object.__setattr__(self, "width", int(self.width))
        object.__setattr__(self, "height", int(self.height))

    @property
    def num_points(self) -> int:
        return int(self.coords.shape[0])

    @property
    def num_frames(self) -> int:
        return int(self.coords.shape[1])

    @property
    def query_frames(self) -> np.ndarray:
        return np.array([q.frame for q in self.queries], dtype=np.int64)

    def __eq__(self, other: object) -> bool:
        """Data equality; ``source_name`` is a label and does not take part."""
        if not isinstance(other, TrackSet):
            return NotImplemented
        return (
            self.coords.shape == other.coords.shape
            and self.width == other.width
            and self.height == other.height
            and self.queries == other.queries
            and np.array_equal(self.coords, other.coords)
            and np.array_equal(self.visibility, other.visibility)
        )

    __hash__ = None  # type: ignore[assignment]

    def same_queries(self, other: TrackSet, atol: float = 1e-6) -> bool:
        """True when both sets track the same physical queries."""
        if self.coords.shape != other.coords.shape:
            return False
        for a, b in zip(self.queries, other.queries):
            if a.frame != b.frame or abs(a.x - b.x) > atol or abs(a.y - b.y) > atol:
                return False
        return True

    def with_name(self, name: str) -> TrackSet:
        return replace(self, source_name=name)

    def replace_rows(self, rows: Sequence[int] | np.ndarray, donor: TrackSet) -> TrackSet:
        """Copy trajectory and visibility rows from ``donor`` for the given points."""
        rows = np.asarray(rows, dtype=np.int64)
        coords = self.coords.copy()
        visibility = self.visibility.copy()
        coords[rows] = donor.coords[rows]
        visibility[rows] = donor.visibility[rows]
        return replace(self, coords=coords, visibility=visibility)

    def to_pixels(self) -> np.ndarray:
        """Coordinates scaled to this set's pixel resolution."""
        return self.coords * np.array([self.width, self.height], dtype=np.float64)

    def visibility_stats(self) -> dict[str, float | int]:
        counts = self.visibility.sum(axis=1)
        return {
            "num_points": self.num_points,
            "num_frames": self.num_frames,
            "width": self.width,
            "height": self.height,
            "visible_fraction": float(self.visibility.mean()),
            "min_visible": int(counts.min()),
            "mean_visible": float(counts.mean()),
            "max_visible": int(counts.max()),
        }

    @classmethod
    def from_arrays(
        cls,
        coords: np.ndarray,
        visibility: np.ndarray,
        query_frames: Sequence[int] | np.ndarray,
        source_name: str = "",
        width: int = 256,
        height: int = 256,
    ) -> TrackSet:
        """Build a set whose query locations are read off the trajectories."""
        coords = np.asarray(coords, dtype=np.float64)
        queries = tuple(
            QueryPoint(int(e), float(coords[i, int(e), 0]), float(coords[i, int(e), 1]))
            for i, e in enumerate(query_frames)
        )
        return cls(coords, visibility, queries, source_name, width, height)
