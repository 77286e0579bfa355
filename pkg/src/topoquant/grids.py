"""Dense 3D grid containers.

All grids are row-major numpy arrays indexed ``(z, y, x)`` with ``x``
fastest, matching the on-disk layout of the volume file format.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = ["Volume3D", "LabelMask", "ProbMap"]

_PROB_SUM_TOL = 1e-6


@dataclass(frozen=True)
class Volume3D:
    """Dense scalar field over a 3D grid (intensities or a soft mask)."""

    data: np.ndarray

    def __post_init__(self):
        arr = np.ascontiguousarray(np.asarray(self.data, dtype=np.float64))
        if arr.ndim != 3:
            raise ValueError(f"Volume3D expects a 3D array, got shape {arr.shape}")
        if arr.size == 0:
            raise ValueError("Volume3D must be non-empty")
        if not np.all(np.isfinite(arr)):
            raise ValueError("Volume3D data must be finite")
        object.__setattr__(self, "data", arr)

    @property
    def dims(self) -> tuple[int, int, int]:
        return self.data.shape  # type: ignore[return-value]


@dataclass(frozen=True)
class LabelMask:
    """Dense grid of integer instance labels; 0 is background, 1..K teeth."""

    labels: np.ndarray
    num_classes: int

    def __post_init__(self):
        arr = np.ascontiguousarray(np.asarray(self.labels))
        if arr.ndim != 3:
            raise ValueError(f"LabelMask expects a 3D array, got shape {arr.shape}")
        if arr.size == 0:
            raise ValueError("LabelMask must be non-empty")
        if not np.issubdtype(arr.dtype, np.integer):
            raise ValueError("LabelMask labels must be integers")
        if self.num_classes < 1:
            raise ValueError("num_classes must be positive")
        if arr.min() < 0 or arr.max() > self.num_classes:
            raise ValueError(
                f"labels must lie in 0..{self.num_classes}, got range "
                f"[{arr.min()}, {arr.max()}]"
            )
        object.__setattr__(self, "labels", arr.astype(np.uint16))

    @property
    def dims(self) -> tuple[int, int, int]:
        return self.labels.shape  # type: ignore[return-value]

    def class_mask(self, k: int) -> np.ndarray:
        """Boolean mask of voxels carrying label ``k``."""
        return self.labels == k

    def foreground(self) -> np.ndarray:
        return self.labels > 0


@dataclass(frozen=True)
class ProbMap:
    """Per-class soft segmentation: channel 0 is background, 1..K teeth.

    Shape is ``(K+1, depth, height, width)``; every voxel's channel column
    sums to 1 within 1e-6.
    """

    data: np.ndarray
    _validate: bool = field(default=True, repr=False)

    def __post_init__(self):
        arr = np.ascontiguousarray(np.asarray(self.data, dtype=np.float64))
        if arr.ndim != 4 or arr.shape[0] < 2:
            raise ValueError(
                f"ProbMap expects (K+1, d, h, w) with K >= 1, got shape {arr.shape}"
            )
        if self._validate:
            if arr.min() < 0.0 or arr.max() > 1.0:
                raise ValueError("ProbMap values must lie in [0, 1]")
            sums = arr.sum(axis=0)
            if np.abs(sums - 1.0).max() > _PROB_SUM_TOL:
                raise ValueError("ProbMap channels must sum to 1 per voxel")
        object.__setattr__(self, "data", arr)

    @property
    def num_classes(self) -> int:
        """K: number of foreground classes."""
        return self.data.shape[0] - 1

    @property
    def dims(self) -> tuple[int, int, int]:
        return self.data.shape[1:]  # type: ignore[return-value]

    def channel(self, k: int) -> np.ndarray:
        return self.data[k]

    def foreground(self) -> np.ndarray:
        """Soft foreground mass: 1 - background channel."""
        return 1.0 - self.data[0]

    def argmax_labels(self) -> LabelMask:
        """Hard labels: argmax over channels, ties to the lower class index."""
        return LabelMask(
            np.argmax(self.data, axis=0).astype(np.uint16), self.num_classes
        )
