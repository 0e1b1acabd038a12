from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Union

import numpy as np

from dna_image_store.exceptions import InvalidInputError
from dna_image_store.pixel_pipeline import QuantizedChannel
from dna_image_store.utils.types import ColorTag, Coord, LevelVector


@dataclass(frozen=True, eq=False)
class ScanOrder:
    """
    A locality-preserving visiting order over every cell of an m x n grid.

    Args:
        height (int): Number of rows (m).
        width (int): Number of columns (n).
        coords (np.ndarray): Read-only (m * n) x 2 array of (row, col) pairs.
    """

    height: int
    width: int
    coords: np.ndarray

    @property
    def rows(self) -> np.ndarray:
        return self.coords[:, 0]

    @property
    def cols(self) -> np.ndarray:
        return self.coords[:, 1]

    @property
    def raster_indices(self) -> np.ndarray:
        """
        Row-major index of every visited cell, in visiting order.
        """
        return self.coords[:, 0] * self.width + self.coords[:, 1]

    def __len__(self) -> int:
        return int(self.coords.shape[0])


def _sign(x: int) -> int:
    return -1 if x < 0 else (1 if x > 0 else 0)


def _generate(
    x: int,
    y: int,
    ax: int,
    ay: int,
    bx: int,
    by: int,
) -> Iterator[Coord]:
    # (x, y) is the column/row origin, (ax, ay) the major axis, (bx, by) the minor axis
    w = abs(ax + ay)
    h = abs(bx + by)
    (dax, day) = (_sign(ax), _sign(ay))
    (dbx, dby) = (_sign(bx), _sign(by))

    if h == 1:
        for _ in range(w):
            yield (y, x)
            (x, y) = (x + dax, y + day)
        return

    if w == 1:
        for _ in range(h):
            yield (y, x)
            (x, y) = (x + dbx, y + dby)
        return

    (ax2, ay2) = (ax // 2, ay // 2)
    (bx2, by2) = (bx // 2, by // 2)
    w2 = abs(ax2 + ay2)
    h2 = abs(bx2 + by2)

    if 2 * w > 3 * h:
        if (w2 % 2) and (w > 2):
            # prefer even steps
            (ax2, ay2) = (ax2 + dax, ay2 + day)
        # long rectangle: split along the major axis only
        yield from _generate(x, y, ax2, ay2, bx, by)
        yield from _generate(x + ax2, y + ay2, ax - ax2, ay - ay2, bx, by)
    else:
        if (h2 % 2) and (h > 2):
            (bx2, by2) = (bx2 + dbx, by2 + dby)
        # one step up, one long stretch across, one step down
        yield from _generate(x, y, bx2, by2, ax2, ay2)
        yield from _generate(x + bx2, y + by2, ax, ay, bx - bx2, by - by2)
        yield from _generate(
            x + (ax - dax) + (bx2 - dbx),
            y + (ay - day) + (by2 - dby),
            -bx2,
            -by2,
            -(ax - ax2),
            -(ay - ay2),
        )


@lru_cache(maxsize=32)
def scan_order(
    height: int,
    width: int,
) -> ScanOrder:
    """
    Generalized Hilbert traversal of an arbitrary m x n grid.

    The walk starts at (0, 0) and runs along the longer dimension first (rows
    on ties). Consecutive cells are 4-neighbors, except for at most one diagonal
    step when both dimensions are odd. Results are memoized; the returned
    coordinates are read-only.

    Args:
        height (int): Number of rows, at least 1.
        width (int): Number of columns, at least 1.

    Returns:
        ScanOrder: The traversal.

    Raises:
        InvalidInputError: If a dimension is smaller than 1.
    """
    if height < 1 or width < 1:
        raise InvalidInputError(
            f"Scan order needs positive dimensions, got {height} x {width}."
        )
    if width >= height:
        walk = _generate(0, 0, width, 0, 0, height)
    else:
        walk = _generate(0, 0, 0, height, width, 0)
    coords = np.fromiter(
        (v for cell in walk for v in cell), dtype=np.int64, count=2 * height * width
    ).reshape(height * width, 2)
    coords.setflags(write=False)
    return ScanOrder(height=height, width=width, coords=coords)


def linearize(
    matrix: Union[QuantizedChannel, np.ndarray],
) -> LevelVector:
    """
    Read a matrix in scan order: output[k] = matrix[coords[k]].

    Args:
        matrix (Union[QuantizedChannel, np.ndarray]): Levels, or any m x n array
            (masks are linearized the same way).

    Returns:
        LevelVector: The m * n vector.
    """
    values = matrix.levels if isinstance(matrix, QuantizedChannel) else np.asarray(matrix)
    if values.ndim != 2:
        raise InvalidInputError(f"Expected an m x n matrix, got shape {values.shape}.")
    order = scan_order(*values.shape)
    return values[order.rows, order.cols].astype(np.int64)


def delinearize_array(
    vector: np.ndarray,
    height: int,
    width: int,
) -> np.ndarray:
    """
    Scatter a scan-ordered vector back onto an m x n grid, keeping its dtype.

    Raises:
        InvalidInputError: If the vector length is not `height * width`.
    """
    vector = np.asarray(vector)
    if vector.ndim != 1 or vector.shape[0] != height * width:
        raise InvalidInputError(
            f"Vector of length {vector.shape} cannot fill a {height} x {width} grid."
        )
    order = scan_order(height, width)
    out = np.empty((height, width), dtype=vector.dtype)
    out[order.rows, order.cols] = vector
    return out


def delinearize(
    vector: LevelVector,
    height: int,
    width: int,
    color_tag: ColorTag = "R",
) -> QuantizedChannel:
    """
    Exact inverse of `linearize` for level vectors.

    Raises:
        InvalidInputError: If the vector length is not `height * width`.
    """
    return QuantizedChannel(delinearize_array(vector, height, width), color_tag)


def mean_neighbor_distance(
    order: ScanOrder,
) -> float:
    """
    Mean |index difference| over all pairs of 4-connected grid neighbors.

    Lower is better: it measures how well the linear order keeps 2D neighbors
    close together. Grids with a single cell score 0.
    """
    gaps = neighbor_distances(order)
    return float(gaps.mean()) if gaps.size else 0.0


def mean_step_distance(
    order: ScanOrder,
) -> float:
    """
    Mean Euclidean distance between consecutive cells of the order.

    A continuous walk scores 1; raster order pays for every jump back to the
    start of the next row. Orders with a single cell score 0.
    """
    if len(order) < 2:
        return 0.0
    steps = np.diff(order.coords, axis=0).astype(np.float64)
    return float(np.hypot(steps[:, 0], steps[:, 1]).mean())


def neighbor_distances(
    order: ScanOrder,
) -> np.ndarray:
    """
    |index difference| of every pair of 4-connected grid neighbors.
    """
    position = np.empty((order.height, order.width), dtype=np.int64)
    position[order.rows, order.cols] = np.arange(len(order))
    return np.concatenate(
        [
            np.abs(np.diff(position, axis=0)).ravel(),
            np.abs(np.diff(position, axis=1)).ravel(),
        ]
    )
