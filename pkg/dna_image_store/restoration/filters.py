from __future__ import annotations

import logging
from typing import Sequence, Tuple, Union

import numpy as np

from dna_image_store.exceptions import InvalidInputError
from dna_image_store.pixel_pipeline import RgbImage
from dna_image_store.restoration.detection import dilate
from dna_image_store.utils.types import MaskMatrix

LOGGER = logging.getLogger(__name__)

ImageLike = Union[RgbImage, np.ndarray]


def _as_float_image(image: ImageLike) -> np.ndarray:
    pixels = image.pixels if isinstance(image, RgbImage) else np.asarray(image)
    if pixels.ndim != 3 or pixels.shape[2] != 3:
        raise InvalidInputError(f"Expected an m x n x 3 image, got shape {pixels.shape}.")
    return pixels.astype(np.float64)


def _window_pairs(
    height: int,
    width: int,
    dy: int,
    dx: int,
) -> Tuple[Tuple[slice, slice], Tuple[slice, slice]]:
    # target pixels whose neighbor at (dy, dx) lies inside the image
    def axis(size: int, d: int) -> Tuple[slice, slice]:
        start, stop = max(0, -d), min(size, size - d)
        if stop <= start:
            return slice(0, 0), slice(0, 0)
        return slice(start, stop), slice(start + d, stop + d)

    (ty, ny), (tx, nx) = axis(height, dy), axis(width, dx)
    return (ty, tx), (ny, nx)


def bilateral_filter(
    image: ImageLike,
    sigma_d2: float = 45.0,
    sigma_r2: float = 45.0,
    window: int = 9,
) -> np.ndarray:
    """
    Edge-preserving smoothing.

    Every output pixel is the normalized sum over its window of
    w * I[k, l], with
    w = exp(-((i - k)^2 + (j - l)^2) / (2 sigma_d2) - |I[i, j] - I[k, l]|^2 / (2 sigma_r2))
    and |.| the Euclidean norm over RGB. Windows are clipped at the borders.

    Args:
        image (ImageLike): m x n x 3 image.
        sigma_d2 (float): Spatial variance.
        sigma_r2 (float): Intensity variance.
        window (int): Odd window side.

    Returns:
        np.ndarray: m x n x 3 float image.

    Raises:
        InvalidInputError: If the window is not odd and positive or a variance is not positive.
    """
    if window < 1 or window % 2 == 0:
        raise InvalidInputError(f"Window must be odd and positive, got {window}.")
    if sigma_d2 <= 0 or sigma_r2 <= 0:
        raise InvalidInputError("Bilateral variances must be positive.")
    pixels = _as_float_image(image)
    height, width = pixels.shape[:2]
    numerator = np.zeros_like(pixels)
    denominator = np.zeros((height, width))
    radius = window // 2
    for dy in range(-radius, radius + 1):
        for dx in range(-radius, radius + 1):
            target, neighbor = _window_pairs(height, width, dy, dx)
            center = pixels[target]
            other = pixels[neighbor]
            if center.size == 0:
                continue
            weight = np.exp(
                -(dy * dy + dx * dx) / (2.0 * sigma_d2)
                - ((center - other) ** 2).sum(axis=2) / (2.0 * sigma_r2)
            )
            numerator[target] += weight[:, :, None] * other
            denominator[target] += weight
    return numerator / denominator[:, :, None]


def _adaptive_median_pixel(
    channel: np.ndarray,
    row: int,
    col: int,
    max_window: int,
) -> float:
    height, width = channel.shape
    value = channel[row, col]
    median = value
    for side in range(3, max_window + 1, 2):
        r = side // 2
        patch = channel[max(0, row - r) : row + r + 1, max(0, col - r) : col + r + 1]
        lo, median, hi = patch.min(), np.median(patch), patch.max()
        if lo < median < hi:
            return value if lo < value < hi else median
    return median


def adaptive_median(
    image: ImageLike,
    error_regions: Union[MaskMatrix, Sequence[MaskMatrix]],
    max_window: int = 7,
) -> np.ndarray:
    """
    Adaptive median filter applied only around flagged regions.

    For each pixel of the one-pixel-dilated regions, the window grows from 3 x 3
    until its median lies strictly between its minimum and maximum. The pixel
    keeps its value if it also lies strictly between them and takes the median
    otherwise. At `max_window` the window median is used. Windows read the
    input image and are clipped at the borders.

    Args:
        image (ImageLike): m x n x 3 image.
        error_regions (Union[MaskMatrix, Sequence[MaskMatrix]]): One mask for
            all channels or one per channel.
        max_window (int): Largest odd window side, at least 3.

    Returns:
        np.ndarray: m x n x 3 float image.
    """
    if max_window < 3 or max_window % 2 == 0:
        raise InvalidInputError(f"Max window must be odd and at least 3, got {max_window}.")
    pixels = _as_float_image(image)
    if isinstance(error_regions, np.ndarray) and error_regions.ndim == 2:
        error_regions = (error_regions,) * 3
    if len(error_regions) != 3:
        raise InvalidInputError("Expected one region mask or one per channel.")

    out = pixels.copy()
    for c, region in enumerate(error_regions):
        region = np.asarray(region, dtype=bool)
        if region.shape != pixels.shape[:2]:
            raise InvalidInputError(f"Region mask {region.shape} does not match the image.")
        channel = pixels[:, :, c]
        rows, cols = np.nonzero(dilate(region))
        for row, col in zip(rows.tolist(), cols.tolist()):
            out[row, col, c] = _adaptive_median_pixel(channel, row, col, max_window)
    return out
