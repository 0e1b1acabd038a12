from __future__ import annotations

import logging
from typing import Protocol

import numpy as np

from dna_image_store.exceptions import InpaintingError, InvalidInputError
from dna_image_store.utils.types import MaskMatrix

LOGGER = logging.getLogger(__name__)

DEFAULT_TOLERANCE = 0.5
DEFAULT_MAX_ITERATIONS = 500


class Inpainter(Protocol):
    def __call__(self, channel: np.ndarray, mask: MaskMatrix) -> np.ndarray: ...


def _neighbor_sums(
    values: np.ndarray,
    available: np.ndarray,
):
    weighted = np.where(available, values, 0.0)
    avail = available.astype(np.float64)
    sums = np.zeros_like(values)
    counts = np.zeros_like(values)
    # up, down, left, right; borders contribute nothing
    sums[1:, :] += weighted[:-1, :]
    counts[1:, :] += avail[:-1, :]
    sums[:-1, :] += weighted[1:, :]
    counts[:-1, :] += avail[1:, :]
    sums[:, 1:] += weighted[:, :-1]
    counts[:, 1:] += avail[:, :-1]
    sums[:, :-1] += weighted[:, 1:]
    counts[:, :-1] += avail[:, 1:]
    return sums, counts


def inpaint(
    channel: np.ndarray,
    mask: MaskMatrix,
    tolerance: float = DEFAULT_TOLERANCE,
    max_iterations: int = DEFAULT_MAX_ITERATIONS,
) -> np.ndarray:
    """
    Fill masked pixels by diffusion from their surroundings.

    Sweeps are Jacobi-style: every masked pixel with at least one available
    4-neighbor takes the mean of those neighbors from the previous sweep, and
    becomes available itself. The fill grows inward from the mask border and
    then relaxes until the largest change of a sweep drops below `tolerance`
    or `max_iterations` sweeps ran. The values under the mask are never read,
    so the result only depends on the unmasked pixels.

    Args:
        channel (np.ndarray): m x n intensities.
        mask (MaskMatrix): True where pixels are missing.
        tolerance (float): Convergence bound on the per-sweep change.
        max_iterations (int): Sweep cap.

    Returns:
        np.ndarray: m x n float intensities; unmasked pixels are unchanged.

    Raises:
        InvalidInputError: If the shapes differ.
        InpaintingError: If every pixel is masked.
    """
    values = np.asarray(channel, dtype=np.float64).copy()
    mask = np.asarray(mask, dtype=bool)
    if values.shape != mask.shape or values.ndim != 2:
        raise InvalidInputError(f"Channel {values.shape} and mask {mask.shape} must match.")
    if not mask.any():
        return values
    if mask.all():
        LOGGER.error("Cannot inpaint a fully masked channel.")
        raise InpaintingError("Every pixel of the channel is masked; nothing to inpaint from.")

    values[mask] = 0.0
    available = ~mask
    for iteration in range(1, max_iterations + 1):
        sums, counts = _neighbor_sums(values, available)
        update = mask & (counts > 0)
        new = sums[update] / counts[update]
        was_available = available[update]
        change = np.abs(new - values[update])[was_available]
        values[update] = new
        grew = not was_available.all()
        available = available | update
        if not grew and (change.size == 0 or change.max() < tolerance):
            LOGGER.debug(f"Inpainting converged after {iteration} sweeps.")
            break
    else:
        LOGGER.debug(f"Inpainting stopped at the cap of {max_iterations} sweeps.")
    return values
