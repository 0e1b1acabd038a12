from __future__ import annotations

from dataclasses import dataclass
import logging
from typing import List, Sequence, Tuple

import numpy as np
from scipy.ndimage import binary_dilation

from dna_image_store.exceptions import InvalidInputError
from dna_image_store.pixel_pipeline import LEVEL_COUNT, QuantizedChannel
from dna_image_store.utils.types import ColorTag, MaskMatrix, PixelMask

LOGGER = logging.getLogger(__name__)

CHANNEL_PAIRS: Tuple[Tuple[ColorTag, ColorTag], ...] = (("R", "G"), ("G", "B"), ("R", "B"))
DIFFERENCES = np.arange(-(LEVEL_COUNT - 1), LEVEL_COUNT)
BIN_COUNT = DIFFERENCES.shape[0]
# the two pairs that involve each channel, as indices into CHANNEL_PAIRS
_PAIRS_OF_CHANNEL = {"R": (0, 2), "G": (0, 1), "B": (1, 2)}
_STRUCTURE = np.ones((3, 3), dtype=bool)


@dataclass(frozen=True)
class DifferenceHistogram:
    """
    Counts of the level differences X - Y, for differences -7..7.
    """

    pair: Tuple[ColorTag, ColorTag]
    counts: np.ndarray

    @property
    def modal_difference(self) -> int:
        """
        Most frequent difference; ties go to the smaller |d|, then the smaller d.
        """
        best = max(range(BIN_COUNT), key=lambda i: (self.counts[i], -abs(DIFFERENCES[i]), -DIFFERENCES[i]))
        return int(DIFFERENCES[best])

    def count(self, difference: int) -> int:
        return int(self.counts[difference + LEVEL_COUNT - 1])


def difference_histogram(
    x: QuantizedChannel,
    y: QuantizedChannel,
) -> DifferenceHistogram:
    diff = x.levels.astype(np.int64) - y.levels.astype(np.int64)
    counts = np.bincount((diff + LEVEL_COUNT - 1).ravel(), minlength=BIN_COUNT)
    return DifferenceHistogram((x.color_tag, y.color_tag), counts)


def rarest_bins(
    histograms: Sequence[DifferenceHistogram],
    t: int,
) -> List[Tuple[int, int]]:
    """
    The `t` rarest occupied bins over all pairs, as (pair index, difference).

    Each pair's modal bin is never selected. Bins rank by count, then by larger
    |difference|, then by larger difference, then by pair order.
    """
    candidates = []
    for p, hist in enumerate(histograms):
        modal = hist.modal_difference
        for d in DIFFERENCES.tolist():
            c = hist.count(d)
            if c and d != modal:
                candidates.append((c, -abs(d), -d, p))
    candidates.sort()
    return [(p, -neg_d) for _, _, neg_d, p in candidates[:t]]


def dilate(
    mask: MaskMatrix,
) -> MaskMatrix:
    """
    Grow a mask by one pixel with a 3 x 3 structuring element.
    """
    if not mask.any():
        return mask.copy()
    return binary_dilation(mask, structure=_STRUCTURE)


def detect_discoloration(
    red: QuantizedChannel,
    green: QuantizedChannel,
    blue: QuantizedChannel,
    t: int,
) -> PixelMask:
    """
    Flag pixels whose cross-channel differences are unusually rare.

    The difference matrices R - G, G - B and R - B are histogrammed and the `t`
    rarest occupied bins over all three are selected, each pair's modal bin
    excluded. A pixel is marked for a pair when its difference falls into a
    selected bin of that pair. A channel's mask is the intersection of the marks
    of its two pairs, since a discolored channel disturbs both. Masks are
    dilated by one pixel.

    Args:
        red (QuantizedChannel): R levels.
        green (QuantizedChannel): G levels.
        blue (QuantizedChannel): B levels.
        t (int): Number of rare bins to select, at least 0.

    Returns:
        PixelMask: R, G and B masks.

    Raises:
        InvalidInputError: If the shapes differ or `t` is negative.
    """
    if t < 0:
        raise InvalidInputError(f"Detection threshold t must be non-negative, got {t}.")
    if not red.levels.shape == green.levels.shape == blue.levels.shape:
        raise InvalidInputError("Channels must share one shape for detection.")

    channels = {"R": red, "G": green, "B": blue}
    histograms = [difference_histogram(channels[x], channels[y]) for x, y in CHANNEL_PAIRS]
    selected = rarest_bins(histograms, t)

    marks = [np.zeros(red.levels.shape, dtype=bool) for _ in CHANNEL_PAIRS]
    for p, d in selected:
        x, y = CHANNEL_PAIRS[p]
        diff = channels[x].levels.astype(np.int64) - channels[y].levels.astype(np.int64)
        marks[p] |= diff == d

    masks = []
    for color in ("R", "G", "B"):
        first, second = _PAIRS_OF_CHANNEL[color]
        masks.append(dilate(marks[first] & marks[second]))
    LOGGER.debug(
        f"Detection at t={t} selected {len(selected)} bins, flagged "
        f"{[int(m.sum()) for m in masks]} pixels."
    )
    return tuple(masks)


def combine_masks(
    detected: PixelMask,
    decoder_masks: PixelMask,
) -> PixelMask:
    """
    Per-channel union of two mask triples.

    Raises:
        InvalidInputError: If the shapes differ.
    """
    if len(detected) != 3 or len(decoder_masks) != 3:
        raise InvalidInputError("Expected three masks per triple.")
    combined = []
    for a, b in zip(detected, decoder_masks):
        if a.shape != b.shape:
            raise InvalidInputError(f"Mask shapes differ: {a.shape} and {b.shape}.")
        combined.append(np.logical_or(a, b))
    return tuple(combined)
