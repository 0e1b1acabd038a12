from __future__ import annotations

from dataclasses import dataclass
from typing import Tuple

import numpy as np

from dna_image_store.exceptions import InvalidInputError
from dna_image_store.utils.types import COLOR_TAGS, ChannelMatrix, ColorTag

QUANTIZATION_BITS = 3
LEVEL_COUNT = 1 << QUANTIZATION_BITS
BIN_WIDTH = 256 // LEVEL_COUNT


@dataclass(frozen=True, eq=False)
class RgbImage:
    """
    An m x n x 3 tensor of 8-bit intensities.

    Grayscale inputs (m x n, or m x n x 1) are promoted to three identical
    channels on construction so the rest of the pipeline has one code path.

    Args:
        pixels (np.ndarray): Pixel data with values in 0..255.
    """

    pixels: np.ndarray

    def __post_init__(self):
        pixels = np.asarray(self.pixels)
        if pixels.ndim == 3 and pixels.shape[2] == 1:
            pixels = pixels[:, :, 0]
        if pixels.ndim == 2:
            pixels = np.repeat(pixels[:, :, None], 3, axis=2)
        if pixels.ndim != 3 or pixels.shape[2] != 3:
            raise InvalidInputError(
                f"Expected an m x n x 3 image, got shape {pixels.shape}."
            )
        if pixels.shape[0] < 1 or pixels.shape[1] < 1:
            raise InvalidInputError(
                f"Image dimensions must be at least 1 x 1, got {pixels.shape[:2]}."
            )
        if pixels.size and (pixels.min() < 0 or pixels.max() > 255):
            raise InvalidInputError("Pixel intensities must lie in 0..255.")
        object.__setattr__(self, "pixels", pixels.astype(np.uint8, copy=True))

    @property
    def height(self) -> int:
        return int(self.pixels.shape[0])

    @property
    def width(self) -> int:
        return int(self.pixels.shape[1])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, RgbImage):
            return False
        return np.array_equal(self.pixels, other.pixels)

    def __hash__(self) -> int:
        return hash((self.height, self.width, self.pixels.tobytes()))


@dataclass(frozen=True, eq=False)
class QuantizedChannel:
    """
    One color plane reduced to the eight intensity levels 0..7.

    Args:
        levels (np.ndarray): m x n matrix of integer levels.
        color_tag (ColorTag): The plane this matrix was taken from.
    """

    levels: np.ndarray
    color_tag: ColorTag = "R"

    def __post_init__(self):
        levels = np.asarray(self.levels)
        if levels.ndim != 2 or levels.shape[0] < 1 or levels.shape[1] < 1:
            raise InvalidInputError(
                f"Quantized channel must be a non-empty m x n matrix, got shape {levels.shape}."
            )
        if levels.min() < 0 or levels.max() >= LEVEL_COUNT:
            raise InvalidInputError(
                f"Quantized levels must lie in 0..{LEVEL_COUNT - 1}."
            )
        if self.color_tag not in COLOR_TAGS:
            raise InvalidInputError(f"Unknown color tag '{self.color_tag}'.")
        object.__setattr__(self, "levels", levels.astype(np.uint8, copy=True))

    @property
    def height(self) -> int:
        return int(self.levels.shape[0])

    @property
    def width(self) -> int:
        return int(self.levels.shape[1])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, QuantizedChannel):
            return False
        return self.color_tag == other.color_tag and np.array_equal(
            self.levels, other.levels
        )

    def __hash__(self) -> int:
        return hash((self.color_tag, self.levels.shape, self.levels.tobytes()))


def split_channels(
    image: RgbImage,
) -> Tuple[ChannelMatrix, ChannelMatrix, ChannelMatrix]:
    """
    Project an image onto its R, G and B planes.

    Args:
        image (RgbImage): The source image.

    Returns:
        Tuple[ChannelMatrix, ChannelMatrix, ChannelMatrix]: Independent copies of
        the three m x n planes.
    """
    return tuple(image.pixels[:, :, c].copy() for c in range(3))


def combine_channels(
    red: ChannelMatrix,
    green: ChannelMatrix,
    blue: ChannelMatrix,
) -> RgbImage:
    """
    Stack three m x n planes back into an image.

    Raises:
        InvalidInputError: If the planes do not share one shape.
    """
    if not red.shape == green.shape == blue.shape:
        raise InvalidInputError(
            f"Channel shapes differ: {red.shape}, {green.shape}, {blue.shape}."
        )
    return RgbImage(np.stack([red, green, blue], axis=2))


def quantize_channel(
    channel: ChannelMatrix,
    color_tag: ColorTag = "R",
) -> QuantizedChannel:
    """
    Reduce an 8-bit plane to 3-bit levels with floor(x * 8 / 256).

    Args:
        channel (ChannelMatrix): m x n intensities in 0..255.
        color_tag (ColorTag): Tag stored on the result.

    Returns:
        QuantizedChannel: Levels in 0..7.

    Raises:
        InvalidInputError: If intensities fall outside 0..255.
    """
    values = np.asarray(channel)
    if values.size and (values.min() < 0 or values.max() > 255):
        raise InvalidInputError("Channel intensities must lie in 0..255.")
    levels = (values.astype(np.int64) * LEVEL_COUNT) // 256
    return QuantizedChannel(levels, color_tag)


def dequantize_channel(
    q: QuantizedChannel,
) -> ChannelMatrix:
    """
    Map levels back to displayable intensities at the bin midpoints, 32 * v + 16.

    Args:
        q (QuantizedChannel): The quantized plane.

    Returns:
        ChannelMatrix: m x n intensities.
    """
    return (q.levels.astype(np.int64) * BIN_WIDTH + BIN_WIDTH // 2).astype(np.uint8)


def quantize_image(
    image: RgbImage,
) -> Tuple[QuantizedChannel, QuantizedChannel, QuantizedChannel]:
    """
    Split and quantize all three planes of an image.
    """
    return tuple(
        quantize_channel(channel, tag)
        for channel, tag in zip(split_channels(image), COLOR_TAGS)
    )


def dequantize_image(
    channels: Tuple[QuantizedChannel, QuantizedChannel, QuantizedChannel],
) -> RgbImage:
    """
    Rebuild a displayable image from three quantized planes.
    """
    return combine_channels(*(dequantize_channel(q) for q in channels))
