import logging
from pathlib import Path
from typing import List, Union

import numpy as np
import regex as re
from PIL import Image, UnidentifiedImageError

from dna_image_store.exceptions import ImageFormatError
from dna_image_store.pixel_pipeline import RgbImage
from dna_image_store.utils.types import PixelMask

LOGGER = logging.getLogger(__name__)

PathLike = Union[str, Path]

# Header tokens of a binary netpbm file, comments allowed between tokens.
_HEADER_TOKEN = re.compile(rb"(?:\s|#[^\n]*\n)*(\S+)")
PNG_SUFFIXES = {".png"}


def _read_header(
    data: bytes,
) -> tuple[List[bytes], int]:
    tokens = []
    pos = 0
    while len(tokens) < 4:
        match = _HEADER_TOKEN.match(data, pos)
        if match is None:
            raise ImageFormatError("Truncated netpbm header.")
        tokens.append(match.group(1))
        pos = match.end()
    # exactly one whitespace byte separates the header from the raster
    return tokens, pos + 1


def read_ppm(
    path: PathLike,
) -> RgbImage:
    """
    Read a binary PPM (P6) or PGM (P5) file with maxval 255.

    PGM inputs are promoted to RGB by channel replication.

    Args:
        path (PathLike): File to read.

    Returns:
        RgbImage: The decoded image.

    Raises:
        ImageFormatError: If the file is not a supported netpbm image.
    """
    try:
        data = Path(path).read_bytes()
    except OSError as e:
        raise ImageFormatError(f"Cannot read image '{path}': {e}") from e

    tokens, offset = _read_header(data)
    magic = tokens[0]
    if magic not in (b"P6", b"P5"):
        raise ImageFormatError(
            f"Unsupported netpbm magic {magic!r} in '{path}'; expected P6 or P5."
        )
    try:
        width, height, maxval = (int(t) for t in tokens[1:4])
    except ValueError as e:
        raise ImageFormatError(f"Malformed netpbm header in '{path}'.") from e
    if maxval != 255:
        raise ImageFormatError(f"Only maxval 255 is supported, got {maxval}.")
    if width < 1 or height < 1:
        raise ImageFormatError(f"Invalid image dimensions {width} x {height}.")

    planes = 3 if magic == b"P6" else 1
    expected = width * height * planes
    raster = data[offset : offset + expected]
    if len(raster) != expected:
        raise ImageFormatError(
            f"Raster of '{path}' holds {len(raster)} bytes, expected {expected}."
        )
    pixels = np.frombuffer(raster, dtype=np.uint8).reshape(height, width, planes)
    return RgbImage(pixels)


def write_ppm(
    path: PathLike,
    image: RgbImage,
) -> None:
    """
    Write an image as binary PPM (P6, maxval 255).

    Args:
        path (PathLike): Target file.
        image (RgbImage): Image to write.
    """
    header = f"P6\n{image.width} {image.height}\n255\n".encode("ascii")
    Path(path).write_bytes(header + image.pixels.tobytes())


def read_image(
    path: PathLike,
) -> RgbImage:
    """
    Read a PPM/PGM file, or a PNG file through Pillow.

    Raises:
        ImageFormatError: If the file cannot be decoded.
    """
    if Path(path).suffix.lower() not in PNG_SUFFIXES:
        return read_ppm(path)
    try:
        with Image.open(path) as img:
            if img.mode not in ("L", "RGB"):
                LOGGER.debug(f"Converting PNG mode {img.mode} of '{path}' to RGB.")
                img = img.convert("RGB")
            return RgbImage(np.asarray(img))
    except (OSError, UnidentifiedImageError) as e:
        raise ImageFormatError(f"Cannot read image '{path}': {e}") from e


def write_image(
    path: PathLike,
    image: RgbImage,
) -> None:
    """
    Write an image as PPM, or as PNG when the suffix asks for it.
    """
    if Path(path).suffix.lower() in PNG_SUFFIXES:
        Image.fromarray(image.pixels).save(path)
        return
    write_ppm(path, image)


def mask_to_image(
    masks: PixelMask,
) -> RgbImage:
    """
    Render per-channel masks as an image: a plane is white where its channel is masked.
    """
    return RgbImage(np.stack([m.astype(np.uint8) * 255 for m in masks], axis=2))


def image_to_mask(
    image: RgbImage,
) -> PixelMask:
    """
    Inverse of `mask_to_image`; any non-zero intensity counts as masked.
    """
    return tuple(image.pixels[:, :, c] > 0 for c in range(3))
