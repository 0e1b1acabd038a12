from typing import Callable, Dict

import numpy as np
import pytest

from dna_image_store import DnaImageCodec, RgbImage
from dna_image_store.dna.address import ADDRESS_BITS, PACKED_LENGTH
from dna_image_store.dna.codebook import ConstrainedCodebook, build_codebook
from dna_image_store.dna.oligo import BLOCK_BITS, BLOCK_LENGTH
from dna_image_store.dna.primers import PrimerSet


def natural_image(
    height: int,
    width: int,
    seed: int = 0,
    noise: float = 3.0,
) -> RgbImage:
    """Smooth color fields with a few flat discs and mild sensor noise."""
    rng = np.random.default_rng(seed)
    y, x = np.mgrid[0:height, 0:width] / max(height, width, 1)
    phase = rng.uniform(0, 2 * np.pi, size=3)
    red = 128 + 100 * np.sin(2 * np.pi * (1.3 * x + 0.2 * y) + phase[0])
    green = 128 + 90 * np.cos(2 * np.pi * (1.1 * y - 0.3 * x) + phase[1])
    blue = 40 + 180 * x * y + 20 * np.sin(6 * y + phase[2])
    pixels = np.stack([red, green, blue], axis=2)
    for _ in range(4):
        cy, cx = rng.uniform(0, height), rng.uniform(0, width)
        radius = rng.uniform(0.05, 0.2) * max(height, width)
        disc = (np.mgrid[0:height, 0:width][0] - cy) ** 2 + (
            np.mgrid[0:height, 0:width][1] - cx
        ) ** 2 < radius**2
        pixels[disc] = rng.uniform(0, 255, size=3)
    pixels += rng.normal(0, noise, size=pixels.shape)
    return RgbImage(np.clip(np.rint(pixels), 0, 255).astype(np.uint8))


@pytest.fixture(scope="session")
def make_natural_image() -> Callable[..., RgbImage]:
    """Factory for seeded natural-like test images."""
    return natural_image


@pytest.fixture(scope="session")
def ramp_image() -> RgbImage:
    """A 16 x 24 image with a horizontal red, vertical green and diagonal blue ramp."""
    y, x = np.mgrid[0:16, 0:24]
    pixels = np.stack([x * 255 // 23, y * 255 // 15, (x + y) * 255 // 38], axis=2)
    return RgbImage(pixels.astype(np.uint8))


@pytest.fixture(scope="session")
def natural_256() -> RgbImage:
    return natural_image(256, 256, seed=7)


@pytest.fixture(scope="session")
def odd_images() -> Dict[str, RgbImage]:
    """Degenerate and odd shapes: 1 x 1, 1 x n, n x 1 and odd x odd."""
    rng = np.random.default_rng(11)
    return {
        "single": RgbImage(np.array([[[10, 20, 30]]], dtype=np.uint8)),
        "row": RgbImage(rng.integers(0, 256, size=(1, 37, 3), dtype=np.uint8)),
        "column": RgbImage(rng.integers(0, 256, size=(29, 1, 3), dtype=np.uint8)),
        "odd": natural_image(17, 23, seed=3),
    }


@pytest.fixture(scope="session")
def address_codebook() -> ConstrainedCodebook:
    return build_codebook(ADDRESS_BITS, PACKED_LENGTH)


@pytest.fixture(scope="session")
def block_codebook() -> ConstrainedCodebook:
    return build_codebook(BLOCK_BITS, BLOCK_LENGTH)


@pytest.fixture(scope="session")
def codec() -> DnaImageCodec:
    """Codec with default settings; its primer set is designed once per session."""
    return DnaImageCodec()


@pytest.fixture(scope="session")
def primer_set(codec: DnaImageCodec) -> PrimerSet:
    return codec.primer_set
