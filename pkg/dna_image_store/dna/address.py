from __future__ import annotations

from dataclasses import dataclass
from typing import Tuple

from dna_image_store.dna.codebook import build_codebook
from dna_image_store.dna.color_code import COLOR_CODE_LENGTH, encode_color
from dna_image_store.exceptions import CapacityError, InvalidInputError
from dna_image_store.utils.types import BitString, ColorTag, Nucleotides

IMAGE_BITS = 4
LEVEL_BITS = 3
BLOCK_INDEX_BITS = 11
ADDRESS_LAYOUT: Tuple[int, int, int] = (IMAGE_BITS, LEVEL_BITS, BLOCK_INDEX_BITS)
ADDRESS_BITS = sum(ADDRESS_LAYOUT)
PACKED_LENGTH = 10
ADDRESS_LENGTH = COLOR_CODE_LENGTH + PACKED_LENGTH

MAX_IMAGES = 1 << IMAGE_BITS
MAX_BLOCKS = 1 << BLOCK_INDEX_BITS


def pack_address(
    image_idx: int,
    level_idx: int,
    block_idx: int,
) -> BitString:
    """
    Pack (image, level, block) into 18 bits, 4 + 3 + 11, most significant first.

    Raises:
        InvalidInputError: If a field is negative.
        CapacityError: If a field does not fit its bit width.
    """
    fields = (image_idx, level_idx, block_idx)
    for name, value, width in zip(("image", "level", "block"), fields, ADDRESS_LAYOUT):
        if value < 0:
            raise InvalidInputError(f"Address {name} index must be non-negative, got {value}.")
        if value >= 1 << width:
            raise CapacityError(
                f"Address {name} index {value} does not fit in {width} bits."
            )
    return "".join(format(v, f"0{w}b") for v, w in zip(fields, ADDRESS_LAYOUT))


def unpack_address(
    bits: BitString,
) -> Tuple[int, int, int]:
    """
    Inverse of `pack_address`.

    Raises:
        InvalidInputError: If `bits` is not an 18-bit binary string.
    """
    if len(bits) != ADDRESS_BITS or bits.strip("01"):
        raise InvalidInputError(f"Expected {ADDRESS_BITS} address bits, got '{bits}'.")
    image_end = IMAGE_BITS
    level_end = IMAGE_BITS + LEVEL_BITS
    return int(bits[:image_end], 2), int(bits[image_end:level_end], 2), int(bits[level_end:], 2)


@dataclass(frozen=True)
class Address:
    """
    Identity of one oligo: color code word plus packed (image, level, block).
    """

    color: ColorTag
    image: int
    level: int
    block: int

    def to_nucleotides(self) -> Nucleotides:
        """
        The 13-nt address: 3-nt color code followed by the 10-nt packed word.
        """
        packed = pack_address(self.image, self.level, self.block)
        return encode_color(self.color) + build_codebook(ADDRESS_BITS, PACKED_LENGTH).encode_block(packed)
