from dataclasses import dataclass
from itertools import combinations
import logging
from typing import Dict

from dna_image_store.dna.constraints import hamming
from dna_image_store.exceptions import AmbiguousDecodeError, InvalidInputError
from dna_image_store.utils.types import COLOR_TAGS, ColorTag, Nucleotides

LOGGER = logging.getLogger(__name__)

COLOR_CODE: Dict[ColorTag, Nucleotides] = {"R": "ATC", "G": "TCG", "B": "GAT"}
COLOR_CODE_LENGTH = 3

MIN_COLOR_DISTANCE = min(
    hamming(COLOR_CODE[a], COLOR_CODE[b]) for a, b in combinations(COLOR_TAGS, 2)
)
# bound on substitutions that always decode to the sent color
CORRECTABLE_ERRORS = (MIN_COLOR_DISTANCE - 1) // 2


@dataclass(frozen=True)
class ColorDecode:
    tag: ColorTag
    corrected: bool = False


def encode_color(
    tag: ColorTag,
) -> Nucleotides:
    """
    The 3-nt codeword of a color channel.

    Raises:
        InvalidInputError: If `tag` is not R, G or B.
    """
    try:
        return COLOR_CODE[tag]
    except KeyError as e:
        raise InvalidInputError(f"Unknown color tag '{tag}'.") from e


def decode_color(
    word: Nucleotides,
) -> ColorDecode:
    """
    Nearest color codeword of a 3-nt string.

    Args:
        word (Nucleotides): Three nucleotides.

    Returns:
        ColorDecode: The color and whether the word had to be corrected.

    Raises:
        InvalidInputError: If `word` is not three characters long.
        AmbiguousDecodeError: If two or more codewords are equally near.
    """
    if len(word) != COLOR_CODE_LENGTH:
        raise InvalidInputError(f"Color code must be 3 nt, got '{word}'.")
    distances = sorted((hamming(code, word), tag) for tag, code in COLOR_CODE.items())
    (best, tag), (runner_up, _) = distances[0], distances[1]
    if best == runner_up:
        raise AmbiguousDecodeError(
            f"Color code '{word}' is at distance {best} from several codewords."
        )
    return ColorDecode(tag=tag, corrected=best > 0)
