from __future__ import annotations

from dataclasses import dataclass
import logging
from typing import Optional, Tuple

from dna_image_store.dna.address import ADDRESS_LENGTH, Address
from dna_image_store.dna.codebook import build_codebook
from dna_image_store.dna.constraints import is_nucleotide_string
from dna_image_store.dna.primers import PRIMER_LENGTH, PrimerPair, PrimerSet
from dna_image_store.exceptions import InvalidInputError
from dna_image_store.utils.types import BitString, Nucleotides

LOGGER = logging.getLogger(__name__)

BLOCK_BITS = 22
BLOCK_LENGTH = 13
BLOCKS_PER_OLIGO = 11
PAYLOAD_BITS = BLOCK_BITS * BLOCKS_PER_OLIGO
PAYLOAD_LENGTH = BLOCK_LENGTH * BLOCKS_PER_OLIGO
OLIGO_LENGTH = 2 * PRIMER_LENGTH + ADDRESS_LENGTH + PAYLOAD_LENGTH

ADDRESS_START = PRIMER_LENGTH
PAYLOAD_START = ADDRESS_START + ADDRESS_LENGTH
SUFFIX_START = PAYLOAD_START + PAYLOAD_LENGTH


@dataclass(frozen=True)
class Oligo:
    """
    One 196-nt record: prefix primer (20), address (13), payload (11 x 13) and
    suffix primer (20).
    """

    prefix_primer: Nucleotides
    address: Nucleotides
    payload: Nucleotides
    suffix_primer: Nucleotides

    def __post_init__(self):
        for name, value, length in (
            ("prefix primer", self.prefix_primer, PRIMER_LENGTH),
            ("address", self.address, ADDRESS_LENGTH),
            ("payload", self.payload, PAYLOAD_LENGTH),
            ("suffix primer", self.suffix_primer, PRIMER_LENGTH),
        ):
            if len(value) != length:
                raise InvalidInputError(f"Oligo {name} must be {length} nt, got {len(value)}.")

    @property
    def sequence(self) -> Nucleotides:
        return self.prefix_primer + self.address + self.payload + self.suffix_primer

    @property
    def blocks(self) -> Tuple[Nucleotides, ...]:
        return tuple(
            self.payload[i : i + BLOCK_LENGTH] for i in range(0, PAYLOAD_LENGTH, BLOCK_LENGTH)
        )

    def __str__(self) -> str:
        return self.sequence


@dataclass(frozen=True)
class ParsedOligo:
    """
    Positional split of a 196-nt string with its payload decoded.

    Args:
        prefix_primer (Nucleotides): First 20 nt.
        address (Nucleotides): The raw 13-nt address.
        payload_bits (BitString): 242 decoded payload bits.
        block_corrections (Tuple[bool, ...]): Per block, whether it was corrected.
        suffix_primer (Nucleotides): Last 20 nt.
        primer_level (Optional[int]): Level of the matching primer pair, if a
            primer set was given and a pair matched.
    """

    prefix_primer: Nucleotides
    address: Nucleotides
    payload_bits: BitString
    block_corrections: Tuple[bool, ...]
    suffix_primer: Nucleotides
    primer_level: Optional[int] = None

    @property
    def corrected_blocks(self) -> int:
        return sum(self.block_corrections)


def assemble_oligo(
    primer_pair: PrimerPair,
    address: Address,
    payload_bits: BitString,
) -> Oligo:
    """
    Build an oligo from its primer pair, address and 242 payload bits.

    Raises:
        InvalidInputError: If the payload is not exactly 242 bits.
    """
    if len(payload_bits) != PAYLOAD_BITS or payload_bits.strip("01"):
        raise InvalidInputError(
            f"Payload must be {PAYLOAD_BITS} bits, got {len(payload_bits)}."
        )
    codebook = build_codebook(BLOCK_BITS, BLOCK_LENGTH)
    payload = "".join(
        codebook.encode_block(payload_bits[i : i + BLOCK_BITS])
        for i in range(0, PAYLOAD_BITS, BLOCK_BITS)
    )
    return Oligo(
        prefix_primer=primer_pair.forward,
        address=address.to_nucleotides(),
        payload=payload,
        suffix_primer=primer_pair.reverse,
    )


def parse_oligo(
    sequence: Nucleotides,
    primer_set: Optional[PrimerSet] = None,
) -> ParsedOligo:
    """
    Split an oligo positionally and decode its payload blocks.

    Args:
        sequence (Nucleotides): 196 nucleotides.
        primer_set (Optional[PrimerSet]): Primers to identify the level by.
            Unknown primers are logged and parsing proceeds.

    Returns:
        ParsedOligo: The parsed record.

    Raises:
        InvalidInputError: If the sequence is not 196 nt over A, C, G, T.
    """
    if len(sequence) != OLIGO_LENGTH:
        raise InvalidInputError(f"Oligo must be {OLIGO_LENGTH} nt, got {len(sequence)}.")
    if not is_nucleotide_string(sequence):
        raise InvalidInputError("Oligo holds symbols other than A, C, G, T.")

    prefix = sequence[:ADDRESS_START]
    suffix = sequence[SUFFIX_START:]
    codebook = build_codebook(BLOCK_BITS, BLOCK_LENGTH)
    decoded = [
        codebook.decode_block(sequence[i : i + BLOCK_LENGTH])
        for i in range(PAYLOAD_START, SUFFIX_START, BLOCK_LENGTH)
    ]

    primer_level = None
    if primer_set is not None:
        primer_level = primer_set.nearest_level(prefix, suffix)
        if primer_level is None:
            LOGGER.warning(f"Unknown primers {prefix}/{suffix}; parsing positionally.")

    return ParsedOligo(
        prefix_primer=prefix,
        address=sequence[ADDRESS_START:PAYLOAD_START],
        payload_bits="".join(d.bits for d in decoded),
        block_corrections=tuple(d.corrected for d in decoded),
        suffix_primer=suffix,
        primer_level=primer_level,
    )
