from __future__ import annotations

import logging
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

from pydantic import BaseModel, Field, ValidationError, model_validator

from dna_image_store.dna.address import ADDRESS_LAYOUT, Address
from dna_image_store.dna.oligo import (
    BLOCK_BITS,
    BLOCK_LENGTH,
    BLOCKS_PER_OLIGO,
    PAYLOAD_BITS,
)
from dna_image_store.dna.primers import PRIMER_LENGTH, PrimerSet
from dna_image_store.exceptions import ManifestError
from dna_image_store.huffman import HuffmanTable
from dna_image_store.pixel_pipeline import QUANTIZATION_BITS
from dna_image_store.utils.types import ColorTag, Nucleotides, StreamKey

LOGGER = logging.getLogger(__name__)

MANIFEST_VERSION = 1


class OligoLayout(BaseModel):
    primer_length: int = PRIMER_LENGTH
    blocks_per_oligo: int = BLOCKS_PER_OLIGO
    block_length: int = BLOCK_LENGTH
    block_bits: int = BLOCK_BITS


class StreamEntry(BaseModel):
    """
    One (color, level) stream of an image.

    Args:
        color (ColorTag): Channel.
        level (int): Intensity level.
        symbol_count (int): Differential symbols, terminator included.
        bit_length (int): Huffman bits before padding.
        block_count (int): Oligos carrying the stream, ceil(bit_length / 242).
    """

    color: ColorTag
    level: int = Field(ge=0, le=7)
    symbol_count: int = Field(ge=1)
    bit_length: int = Field(ge=1)
    block_count: int = Field(ge=1)

    @model_validator(mode="after")
    def _check_blocks(self) -> StreamEntry:
        expected = -(-self.bit_length // PAYLOAD_BITS)
        if self.block_count != expected:
            raise ValueError(
                f"Stream {self.color}{self.level}: {self.bit_length} bits need {expected} blocks, "
                f"manifest says {self.block_count}."
            )
        return self


class ImageEntry(BaseModel):
    index: int = Field(ge=0)
    name: str = ""
    height: int = Field(ge=1)
    width: int = Field(ge=1)
    huffman_symbols: List[int]
    huffman_lengths: List[int]
    streams: List[StreamEntry]

    @property
    def pixel_count(self) -> int:
        return self.height * self.width

    def huffman_table(self) -> HuffmanTable:
        return HuffmanTable.from_canonical(self.huffman_symbols, self.huffman_lengths)

    def stream(
        self,
        color: ColorTag,
        level: int,
    ) -> StreamEntry:
        for entry in self.streams:
            if entry.color == color and entry.level == level:
                return entry
        raise ManifestError(f"Image {self.index} has no stream {color}{level}.")


class PoolManifest(BaseModel):
    """
    Sidecar metadata the decoder needs next to a pool: image geometry, Huffman
    tables, address layout, primers and coding parameters.
    """

    format_version: int = MANIFEST_VERSION
    quantization_bits: int = QUANTIZATION_BITS
    address_layout: Tuple[int, int, int] = ADDRESS_LAYOUT
    oligo_layout: OligoLayout = OligoLayout()
    resync_rate: float = Field(gt=0, le=1)
    primers: List[Tuple[Nucleotides, Nucleotides]]
    images: List[ImageEntry]
    oligo_count: int = Field(ge=0)

    @model_validator(mode="after")
    def _check_counts(self) -> PoolManifest:
        total = sum(s.block_count for image in self.images for s in image.streams)
        if total != self.oligo_count:
            raise ValueError(
                f"Manifest lists {self.oligo_count} oligos but its streams need {total}."
            )
        return self

    def check_compatible(self) -> None:
        """
        Raises:
            ManifestError: If the manifest was written for another format or layout.
        """
        if self.format_version != MANIFEST_VERSION:
            raise ManifestError(
                f"Unsupported manifest version {self.format_version}, expected {MANIFEST_VERSION}."
            )
        if tuple(self.address_layout) != ADDRESS_LAYOUT or self.oligo_layout != OligoLayout():
            raise ManifestError("Manifest uses an unsupported address or oligo layout.")
        if self.quantization_bits != QUANTIZATION_BITS:
            raise ManifestError(
                f"Manifest quantizes to {self.quantization_bits} bits, expected {QUANTIZATION_BITS}."
            )

    def image(
        self,
        index: int,
    ) -> ImageEntry:
        for entry in self.images:
            if entry.index == index:
                return entry
        raise ManifestError(f"Manifest has no image {index}.")

    def primer_set(self) -> PrimerSet:
        return PrimerSet.from_pairs(self.primers)

    def stream_keys(self) -> List[StreamKey]:
        return [(image.index, s.color, s.level) for image in self.images for s in image.streams]

    def expected_addresses(self) -> Dict[Nucleotides, Address]:
        """
        Every 13-nt address the encoder emitted, mapped to its fields.
        """
        addresses = {}
        for image in self.images:
            for stream in image.streams:
                for block in range(stream.block_count):
                    address = Address(stream.color, image.index, stream.level, block)
                    addresses[address.to_nucleotides()] = address
        return addresses

    @classmethod
    def from_file(
        cls,
        path: Union[str, Path],
    ) -> PoolManifest:
        """
        Load and validate a manifest JSON file.

        Raises:
            ManifestError: If the file is missing, malformed or incompatible.
        """
        try:
            manifest = cls.model_validate_json(Path(path).read_text(encoding="utf-8"))
        except OSError as e:
            raise ManifestError(f"Cannot read manifest '{path}': {e}") from e
        except ValidationError as e:
            raise ManifestError(f"Invalid manifest '{path}': {e}") from e
        manifest.check_compatible()
        return manifest

    def to_file(
        self,
        path: Union[str, Path],
        indent: Optional[int] = 2,
    ) -> None:
        Path(path).write_text(self.model_dump_json(indent=indent) + "\n", encoding="utf-8")
