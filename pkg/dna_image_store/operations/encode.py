# To be imported into ..codec.py DnaImageCodec class

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import TYPE_CHECKING, List, Optional, Sequence, Union

from pydantic import BaseModel

from dna_image_store.dna.address import MAX_BLOCKS, MAX_IMAGES, Address
from dna_image_store.dna.fasta import FastaRecord, write_fasta, write_sequence_lines
from dna_image_store.dna.oligo import OLIGO_LENGTH, PAYLOAD_BITS, PAYLOAD_LENGTH, assemble_oligo
from dna_image_store.dna.pool import PoolStatistics, pool_statistics
from dna_image_store.exceptions import CapacityError, InvalidInputError
from dna_image_store.hilbert_scan import linearize
from dna_image_store.huffman import (
    build_huffman,
    empirical_entropy,
    huffman_encode,
    mean_code_length,
)
from dna_image_store.level_codec import encode_channel_streams
from dna_image_store.manifest import ImageEntry, PoolManifest, StreamEntry
from dna_image_store.pixel_pipeline import QUANTIZATION_BITS, RgbImage, quantize_image
from dna_image_store.utils.image_io import read_image
from dna_image_store.utils.oligo_id import OligoId

if TYPE_CHECKING:
    from dna_image_store import DnaImageCodec


class ImageAccounting(BaseModel):
    name: str
    height: int
    width: int
    source_bits: int
    quantized_bits: int
    huffman_bits: int
    oligos: int
    symbols: int
    entropy: float
    mean_code_length: float


class EncodeReport(BaseModel):
    """
    Compression accounting of one encode. Source bits are 24 bits per pixel;
    nucleotide totals count whole 196-nt oligos, payload totals only the
    143-nt information blocks.
    """

    images: List[ImageAccounting]
    oligo_count: int
    source_bits: int
    quantized_bits: int
    huffman_bits: int
    payload_nucleotides: int
    total_nucleotides: int
    bits_per_nucleotide: float
    bits_per_payload_nucleotide: float
    quantized_bits_per_nucleotide: float
    statistics: PoolStatistics


@dataclass(frozen=True)
class EncodedPool:
    records: List[FastaRecord]
    manifest: PoolManifest
    report: EncodeReport

    @property
    def sequences(self) -> List[str]:
        return [r.sequence for r in self.records]


def encode_images(
    self: "DnaImageCodec",
    images: Sequence[RgbImage],
    names: Optional[Sequence[str]] = None,
) -> EncodedPool:
    """
    Encode up to 16 images into one oligo pool with its manifest.

    Each image is quantized, scanned along the Hilbert order, split into 24
    (color, level) position lists, differential coded and Huffman coded with
    one table per image. Every stream is cut into 242-bit blocks, zero padded
    after its terminator, and each block becomes one oligo.

    Args:
        images (Sequence[RgbImage]): Images to store.
        names (Optional[Sequence[str]]): Names recorded in the manifest.

    Returns:
        EncodedPool: FASTA records in stream order, manifest and accounting.

    Raises:
        InvalidInputError: If no image is given or names do not match.
        CapacityError: If there are more than 16 images or a stream needs more
            than 2048 blocks.
    """
    if not images:
        raise InvalidInputError("Nothing to encode.")
    if len(images) > MAX_IMAGES:
        raise CapacityError(f"At most {MAX_IMAGES} images fit one pool, got {len(images)}.")
    names = list(names) if names is not None else [f"img{i}" for i in range(len(images))]
    if len(names) != len(images):
        raise InvalidInputError(f"Got {len(names)} names for {len(images)} images.")

    primer_set = self.primer_set
    records: List[FastaRecord] = []
    entries: List[ImageEntry] = []
    accounting: List[ImageAccounting] = []

    for index, (image, name) in enumerate(zip(images, names)):
        streams = [
            stream
            for channel in quantize_image(image)
            for stream in encode_channel_streams(
                linearize(channel), channel.color_tag, self.settings.resync_rate
            )
        ]
        table = build_huffman(streams)
        counts = Counter(s for stream in streams for s in stream)

        stream_entries = []
        huffman_bits = 0
        image_oligos = 0
        for stream in streams:
            bits = huffman_encode(stream, table)
            block_count = -(-len(bits) // PAYLOAD_BITS)
            if block_count > MAX_BLOCKS:
                self.logger.error(f"Stream {stream.color_tag}{stream.level} of '{name}' needs {block_count} blocks.")
                raise CapacityError(
                    f"Stream {stream.color_tag}{stream.level} of '{name}' needs {block_count} blocks, "
                    f"the address space holds {MAX_BLOCKS}."
                )
            padded = bits.ljust(block_count * PAYLOAD_BITS, "0")
            pair = primer_set.pair_for(stream.level)
            for block in range(block_count):
                oligo = assemble_oligo(
                    pair,
                    Address(stream.color_tag, index, stream.level, block),
                    padded[block * PAYLOAD_BITS : (block + 1) * PAYLOAD_BITS],
                )
                records.append(
                    FastaRecord(
                        OligoId.build(index, stream.color_tag, stream.level, block),
                        oligo.sequence,
                    )
                )
            stream_entries.append(
                StreamEntry(
                    color=stream.color_tag,
                    level=stream.level,
                    symbol_count=len(stream),
                    bit_length=len(bits),
                    block_count=block_count,
                )
            )
            huffman_bits += len(bits)
            image_oligos += block_count

        symbols, lengths = table.to_canonical()
        entries.append(
            ImageEntry(
                index=index,
                name=name,
                height=image.height,
                width=image.width,
                huffman_symbols=symbols,
                huffman_lengths=lengths,
                streams=stream_entries,
            )
        )
        pixels = image.height * image.width
        accounting.append(
            ImageAccounting(
                name=name,
                height=image.height,
                width=image.width,
                source_bits=24 * pixels,
                quantized_bits=3 * QUANTIZATION_BITS * pixels,
                huffman_bits=huffman_bits,
                oligos=image_oligos,
                symbols=sum(counts.values()),
                entropy=empirical_entropy(counts),
                mean_code_length=mean_code_length(counts, table),
            )
        )
        self.logger.debug(f"Encoded '{name}' ({image.height} x {image.width}) into {image_oligos} oligos.")

    manifest = PoolManifest(
        resync_rate=self.settings.resync_rate,
        primers=primer_set.to_pairs(),
        images=entries,
        oligo_count=len(records),
    )
    source_bits = sum(a.source_bits for a in accounting)
    quantized_bits = sum(a.quantized_bits for a in accounting)
    total_nt = len(records) * OLIGO_LENGTH
    payload_nt = len(records) * PAYLOAD_LENGTH
    report = EncodeReport(
        images=accounting,
        oligo_count=len(records),
        source_bits=source_bits,
        quantized_bits=quantized_bits,
        huffman_bits=sum(a.huffman_bits for a in accounting),
        payload_nucleotides=payload_nt,
        total_nucleotides=total_nt,
        bits_per_nucleotide=source_bits / total_nt,
        bits_per_payload_nucleotide=source_bits / payload_nt,
        quantized_bits_per_nucleotide=quantized_bits / total_nt,
        statistics=pool_statistics([r.sequence for r in records]),
    )
    self.logger.info(
        f"Encoded {len(images)} image(s) into {len(records)} oligos, "
        f"{report.bits_per_nucleotide:.3f} bits/nt."
    )
    return EncodedPool(records=records, manifest=manifest, report=report)


def encode_files(
    self: "DnaImageCodec",
    inputs: Sequence[Union[str, Path]],
    out_dir: Union[str, Path],
) -> EncodedPool:
    """
    Encode image files and write `pool.fasta`, `pool.txt`, `manifest.json` and
    `encode_report.json` into `out_dir`.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    images = [read_image(p) for p in inputs]
    encoded = self.encode_images(images, [Path(p).stem for p in inputs])
    write_fasta(out_dir / "pool.fasta", encoded.records)
    write_sequence_lines(out_dir / "pool.txt", encoded.sequences)
    encoded.manifest.to_file(out_dir / "manifest.json")
    (out_dir / "encode_report.json").write_text(
        encoded.report.model_dump_json(indent=2) + "\n", encoding="utf-8"
    )
    return encoded
