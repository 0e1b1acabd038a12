# To be imported into ..codec.py DnaImageCodec class

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import TYPE_CHECKING, Dict, Iterable, List, Union

from pydantic import BaseModel

from dna_image_store.decoder import (
    AddressIndex,
    ReconstructedImage,
    StreamDecodeResult,
    decode_streams,
    reconstruct_image,
    recover_streams,
)
from dna_image_store.dna.fasta import read_fasta, read_sequence_lines
from dna_image_store.manifest import PoolManifest
from dna_image_store.pixel_pipeline import RgbImage, dequantize_image
from dna_image_store.utils.image_io import mask_to_image, write_ppm
from dna_image_store.utils.types import Nucleotides, StreamKey

if TYPE_CHECKING:
    from dna_image_store import DnaImageCodec


class StreamReport(BaseModel):
    image: int
    color: str
    level: int
    blocks: int
    gaps: List[int]
    realigned: int
    failed_segments: int
    dropped_symbols: int
    terminated: bool
    recovered_pixels: int


class DecodedImageReport(BaseModel):
    index: int
    name: str
    masked_pixels: int
    ignored_indices: int


class DecodeReport(BaseModel):
    """
    What the decoder saw and repaired while reading a pool.
    """

    oligos: int
    invalid: int
    discarded: int
    duplicates: int
    corrected_addresses: int
    corrected_blocks: int
    primer_mismatches: int
    gaps: int
    realigned: int
    failed_segments: int
    dropped_symbols: int
    unterminated_streams: int
    images: List[DecodedImageReport]
    streams: List[StreamReport]


@dataclass(frozen=True)
class DecodedPool:
    images: List[ReconstructedImage]
    names: List[str]
    streams: Dict[StreamKey, StreamDecodeResult]
    report: DecodeReport

    def rgb_images(self) -> List[RgbImage]:
        return [dequantize_image(image.channels) for image in self.images]


def decode_pool(
    self: "DnaImageCodec",
    sequences: Iterable[Nucleotides],
    manifest: PoolManifest,
) -> DecodedPool:
    """
    Decode a pool of consensus oligos back into quantized images.

    Addresses are corrected against the manifest's address set, payload blocks
    decoded through the constrained codebook, streams with gaps realigned on
    resync markers, and each channel rebuilt from its eight level lists.
    Pixels no list claims, or more than one list claims, are returned in the
    masks.

    Args:
        sequences (Iterable[Nucleotides]): Consensus oligos in any order.
        manifest (PoolManifest): Manifest written by the encoder.

    Returns:
        DecodedPool: Reconstructed images, per-stream results and the report.

    Raises:
        ManifestError: If the manifest describes an incompatible layout.
    """
    manifest.check_compatible()
    sequences = list(sequences)
    recovered = recover_streams(
        sequences,
        manifest,
        address_index=AddressIndex(manifest.expected_addresses()),
        primer_set=manifest.primer_set(),
    )
    results = decode_streams(recovered, manifest, self.settings.probe_budget)
    images = [reconstruct_image(results, entry) for entry in manifest.images]

    stream_reports = [
        StreamReport(
            image=key[0],
            color=key[1],
            level=key[2],
            blocks=recovered.streams[key].block_count,
            gaps=recovered.streams[key].gaps,
            realigned=result.realigned,
            failed_segments=result.failed_segments,
            dropped_symbols=result.dropped_symbols,
            terminated=result.terminated,
            recovered_pixels=len(result.indices.indices),
        )
        for key, result in results.items()
    ]
    report = DecodeReport(
        oligos=len(sequences),
        invalid=recovered.invalid,
        discarded=recovered.discarded,
        duplicates=recovered.duplicates,
        corrected_addresses=recovered.corrected_addresses,
        corrected_blocks=recovered.corrected_blocks,
        primer_mismatches=recovered.primer_mismatches,
        gaps=recovered.gap_count,
        realigned=sum(s.realigned for s in stream_reports),
        failed_segments=sum(s.failed_segments for s in stream_reports),
        dropped_symbols=sum(s.dropped_symbols for s in stream_reports),
        unterminated_streams=sum(1 for s in stream_reports if not s.terminated),
        images=[
            DecodedImageReport(
                index=image.index,
                name=entry.name,
                masked_pixels=image.masked_pixels,
                ignored_indices=image.ignored_indices,
            )
            for image, entry in zip(images, manifest.images)
        ],
        streams=stream_reports,
    )
    if report.gaps or report.discarded:
        self.logger.warning(
            f"Decoded pool with {report.gaps} missing blocks and {report.discarded} discarded oligos."
        )
    self.logger.info(
        f"Decoded {len(images)} image(s) from {len(sequences)} oligos, "
        f"{sum(i.masked_pixels for i in report.images)} masked pixel values."
    )
    return DecodedPool(
        images=images,
        names=[entry.name for entry in manifest.images],
        streams=results,
        report=report,
    )


def read_pool(
    path: Union[str, Path],
) -> List[Nucleotides]:
    """
    Read a pool from FASTA or from a one-sequence-per-line file.
    """
    path = Path(path)
    with path.open("r", encoding="ascii", errors="replace") as handle:
        first = handle.readline()
    if first.startswith(">"):
        return [record.sequence for record in read_fasta(path)]
    return read_sequence_lines(path)


def decode_files(
    self: "DnaImageCodec",
    pool_path: Union[str, Path],
    manifest_path: Union[str, Path],
    out_dir: Union[str, Path],
) -> DecodedPool:
    """
    Decode a pool file and write `<name>.decoded.ppm`, `<name>.mask.ppm` and
    `decode_report.json` into `out_dir`.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    decoded = self.decode_pool(read_pool(pool_path), PoolManifest.from_file(manifest_path))
    for name, image, rgb in zip(decoded.names, decoded.images, decoded.rgb_images()):
        write_ppm(out_dir / f"{name}.decoded.ppm", rgb)
        write_ppm(out_dir / f"{name}.mask.ppm", mask_to_image(image.masks))
    (out_dir / "decode_report.json").write_text(
        decoded.report.model_dump_json(indent=2) + "\n", encoding="utf-8"
    )
    return decoded
