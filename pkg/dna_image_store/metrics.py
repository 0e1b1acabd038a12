from __future__ import annotations

import logging
import math
from pathlib import Path
from typing import List, Mapping, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict

from dna_image_store.config import ChannelParams
from dna_image_store.exceptions import InvalidInputError
from dna_image_store.pixel_pipeline import RgbImage, dequantize_image, quantize_image
from dna_image_store.utils.types import Nucleotides, PixelMask

LOGGER = logging.getLogger(__name__)

MAX_INTENSITY = 255.0


def _pixels(image: Union[RgbImage, np.ndarray]) -> np.ndarray:
    return (image.pixels if isinstance(image, RgbImage) else np.asarray(image)).astype(np.float64)


def psnr(
    reference: Union[RgbImage, np.ndarray],
    test: Union[RgbImage, np.ndarray],
) -> float:
    """
    Peak signal-to-noise ratio, 10 log10(255^2 / MSE), in dB.

    Returns:
        float: PSNR, `math.inf` for identical images.

    Raises:
        InvalidInputError: If the shapes differ.
    """
    a, b = _pixels(reference), _pixels(test)
    if a.shape != b.shape:
        raise InvalidInputError(f"Cannot compare images of shapes {a.shape} and {b.shape}.")
    mse = float(np.mean((a - b) ** 2))
    if mse == 0:
        return math.inf
    return 10.0 * math.log10(MAX_INTENSITY**2 / mse)


def corrupted_pixels(
    reference: RgbImage,
    decoded: RgbImage,
) -> PixelMask:
    """
    Ground-truth masks: pixels whose quantized level differs from the reference's.
    """
    if (reference.height, reference.width) != (decoded.height, decoded.width):
        raise InvalidInputError("Reference and decoded images differ in size.")
    return tuple(
        a.levels != b.levels for a, b in zip(quantize_image(reference), quantize_image(decoded))
    )


def detection_scores(
    predicted: PixelMask,
    truth: PixelMask,
) -> Tuple[Optional[float], Optional[float]]:
    """
    Pixel-level precision and recall over all three channels.

    Returns:
        Tuple[Optional[float], Optional[float]]: Precision (None when nothing was
        flagged) and recall (None when nothing is truly corrupted).
    """
    pred = np.stack([np.asarray(m, dtype=bool) for m in predicted])
    true = np.stack([np.asarray(m, dtype=bool) for m in truth])
    if pred.shape != true.shape:
        raise InvalidInputError(f"Mask shapes differ: {pred.shape} and {true.shape}.")
    hits = int(np.count_nonzero(pred & true))
    precision = hits / int(pred.sum()) if pred.any() else None
    recall = hits / int(true.sum()) if true.any() else None
    return precision, recall


class OligoOutcome(BaseModel):
    total: int
    clean: int
    erroneous: int
    missing: int


def classify_oligos(
    encoded: Mapping[str, Nucleotides],
    received: Mapping[str, Nucleotides],
) -> OligoOutcome:
    """
    Split the encoded oligos into clean, erroneous and missing by comparing
    each with its received (consensus) copy of the same identity.
    """
    clean = erroneous = missing = 0
    for oligo_id, sequence in encoded.items():
        copy = received.get(oligo_id)
        if copy is None:
            missing += 1
        elif copy == sequence:
            clean += 1
        else:
            erroneous += 1
    return OligoOutcome(total=len(encoded), clean=clean, erroneous=erroneous, missing=missing)


class ImageMetrics(BaseModel):
    model_config = ConfigDict(ser_json_inf_nan="constants")

    name: str
    psnr_corrupted: float
    psnr_restored: Optional[float] = None
    psnr_corrupted_vs_original: float
    psnr_restored_vs_original: Optional[float] = None
    corrupted_pixels: int
    flagged_pixels: Optional[int] = None
    detection_precision: Optional[float] = None
    detection_recall: Optional[float] = None


class MetricsReport(BaseModel):
    """
    Evaluation of one experiment. PSNR is measured against the quantized
    original unless the field name says otherwise; precision and recall are
    None when not applicable.
    """

    model_config = ConfigDict(ser_json_inf_nan="constants")

    oligos: OligoOutcome
    dropped: int = 0
    corrected_blocks: int = 0
    discarded: int = 0
    source_bits: int = 0
    payload_nucleotides: int = 0
    total_nucleotides: int = 0
    bits_per_nucleotide: Optional[float] = None
    images: List[ImageMetrics] = []
    channel: Optional[ChannelParams] = None

    def to_file(self, path: Union[str, Path]) -> None:
        Path(path).write_text(self.model_dump_json(indent=2) + "\n", encoding="utf-8")


def evaluate_image(
    name: str,
    original: RgbImage,
    corrupted: RgbImage,
    restored: Optional[RgbImage] = None,
    flagged: Optional[PixelMask] = None,
    damaged: bool = True,
) -> ImageMetrics:
    """
    Quality of one decoded (and optionally restored) image.

    Args:
        name (str): Image name for the report.
        original (RgbImage): Unquantized source image.
        corrupted (RgbImage): Decoded image before restoration.
        restored (Optional[RgbImage]): Restored image.
        flagged (Optional[PixelMask]): Masks used by restoration.
        damaged (bool): Whether the channel injected any damage; without damage
            precision and recall are reported as not applicable.

    Returns:
        ImageMetrics: PSNR values and detection scores.
    """
    reference = dequantize_image(quantize_image(original))
    truth = corrupted_pixels(original, corrupted)
    precision = recall = None
    if flagged is not None and damaged:
        precision, recall = detection_scores(flagged, truth)
    metrics = ImageMetrics(
        name=name,
        psnr_corrupted=psnr(reference, corrupted),
        psnr_restored=psnr(reference, restored) if restored is not None else None,
        psnr_corrupted_vs_original=psnr(original, corrupted),
        psnr_restored_vs_original=psnr(original, restored) if restored is not None else None,
        corrupted_pixels=int(sum(m.sum() for m in truth)),
        flagged_pixels=int(sum(m.sum() for m in flagged)) if flagged is not None else None,
        detection_precision=precision,
        detection_recall=recall,
    )
    LOGGER.info(
        f"{name}: PSNR corrupted {metrics.psnr_corrupted:.2f} dB, restored {metrics.psnr_restored}."
    )
    return metrics
