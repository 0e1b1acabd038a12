from __future__ import annotations

from dataclasses import dataclass, field
import logging
from pathlib import Path
from typing import Dict, Optional, Union

import numpy as np

from dna_image_store.config import RestorationParams
from dna_image_store.pixel_pipeline import RgbImage, quantize_image
from dna_image_store.restoration.detection import combine_masks, detect_discoloration
from dna_image_store.restoration.filters import adaptive_median, bilateral_filter
from dna_image_store.restoration.inpaint import Inpainter, inpaint
from dna_image_store.utils.image_io import mask_to_image, write_ppm
from dna_image_store.utils.types import PixelMask


@dataclass(frozen=True)
class RestorationResult:
    """
    Restored image plus the masks and intermediate stages that produced it.
    """

    image: RgbImage
    masks: PixelMask
    stages: Dict[str, RgbImage] = field(default_factory=dict)

    @property
    def masked_pixels(self) -> int:
        return int(sum(m.sum() for m in self.masks))


def _to_image(pixels: np.ndarray) -> RgbImage:
    return RgbImage(np.clip(np.rint(pixels), 0, 255).astype(np.uint8))


class Restorer:
    """
    Detection, inpainting and smoothing of decoded images.

    Args:
        params (Optional[RestorationParams]): Stage parameters; defaults follow
            t = 18, sigma_d2 = sigma_r2 = 45 and a 9 x 9 bilateral window.
        inpainter (Optional[Inpainter]): Callable `(channel, mask) -> channel`;
            diffusion inpainting when None.
        logger (Optional[logging.Logger]): Logger to use.
    """

    def __init__(
        self,
        params: Optional[RestorationParams] = None,
        inpainter: Optional[Inpainter] = None,
        logger: Optional[logging.Logger] = None,
    ):
        if logger is None:
            self.logger = logging.getLogger(self.__class__.__name__)
        else:
            self.logger = logger
        self.params = params or RestorationParams()
        self.inpainter = inpainter or self._diffusion

    def _diffusion(
        self,
        channel: np.ndarray,
        mask: np.ndarray,
    ) -> np.ndarray:
        return inpaint(
            channel,
            mask,
            tolerance=self.params.inpaint_tolerance,
            max_iterations=self.params.inpaint_max_iterations,
        )

    def detect(
        self,
        image: Union[RgbImage, np.ndarray],
    ) -> PixelMask:
        if not isinstance(image, RgbImage):
            image = _to_image(image)
        return detect_discoloration(*quantize_image(image), self.params.t)

    def restore(
        self,
        decoded: RgbImage,
        decoder_masks: PixelMask,
        dump_dir: Optional[Union[str, Path]] = None,
        name: str = "image",
    ) -> RestorationResult:
        """
        Run the restoration pipeline on one decoded image.

        Stages: detection unioned with the decoder masks, per-channel
        inpainting, bilateral smoothing and adaptive median refinement around
        the masked regions. With `median_iterations` > 1, detection is re-run
        on each refined image and the region grows by the new flags.

        Args:
            decoded (RgbImage): Decoded (dequantized) image.
            decoder_masks (PixelMask): Unknown pixels reported by the decoder.
            dump_dir (Optional[Union[str, Path]]): Directory for stage PPMs,
                written when given or when `dump_stages` is set.
            name (str): File name stem of the stage dumps.

        Returns:
            RestorationResult: Restored image, masks and stages.

        Raises:
            InpaintingError: If a channel is fully masked.
        """
        masks = combine_masks(self.detect(decoded), decoder_masks)
        self.logger.info(
            f"Restoring '{name}': {[int(m.sum()) for m in masks]} masked pixels per channel."
        )

        pixels = decoded.pixels.astype(np.float64)
        inpainted = np.stack(
            [
                self.inpainter(pixels[:, :, c], masks[c]) if masks[c].any() else pixels[:, :, c]
                for c in range(3)
            ],
            axis=2,
        )
        smoothed = bilateral_filter(
            inpainted, self.params.sigma_d2, self.params.sigma_r2, self.params.window
        )

        region = masks
        refined = smoothed
        for iteration in range(self.params.median_iterations):
            refined = adaptive_median(refined, region, self.params.max_median_window)
            if iteration + 1 < self.params.median_iterations:
                region = combine_masks(region, self.detect(refined))

        stages = {
            "masked": mask_to_image(masks),
            "inpainted": _to_image(inpainted),
            "smoothed": _to_image(smoothed),
            "refined": _to_image(refined),
        }
        if dump_dir is None and self.params.dump_stages:
            dump_dir = Path(".")
        if dump_dir is not None:
            dump_dir = Path(dump_dir)
            dump_dir.mkdir(parents=True, exist_ok=True)
            for stage, image in stages.items():
                write_ppm(dump_dir / f"{name}.{stage}.ppm", image)
            self.logger.debug(f"Dumped {len(stages)} stages of '{name}' to '{dump_dir}'.")

        return RestorationResult(image=stages["refined"], masks=region, stages=stages)


def restore(
    decoded: RgbImage,
    masks: PixelMask,
    params: Optional[RestorationParams] = None,
    inpainter: Optional[Inpainter] = None,
    dump_dir: Optional[Union[str, Path]] = None,
) -> RgbImage:
    """
    Restore a decoded image with default or given parameters.
    """
    return Restorer(params, inpainter).restore(decoded, masks, dump_dir).image
