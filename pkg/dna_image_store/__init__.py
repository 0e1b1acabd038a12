from .codec import DnaImageCodec
from .config import ChannelParams, ExperimentConfig, RestorationParams
from .manifest import PoolManifest
from .pixel_pipeline import RgbImage, dequantize_image, quantize_image
from .restoration.pipeline import Restorer, restore
from .metrics import MetricsReport, psnr
from .utils.codec_settings import CodecSettings
from .utils.oligo_id import OligoId
from .utils.pretty_print import format_summary, format_table

__all__ = [
    "DnaImageCodec",
    "CodecSettings",
    "ChannelParams",
    "ExperimentConfig",
    "RestorationParams",
    "PoolManifest",
    "RgbImage",
    "quantize_image",
    "dequantize_image",
    "Restorer",
    "restore",
    "MetricsReport",
    "psnr",
    "OligoId",
    "format_summary",
    "format_table",
]
