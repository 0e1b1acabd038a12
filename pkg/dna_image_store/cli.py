from __future__ import annotations

import logging
import sys
from pathlib import Path
from typing import List, Optional, Sequence

import click
import numpy as np
from pydantic import ValidationError

from dna_image_store.channel_sim import DamageLog
from dna_image_store.codec import DnaImageCodec
from dna_image_store.config import ChannelParams, ExperimentConfig, RestorationParams
from dna_image_store.dna.fasta import read_fasta
from dna_image_store.exceptions import DnaImageStoreError, ManifestError
from dna_image_store.metrics import MetricsReport, OligoOutcome, classify_oligos, evaluate_image
from dna_image_store.restoration.pipeline import Restorer
from dna_image_store.utils.codec_settings import CodecSettings
from dna_image_store.utils.image_io import image_to_mask, read_image, write_image
from dna_image_store.utils.pretty_print import format_summary, format_table

LOGGER = logging.getLogger(__name__)

EXIT_USAGE = 1
EXIT_DATA = 2

_existing = click.Path(exists=True, dir_okay=False, path_type=Path)
_directory = click.Path(file_okay=False, path_type=Path)


def _configure_logging(
    settings: CodecSettings,
    verbose: int,
) -> None:
    if verbose >= 2:
        level = logging.DEBUG
    elif verbose == 1:
        level = logging.INFO
    else:
        level = getattr(logging, settings.log_level.upper(), logging.WARNING)
    logging.basicConfig(
        level=level,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        force=True,
    )


@click.group()
@click.option("-v", "--verbose", count=True, help="-v for info, -vv for debug output.")
@click.pass_context
def cli(ctx: click.Context, verbose: int):
    """Store color images in synthetic DNA oligo pools and restore them."""
    settings = CodecSettings.from_env()
    _configure_logging(settings, verbose)
    ctx.obj = DnaImageCodec(settings)


@cli.command()
@click.option("--in", "inputs", multiple=True, required=True, type=_existing, help="PPM/PGM/PNG images, at most 16.")
@click.option("--out", "out_dir", required=True, type=_directory, help="Output directory.")
@click.pass_obj
def encode(codec: DnaImageCodec, inputs: Sequence[Path], out_dir: Path):
    """Encode images into pool.fasta, pool.txt and manifest.json."""
    encoded = codec.encode_files(inputs, out_dir)
    report = encoded.report
    click.echo(
        format_summary(
            f"Encoded {len(inputs)} image(s) into '{out_dir}'",
            {
                "oligos": report.oligo_count,
                "total nt": report.total_nucleotides,
                "payload nt": report.payload_nucleotides,
                "source bits": report.source_bits,
                "huffman bits": report.huffman_bits,
                "bits/nt": report.bits_per_nucleotide,
                "bits/payload nt": report.bits_per_payload_nucleotide,
            },
        )
    )
    click.echo(
        format_table(
            [(a.name, f"{a.height}x{a.width}", a.oligos, a.entropy, a.mean_code_length) for a in report.images],
            ["image", "size", "oligos", "entropy", "mean code length"],
        )
    )


@cli.command()
@click.option("--pool", "pool_path", required=True, type=_existing, help="Encoded FASTA pool.")
@click.option("--out", "out_dir", required=True, type=_directory, help="Output directory.")
@click.option("--manifest", "manifest_path", type=_existing, help="Manifest, used for --level selection.")
@click.option("--config", "config_path", type=_existing, help="Channel parameters as JSON; options override it.")
@click.option("--drop", type=click.IntRange(min=0), help="Number of oligos to drop.")
@click.option("--drop-rate", type=click.FloatRange(0, 1), help="Fraction of oligos to drop.")
@click.option("--sub-rate", type=click.FloatRange(0, 1), help="Per-position substitution rate of the pool.")
@click.option("--coverage", type=click.FloatRange(min=1), help="Mean reads per oligo; enables read simulation.")
@click.option("--fixed-reads", type=click.IntRange(min=1), help="Exact reads per oligo.")
@click.option("--read-err", type=click.FloatRange(0, 1), help="Per-base read error rate.")
@click.option("--level", type=click.IntRange(0, 7), help="Keep only oligos of one level's primer pair.")
@click.option("--seed", type=int, default=0, show_default=True, help="Seed of every randomized stage.")
@click.pass_obj
def simulate(
    codec: DnaImageCodec,
    pool_path: Path,
    out_dir: Path,
    manifest_path: Optional[Path],
    config_path: Optional[Path],
    drop: Optional[int],
    drop_rate: Optional[float],
    sub_rate: Optional[float],
    coverage: Optional[float],
    fixed_reads: Optional[int],
    read_err: Optional[float],
    level: Optional[int],
    seed: int,
):
    """Damage a pool: dropout, substitutions and optionally reads plus consensus."""
    params = _channel_params(config_path)
    overrides = {
        "drop_count": drop,
        "drop_rate": drop_rate,
        "substitution_rate": sub_rate,
        "coverage": coverage,
        "fixed_reads": fixed_reads,
        "read_error": read_err,
        "level": level,
    }
    params = ChannelParams.model_validate(
        {**params.model_dump(), **{k: v for k, v in overrides.items() if v is not None}}
    )
    simulated = codec.simulate_files(pool_path, out_dir, params, seed, manifest_path)
    click.echo(
        format_summary(
            f"Simulated channel into '{out_dir}'",
            {
                "seed": seed,
                "pool size": simulated.log.pool_size,
                "dropped": len(simulated.log.dropped),
                "substituted oligos": len(simulated.log.substituted),
                "reads": simulated.log.read_count,
                "received": len(simulated.records),
                "damaged": simulated.log.damaged_count,
            },
        )
    )


def _channel_params(
    config_path: Optional[Path],
) -> ChannelParams:
    if config_path is None:
        return ChannelParams()
    try:
        return ChannelParams.model_validate_json(config_path.read_text(encoding="utf-8"))
    except ValidationError as e:
        raise click.UsageError(f"Invalid channel config '{config_path}': {e}") from e


@cli.command()
@click.option("--pool", "pool_path", required=True, type=_existing, help="FASTA or one-sequence-per-line pool.")
@click.option("--manifest", "manifest_path", required=True, type=_existing, help="Manifest of the encode.")
@click.option("--out", "out_dir", required=True, type=_directory, help="Output directory.")
@click.pass_obj
def decode(codec: DnaImageCodec, pool_path: Path, manifest_path: Path, out_dir: Path):
    """Decode a pool into <name>.decoded.ppm and <name>.mask.ppm."""
    decoded = codec.decode_files(pool_path, manifest_path, out_dir)
    report = decoded.report
    click.echo(
        format_summary(
            f"Decoded {len(decoded.images)} image(s) into '{out_dir}'",
            {
                "oligos": report.oligos,
                "gaps": report.gaps,
                "realigned": report.realigned,
                "failed segments": report.failed_segments,
                "corrected addresses": report.corrected_addresses,
                "corrected blocks": report.corrected_blocks,
                "discarded": report.discarded,
            },
        )
    )
    click.echo(
        format_table(
            [(i.name, i.masked_pixels, i.ignored_indices) for i in report.images],
            ["image", "masked", "ignored"],
        )
    )


@cli.command()
@click.option("--decoded", "decoded_path", required=True, type=_existing, help="Decoded image.")
@click.option("--mask", "mask_path", type=_existing, help="Decoder mask image (white = unknown).")
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False, path_type=Path), help="Restored image.")
@click.option("--t", "t", type=click.IntRange(min=0), default=18, show_default=True, help="Rarest difference bins to flag.")
@click.option("--sigma", type=click.FloatRange(min=0, min_open=True), help="Sets both bilateral variances.")
@click.option("--sigma-d2", type=click.FloatRange(min=0, min_open=True), default=45.0, show_default=True)
@click.option("--sigma-r2", type=click.FloatRange(min=0, min_open=True), default=45.0, show_default=True)
@click.option("--window", type=int, default=9, show_default=True, help="Odd bilateral window side.")
@click.option("--max-median-window", type=int, default=7, show_default=True)
@click.option("--median-iterations", type=click.IntRange(min=1), default=1, show_default=True)
@click.option("--dump-stages", is_flag=True, help="Write masked/inpainted/smoothed/refined PPMs next to --out.")
def restore(
    decoded_path: Path,
    mask_path: Optional[Path],
    out_path: Path,
    t: int,
    sigma: Optional[float],
    sigma_d2: float,
    sigma_r2: float,
    window: int,
    max_median_window: int,
    median_iterations: int,
    dump_stages: bool,
):
    """Detect, inpaint and smooth discolorations of a decoded image."""
    if sigma is not None:
        sigma_d2 = sigma_r2 = sigma
    try:
        params = RestorationParams(
            t=t,
            sigma_d2=sigma_d2,
            sigma_r2=sigma_r2,
            window=window,
            max_median_window=max_median_window,
            median_iterations=median_iterations,
            dump_stages=dump_stages,
        )
    except ValidationError as e:
        raise click.UsageError(str(e))
    decoded = read_image(decoded_path)
    if mask_path is not None:
        masks = image_to_mask(read_image(mask_path))
    else:
        masks = tuple(np.zeros((decoded.height, decoded.width), dtype=bool) for _ in range(3))
    name = decoded_path.name.split(".")[0]
    result = Restorer(params).restore(
        decoded, masks, dump_dir=out_path.parent if dump_stages else None, name=name
    )
    out_path.parent.mkdir(parents=True, exist_ok=True)
    write_image(out_path, result.image)
    click.echo(
        format_summary(
            f"Restored '{decoded_path}' into '{out_path}'",
            {"masked pixel values": result.masked_pixels, "t": t, "window": window},
        )
    )


@cli.command("eval")
@click.option("--original", "original_path", required=True, type=_existing, help="Unquantized source image.")
@click.option("--corrupted", "corrupted_path", required=True, type=_existing, help="Decoded image.")
@click.option("--restored", "restored_path", type=_existing, help="Restored image.")
@click.option("--flagged", "flagged_path", type=_existing, help="Mask image of the pixels restoration touched.")
@click.option("--damage", "damage_path", type=_existing, help="damage.json of the channel run.")
@click.option("--encoded", "encoded_path", type=_existing, help="Encoded FASTA pool.")
@click.option("--received", "received_path", type=_existing, help="Decoded-from FASTA pool.")
@click.option("--out", "out_path", type=click.Path(dir_okay=False, path_type=Path), help="metrics.json to write.")
def evaluate(
    original_path: Path,
    corrupted_path: Path,
    restored_path: Optional[Path],
    flagged_path: Optional[Path],
    damage_path: Optional[Path],
    encoded_path: Optional[Path],
    received_path: Optional[Path],
    out_path: Optional[Path],
):
    """Compute PSNR, detection precision/recall and oligo outcomes."""
    log = None
    if damage_path is not None:
        try:
            log = DamageLog.model_validate_json(damage_path.read_text(encoding="utf-8"))
        except ValidationError as e:
            raise ManifestError(f"Invalid damage log '{damage_path}': {e}") from e

    if encoded_path is not None and received_path is not None:
        oligos = classify_oligos(
            {r.id: r.sequence for r in read_fasta(encoded_path)},
            {r.id: r.sequence for r in read_fasta(received_path)},
        )
    else:
        oligos = OligoOutcome(total=0, clean=0, erroneous=0, missing=0)

    damaged = log is None or bool(log.dropped or log.substituted or log.unread)
    metrics = evaluate_image(
        original_path.name.split(".")[0],
        read_image(original_path),
        read_image(corrupted_path),
        read_image(restored_path) if restored_path is not None else None,
        image_to_mask(read_image(flagged_path)) if flagged_path is not None else None,
        damaged,
    )
    report = MetricsReport(
        oligos=oligos,
        dropped=len(log.dropped) if log is not None else 0,
        images=[metrics],
    )
    if out_path is not None:
        report.to_file(out_path)
    click.echo(
        format_summary(
            f"Evaluated '{corrupted_path}'",
            {
                "PSNR corrupted": metrics.psnr_corrupted,
                "PSNR restored": metrics.psnr_restored,
                "corrupted pixels": metrics.corrupted_pixels,
                "precision": metrics.detection_precision,
                "recall": metrics.detection_recall,
            },
        )
    )


@cli.command()
@click.option("--config", "config_path", required=True, type=_existing, help="ExperimentConfig JSON.")
@click.pass_obj
def run(codec: DnaImageCodec, config_path: Path):
    """Encode, simulate, decode, restore and evaluate from one config."""
    try:
        config = ExperimentConfig.from_file(config_path)
    except ManifestError as e:
        raise click.UsageError(e.message) from e
    codec = DnaImageCodec(
        CodecSettings(
            resync_rate=config.resync_rate,
            primer_seed=config.primer_seed,
            primer_attempts=codec.settings.primer_attempts,
            probe_budget=codec.settings.probe_budget,
            log_level=codec.settings.log_level,
        ),
        logger=codec.logger,
    )
    report = codec.run_experiment(config)
    click.echo(
        format_summary(
            f"Experiment written to '{config.output_dir}'",
            {
                "oligos": report.oligos.total,
                "clean": report.oligos.clean,
                "erroneous": report.oligos.erroneous,
                "missing": report.oligos.missing,
                "bits/nt": report.bits_per_nucleotide,
            },
        )
    )
    click.echo(
        format_table(
            [(m.name, m.psnr_corrupted, m.psnr_restored, m.detection_precision, m.detection_recall) for m in report.images],
            ["image", "PSNR corrupted", "PSNR restored", "precision", "recall"],
        )
    )


def main(
    argv: Optional[List[str]] = None,
) -> int:
    """
    Run the command line and map failures onto exit codes: 1 for usage and
    configuration errors, 2 for data errors.
    """
    try:
        result = cli.main(args=argv, prog_name="dna-image-store", standalone_mode=False)
    except click.exceptions.Abort:
        click.echo("Aborted.", err=True)
        return EXIT_USAGE
    except click.ClickException as e:
        e.show()
        return EXIT_USAGE
    except (ValidationError, ValueError) as e:
        click.echo(f"Error: {e}", err=True)
        return EXIT_USAGE
    except DnaImageStoreError as e:
        LOGGER.debug("Command failed.", exc_info=True)
        click.echo(f"Error: {e.message}", err=True)
        return EXIT_DATA
    return result if isinstance(result, int) else 0


def run_cli() -> None:
    sys.exit(main())
