# To be imported into ..codec.py DnaImageCodec class

from __future__ import annotations

from typing import TYPE_CHECKING

from dna_image_store.config import ExperimentConfig
from dna_image_store.dna.fasta import write_fasta
from dna_image_store.metrics import MetricsReport, classify_oligos, evaluate_image
from dna_image_store.restoration.pipeline import Restorer
from dna_image_store.utils.image_io import mask_to_image, read_image, write_ppm

if TYPE_CHECKING:
    from dna_image_store import DnaImageCodec


def run_experiment(
    self: "DnaImageCodec",
    config: ExperimentConfig,
) -> MetricsReport:
    """
    Run encode, simulate, decode, restore and evaluate from one config.

    Artifacts go to subdirectories of `config.output_dir`: `encode/`,
    `simulate/`, `decode/` and `restore/`, plus `metrics.json` and
    `config.json` at the top.

    Args:
        config (ExperimentConfig): The experiment.

    Returns:
        MetricsReport: Oligo accounting, compression and image quality.
    """
    out = config.output_dir
    out.mkdir(parents=True, exist_ok=True)
    config.to_file(out / "config.json")

    originals = [read_image(p) for p in config.inputs]
    encoded = self.encode_files(config.inputs, out / "encode")

    simulated = self.simulate_files(
        out / "encode" / "pool.fasta",
        out / "simulate",
        config.channel,
        config.seed,
        manifest_path=out / "encode" / "manifest.json",
    )
    decoded = self.decode_pool([r.sequence for r in simulated.records], encoded.manifest)
    (out / "decode").mkdir(parents=True, exist_ok=True)
    (out / "decode" / "decode_report.json").write_text(
        decoded.report.model_dump_json(indent=2) + "\n", encoding="utf-8"
    )
    write_fasta(out / "decode" / "received.fasta", simulated.records)

    restorer = Restorer(config.restoration, logger=self.logger)
    damaged = bool(simulated.log.dropped or simulated.log.substituted or simulated.log.unread)
    image_metrics = []
    for name, original, image, rgb in zip(
        decoded.names, originals, decoded.images, decoded.rgb_images()
    ):
        write_ppm(out / "decode" / f"{name}.decoded.ppm", rgb)
        write_ppm(out / "decode" / f"{name}.mask.ppm", mask_to_image(image.masks))
        restored = restorer.restore(
            rgb,
            image.masks,
            dump_dir=out / "restore" if config.restoration.dump_stages else None,
            name=name,
        )
        (out / "restore").mkdir(parents=True, exist_ok=True)
        write_ppm(out / "restore" / f"{name}.restored.ppm", restored.image)
        image_metrics.append(
            evaluate_image(name, original, rgb, restored.image, restored.masks, damaged)
        )

    report = MetricsReport(
        oligos=classify_oligos(
            {r.id: r.sequence for r in encoded.records},
            {r.id: r.sequence for r in simulated.records},
        ),
        dropped=len(simulated.log.dropped),
        corrected_blocks=decoded.report.corrected_blocks,
        discarded=decoded.report.discarded,
        source_bits=encoded.report.source_bits,
        payload_nucleotides=encoded.report.payload_nucleotides,
        total_nucleotides=encoded.report.total_nucleotides,
        bits_per_nucleotide=encoded.report.bits_per_nucleotide,
        images=image_metrics,
        channel=config.channel,
    )
    report.to_file(out / "metrics.json")
    self.logger.info(
        f"Experiment done: {report.oligos.clean} clean, {report.oligos.erroneous} erroneous, "
        f"{report.oligos.missing} missing oligos."
    )
    return report
