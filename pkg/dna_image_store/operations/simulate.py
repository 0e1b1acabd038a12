# To be imported into ..codec.py DnaImageCodec class

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import TYPE_CHECKING, List, Optional, Sequence, Union

from dna_image_store.channel_sim import DamageLog, PoolState, ReadSet, run_channel
from dna_image_store.config import ChannelParams
from dna_image_store.dna.fasta import FastaRecord, read_fasta, write_fasta
from dna_image_store.dna.pool import select_level
from dna_image_store.dna.primers import PrimerSet
from dna_image_store.exceptions import InvalidInputError
from dna_image_store.manifest import PoolManifest

if TYPE_CHECKING:
    from dna_image_store import DnaImageCodec


@dataclass(frozen=True)
class SimulatedPool:
    pool: PoolState
    reads: Optional[ReadSet]
    records: List[FastaRecord]
    log: DamageLog


def simulate_pool(
    self: "DnaImageCodec",
    records: Sequence[FastaRecord],
    params: ChannelParams,
    seed: int,
    primer_set: Optional[PrimerSet] = None,
) -> SimulatedPool:
    """
    Pass a pool through the simulated write/read channel.

    With `params.level` set, only the oligos amplified by that level's primer
    pair enter the channel.

    Args:
        records (Sequence[FastaRecord]): Encoded pool.
        params (ChannelParams): Dropout, substitution and read parameters.
        seed (int): Seed of every randomized stage.
        primer_set (Optional[PrimerSet]): Primers for level selection;
            the codec's own primer set when None.

    Returns:
        SimulatedPool: Damaged pool, reads, records to decode and damage log.
    """
    if params.level is not None:
        records = select_level(records, primer_set or self.primer_set, params.level)
    if params.drops_for(len(records)) > len(records):
        self.logger.error(f"Cannot drop {params.drops_for(len(records))} of {len(records)} oligos.")
        raise InvalidInputError(
            f"Cannot drop {params.drops_for(len(records))} oligos from a pool of {len(records)}."
        )
    pool, reads, received, log = run_channel(records, params, seed, selected_level=params.level)
    self.logger.info(
        f"Channel seed {seed}: {len(log.dropped)} dropped, {len(log.substituted)} substituted, "
        f"{log.read_count} reads, {log.damaged_count} damaged."
    )
    return SimulatedPool(pool=pool, reads=reads, records=received, log=log)


def simulate_files(
    self: "DnaImageCodec",
    pool_path: Union[str, Path],
    out_dir: Union[str, Path],
    params: ChannelParams,
    seed: int,
    manifest_path: Optional[Union[str, Path]] = None,
) -> SimulatedPool:
    """
    Simulate the channel on a FASTA pool and write `damaged.fasta`,
    `reads.fasta` (with read simulation), `received.fasta`, `damage.json`
    and `channel.json` into `out_dir`.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    primer_set = None
    if manifest_path is not None:
        primer_set = PoolManifest.from_file(manifest_path).primer_set()
    simulated = self.simulate_pool(read_fasta(pool_path), params, seed, primer_set)
    write_fasta(out_dir / "damaged.fasta", simulated.pool.records)
    if simulated.reads is not None:
        write_fasta(out_dir / "reads.fasta", simulated.reads.records())
    write_fasta(out_dir / "received.fasta", simulated.records)
    (out_dir / "damage.json").write_text(
        simulated.log.model_dump_json(indent=2) + "\n", encoding="utf-8"
    )
    (out_dir / "channel.json").write_text(params.model_dump_json(indent=2) + "\n", encoding="utf-8")
    return simulated
