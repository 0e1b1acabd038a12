from __future__ import annotations

from dataclasses import dataclass, field
import logging
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel

from dna_image_store.config import ChannelParams
from dna_image_store.dna.constraints import NUCLEOTIDES
from dna_image_store.dna.fasta import FastaRecord
from dna_image_store.exceptions import InvalidInputError
from dna_image_store.utils.oligo_id import OligoId
from dna_image_store.utils.types import Nucleotides

LOGGER = logging.getLogger(__name__)

_CODE = np.full(256, 255, dtype=np.uint8)
for _i, _s in enumerate(NUCLEOTIDES):
    _CODE[ord(_s)] = _i
_SYMBOLS = np.frombuffer(NUCLEOTIDES.encode("ascii"), dtype=np.uint8)


def to_codes(sequence: Nucleotides) -> np.ndarray:
    """
    Map A, C, G, T to 0..3.

    Raises:
        InvalidInputError: If the sequence holds another symbol.
    """
    codes = _CODE[np.frombuffer(sequence.encode("ascii"), dtype=np.uint8)]
    if codes.size and codes.max() > 3:
        raise InvalidInputError("Sequence holds symbols other than A, C, G, T.")
    return codes


def from_codes(codes: np.ndarray) -> Nucleotides:
    return _SYMBOLS[np.asarray(codes, dtype=np.uint8)].tobytes().decode("ascii")


def _substitute(
    codes: np.ndarray,
    rate: float,
    rng: np.random.Generator,
) -> Tuple[np.ndarray, np.ndarray]:
    hits = np.flatnonzero(rng.random(codes.shape[0]) < rate)
    out = codes.copy()
    # shift by 1..3 so the new symbol always differs
    out[hits] = (out[hits] + rng.integers(1, 4, size=hits.shape[0])) % 4
    return out, hits


@dataclass(frozen=True)
class PoolState:
    """
    An oligo pool as it moves through the channel.

    Args:
        records (Tuple[FastaRecord, ...]): Surviving oligos, in pool order.
        seed (Optional[int]): Seed of the last stage applied.
        removed (Tuple[OligoId, ...]): Identities removed so far.
        substitutions (Dict[OligoId, Tuple[int, ...]]): Substituted positions per oligo.
    """

    records: Tuple[FastaRecord, ...]
    seed: Optional[int] = None
    removed: Tuple[OligoId, ...] = ()
    substitutions: Dict[OligoId, Tuple[int, ...]] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.records)

    @property
    def sequences(self) -> List[Nucleotides]:
        return [r.sequence for r in self.records]


@dataclass(frozen=True)
class ReadSet:
    """
    Simulated reads grouped by their true source oligo.

    The grouping is ground truth; only consensus and evaluation code may use it.
    Oligos that drew zero reads keep an empty group.
    """

    groups: Dict[OligoId, Tuple[Nucleotides, ...]]
    errors: Dict[OligoId, Tuple[Tuple[int, ...], ...]] = field(default_factory=dict)
    seed: Optional[int] = None

    @property
    def read_count(self) -> int:
        return sum(len(g) for g in self.groups.values())

    def records(self) -> List[FastaRecord]:
        """
        Reads as FASTA records named `<oligo>_read<k>`.
        """
        return [
            FastaRecord(OligoId(f"{source}_read{k}"), read)
            for source, reads in self.groups.items()
            for k, read in enumerate(reads)
        ]


class DamageLog(BaseModel):
    """
    Ground truth of one channel run, written for evaluation.
    """

    seed: int
    pool_size: int
    selected_level: Optional[int] = None
    dropped: List[OligoId] = []
    substituted: Dict[OligoId, List[int]] = {}
    unread: List[OligoId] = []
    read_count: int = 0
    damaged_count: int = 0

    @property
    def missing(self) -> List[OligoId]:
        return sorted(set(self.dropped) | set(self.unread))


def drop_oligos(
    pool: PoolState,
    count: int,
    seed: int,
) -> PoolState:
    """
    Remove `count` oligos uniformly at random without replacement.

    Raises:
        InvalidInputError: If `count` is negative or exceeds the pool size.
    """
    if not 0 <= count <= len(pool):
        raise InvalidInputError(f"Cannot drop {count} oligos from a pool of {len(pool)}.")
    rng = np.random.default_rng(seed)
    removed_idx = set(rng.choice(len(pool), size=count, replace=False).tolist())
    kept = tuple(r for i, r in enumerate(pool.records) if i not in removed_idx)
    removed = tuple(pool.records[i].id for i in sorted(removed_idx))
    LOGGER.info(f"Dropped {count} of {len(pool)} oligos (seed {seed}).")
    return PoolState(
        records=kept,
        seed=seed,
        removed=pool.removed + removed,
        substitutions={k: v for k, v in pool.substitutions.items() if k not in removed},
    )


def substitute_symbols(
    pool: PoolState,
    rate: float,
    seed: int,
) -> PoolState:
    """
    Substitute every position i.i.d. with probability `rate` by a uniformly
    random different nucleotide.

    Oligo i draws from its own generator seeded with (seed, i), so results do
    not depend on processing order.

    Raises:
        InvalidInputError: If `rate` is outside 0..1.
    """
    if not 0 <= rate <= 1:
        raise InvalidInputError(f"Substitution rate must lie in 0..1, got {rate}.")
    records = []
    substitutions = dict(pool.substitutions)
    total = 0
    for i, record in enumerate(pool.records):
        rng = np.random.default_rng([seed, i])
        codes, hits = _substitute(to_codes(record.sequence), rate, rng)
        if hits.size:
            previous = set(substitutions.get(record.id, ()))
            substitutions[record.id] = tuple(sorted(previous | set(hits.tolist())))
            total += hits.size
        records.append(FastaRecord(record.id, from_codes(codes), record.description))
    LOGGER.info(f"Substituted {total} positions at rate {rate} (seed {seed}).")
    return PoolState(tuple(records), seed, pool.removed, substitutions)


def generate_reads(
    pool: PoolState,
    coverage: float,
    per_base_error: float,
    seed: int,
    fixed_reads: Optional[int] = None,
) -> ReadSet:
    """
    Sequence every oligo of the pool.

    The read count of an oligo is drawn from Poisson(coverage), or fixed when
    `fixed_reads` is given; each read carries i.i.d. substitutions at
    `per_base_error`. Oligo i uses the generator seeded with (seed, i).

    Raises:
        InvalidInputError: If coverage is below 1 or the error rate is outside 0..1.
    """
    if fixed_reads is None and coverage < 1:
        raise InvalidInputError(f"Coverage must be at least 1, got {coverage}.")
    if not 0 <= per_base_error <= 1:
        raise InvalidInputError(f"Per-base error must lie in 0..1, got {per_base_error}.")
    groups = {}
    errors = {}
    for i, record in enumerate(pool.records):
        rng = np.random.default_rng([seed, i])
        n_reads = fixed_reads if fixed_reads is not None else int(rng.poisson(coverage))
        source = to_codes(record.sequence)
        reads = []
        read_errors = []
        for _ in range(n_reads):
            codes, hits = _substitute(source, per_base_error, rng)
            reads.append(from_codes(codes))
            read_errors.append(tuple(hits.tolist()))
        groups[record.id] = tuple(reads)
        errors[record.id] = tuple(read_errors)
    read_set = ReadSet(groups=groups, errors=errors, seed=seed)
    LOGGER.info(f"Generated {read_set.read_count} reads for {len(pool)} oligos (seed {seed}).")
    return read_set


def consensus(
    reads: Sequence[Nucleotides],
) -> Nucleotides:
    """
    Position-wise plurality vote; ties go to the first of A, C, G, T.

    Raises:
        InvalidInputError: If there are no reads or their lengths differ.
    """
    if not reads:
        raise InvalidInputError("Cannot call a consensus from zero reads.")
    if len({len(r) for r in reads}) != 1:
        raise InvalidInputError("Consensus needs reads of equal length.")
    codes = np.stack([to_codes(r) for r in reads])
    counts = np.stack([(codes == s).sum(axis=0) for s in range(4)])
    return from_codes(counts.argmax(axis=0))


@dataclass(frozen=True)
class ConsensusPool:
    records: Tuple[FastaRecord, ...]
    missing: Tuple[OligoId, ...] = ()


def consensus_pool(
    read_set: ReadSet,
) -> ConsensusPool:
    """
    Consensus of every read group; groups without reads are reported missing.
    """
    records = []
    missing = []
    for source, reads in read_set.groups.items():
        if reads:
            records.append(FastaRecord(source, consensus(reads)))
        else:
            missing.append(source)
    if missing:
        LOGGER.warning(f"{len(missing)} oligos drew no reads and are missing.")
    return ConsensusPool(tuple(records), tuple(missing))


def run_channel(
    records: Sequence[FastaRecord],
    params: ChannelParams,
    seed: int,
    selected_level: Optional[int] = None,
) -> Tuple[PoolState, Optional[ReadSet], List[FastaRecord], DamageLog]:
    """
    Apply dropout, pool substitutions and, optionally, sequencing plus consensus.

    Stage seeds are derived from `seed` so each stage draws independently.

    Returns:
        Tuple[PoolState, Optional[ReadSet], List[FastaRecord], DamageLog]: Damaged
        pool, reads (None without read simulation), records to decode, and the
        ground-truth log.
    """
    pool = PoolState(tuple(records), seed)
    pool = drop_oligos(pool, params.drops_for(len(pool)), seed)
    if params.substitution_rate > 0:
        pool = substitute_symbols(pool, params.substitution_rate, seed + 1)

    read_set = None
    unread: Tuple[OligoId, ...] = ()
    decoded_records = list(pool.records)
    if params.simulates_reads:
        read_set = generate_reads(
            pool,
            params.coverage if params.coverage is not None else 1.0,
            params.read_error,
            seed + 2,
            fixed_reads=params.fixed_reads,
        )
        called = consensus_pool(read_set)
        decoded_records = list(called.records)
        unread = called.missing

    originals = {r.id: r.sequence for r in records}
    final = {r.id: r.sequence for r in decoded_records}
    damaged = sum(1 for k, s in final.items() if originals.get(k) != s)
    log = DamageLog(
        seed=seed,
        pool_size=len(records),
        selected_level=selected_level,
        dropped=list(pool.removed),
        substituted={k: list(v) for k, v in pool.substitutions.items()},
        unread=list(unread),
        read_count=read_set.read_count if read_set is not None else 0,
        damaged_count=damaged,
    )
    return pool, read_set, decoded_records, log
