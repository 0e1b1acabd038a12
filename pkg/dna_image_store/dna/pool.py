from __future__ import annotations

from collections import Counter
import logging
from typing import Dict, Iterable, List, Sequence

from pydantic import BaseModel

from dna_image_store.dna.constraints import MAX_CG_RUN, gc_count, max_cg_run
from dna_image_store.dna.fasta import FastaRecord
from dna_image_store.dna.oligo import (
    ADDRESS_START,
    BLOCK_LENGTH,
    OLIGO_LENGTH,
    PAYLOAD_START,
    SUFFIX_START,
)
from dna_image_store.dna.primers import PRIMER_MATCH_RADIUS, PrimerSet

LOGGER = logging.getLogger(__name__)


class PoolStatistics(BaseModel):
    """
    Composition summary of an oligo pool.

    Block constraints are enforced per block only; C/G runs that cross a block
    boundary are counted here and never rejected.
    """

    oligo_count: int
    total_nucleotides: int
    length_histogram: Dict[int, int]
    block_gc_histogram: Dict[int, int]
    longest_cg_run: int
    cross_block_run_oligos: int


def select_level(
    records: Iterable[FastaRecord],
    primer_set: PrimerSet,
    level: int,
    max_distance: int = PRIMER_MATCH_RADIUS,
) -> List[FastaRecord]:
    """
    Random access by intensity level: keep the oligos amplified by one primer pair.

    A record is kept when its flanks are nearest to the level's pair among all
    pairs, each flank within `max_distance`. Records of the wrong length are
    skipped.

    Args:
        records (Iterable[FastaRecord]): The pool.
        primer_set (PrimerSet): Primers of the pool.
        level (int): Intensity level to select.
        max_distance (int): Per-flank Hamming radius.

    Returns:
        List[FastaRecord]: Selected records, in input order.
    """
    primer_set.pair_for(level)
    selected = []
    for record in records:
        sequence = record.sequence
        if len(sequence) != OLIGO_LENGTH:
            continue
        matched = primer_set.nearest_level(
            sequence[:ADDRESS_START], sequence[SUFFIX_START:], max_distance
        )
        if matched == level:
            selected.append(record)
    LOGGER.info(f"Selected {len(selected)} oligos for level {level}.")
    return selected


def pool_statistics(
    sequences: Sequence[str],
) -> PoolStatistics:
    """
    Count oligos, nucleotides, payload-block GC content and C/G runs of a pool.
    """
    lengths = Counter(len(s) for s in sequences)
    gc = Counter()
    longest = 0
    crossing = 0
    for sequence in sequences:
        run = max_cg_run(sequence)
        longest = max(longest, run)
        if run > MAX_CG_RUN:
            crossing += 1
        if len(sequence) == OLIGO_LENGTH:
            payload = sequence[PAYLOAD_START:SUFFIX_START]
            gc.update(
                gc_count(payload[i : i + BLOCK_LENGTH])
                for i in range(0, len(payload), BLOCK_LENGTH)
            )
    return PoolStatistics(
        oligo_count=len(sequences),
        total_nucleotides=sum(len(s) for s in sequences),
        length_histogram=dict(sorted(lengths.items())),
        block_gc_histogram=dict(sorted(gc.items())),
        longest_cg_run=longest,
        cross_block_run_oligos=crossing,
    )
