from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
import logging
from typing import List, Optional, Tuple

import numpy as np

from dna_image_store.dna.constraints import (
    NUCLEOTIDES,
    gc_count,
    hamming,
    satisfies_block_constraints,
)
from dna_image_store.exceptions import InvalidInputError, PrimerDesignError
from dna_image_store.pixel_pipeline import LEVEL_COUNT
from dna_image_store.utils.types import Nucleotides

LOGGER = logging.getLogger(__name__)

PRIMER_LENGTH = 20
MIN_PRIMER_DISTANCE = 10
MAX_PAIR_TM_DELTA = 2
PRIMER_MATCH_RADIUS = 4


def wallace_tm(primer: Nucleotides) -> int:
    """
    Melting temperature in degrees Celsius by the Wallace rule, 2 (A + T) + 4 (G + C).
    """
    gc = gc_count(primer)
    return 2 * (len(primer) - gc) + 4 * gc


@dataclass(frozen=True)
class PrimerPair:
    level: int
    forward: Nucleotides
    reverse: Nucleotides

    @property
    def tm_delta(self) -> int:
        return abs(wallace_tm(self.forward) - wallace_tm(self.reverse))


@dataclass(frozen=True)
class PrimerSet:
    """
    One primer pair per intensity level, used for level-wise random access.

    Args:
        pairs (Tuple[PrimerPair, ...]): Pairs for levels 0..7, in level order.
    """

    pairs: Tuple[PrimerPair, ...]

    def __post_init__(self):
        object.__setattr__(self, "pairs", tuple(self.pairs))
        levels = [p.level for p in self.pairs]
        if levels != list(range(len(self.pairs))):
            raise InvalidInputError(f"Primer pairs must cover levels 0..n-1 in order, got {levels}.")
        for primer in self.primers():
            if len(primer) != PRIMER_LENGTH:
                raise InvalidInputError(f"Primer '{primer}' is not {PRIMER_LENGTH} nt long.")

    def pair_for(
        self,
        level: int,
    ) -> PrimerPair:
        try:
            return self.pairs[level]
        except IndexError as e:
            raise InvalidInputError(f"No primer pair for level {level}.") from e

    def primers(self) -> List[Nucleotides]:
        return [p for pair in self.pairs for p in (pair.forward, pair.reverse)]

    def min_distance(self) -> int:
        return min(hamming(a, b) for a, b in combinations(self.primers(), 2))

    def nearest_level(
        self,
        prefix: Nucleotides,
        suffix: Nucleotides,
        max_distance: int = PRIMER_MATCH_RADIUS,
    ) -> Optional[int]:
        """
        Level whose pair best matches an oligo's flanks.

        Both flanks must lie within `max_distance` of the pair's primers; the
        pair with the smallest summed distance wins.

        Returns:
            Optional[int]: The level, or None when no pair matches.
        """
        best = None
        for pair in self.pairs:
            d_forward = hamming(pair.forward, prefix)
            d_reverse = hamming(pair.reverse, suffix)
            if d_forward > max_distance or d_reverse > max_distance:
                continue
            if best is None or d_forward + d_reverse < best[0]:
                best = (d_forward + d_reverse, pair.level)
        return None if best is None else best[1]

    def to_pairs(self) -> List[Tuple[Nucleotides, Nucleotides]]:
        return [(p.forward, p.reverse) for p in self.pairs]

    @classmethod
    def from_pairs(
        cls,
        pairs: List[Tuple[Nucleotides, Nucleotides]],
    ) -> PrimerSet:
        return cls(tuple(PrimerPair(i, f, r) for i, (f, r) in enumerate(pairs)))


def _draw_primer(rng: np.random.Generator) -> Nucleotides:
    return "".join(NUCLEOTIDES[i] for i in rng.integers(0, 4, size=PRIMER_LENGTH))


def design_primers(
    seed: int,
    attempts: int = 200_000,
    pair_count: int = LEVEL_COUNT,
) -> PrimerSet:
    """
    Seeded rejection search for primer pairs.

    Every primer meets the GC window and C/G run limit of a 20-nt block and is
    at Hamming distance >= 10 from every primer accepted before it. The reverse
    primer of a pair must match the forward primer's Wallace temperature
    within 2 degrees.

    Args:
        seed (int): Seed of the search; equal seeds give equal sets.
        attempts (int): Number of candidates that may be drawn in total.
        pair_count (int): Number of pairs, one per level.

    Returns:
        PrimerSet: The primers.

    Raises:
        PrimerDesignError: If the attempt budget runs out.
    """
    rng = np.random.default_rng(seed)
    accepted: List[Nucleotides] = []
    pairs = []
    forward = None
    drawn = 0
    while len(pairs) < pair_count:
        if drawn >= attempts:
            LOGGER.error(f"Primer search exhausted {attempts} attempts with {len(pairs)} pairs.")
            raise PrimerDesignError(
                f"Found {len(pairs)} of {pair_count} primer pairs within {attempts} attempts (seed {seed})."
            )
        drawn += 1
        candidate = _draw_primer(rng)
        if not satisfies_block_constraints(candidate):
            continue
        if any(hamming(candidate, p) < MIN_PRIMER_DISTANCE for p in accepted):
            continue
        if forward is None:
            forward = candidate
            accepted.append(candidate)
            continue
        if abs(wallace_tm(forward) - wallace_tm(candidate)) > MAX_PAIR_TM_DELTA:
            continue
        accepted.append(candidate)
        pairs.append(PrimerPair(len(pairs), forward, candidate))
        forward = None

    LOGGER.debug(f"Designed {pair_count} primer pairs from {drawn} candidates (seed {seed}).")
    return PrimerSet(tuple(pairs))
