from typing import Tuple

import regex as re

NUCLEOTIDES = "ACGT"
MAX_CG_RUN = 3

_ALPHABET = re.compile(r"^[ACGT]*$")
_CG_RUNS = re.compile(r"C+|G+")


def is_nucleotide_string(sequence: str) -> bool:
    return _ALPHABET.match(sequence) is not None


def gc_count(sequence: str) -> int:
    return sequence.count("G") + sequence.count("C")


def gc_bounds(
    block_length: int,
) -> Tuple[int, int]:
    """
    Inclusive GC-count window of a block, [ceil(0.4 L), floor(0.6 L)].

    Integer arithmetic only: (6, 7) for L = 13, (4, 6) for L = 10.
    """
    return -(-4 * block_length // 10), 6 * block_length // 10


def max_cg_run(sequence: str) -> int:
    """
    Length of the longest homopolymer run of C or of G, 0 if there is none.
    """
    return max((len(m.group()) for m in _CG_RUNS.finditer(sequence)), default=0)


def max_homopolymer(sequence: str) -> int:
    """
    Length of the longest homopolymer of any nucleotide.
    """
    longest = 0
    current = 0
    previous = None
    for symbol in sequence:
        current = current + 1 if symbol == previous else 1
        previous = symbol
        longest = max(longest, current)
    return longest


def satisfies_block_constraints(sequence: str) -> bool:
    """
    Whether a block meets the GC window and the C/G run limit of its length.
    """
    if not is_nucleotide_string(sequence):
        return False
    lo, hi = gc_bounds(len(sequence))
    return lo <= gc_count(sequence) <= hi and max_cg_run(sequence) <= MAX_CG_RUN


def hamming(a: str, b: str) -> int:
    """
    Hamming distance of two equal-length strings.

    Raises:
        ValueError: If the lengths differ.
    """
    if len(a) != len(b):
        raise ValueError(f"Hamming distance needs equal lengths, got {len(a)} and {len(b)}.")
    return sum(x != y for x, y in zip(a, b))
