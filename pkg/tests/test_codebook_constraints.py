import numpy as np
import pytest

from dna_image_store.dna.codebook import ConstrainedCodebook, build_codebook
from dna_image_store.dna.constraints import (
    gc_bounds,
    gc_count,
    hamming,
    is_nucleotide_string,
    max_cg_run,
    max_homopolymer,
    satisfies_block_constraints,
)
from dna_image_store.exceptions import CapacityError, InvalidInputError

NUCLEOTIDE_BYTES = np.frombuffer(b"ACGT", dtype=np.uint8)


def _valid_words(block_length: int, start: int = 0, stop=None) -> np.ndarray:
    """
    Brute-force oracle: integer codes of the valid blocks in start..stop,
    in lexicographic order (A=0 < C=1 < G=2 < T=3, most significant first).
    """
    stop = 4**block_length if stop is None else stop
    codes = np.arange(start, stop, dtype=np.int64)
    gc = np.zeros(codes.shape, dtype=np.int64)
    run_c = np.zeros(codes.shape, dtype=np.int64)
    run_g = np.zeros(codes.shape, dtype=np.int64)
    longest = np.zeros(codes.shape, dtype=np.int64)
    for pos in range(block_length):
        digit = (codes >> (2 * (block_length - 1 - pos))) & 3
        gc += (digit == 1) | (digit == 2)
        run_c = np.where(digit == 1, run_c + 1, 0)
        run_g = np.where(digit == 2, run_g + 1, 0)
        longest = np.maximum(longest, np.maximum(run_c, run_g))
    lo, hi = gc_bounds(block_length)
    return codes[(gc >= lo) & (gc <= hi) & (longest <= 3)]


def _to_word(code: int, block_length: int) -> str:
    digits = [(code >> (2 * (block_length - 1 - p))) & 3 for p in range(block_length)]
    return NUCLEOTIDE_BYTES[digits].tobytes().decode("ascii")


def test_constraint_helpers():
    assert gc_bounds(13) == (6, 7)
    assert gc_bounds(10) == (4, 6)
    assert gc_count("ACGTGC") == 4
    assert max_cg_run("ATCCCGGA") == 3
    assert max_cg_run("ATATA") == 0
    assert max_homopolymer("ATTTTC") == 4
    assert max_homopolymer("") == 0
    assert is_nucleotide_string("ACGT")
    assert not is_nucleotide_string("ACGU")
    assert hamming("ACGT", "AGGA") == 2
    with pytest.raises(ValueError):
        hamming("A", "AC")

    # GC window and C/G run limit
    assert satisfies_block_constraints("ACGTACGTAC")
    assert not satisfies_block_constraints("AAAAAAAAAA")
    assert not satisfies_block_constraints("ACCCCATATG")
    # Runs of A and T are not limited
    assert satisfies_block_constraints("AAAAAACCCG")


def test_address_codebook_matches_brute_force(address_codebook):
    oracle = _valid_words(10)
    # Enumeration count equals the brute-force count and covers 2^18 values
    assert address_codebook.valid_count == oracle.size
    assert address_codebook.valid_count >= 1 << 18
    assert address_codebook.unrank(0) == "AAAAAACCCG"

    rng = np.random.default_rng(0)
    for index in rng.integers(0, 1 << 18, size=10_000).tolist():
        word = _to_word(int(oracle[index]), 10)
        assert address_codebook.unrank(index) == word
        assert address_codebook.rank(word) == index


def test_codewords_are_distinct_and_constrained(block_codebook):
    rng = np.random.default_rng(1)
    values = rng.choice(1 << 22, size=5000, replace=False)
    words = [block_codebook.encode_value(int(v)) for v in values]
    # Injective and every codeword meets the block constraints
    assert len(set(words)) == len(words)
    assert all(satisfies_block_constraints(w) and len(w) == 13 for w in words)

    # Lexicographic order follows value order
    first = block_codebook.codewords(0, 200)
    assert first == sorted(first)
    assert block_codebook.codewords(0, 3) == [block_codebook[i] for i in range(3)]


def test_block_round_trip(block_codebook):
    rng = np.random.default_rng(2)
    for value in rng.integers(0, 1 << 22, size=2000).tolist():
        bits = format(value, "022b")
        decoded = block_codebook.decode_block(block_codebook.encode_block(bits))
        assert decoded.bits == bits
        assert decoded.value == value
        assert not decoded.corrected

    assert block_codebook.decode_block(block_codebook.encode_value(0)).bits == "0" * 22
    top = (1 << 22) - 1
    assert block_codebook.decode_block(block_codebook.encode_value(top)).value == top


def test_decode_corrects_non_codewords(address_codebook):
    # No valid word has zero GC content, so the block must be corrected
    decoded = address_codebook.decode_block("AAAAAAAAAA")
    assert decoded.corrected
    nearest = address_codebook.unrank(decoded.value)
    assert hamming(nearest, "AAAAAAAAAA") == decoded.distance
    # Nearest codewords need at least four substitutions to reach GC 4
    assert decoded.distance == 4
    # Ties go to the lexicographically smallest codeword
    assert nearest == "AAAAAACCCG"


def test_codebook_errors(block_codebook):
    with pytest.raises(InvalidInputError):
        block_codebook.encode_block("0101")
    with pytest.raises(InvalidInputError):
        block_codebook.encode_block("2" * 22)
    with pytest.raises(InvalidInputError):
        block_codebook.encode_value(1 << 22)
    with pytest.raises(InvalidInputError):
        block_codebook.decode_block("ACGT")
    with pytest.raises(IndexError):
        block_codebook[1 << 22]
    with pytest.raises(InvalidInputError):
        block_codebook.unrank(block_codebook.valid_count)
    # Invalid words have no rank
    assert block_codebook.rank("CCCCAAAAAAAAA") is None
    assert block_codebook.rank("ACGT") is None

    # Only the two oligo geometries are offered
    with pytest.raises(InvalidInputError):
        build_codebook(16, 8)
    # A block too short to hold its payload
    with pytest.raises(CapacityError):
        ConstrainedCodebook(22, 10)


def test_codebooks_are_shared():
    assert build_codebook(18, 10) is build_codebook(18, 10)


@pytest.mark.slow
def test_block_codebook_matches_brute_force(block_codebook):
    # 4^13 words checked in chunks
    total = 0
    rng = np.random.default_rng(3)
    chunk = 1 << 22
    for start in range(0, 4**13, chunk):
        oracle = _valid_words(13, start, start + chunk)
        if oracle.size and total < block_codebook.capacity:
            offsets = rng.integers(0, oracle.size, size=20)
            for offset in offsets.tolist():
                index = total + offset
                word = _to_word(int(oracle[offset]), 13)
                assert block_codebook.rank(word) == index
                if index < block_codebook.capacity:
                    assert block_codebook.unrank(index) == word
        total += oracle.size
    assert block_codebook.valid_count == total
    assert total >= 1 << 22
