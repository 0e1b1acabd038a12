from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations, product
import logging
from typing import Iterator, List, Optional

from dna_image_store.dna.constraints import (
    MAX_CG_RUN,
    NUCLEOTIDES,
    gc_bounds,
    is_nucleotide_string,
)
from dna_image_store.exceptions import CapacityError, InvalidInputError
from dna_image_store.utils.types import BitString, Nucleotides

SUPPORTED_GEOMETRIES = {(18, 10), (22, 13)}


@dataclass(frozen=True)
class DecodedBlock:
    """
    Result of decoding one nucleotide block.

    Args:
        bits (BitString): Recovered payload bits.
        corrected (bool): Whether the block was not a codeword and got mapped
            to its nearest codeword.
        distance (int): Hamming distance between the block and that codeword.
    """

    bits: BitString
    corrected: bool = False
    distance: int = 0

    @property
    def value(self) -> int:
        return int(self.bits, 2)


class ConstrainedCodebook:
    """
    Enumerative code between fixed-width bit strings and constrained nucleotide blocks.

    Valid blocks have a GC count inside [ceil(0.4 L), floor(0.6 L)] and no run of
    C or of G longer than three. The codeword of value v is the v-th valid block
    in lexicographic order (A < C < G < T). Ranking and unranking count the valid
    completions of a prefix, so the codebook itself is never stored.

    Args:
        payload_bits (int): Bits per block.
        block_length (int): Nucleotides per block.
        logger (Optional[logging.Logger]): Logger to use.

    Raises:
        CapacityError: If fewer than 2^payload_bits valid blocks exist.
    """

    def __init__(
        self,
        payload_bits: int,
        block_length: int,
        logger: Optional[logging.Logger] = None,
    ):
        if payload_bits < 1 or block_length < 1:
            raise InvalidInputError(
                f"Invalid codebook geometry ({payload_bits}, {block_length})."
            )
        self._logger = logger or logging.getLogger(self.__class__.__name__)
        self.payload_bits = payload_bits
        self.block_length = block_length
        self.gc_min, self.gc_max = gc_bounds(block_length)
        self._completions = lru_cache(maxsize=None)(self._count_completions)

        self.valid_count = self._completions(block_length, 0, "", 0)
        if self.valid_count < self.capacity:
            self._logger.error(
                f"Codebook ({payload_bits}, {block_length}) holds only {self.valid_count} words."
            )
            raise CapacityError(
                f"Only {self.valid_count} valid {block_length}-nt blocks exist, "
                f"{self.capacity} are needed for {payload_bits} bits."
            )
        self._logger.debug(
            f"Codebook ({payload_bits}, {block_length}): {self.valid_count} valid words, "
            f"GC window {self.gc_min}..{self.gc_max}."
        )

    @property
    def capacity(self) -> int:
        return 1 << self.payload_bits

    def _step(
        self,
        symbol: str,
        gc: int,
        last: str,
        run: int,
    ) -> Optional[tuple]:
        if symbol in "CG":
            gc += 1
            if gc > self.gc_max:
                return None
        run = run + 1 if symbol == last else 1
        if symbol in "CG" and run > MAX_CG_RUN:
            return None
        return gc, symbol, run

    def _count_completions(
        self,
        remaining: int,
        gc: int,
        last: str,
        run: int,
    ) -> int:
        if gc + remaining < self.gc_min:
            return 0
        if remaining == 0:
            return 1
        total = 0
        for symbol in NUCLEOTIDES:
            state = self._step(symbol, gc, last, run)
            if state is not None:
                total += self._completions(remaining - 1, *state)
        return total

    def rank(
        self,
        word: Nucleotides,
    ) -> Optional[int]:
        """
        Lexicographic position of a valid block among all valid blocks.

        Returns:
            Optional[int]: The rank, or None if `word` violates the constraints.
        """
        if len(word) != self.block_length or not is_nucleotide_string(word):
            return None
        index = 0
        gc, last, run = 0, "", 0
        for pos, symbol in enumerate(word):
            remaining = self.block_length - pos - 1
            for smaller in NUCLEOTIDES[: NUCLEOTIDES.index(symbol)]:
                state = self._step(smaller, gc, last, run)
                if state is not None:
                    index += self._completions(remaining, *state)
            state = self._step(symbol, gc, last, run)
            if state is None:
                return None
            gc, last, run = state
        return index if gc >= self.gc_min else None

    def unrank(
        self,
        index: int,
    ) -> Nucleotides:
        """
        The valid block at lexicographic position `index`.

        Raises:
            InvalidInputError: If `index` is outside 0..valid_count-1.
        """
        if not 0 <= index < self.valid_count:
            raise InvalidInputError(
                f"Codeword index {index} outside 0..{self.valid_count - 1}."
            )
        word = []
        gc, last, run = 0, "", 0
        for pos in range(self.block_length):
            remaining = self.block_length - pos - 1
            for symbol in NUCLEOTIDES:
                state = self._step(symbol, gc, last, run)
                if state is None:
                    continue
                count = self._completions(remaining, *state)
                if index < count:
                    word.append(symbol)
                    gc, last, run = state
                    break
                index -= count
        return "".join(word)

    def __len__(self) -> int:
        return self.capacity

    def __getitem__(
        self,
        index: int,
    ) -> Nucleotides:
        if not 0 <= index < self.capacity:
            raise IndexError(f"Codeword index {index} outside the code.")
        return self.unrank(index)

    def encode_value(
        self,
        value: int,
    ) -> Nucleotides:
        if not 0 <= value < self.capacity:
            raise InvalidInputError(
                f"Value {value} does not fit in {self.payload_bits} bits."
            )
        return self.unrank(value)

    def encode_block(
        self,
        bits: BitString,
    ) -> Nucleotides:
        """
        Map a bit string of width `payload_bits` to its codeword.

        Raises:
            InvalidInputError: If the width is wrong or the string is not binary.
        """
        if len(bits) != self.payload_bits or bits.strip("01"):
            raise InvalidInputError(
                f"Expected {self.payload_bits} bits, got '{bits}'."
            )
        return self.unrank(int(bits, 2))

    def _in_code(
        self,
        word: Nucleotides,
    ) -> Optional[int]:
        index = self.rank(word)
        return index if index is not None and index < self.capacity else None

    def _neighbors(
        self,
        word: Nucleotides,
        radius: int,
    ) -> Iterator[Nucleotides]:
        for positions in combinations(range(self.block_length), radius):
            choices = [
                [s for s in NUCLEOTIDES if s != word[p]] for p in positions
            ]
            for replacement in product(*choices):
                candidate = list(word)
                for p, s in zip(positions, replacement):
                    candidate[p] = s
                yield "".join(candidate)

    def decode_block(
        self,
        word: Nucleotides,
    ) -> DecodedBlock:
        """
        Map a block back to its bits, correcting non-codewords.

        Codewords decode exactly. Any other block of the right length is mapped
        to the nearest codeword by Hamming distance, the lexicographically
        smallest one on ties, and flagged as corrected.

        Raises:
            InvalidInputError: If the block has the wrong length.
        """
        if len(word) != self.block_length:
            raise InvalidInputError(
                f"Expected a {self.block_length}-nt block, got {len(word)} nt."
            )
        index = self._in_code(word)
        if index is not None:
            return DecodedBlock(format(index, f"0{self.payload_bits}b"))

        for radius in range(1, self.block_length + 1):
            best = None
            for candidate in self._neighbors(word, radius):
                index = self._in_code(candidate)
                if index is not None and (best is None or candidate < best[0]):
                    best = (candidate, index)
            if best is not None:
                return DecodedBlock(
                    format(best[1], f"0{self.payload_bits}b"),
                    corrected=True,
                    distance=radius,
                )
        raise CapacityError("Codebook holds no codewords.")

    def codewords(
        self,
        start: int = 0,
        stop: Optional[int] = None,
    ) -> List[Nucleotides]:
        """
        Codewords of values `start`..`stop - 1`, in order.
        """
        stop = self.capacity if stop is None else min(stop, self.capacity)
        return [self.unrank(i) for i in range(start, stop)]


@lru_cache(maxsize=None)
def get_codebook(
    payload_bits: int,
    block_length: int,
) -> ConstrainedCodebook:
    """
    Shared, memoized codebook of an arbitrary geometry.
    """
    return ConstrainedCodebook(payload_bits, block_length)


def build_codebook(
    payload_bits: int,
    block_length: int,
) -> ConstrainedCodebook:
    """
    Codebook of one of the two oligo geometries: 18 bits into 10 nt (addresses)
    or 22 bits into 13 nt (payload blocks).

    Raises:
        InvalidInputError: For any other geometry.
        CapacityError: If the geometry cannot hold 2^payload_bits words.
    """
    if (payload_bits, block_length) not in SUPPORTED_GEOMETRIES:
        raise InvalidInputError(
            f"Unsupported codebook geometry ({payload_bits}, {block_length}); "
            f"expected one of {sorted(SUPPORTED_GEOMETRIES)}."
        )
    return get_codebook(payload_bits, block_length)
