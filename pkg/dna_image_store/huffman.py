from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
import heapq
import logging
import math
from typing import Dict, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple

from dna_image_store.exceptions import InvalidInputError
from dna_image_store.utils.types import BitString

LOGGER = logging.getLogger(__name__)

TERMINATOR = -2
RESYNC = -1


@dataclass(frozen=True)
class HuffmanTable:
    """
    Canonical prefix-free code over integer symbols.

    Only the code lengths are stored; codewords are derived by assigning
    consecutive integers in (length, symbol) order, most significant bit first.

    Args:
        lengths (Mapping[int, int]): Symbol to code length in bits.
    """

    lengths: Mapping[int, int]
    codes: Dict[int, BitString] = field(init=False, repr=False)
    _decode: Dict[BitString, int] = field(init=False, repr=False)

    def __post_init__(self):
        if not self.lengths:
            raise InvalidInputError("A Huffman table needs at least one symbol.")
        for symbol, length in self.lengths.items():
            if symbol < TERMINATOR:
                raise InvalidInputError(f"Invalid stream symbol {symbol}.")
            if length < 1:
                raise InvalidInputError(
                    f"Code length of symbol {symbol} must be positive, got {length}."
                )
        if self.kraft_sum() > 1:
            raise InvalidInputError(
                f"Code lengths violate the Kraft inequality (sum {self.kraft_sum()})."
            )

        codes = {}
        canon = 0
        prev_len = 0
        for symbol, length in sorted(self.lengths.items(), key=lambda x: (x[1], x[0])):
            if length > prev_len:
                canon <<= length - prev_len
                prev_len = length
            codes[symbol] = format(canon, f"0{length}b")
            canon += 1
        object.__setattr__(self, "lengths", dict(self.lengths))
        object.__setattr__(self, "codes", codes)
        object.__setattr__(self, "_decode", {code: s for s, code in codes.items()})

    @classmethod
    def from_canonical(
        cls,
        symbols: Sequence[int],
        lengths: Sequence[int],
    ) -> HuffmanTable:
        """
        Rebuild a table from its serialized form.

        Args:
            symbols (Sequence[int]): Symbols in ascending order.
            lengths (Sequence[int]): Code length of each symbol.

        Returns:
            HuffmanTable: The table.

        Raises:
            InvalidInputError: If the lists differ in length or hold duplicates.
        """
        if len(symbols) != len(lengths):
            raise InvalidInputError(
                f"Got {len(symbols)} symbols but {len(lengths)} code lengths."
            )
        if len(set(symbols)) != len(symbols):
            raise InvalidInputError("Duplicate symbols in Huffman table.")
        return cls(dict(zip(symbols, lengths)))

    def to_canonical(self) -> Tuple[List[int], List[int]]:
        """
        Serialized form: ascending symbols and their code lengths.
        """
        symbols = sorted(self.lengths)
        return symbols, [self.lengths[s] for s in symbols]

    @property
    def min_length(self) -> int:
        return min(self.lengths.values())

    @property
    def max_length(self) -> int:
        return max(self.lengths.values())

    def kraft_sum(self) -> float:
        return sum(2.0**-length for length in self.lengths.values())

    def lookup(
        self,
        bits: BitString,
        pos: int,
    ) -> Optional[Tuple[int, int]]:
        """
        Match one codeword at `pos`.

        Returns:
            Optional[Tuple[int, int]]: (symbol, position after the codeword), or
            None when no codeword starts at `pos`.
        """
        for length in range(self.min_length, self.max_length + 1):
            end = pos + length
            if end > len(bits):
                return None
            symbol = self._decode.get(bits[pos:end])
            if symbol is not None:
                return symbol, end
        return None


def build_huffman(
    streams: Iterable[Sequence[int]],
) -> HuffmanTable:
    """
    Build one canonical Huffman table over every symbol of the given streams.

    Ties between equal weights are broken by insertion order after sorting the
    symbols, so the same input always yields the same table. A single-symbol
    alphabet gets a 1-bit code.

    Args:
        streams (Iterable[Sequence[int]]): Differential streams of one image.

    Returns:
        HuffmanTable: The table.

    Raises:
        InvalidInputError: If the streams hold no symbols.
    """
    counts = Counter()
    for stream in streams:
        counts.update(stream)
    if not counts:
        raise InvalidInputError("Cannot build a Huffman table without symbols.")

    if len(counts) == 1:
        return HuffmanTable({next(iter(counts)): 1})

    # heap entries: (weight, sequence, symbols under this node)
    heap = [(count, i, [symbol]) for i, (symbol, count) in enumerate(sorted(counts.items()))]
    heapq.heapify(heap)
    sequence = len(heap)
    lengths = {symbol: 0 for symbol in counts}
    while len(heap) > 1:
        weight_a, _, symbols_a = heapq.heappop(heap)
        weight_b, _, symbols_b = heapq.heappop(heap)
        for symbol in symbols_a + symbols_b:
            lengths[symbol] += 1
        heapq.heappush(heap, (weight_a + weight_b, sequence, symbols_a + symbols_b))
        sequence += 1

    LOGGER.debug(
        f"Huffman table over {len(lengths)} symbols, lengths {min(lengths.values())}..{max(lengths.values())}."
    )
    return HuffmanTable(lengths)


def huffman_encode(
    symbols: Iterable[int],
    table: HuffmanTable,
) -> BitString:
    """
    Concatenate the codewords of a symbol sequence.

    Raises:
        InvalidInputError: If a symbol is not covered by the table.
    """
    out = []
    for symbol in symbols:
        code = table.codes.get(symbol)
        if code is None:
            raise InvalidInputError(f"Symbol {symbol} is not in the Huffman table.")
        out.append(code)
    return "".join(out)


def iter_symbols(
    bits: BitString,
    table: HuffmanTable,
    start: int = 0,
) -> Iterator[Tuple[int, int]]:
    """
    Decode codewords greedily from `start`.

    Yields (symbol, end position) pairs. Stops silently at the end of the data
    or at a bit pattern that no codeword matches; it does not stop at the
    terminator.
    """
    pos = start
    while True:
        match = table.lookup(bits, pos)
        if match is None:
            return
        yield match
        pos = match[1]


def huffman_decode(
    bits: BitString,
    table: HuffmanTable,
) -> List[int]:
    """
    Decode a differential stream, stopping after the terminator.

    Bits after the terminator are padding and ignored.

    Args:
        bits (BitString): Encoded stream.
        table (HuffmanTable): Code table.

    Returns:
        List[int]: Symbols including the trailing terminator.

    Raises:
        InvalidInputError: If the data ends before a terminator is decoded.
    """
    symbols = []
    for symbol, _ in iter_symbols(bits, table):
        symbols.append(symbol)
        if symbol == TERMINATOR:
            return symbols
    raise InvalidInputError(
        f"Bitstream ended after {len(symbols)} symbols without a terminator."
    )


def empirical_entropy(
    counts: Mapping[int, int],
) -> float:
    """
    Shannon entropy in bits per symbol of a frequency table.
    """
    total = sum(counts.values())
    if total == 0:
        return 0.0
    return -sum(c / total * math.log2(c / total) for c in counts.values() if c)


def mean_code_length(
    counts: Mapping[int, int],
    table: HuffmanTable,
) -> float:
    """
    Frequency-weighted mean codeword length in bits per symbol.
    """
    total = sum(counts.values())
    if total == 0:
        return 0.0
    return sum(c * table.lengths[s] for s, c in counts.items()) / total
