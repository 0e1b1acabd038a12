from __future__ import annotations

from dataclasses import dataclass, field
import logging
from typing import Dict, Iterable, List, Mapping, Optional, Tuple, Union

import numpy as np

from dna_image_store.channel_sim import to_codes
from dna_image_store.dna.address import ADDRESS_LENGTH, Address
from dna_image_store.dna.constraints import is_nucleotide_string
from dna_image_store.dna.oligo import OLIGO_LENGTH, PAYLOAD_BITS, parse_oligo
from dna_image_store.dna.primers import PrimerSet
from dna_image_store.exceptions import AmbiguousDecodeError, InvalidInputError
from dna_image_store.hilbert_scan import delinearize, delinearize_array
from dna_image_store.huffman import RESYNC, TERMINATOR, HuffmanTable
from dna_image_store.level_codec import LevelIndexList, _DiffState, merge_levels, resync_period
from dna_image_store.manifest import ImageEntry, PoolManifest
from dna_image_store.pixel_pipeline import LEVEL_COUNT, QuantizedChannel
from dna_image_store.utils.processing import group_entries
from dna_image_store.utils.types import (
    COLOR_TAGS,
    BitString,
    Nucleotides,
    PixelMask,
    StreamKey,
)

LOGGER = logging.getLogger(__name__)

DEFAULT_PROBE_BUDGET = 4096
# share of a run's positions claimed twice above which the whole run is masked
COLLISION_SHARE = 0.5


class AddressIndex:
    """
    Expected 13-nt addresses of a pool, searchable by Hamming distance.

    Args:
        expected (Mapping[Nucleotides, Address]): Address words and their fields.
    """

    def __init__(
        self,
        expected: Mapping[Nucleotides, Address],
    ):
        self._exact = dict(expected)
        self._words = list(self._exact)
        self._addresses = [self._exact[w] for w in self._words]
        self._codes = (
            np.stack([to_codes(w) for w in self._words])
            if self._words
            else np.zeros((0, ADDRESS_LENGTH), dtype=np.uint8)
        )

    def __len__(self) -> int:
        return len(self._words)

    def correct(
        self,
        word: Nucleotides,
    ) -> Tuple[Address, int]:
        """
        Nearest expected address.

        Returns:
            Tuple[Address, int]: The address and its Hamming distance to `word`.

        Raises:
            InvalidInputError: If `word` is not 13 nt or the index is empty.
            AmbiguousDecodeError: If several expected addresses are equally near.
        """
        exact = self._exact.get(word)
        if exact is not None:
            return exact, 0
        if len(word) != ADDRESS_LENGTH or not is_nucleotide_string(word):
            raise InvalidInputError(f"Address must be {ADDRESS_LENGTH} nt over ACGT, got '{word}'.")
        if not self._words:
            raise InvalidInputError("No expected addresses to correct against.")
        distances = (self._codes != to_codes(word)).sum(axis=1)
        best = int(distances.min())
        winners = np.flatnonzero(distances == best)
        if winners.shape[0] > 1:
            raise AmbiguousDecodeError(
                f"Address '{word}' is at distance {best} from {winners.shape[0]} expected addresses."
            )
        return self._addresses[int(winners[0])], best


def correct_identifier(
    parsed_address: Nucleotides,
    expected_set: Union[AddressIndex, Mapping[Nucleotides, Address]],
) -> Address:
    """
    Replace a read address by the unique expected address nearest to it.

    Raises:
        AmbiguousDecodeError: If the nearest expected address is not unique;
            callers discard such oligos.
    """
    if not isinstance(expected_set, AddressIndex):
        expected_set = AddressIndex(expected_set)
    address, _ = expected_set.correct(parsed_address)
    return address


@dataclass
class RecoveredStream:
    """
    Payload blocks of one (image, color, level) stream in block order.

    Args:
        key (StreamKey): (image, color, level).
        block_count (int): Blocks the encoder wrote for the stream.
        blocks (Dict[int, BitString]): Present blocks by index.
        corrected_blocks (int): Corrected 13-nt blocks among the kept copies.
    """

    key: StreamKey
    block_count: int
    blocks: Dict[int, BitString] = field(default_factory=dict)
    corrected_blocks: int = 0

    @property
    def gaps(self) -> List[int]:
        return [b for b in range(self.block_count) if b not in self.blocks]

    def segments(self) -> List[Tuple[int, BitString]]:
        """
        Runs of consecutive present blocks as (first block, concatenated bits).
        """
        runs = []
        current_start = None
        current: List[BitString] = []
        for b in range(self.block_count):
            if b in self.blocks:
                if current_start is None:
                    current_start = b
                current.append(self.blocks[b])
            elif current_start is not None:
                runs.append((current_start, "".join(current)))
                current_start, current = None, []
        if current_start is not None:
            runs.append((current_start, "".join(current)))
        return runs


@dataclass
class RecoveredStreams:
    streams: Dict[StreamKey, RecoveredStream]
    invalid: int = 0
    discarded: int = 0
    duplicates: int = 0
    corrected_addresses: int = 0
    primer_mismatches: int = 0

    @property
    def gap_count(self) -> int:
        return sum(len(s.gaps) for s in self.streams.values())

    @property
    def corrected_blocks(self) -> int:
        return sum(s.corrected_blocks for s in self.streams.values())


def recover_streams(
    pool: Iterable[Nucleotides],
    manifest: PoolManifest,
    address_index: Optional[AddressIndex] = None,
    primer_set: Optional[PrimerSet] = None,
) -> RecoveredStreams:
    """
    Route consensus oligos to their streams by corrected address.

    Oligos of the wrong length or alphabet, and oligos whose address cannot be
    corrected uniquely, are discarded and counted. When a block arrives more
    than once, the copy with fewer corrected payload blocks is kept, the first
    one seen on ties.

    Args:
        pool (Iterable[Nucleotides]): Consensus sequences.
        manifest (PoolManifest): Manifest of the encoder run.
        address_index (Optional[AddressIndex]): Prebuilt index of the manifest's addresses.
        primer_set (Optional[PrimerSet]): Primers for cross-checking levels.

    Returns:
        RecoveredStreams: Streams with present blocks and gaps.
    """
    if address_index is None:
        address_index = AddressIndex(manifest.expected_addresses())
    streams = {
        (image.index, s.color, s.level): RecoveredStream((image.index, s.color, s.level), s.block_count)
        for image in manifest.images
        for s in image.streams
    }
    result = RecoveredStreams(streams=streams)

    entries = []
    for order, sequence in enumerate(pool):
        if len(sequence) != OLIGO_LENGTH or not is_nucleotide_string(sequence):
            LOGGER.warning(f"Skipping oligo {order}: not {OLIGO_LENGTH} nt over ACGT.")
            result.invalid += 1
            continue
        parsed = parse_oligo(sequence, primer_set)
        try:
            address, distance = address_index.correct(parsed.address)
        except AmbiguousDecodeError as e:
            LOGGER.warning(f"Discarding oligo {order}: {e.message}")
            result.discarded += 1
            continue
        if distance:
            result.corrected_addresses += 1
        if parsed.primer_level is not None and parsed.primer_level != address.level:
            result.primer_mismatches += 1
        entries.append(
            {
                "stream": (address.image, address.color, address.level),
                "block": address.block,
                "corrected": parsed.corrected_blocks,
                "order": order,
                "payload": parsed.payload_bits,
            }
        )

    grouped = group_entries(
        entries,
        variables=["corrected", "order", "payload"],
        grouping_variables=["stream", "block"],
    )
    for key, blocks in grouped.items():
        stream = streams[key]
        for block, copies in blocks.items():
            corrected, _, payload = min(copies, key=lambda c: (c[0], c[1]))
            stream.blocks[block] = payload
            stream.corrected_blocks += corrected
            result.duplicates += len(copies) - 1

    LOGGER.info(
        f"Recovered {sum(len(s.blocks) for s in streams.values())} blocks, "
        f"{result.gap_count} gaps, {result.discarded} discarded, {result.duplicates} duplicates."
    )
    return result


@dataclass(frozen=True)
class StreamDecodeResult:
    """
    Outcome of decoding one stream.

    Args:
        indices (LevelIndexList): Recovered scan positions.
        dropped_symbols (int): Symbols rejected by the differential decoder.
        realigned (int): Gaps after which decoding locked onto a marker again.
        failed_segments (int): Segments whose pixels were dropped because no
            marker could be locked.
        terminated (bool): Whether the terminator was decoded.
        lock_positions (Tuple[int, ...]): Bit offset of each lock inside its segment.
        run_lengths (Tuple[int, ...]): Sizes of the kept runs that make up `indices`.
    """

    indices: LevelIndexList
    dropped_symbols: int = 0
    realigned: int = 0
    failed_segments: int = 0
    terminated: bool = True
    lock_positions: Tuple[int, ...] = ()
    run_lengths: Tuple[int, ...] = ()


class _SegmentWalker:
    """
    Speculative Huffman decoding of one segment from arbitrary bit offsets.

    Codeword matches are memoized by bit position, so walks that fall into step
    with each other share all later work.
    """

    def __init__(
        self,
        bits: BitString,
        table: HuffmanTable,
        period: int,
        limit: int,
        last: int,
        probe_budget: int,
    ):
        self.bits = bits
        self.table = table
        self.period = period
        self.limit = limit
        self.last = last
        self.probe_budget = probe_budget
        self._matches: Dict[int, Optional[Tuple[int, int]]] = {}
        self._first_lock: Dict[int, Optional[int]] = {}
        self._valid: Dict[int, bool] = {}

    def match(self, pos: int) -> Optional[Tuple[int, int]]:
        if pos not in self._matches:
            self._matches[pos] = self.table.lookup(self.bits, pos)
        return self._matches[pos]

    def _validate(self, pos: int) -> bool:
        # pos is the start of a -1 marker
        if pos in self._valid:
            return self._valid[pos]
        valid = False
        marker = self.match(pos)
        absolute = self.match(marker[1]) if marker is not None else None
        if absolute is not None and self.last < absolute[0] < self.limit:
            running = absolute[0]
            diffs = 0
            cursor = absolute[1]
            valid = True
            while True:
                m = self.match(cursor)
                if m is None or m[0] == TERMINATOR:
                    valid = diffs < self.period
                    break
                if m[0] == RESYNC:
                    following = self.match(m[1])
                    valid = diffs == self.period - 1 and (
                        following is None or following[0] > running
                    )
                    break
                running += m[0]
                diffs += 1
                if m[0] <= 0 or running >= self.limit or diffs >= self.period:
                    valid = False
                    break
                cursor = m[1]
        self._valid[pos] = valid
        return valid

    def first_lock(self, offset: int) -> Optional[int]:
        """
        Position of the first valid marker reached by decoding from `offset`.
        """
        path = []
        pos = offset
        lock = None
        for _ in range(self.probe_budget):
            if pos in self._first_lock:
                lock = self._first_lock[pos]
                break
            m = self.match(pos)
            if m is None or m[0] == TERMINATOR:
                break
            path.append(pos)
            if m[0] == RESYNC and self._validate(pos):
                lock = pos
                break
            pos = m[1]
        else:
            # budget exhausted, leave this walk unmemoized
            return None
        for p in path:
            self._first_lock[p] = lock
        return lock


def decode_stream_with_realignment(
    stream: RecoveredStream,
    table: HuffmanTable,
    pixel_count: int,
    resync_rate: float,
    probe_budget: int = DEFAULT_PROBE_BUDGET,
    bit_length: Optional[int] = None,
) -> StreamDecodeResult:
    """
    Decode a stream whose blocks may have gaps.

    Present segments before the first gap decode directly. After each gap,
    every bit offset 0..241 of the next segment is decoded speculatively for at
    most `probe_budget` symbols, looking for a `-1` marker whose absolute
    position exceeds the last recovered one and whose following run is
    plausible: strictly increasing, in bounds, exactly one resync period long
    when another marker follows, and that marker pointing further ahead. The
    validated marker with the smallest bit position wins and decoding resumes
    there. A segment without such a marker is dropped. A missing terminator at
    the end of the stream is accepted.

    Decoded runs must hold exactly one resync period of positions; runs that
    do not, or that contain an invalid difference, are dropped whole. When
    `bit_length` is known, parsing stops there and a `-2` that does not end
    exactly at it is treated as damage instead of ending the stream.

    Args:
        stream (RecoveredStream): The stream's present blocks.
        table (HuffmanTable): Huffman table of the image.
        pixel_count (int): Exclusive bound on positions.
        resync_rate (float): Resync rate the stream was encoded with.
        probe_budget (int): Symbol budget per speculative walk.
        bit_length (Optional[int]): Huffman bits the encoder wrote for the stream.

    Returns:
        StreamDecodeResult: Recovered positions and realignment statistics.
    """
    image, color, level = stream.key
    period = resync_period(resync_rate)
    state = _DiffState(limit=pixel_count, period=period)
    realigned = 0
    failed = 0
    locks = []

    for first_block, bits in stream.segments():
        if state.done:
            break
        offset = first_block * PAYLOAD_BITS
        if bit_length is not None:
            bits = bits[: max(0, bit_length - offset)]
        start = 0
        if first_block > 0:
            # every segment but the one at block 0 follows a gap
            walker = _SegmentWalker(bits, table, period, pixel_count, state.last, probe_budget)
            candidates = [
                lock
                for lock in (walker.first_lock(o) for o in range(min(PAYLOAD_BITS, len(bits))))
                if lock is not None
            ]
            if not candidates:
                failed += 1
                LOGGER.warning(
                    f"Stream img{image}_{color}{level}: no marker lock in segment at block {first_block}."
                )
                continue
            start = min(candidates)
            realigned += 1
            locks.append(start)
            LOGGER.debug(
                f"Stream img{image}_{color}{level}: locked at bit {start} of block {first_block}."
            )
        pos = start
        while not state.done:
            m = table.lookup(bits, pos)
            if m is None:
                break
            symbol, pos = m
            if symbol == TERMINATOR and bit_length is not None and offset + pos != bit_length:
                state.reject_symbol()
            else:
                state.feed(symbol)
        state.end_segment()

    state.finish()
    if state.dropped:
        LOGGER.debug(f"Stream img{image}_{color}{level}: dropped {state.dropped} symbols.")
    return StreamDecodeResult(
        indices=LevelIndexList(color, level, tuple(state.indices)),
        dropped_symbols=state.dropped,
        realigned=realigned,
        failed_segments=failed,
        terminated=state.done,
        lock_positions=tuple(locks),
        run_lengths=tuple(state.run_lengths),
    )


@dataclass(frozen=True)
class ReconstructedImage:
    """
    Quantized channels of one decoded image with their unknown-pixel masks.
    """

    index: int
    channels: Tuple[QuantizedChannel, QuantizedChannel, QuantizedChannel]
    masks: PixelMask
    ignored_indices: int = 0

    @property
    def masked_pixels(self) -> int:
        return int(sum(m.sum() for m in self.masks))


def _collided_runs(
    decoded: StreamDecodeResult,
    unknown: np.ndarray,
) -> List[np.ndarray]:
    """
    Runs of a decoded stream that mostly land on positions other levels claim too.
    """
    lengths = decoded.run_lengths
    indices = np.asarray(decoded.indices.indices, dtype=np.int64)
    if not lengths or sum(lengths) != indices.size:
        return []
    collided = []
    for run in np.split(indices, np.cumsum(lengths)[:-1]):
        run = run[(run >= 0) & (run < unknown.size)]
        if run.size and unknown[run].mean() >= COLLISION_SHARE:
            collided.append(run)
    return collided


def reconstruct_image(
    streams: Mapping[StreamKey, Union[StreamDecodeResult, LevelIndexList]],
    image: ImageEntry,
) -> ReconstructedImage:
    """
    Merge the level lists of each channel and map them back onto the grid.

    Streams that are absent from `streams` count as empty, so their pixels end
    up unassigned and masked. A decoded run whose positions mostly collide
    with other levels is taken for a shifted run from a damaged block, and all
    of its positions are masked, including the ones nobody else claims.

    Args:
        streams (Mapping[StreamKey, Union[StreamDecodeResult, LevelIndexList]]):
            Decoded streams keyed by (image, color, level).
        image (ImageEntry): Manifest entry of the image.

    Returns:
        ReconstructedImage: Channels and masks.
    """
    channels = []
    masks = []
    ignored = 0
    for color in COLOR_TAGS:
        lists = []
        results = []
        for level in range(LEVEL_COUNT):
            decoded = streams.get((image.index, color, level))
            if decoded is None:
                continue
            if isinstance(decoded, StreamDecodeResult):
                results.append(decoded)
                decoded = decoded.indices
            lists.append(decoded)
        merged = merge_levels(lists, image.pixel_count)
        ignored += merged.ignored
        unknown = merged.unknown.copy()
        collided = [run for decoded in results for run in _collided_runs(decoded, merged.unknown)]
        for run in collided:
            unknown[run] = True
        if collided:
            LOGGER.debug(f"Image {image.index} {color}: masked {len(collided)} colliding runs.")
        channels.append(delinearize(merged.vector, image.height, image.width, color))
        masks.append(delinearize_array(unknown, image.height, image.width))
    return ReconstructedImage(image.index, tuple(channels), tuple(masks), ignored)


def decode_streams(
    recovered: RecoveredStreams,
    manifest: PoolManifest,
    probe_budget: int = DEFAULT_PROBE_BUDGET,
) -> Dict[StreamKey, StreamDecodeResult]:
    """
    Decode every recovered stream of a pool with its image's Huffman table.
    """
    results = {}
    for image in manifest.images:
        table = image.huffman_table()
        for entry in image.streams:
            key = (image.index, entry.color, entry.level)
            results[key] = decode_stream_with_realignment(
                recovered.streams[key],
                table,
                image.pixel_count,
                manifest.resync_rate,
                probe_budget,
                entry.bit_length,
            )
    return results
