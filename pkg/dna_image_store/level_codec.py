from __future__ import annotations

from bisect import bisect_left
from dataclasses import dataclass
import logging
import math
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from dna_image_store.exceptions import InvalidInputError
from dna_image_store.huffman import RESYNC, TERMINATOR
from dna_image_store.pixel_pipeline import LEVEL_COUNT
from dna_image_store.utils.types import COLOR_TAGS, ColorTag, LevelVector, MaskMatrix

LOGGER = logging.getLogger(__name__)


@dataclass(frozen=True)
class LevelIndexList:
    """
    Scan positions of one channel that hold one intensity level.

    Args:
        color_tag (ColorTag): Channel of the list.
        level (int): Intensity level 0..7.
        indices (Tuple[int, ...]): Positions in scan order, strictly increasing
            for lists produced by the encoder.
    """

    color_tag: ColorTag
    level: int
    indices: Tuple[int, ...] = ()

    def __post_init__(self):
        if self.color_tag not in COLOR_TAGS:
            raise InvalidInputError(f"Unknown color tag '{self.color_tag}'.")
        if not 0 <= self.level < LEVEL_COUNT:
            raise InvalidInputError(f"Level must lie in 0..7, got {self.level}.")
        object.__setattr__(self, "indices", tuple(int(i) for i in self.indices))

    def __len__(self) -> int:
        return len(self.indices)

    def is_strictly_increasing(self) -> bool:
        return all(a < b for a, b in zip(self.indices, self.indices[1:]))


@dataclass(frozen=True)
class DiffStream:
    """
    Differentially coded positions of one (color, level) stream.

    Absolute positions follow a `-1` marker; other data symbols are positive
    differences to the previous position. A single `-2` ends the stream.
    Streams read back from a damaged pool may violate these rules.
    """

    color_tag: ColorTag
    level: int
    symbols: Tuple[int, ...] = (TERMINATOR,)

    def __post_init__(self):
        object.__setattr__(self, "symbols", tuple(int(s) for s in self.symbols))

    def __iter__(self):
        return iter(self.symbols)

    def __len__(self) -> int:
        return len(self.symbols)

    @property
    def marker_count(self) -> int:
        return sum(1 for s in self.symbols if s == RESYNC)


@dataclass(frozen=True)
class MergeResult:
    """
    Output of `merge_levels`.

    Args:
        vector (LevelVector): Level of every scan position; unclaimed positions hold 0.
        unknown (np.ndarray): True where a position was claimed by zero or several levels.
        ignored (int): Number of out-of-range indices that were skipped.
    """

    vector: LevelVector
    unknown: np.ndarray
    ignored: int = 0

    def __iter__(self):
        # unpacks as (vector, unknown)
        return iter((self.vector, self.unknown))


@dataclass(frozen=True)
class DiffDecodeResult:
    """
    Output of `diff_decode`: recovered indices and the number of symbols dropped.

    `run_lengths` splits `indices` into the kept runs, one per marker.
    """

    indices: LevelIndexList
    dropped: int = 0
    terminated: bool = True
    run_lengths: Tuple[int, ...] = ()


def resync_period(
    resync_rate: float,
) -> int:
    """
    Number of positions between two absolute values, ceil(1 / rate).

    Raises:
        InvalidInputError: If the rate is not in (0, 1].
    """
    if not 0 < resync_rate <= 1:
        raise InvalidInputError(f"Resync rate must lie in (0, 1], got {resync_rate}.")
    # round first so that 1/0.5 stays 2 and not 2.0000000000000004
    return max(1, math.ceil(round(1.0 / resync_rate, 9)))


def partition_levels(
    vector: LevelVector,
    color_tag: ColorTag = "R",
) -> List[LevelIndexList]:
    """
    Split a scan-ordered level vector into the eight per-level position lists.

    Args:
        vector (LevelVector): Levels 0..7 in scan order.
        color_tag (ColorTag): Channel of the vector.

    Returns:
        List[LevelIndexList]: Lists for levels 0..7, each in increasing order.

    Raises:
        InvalidInputError: If a value lies outside 0..7.
    """
    values = np.asarray(vector)
    if values.size and (values.min() < 0 or values.max() >= LEVEL_COUNT):
        raise InvalidInputError("Level vector values must lie in 0..7.")
    return [
        LevelIndexList(color_tag, level, tuple(np.flatnonzero(values == level).tolist()))
        for level in range(LEVEL_COUNT)
    ]


def merge_levels(
    lists: Sequence[LevelIndexList],
    length: int,
) -> MergeResult:
    """
    Rebuild a level vector from per-level position lists, tolerating loss.

    Positions claimed by exactly one level receive it. Unclaimed positions get
    level 0, and positions claimed by several levels get the lowest claiming
    level; both are flagged unknown. Indices outside 0..length-1 are ignored.

    Args:
        lists (Sequence[LevelIndexList]): Up to one list per level.
        length (int): Vector length m * n.

    Returns:
        MergeResult: Vector, unknown mask and count of ignored indices.
    """
    claims = np.zeros(length, dtype=np.int64)
    assigned = np.zeros(length, dtype=np.int64)
    ignored = 0
    # highest level first so the lowest claiming level is written last
    for level_list in sorted(lists, key=lambda l: l.level, reverse=True):
        indices = np.asarray(level_list.indices, dtype=np.int64)
        in_range = (indices >= 0) & (indices < length)
        ignored += int(np.count_nonzero(~in_range))
        indices = np.unique(indices[in_range])
        claims[indices] += 1
        assigned[indices] = level_list.level

    if ignored:
        LOGGER.debug(f"Ignored {ignored} out-of-range indices while merging levels.")
    unknown: MaskMatrix = claims != 1
    vector = np.where(claims == 0, 0, assigned)
    return MergeResult(vector=vector, unknown=unknown, ignored=ignored)


def diff_encode(
    level_list: LevelIndexList,
    resync_rate: float,
) -> DiffStream:
    """
    Differentially encode a position list with periodic absolute values.

    Position k of the list is written as `-1, x_k` when k is a multiple of the
    resync period and as `x_k - x_{k-1}` otherwise. A `-2` closes the stream.

    Args:
        level_list (LevelIndexList): Strictly increasing positions.
        resync_rate (float): Fraction of positions written as absolute values.

    Returns:
        DiffStream: The coded stream.

    Raises:
        InvalidInputError: If the positions are not strictly increasing or
            the rate is out of range.
    """
    if not level_list.is_strictly_increasing():
        raise InvalidInputError(
            f"Positions of {level_list.color_tag}{level_list.level} are not strictly increasing."
        )
    period = resync_period(resync_rate)
    symbols = []
    previous = 0
    for k, index in enumerate(level_list.indices):
        if k % period == 0:
            symbols.extend((RESYNC, index))
        else:
            symbols.append(index - previous)
        previous = index
    symbols.append(TERMINATOR)
    return DiffStream(level_list.color_tag, level_list.level, tuple(symbols))


class _DiffState:
    """
    Incremental differential decoder shared by `diff_decode` and stream realignment.

    Symbols are buffered per run, a `-1` marker with its absolute position and
    the differences after it. Runs are only judged once they close, and the
    final positions come from the heaviest chain of runs whose positions keep
    increasing, so one corrupted absolute value cannot hide the runs after it.

    Args:
        limit (Optional[int]): Exclusive upper bound on positions, if known.
        last (int): Positions must exceed this value, -1 for none.
        period (Optional[int]): Resync period of the stream. When known, a run
            closed by the next marker must hold exactly `period` positions and a
            run with an invalid difference is dropped whole.
    """

    def __init__(
        self,
        limit: Optional[int] = None,
        last: int = -1,
        period: Optional[int] = None,
    ):
        self.limit = limit
        self.floor = last
        self.period = period
        self.runs: List[Tuple[int, ...]] = []
        self.indices: List[int] = []
        self.run_lengths: List[int] = []
        self.expect_absolute = False
        self.dropped = 0
        self.done = False
        self._run: Optional[List[int]] = None
        self._finished = False

    def _in_bounds(self, index: int) -> bool:
        return index >= 0 and (self.limit is None or index < self.limit)

    def _close_run(
        self,
        at_marker: bool = False,
    ) -> None:
        run, self._run = self._run, None
        if not run:
            return
        if at_marker and self.period is not None and len(run) != self.period:
            self.dropped += len(run)
            return
        self.runs.append(tuple(run))

    def feed(
        self,
        symbol: int,
    ) -> None:
        if self.done:
            return
        if symbol == TERMINATOR:
            self._close_run()
            self.done = True
        elif symbol == RESYNC:
            if self.expect_absolute:
                self.dropped += 1
            self._close_run(at_marker=True)
            self.expect_absolute = True
        elif self.expect_absolute:
            self.expect_absolute = False
            if self.floor < symbol and self._in_bounds(symbol):
                self._run = [symbol]
            else:
                self.dropped += 1
        elif self._run is None:
            # wait for the next marker
            self.dropped += 1
        elif (
            symbol > 0
            and self._in_bounds(self._run[-1] + symbol)
            and (self.period is None or len(self._run) < self.period)
        ):
            self._run.append(self._run[-1] + symbol)
        elif self.period is not None:
            self.dropped += len(self._run) + 1
            self._run = None
        else:
            self._close_run()
            self.dropped += 1

    def reject_symbol(self) -> None:
        """
        Count a symbol that cannot occur here, such as a terminator before the
        stream's end. With a known period the open run is dropped.
        """
        self.dropped += 1
        if self.period is not None and self._run is not None:
            self.dropped += len(self._run)
            self._run = None
        elif self._run is not None:
            self._close_run()
        self.expect_absolute = False

    def end_segment(self) -> None:
        """
        Keep the open run as cut by a gap; decoding resumes at the next marker.
        """
        self._close_run()
        self.expect_absolute = False

    def _chain(self) -> List[int]:
        """
        Indices of the runs in the heaviest chain, weighted by positions, in
        which every run starts after the previous one ends. Earlier runs win ties.
        """
        if not self.runs:
            return []
        ends = sorted({run[-1] for run in self.runs})
        empty = (0, 1)
        tree = [empty] * (len(ends) + 1)
        best: List[Tuple[int, int]] = []
        previous: List[int] = []
        for j, run in enumerate(self.runs):
            i = bisect_left(ends, run[0])
            found = empty
            while i > 0:
                found = max(found, tree[i])
                i -= i & -i
            previous.append(-found[1] if found != empty else -1)
            weight = found[0] + len(run)
            best.append((weight, -j))
            i = bisect_left(ends, run[-1]) + 1
            while i <= len(ends):
                tree[i] = max(tree[i], (weight, -j))
                i += i & -i
        j = -max(best)[1]
        chain = []
        while j >= 0:
            chain.append(j)
            j = previous[j]
        return chain[::-1]

    @property
    def last(self) -> int:
        """
        Last position of the current best chain, or the lower bound.
        """
        chain = self._chain()
        return self.runs[chain[-1]][-1] if chain else self.floor

    def finish(self) -> _DiffState:
        if self._finished:
            return self
        self._finished = True
        self._close_run()
        chain = self._chain()
        selected = set(chain)
        for j, run in enumerate(self.runs):
            if j in selected:
                self.indices.extend(run)
                self.run_lengths.append(len(run))
            else:
                self.dropped += len(run)
        return self

    def feed_all(
        self,
        symbols: Iterable[int],
    ) -> _DiffState:
        for symbol in symbols:
            self.feed(symbol)
            if self.done:
                break
        return self.finish()


def diff_decode(
    stream: DiffStream,
    limit: Optional[int] = None,
    resync_rate: Optional[float] = None,
) -> DiffDecodeResult:
    """
    Recover positions from a differential stream.

    Clean streams decode exactly. Decoding works run by run: an invalid symbol
    (a non-positive difference, an out-of-bounds position or an absolute value
    after a marker that is out of range) drops symbols up to the next `-1`
    marker instead of guessing. Of the surviving runs, the heaviest chain with
    increasing positions is kept, so a wrong absolute value costs only its own
    run.

    Args:
        stream (DiffStream): The stream, possibly damaged.
        limit (Optional[int]): Exclusive upper bound on positions, if known.
        resync_rate (Optional[float]): Rate the stream was encoded with. When
            given, runs must match the resync period and runs holding an invalid
            difference are dropped whole instead of truncated.

    Returns:
        DiffDecodeResult: Recovered positions and the count of dropped symbols.
    """
    period = resync_period(resync_rate) if resync_rate is not None else None
    state = _DiffState(limit=limit, period=period).feed_all(stream.symbols)
    if state.dropped:
        LOGGER.debug(
            f"Dropped {state.dropped} symbols while decoding {stream.color_tag}{stream.level}."
        )
    return DiffDecodeResult(
        indices=LevelIndexList(stream.color_tag, stream.level, tuple(state.indices)),
        dropped=state.dropped,
        terminated=state.done,
        run_lengths=tuple(state.run_lengths),
    )


def encode_channel_streams(
    vector: LevelVector,
    color_tag: ColorTag,
    resync_rate: float,
) -> List[DiffStream]:
    """
    Partition a scan-ordered channel and encode all eight level streams.
    """
    return [diff_encode(l, resync_rate) for l in partition_levels(vector, color_tag)]
