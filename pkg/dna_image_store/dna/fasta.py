from __future__ import annotations

from dataclasses import dataclass
import logging
from pathlib import Path
from typing import Iterable, Iterator, List, TextIO, Union

import regex as re

from dna_image_store.exceptions import InvalidInputError
from dna_image_store.utils.oligo_id import OligoId
from dna_image_store.utils.types import Nucleotides

LOGGER = logging.getLogger(__name__)

PathLike = Union[str, Path]

_HEADER = re.compile(r"^>\s*(?P<id>\S+)(?:\s+(?P<description>.*\S))?\s*$")


@dataclass(frozen=True)
class FastaRecord:
    id: OligoId
    sequence: Nucleotides
    description: str = ""

    def __post_init__(self):
        object.__setattr__(self, "id", OligoId(self.id))


def parse_fasta(
    handle: Iterable[str],
) -> Iterator[FastaRecord]:
    """
    Parse FASTA text into records.

    Blank lines and `;` comment lines are skipped; wrapped sequences are joined.

    Raises:
        InvalidInputError: If sequence data precedes the first header or a
            header carries an invalid identifier.
    """
    header = None
    chunks: List[str] = []
    for line_number, line in enumerate(handle, start=1):
        line = line.rstrip("\r\n")
        if not line.strip() or line.startswith(";"):
            continue
        if line.startswith(">"):
            if header is not None:
                yield _make_record(header, chunks)
            header = line
            chunks = []
        elif header is None:
            raise InvalidInputError(f"Sequence data before the first header on line {line_number}.")
        else:
            chunks.append(line.strip())
    if header is not None:
        yield _make_record(header, chunks)


def _make_record(
    header: str,
    chunks: List[str],
) -> FastaRecord:
    match = _HEADER.match(header)
    if match is None:
        raise InvalidInputError(f"Malformed FASTA header '{header}'.")
    return FastaRecord(
        id=OligoId(match["id"]),
        sequence="".join(chunks).upper(),
        description=match["description"] or "",
    )


def format_fasta(
    records: Iterable[FastaRecord],
    handle: TextIO,
) -> None:
    for record in records:
        header = f">{record.id}"
        if record.description:
            header += f" {record.description}"
        handle.write(f"{header}\n{record.sequence}\n")


def read_fasta(
    path: PathLike,
) -> List[FastaRecord]:
    """
    Read every record of a FASTA file.
    """
    try:
        with open(path, "rt", encoding="ascii") as fp:
            records = list(parse_fasta(fp))
    except UnicodeDecodeError as e:
        raise InvalidInputError(f"'{path}' is not an ASCII sequence file.") from e
    LOGGER.debug(f"Read {len(records)} records from '{path}'.")
    return records


def write_fasta(
    path: PathLike,
    records: Iterable[FastaRecord],
) -> None:
    """
    Write records as FASTA, one unwrapped sequence line per record.
    """
    with open(path, "wt", encoding="ascii", newline="\n") as fp:
        format_fasta(records, fp)


def read_sequence_lines(
    path: PathLike,
) -> List[Nucleotides]:
    """
    Read a one-sequence-per-line pool; blank lines are skipped.
    """
    try:
        with open(path, "rt", encoding="ascii") as fp:
            return [line.strip().upper() for line in fp if line.strip()]
    except UnicodeDecodeError as e:
        raise InvalidInputError(f"'{path}' is not an ASCII sequence file.") from e


def write_sequence_lines(
    path: PathLike,
    sequences: Iterable[Nucleotides],
) -> None:
    with open(path, "wt", encoding="ascii", newline="\n") as fp:
        for sequence in sequences:
            fp.write(f"{sequence}\n")
