from __future__ import annotations

from typing import Any, Optional

from pydantic import GetCoreSchemaHandler
from pydantic_core import CoreSchema, core_schema
import regex as re

from dna_image_store.exceptions import InvalidInputError
from dna_image_store.utils.types import ColorTag, StreamKey


class OligoId(str):
    """
    Record identifier of an oligo or of one of its reads.

    The stored format is `img<i>_<color><level>_blk<b>`, e.g. `img0_R7_blk12`.
    Reads of an oligo append `_read<k>`: `img0_R7_blk12_read3`.

    Validation supports:
    - `str` and `OligoId` inputs; anything else raises `TypeError`.
    - A leading `>` (FASTA header marker) and surrounding whitespace are stripped.
    """

    PATTERN = re.compile(
        r"^img(?P<image>\d+)_(?P<color>[RGB])(?P<level>[0-7])_blk(?P<block>\d+)"
        r"(?:_read(?P<read>\d+))?$"
    )

    def __new__(
        cls,
        value: str,
    ) -> OligoId:
        """
        Create a new identifier with normalization and validation.

        Args:
            value (str): Identifier string, optionally prefixed with `>`.

        Returns:
            OligoId: The normalized identifier.

        Raises:
            TypeError: If `value` is not a string.
            InvalidInputError: If `value` does not follow the identifier grammar.
        """
        if isinstance(value, OligoId):
            return value
        if not isinstance(value, str):
            raise TypeError(f"Oligo identifier must be a string, got {type(value)}.")
        normalized = value.strip().lstrip(">").strip()
        if cls.PATTERN.match(normalized) is None:
            raise InvalidInputError(f"Invalid oligo identifier: '{value}'")
        return super().__new__(cls, normalized)

    @classmethod
    def build(
        cls,
        image: int,
        color: ColorTag,
        level: int,
        block: int,
        read: Optional[int] = None,
    ) -> OligoId:
        """
        Compose an identifier from its parts.

        Args:
            image (int): Image index.
            color (ColorTag): Color tag `R`, `G` or `B`.
            level (int): Intensity level 0..7.
            block (int): Block index within the (image, color, level) stream.
            read (Optional[int]): Read number, for read records only.

        Returns:
            OligoId: The composed identifier.
        """
        value = f"img{image}_{color}{level}_blk{block}"
        if read is not None:
            value += f"_read{read}"
        return cls(value)

    @property
    def _parts(self) -> re.Match:
        return self.PATTERN.match(str(self))

    @property
    def image(self) -> int:
        return int(self._parts["image"])

    @property
    def color(self) -> ColorTag:
        return self._parts["color"]

    @property
    def level(self) -> int:
        return int(self._parts["level"])

    @property
    def block(self) -> int:
        return int(self._parts["block"])

    @property
    def read(self) -> Optional[int]:
        read = self._parts["read"]
        return int(read) if read is not None else None

    @property
    def stream_key(self) -> StreamKey:
        """
        The (image, color, level) stream this record belongs to.

        Returns:
            StreamKey: The stream key.
        """
        return (self.image, self.color, self.level)

    @property
    def source(self) -> OligoId:
        """
        Identifier of the source oligo, without the read suffix.

        Returns:
            OligoId: The oligo identifier.
        """
        return OligoId.build(self.image, self.color, self.level, self.block)

    def __hash__(self) -> int:
        return str(self).__hash__()

    def __eq__(
        self,
        other: Any,
    ) -> bool:
        if isinstance(other, str):
            return str(self) == str(other).strip().lstrip(">").strip()
        return False

    @classmethod
    def __get_pydantic_core_schema__(
        cls,
        source_type: Any,
        handler: GetCoreSchemaHandler,
    ) -> CoreSchema:
        """
        Provide a Pydantic core schema that validates through `OligoId` itself.

        Args:
            source_type (Any): The source type passed by Pydantic.
            handler (GetCoreSchemaHandler): Pydantic schema handler.

        Returns:
            CoreSchema: A schema accepting strings and converting them to `OligoId`.
        """
        return core_schema.no_info_after_validator_function(
            cls,
            core_schema.str_schema(),
            serialization=core_schema.plain_serializer_function_ser_schema(str),
        )
