from typing import Literal, Tuple, TypeAlias

import numpy as np
import numpy.typing as npt

ColorTag: TypeAlias = Literal["R", "G", "B"]
COLOR_TAGS: Tuple[ColorTag, ColorTag, ColorTag] = ("R", "G", "B")

# m x n matrix of 8-bit intensities
ChannelMatrix: TypeAlias = npt.NDArray[np.uint8]
# m x n booleans, True = suspect or missing
MaskMatrix: TypeAlias = npt.NDArray[np.bool_]
# one mask per color channel, in R, G, B order
PixelMask: TypeAlias = Tuple[MaskMatrix, MaskMatrix, MaskMatrix]
# linearized levels 0..7
LevelVector: TypeAlias = npt.NDArray[np.int64]

# '0'/'1' characters, most significant bit first
BitString: TypeAlias = str
Nucleotides: TypeAlias = str

Coord: TypeAlias = Tuple[int, int]
# (image index, color, level)
StreamKey: TypeAlias = Tuple[int, ColorTag, int]
