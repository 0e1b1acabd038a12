import numpy as np
import pytest

from dna_image_store.exceptions import InvalidInputError
from dna_image_store.pixel_pipeline import (
    QuantizedChannel,
    RgbImage,
    combine_channels,
    dequantize_channel,
    dequantize_image,
    quantize_channel,
    quantize_image,
    split_channels,
)


def test_split_channels():
    image = RgbImage(np.array([[[10, 20, 30]]], dtype=np.uint8))
    red, green, blue = split_channels(image)
    # Positional projection of a single pixel
    assert red.tolist() == [[10]]
    assert green.tolist() == [[20]]
    assert blue.tolist() == [[30]]

    black = RgbImage(np.zeros((4, 5, 3), dtype=np.uint8))
    # All-black image gives three zero planes
    assert all(not c.any() for c in split_channels(black))


def test_split_combine_identity(ramp_image):
    # Recombining the planes must give back the image
    assert combine_channels(*split_channels(ramp_image)) == ramp_image

    small = RgbImage(np.arange(18, dtype=np.uint8).reshape(2, 3, 3))
    assert combine_channels(*split_channels(small)) == small

    # Planes are copies, not views
    red, _, _ = split_channels(small)
    red[0, 0] = 200
    assert small.pixels[0, 0, 0] == 0


def test_combine_shape_mismatch():
    with pytest.raises(InvalidInputError):
        combine_channels(np.zeros((2, 2)), np.zeros((2, 2)), np.zeros((2, 3)))


def test_grayscale_promotion():
    gray = RgbImage(np.array([[0, 128], [255, 7]], dtype=np.uint8))
    # A single plane is replicated into three identical channels
    assert gray.pixels.shape == (2, 2, 3)
    red, green, blue = split_channels(gray)
    assert np.array_equal(red, green) and np.array_equal(green, blue)

    single_band = RgbImage(np.full((3, 4, 1), 9, dtype=np.uint8))
    assert single_band.pixels.shape == (3, 4, 3)


def test_invalid_images():
    # Empty, wrongly shaped and out-of-range inputs are rejected
    with pytest.raises(InvalidInputError):
        RgbImage(np.zeros((0, 4, 3)))
    with pytest.raises(InvalidInputError):
        RgbImage(np.zeros((2, 2, 4)))
    with pytest.raises(InvalidInputError):
        RgbImage(np.full((2, 2, 3), 256))


def test_quantize_examples():
    values = np.array([[0, 31, 32, 128, 255]])
    # floor(x * 8 / 256)
    assert quantize_channel(values).levels.tolist() == [[0, 0, 1, 4, 7]]

    every = np.arange(256).reshape(16, 16)
    levels = quantize_channel(every).levels
    # Eight bins of 32 intensities each
    assert np.array_equal(levels.ravel(), np.arange(256) // 32)

    with pytest.raises(InvalidInputError):
        quantize_channel(np.array([[-1]]))
    with pytest.raises(InvalidInputError):
        quantize_channel(np.array([[300]]))


def test_dequantize_examples():
    channel = QuantizedChannel(np.arange(8).reshape(2, 4), "G")
    intensities = dequantize_channel(channel)
    # Bin midpoints 32 v + 16
    assert intensities.tolist() == [[16, 48, 80, 112], [144, 176, 208, 240]]

    # Quantizing a midpoint gives its level back for all eight levels
    assert quantize_channel(intensities, "G") == channel

    with pytest.raises(InvalidInputError):
        QuantizedChannel(np.array([[8]]))
    with pytest.raises(InvalidInputError):
        QuantizedChannel(np.array([[1]]), "X")


def test_quantize_image_tags(ramp_image):
    channels = quantize_image(ramp_image)
    # Channels come back tagged in R, G, B order
    assert [c.color_tag for c in channels] == ["R", "G", "B"]

    restored = dequantize_image(channels)
    # Dequantized intensities stay within half a bin of the source
    diff = np.abs(restored.pixels.astype(int) - ramp_image.pixels.astype(int))
    assert diff.max() <= 16
