import numpy as np
import pytest

from dna_image_store.exceptions import InvalidInputError
from dna_image_store.hilbert_scan import (
    ScanOrder,
    delinearize,
    linearize,
    mean_neighbor_distance,
    mean_step_distance,
    neighbor_distances,
    scan_order,
)
from dna_image_store.pixel_pipeline import QuantizedChannel


def _row_major(height: int, width: int) -> ScanOrder:
    rows, cols = np.divmod(np.arange(height * width), width)
    return ScanOrder(height, width, np.stack([rows, cols], axis=1))


def _check_walk(height: int, width: int):
    order = scan_order(height, width)
    coords = order.coords
    # Permutation of every cell
    assert len(order) == height * width
    assert len(set(map(tuple, coords.tolist()))) == height * width
    assert coords[:, 0].min() == 0 and coords[:, 0].max() == height - 1
    assert coords[:, 1].min() == 0 and coords[:, 1].max() == width - 1
    assert tuple(coords[0]) == (0, 0)

    steps = np.abs(np.diff(coords, axis=0))
    # Consecutive cells are at Chebyshev distance 1
    assert (steps.max(axis=1) == 1).all() if len(steps) else True
    diagonals = int(np.count_nonzero(steps.sum(axis=1) == 2))
    if height % 2 and width % 2:
        assert diagonals <= 1
    else:
        assert diagonals == 0


def test_scan_order_examples():
    # A single row is visited left to right
    assert scan_order(1, 5).coords.tolist() == [[0, 0], [0, 1], [0, 2], [0, 3], [0, 4]]
    # A single column top to bottom
    assert scan_order(4, 1).coords.tolist() == [[0, 0], [1, 0], [2, 0], [3, 0]]

    square = scan_order(2, 2).coords.tolist()
    # U-shaped walk with unit steps
    assert square in ([[0, 0], [1, 0], [1, 1], [0, 1]], [[0, 0], [0, 1], [1, 1], [1, 0]])

    _check_walk(4, 4)
    # The 4 x 4 walk ends on the boundary opposite its start corner along one axis
    end = scan_order(4, 4).coords[-1].tolist()
    assert end in ([0, 3], [3, 0])


def test_scan_order_adjacency_exhaustive():
    # Every shape up to 24 x 24 keeps the adjacency invariant
    for height in range(1, 25):
        for width in range(1, 25):
            _check_walk(height, width)


def test_scan_order_cached_and_read_only():
    first = scan_order(9, 13)
    # Memoized results are shared and cannot be modified
    assert scan_order(9, 13) is first
    with pytest.raises(ValueError):
        first.coords[0, 0] = 5


def test_scan_order_invalid():
    with pytest.raises(InvalidInputError):
        scan_order(0, 3)
    with pytest.raises(InvalidInputError):
        scan_order(3, -1)


def test_locality_beats_row_major():
    rng = np.random.default_rng(5)
    for _ in range(100):
        height, width = (int(v) for v in rng.integers(2, 65, size=2))
        hilbert = scan_order(height, width)
        raster = _row_major(height, width)
        # The walk never jumps while raster order pays for every row wrap
        assert mean_step_distance(hilbert) < mean_step_distance(raster)
        # Most 2D neighbors are scan neighbors, so the median is never worse
        assert np.median(neighbor_distances(hilbert)) <= np.median(neighbor_distances(raster))
        assert np.median(neighbor_distances(hilbert)) == 1


def test_neighbor_distance_values():
    # Raster order on 4 x 4: twelve horizontal pairs at 1, twelve vertical at 4
    assert mean_neighbor_distance(_row_major(4, 4)) == pytest.approx(2.5)
    # Any continuous walk has N - 1 neighbor pairs at distance 1
    assert np.count_nonzero(neighbor_distances(scan_order(4, 4)) == 1) == 15
    assert mean_step_distance(scan_order(8, 8)) == pytest.approx(1.0)
    assert mean_neighbor_distance(scan_order(1, 1)) == 0.0
    assert mean_step_distance(scan_order(1, 1)) == 0.0


def test_linearize_examples():
    constant = np.full((5, 7), 3)
    # Constant matrix gives a constant vector
    assert linearize(constant).tolist() == [3] * 35

    row = np.array([[4, 1, 7, 0, 2]])
    # A 1 x n matrix is its row
    assert linearize(row).tolist() == [4, 1, 7, 0, 2]

    single = QuantizedChannel(np.array([[6]]), "B")
    assert delinearize(linearize(single), 1, 1, "B") == single


def test_linearize_round_trip():
    rng = np.random.default_rng(1)
    shapes = [(3, 5), (17, 23), (64, 64), (1, 40), (33, 2)]
    shapes += [tuple(int(v) for v in rng.integers(1, 65, size=2)) for _ in range(20)]
    for height, width in shapes:
        channel = QuantizedChannel(rng.integers(0, 8, size=(height, width)), "G")
        vector = linearize(channel)
        # Vector follows the scan coordinates
        order = scan_order(height, width)
        assert np.array_equal(vector, channel.levels[order.rows, order.cols])
        # delinearize inverts linearize
        assert delinearize(vector, height, width, "G") == channel


def test_delinearize_wrong_length():
    with pytest.raises(InvalidInputError):
        delinearize(np.zeros(11, dtype=int), 3, 4)
    with pytest.raises(InvalidInputError):
        linearize(np.zeros(5))
