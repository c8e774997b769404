from fractions import Fraction

import numpy as np
import pytest

from kpip.labeling import (
    EMPTY_WINDOW_COST,
    StereoPair,
    classify_pixels,
    grid_edges,
    load_pair,
    percentages,
    persistent_report,
    render,
    save_ppm,
    ssd_data_term,
    stereo_instance,
    synthetic_pair,
)
from kpip.potts import PottsInstance, relax_potts


def flat(value, w=6, h=4):
    return np.full((h, w, 3), value, dtype=np.uint8)


def test_identical_images_cost_nothing_at_zero_shift():
    rng = np.random.default_rng(1)
    img = rng.integers(0, 256, size=(5, 7, 3), dtype=np.uint8)
    g = ssd_data_term(StereoPair(img, img), k=1)
    assert all(row == [0] for row in g)


def test_black_against_white():
    g = ssd_data_term(StereoPair(flat(0), flat(255)), k=2, window=3)
    assert all(row[0] == 3 * 255 ** 2 for row in g)


def test_window_with_no_partner_gets_fixed_cost():
    # shift 2 leaves the two leftmost columns without a partner; with a 1x1 window nothing remains
    g = ssd_data_term(StereoPair(flat(10), flat(10)), k=2, window=1)
    W = 6
    for i, row in enumerate(g):
        x = i % W
        assert row[1] == (EMPTY_WINDOW_COST if x < 2 else 0)


def test_rounding_is_half_up_and_exact_mode_keeps_fractions():
    left = flat(0, w=2, h=1)
    right = flat(0, w=2, h=1)
    left[0, 1] = (1, 0, 0)  # squared difference 1 at one of two window pixels
    g = ssd_data_term(StereoPair(left, right), k=1, window=3)
    assert g[0][0] == 1  # 1/2 rounds up
    g = ssd_data_term(StereoPair(left, right), k=1, window=3, rounding=False)
    assert g[0][0] == Fraction(1, 2)


def test_shift_is_recovered():
    rng = np.random.default_rng(2)
    right = rng.integers(0, 256, size=(6, 16, 3), dtype=np.uint8)
    left = np.zeros_like(right)
    left[:, 4:] = right[:, :-4]  # disparity 4 is label 3
    left[:, :4] = right[:, :4]
    g = ssd_data_term(StereoPair(left, right), k=4, window=3)
    for i, row in enumerate(g):
        if i % 16 >= 6:
            assert row[2] == 0 and min(row) == 0 and row.index(0) == 2


def test_bad_pairs():
    with pytest.raises(ValueError):
        StereoPair(flat(0, w=3), flat(0, w=4))
    with pytest.raises(ValueError):
        StereoPair(np.zeros((2, 2), dtype=np.uint8), np.zeros((2, 2), dtype=np.uint8))
    with pytest.raises(ValueError):
        ssd_data_term(StereoPair(flat(0), flat(0)), k=2, window=4)


def test_grid_edges():
    assert len(grid_edges(3, 2, diagonal=False)) == 7
    assert len(grid_edges(3, 2)) == 7 + 4
    assert (0, 4, 1) in grid_edges(3, 2)


def test_tied_pixel_is_red():
    inst = PottsInstance(1, 2, [], relax_potts([[0, 0]]), [[0, 0]])
    rep = persistent_report(inst)
    assert rep.x_min == (0,)
    assert rep.classes == ["red"]
    assert rep.max_count["total"] == "2"


def test_classification_and_percentages():
    cls = classify_pixels(4, (1, 0, 0, 2), {0, 1, 3})
    assert cls == ["gray", "red", "blue", "gray"]
    pct = percentages(cls)
    assert pct == {"gray": 50, "red": 25, "blue": 25}
    with pytest.raises(AssertionError):
        classify_pixels(2, (1, 1), {0})


def test_synthetic_pipeline(tmp_path):
    pair, truth = synthetic_pair(12, 8, 3, seed=1)
    assert truth.shape == (8, 12)
    inst = stereo_instance(pair, 3, lam=2)
    rep = persistent_report(inst)
    assert sum(rep.percentages.values()) == 100
    gray = [i for i, c in enumerate(rep.classes) if c == "gray"]
    assert all(rep.x_min[i] == rep.x_max[i] for i in gray)
    # gray pixels carry an optimal label, so they must be nonzero
    assert all(rep.x_min[i] != 0 for i in gray)
    img = render(rep, 12, 8, 3)
    save_ppm(img, tmp_path / "out.ppm")
    assert (tmp_path / "out.ppm").read_bytes().startswith(b"P6")
    stats = rep.stats()
    assert set(stats) == {"gray_pct", "red_pct", "blue_pct", "max_count_factored", "max_count_total"}


def test_load_pair_round_trip(tmp_path):
    from PIL import Image

    pair, _ = synthetic_pair(10, 6, 2, seed=3)
    Image.fromarray(pair.left).save(tmp_path / "l.ppm")
    Image.fromarray(pair.right).save(tmp_path / "r.ppm")
    back = load_pair(tmp_path / "l.ppm", tmp_path / "r.ppm")
    assert np.array_equal(back.left, pair.left) and np.array_equal(back.right, pair.right)
