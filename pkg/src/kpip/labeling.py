"""Persistent labelings for stereo matching with a Potts energy.

Pixels are numbered row by row: pixel (x, y) of a W x H image is y*W + x.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, FrozenSet, List, Optional, Sequence

import numpy as np

from .core import KVector, support
from .enumerate import count_maximal_minimizers, j_bar
from .potts import PottsBuild, PottsInstance, build_pip_potts, ideal_point, r_poset, relax_potts

EMPTY_WINDOW_COST = 3 * 255 ** 2


@dataclass
class StereoPair:
    left: np.ndarray  # H x W x 3, uint8
    right: np.ndarray

    def __post_init__(self):
        self.left = np.asarray(self.left, dtype=np.uint8)
        self.right = np.asarray(self.right, dtype=np.uint8)
        if self.left.shape != self.right.shape:
            raise ValueError("left and right images differ in size")
        if self.left.ndim != 3 or self.left.shape[2] != 3:
            raise ValueError("images must be RGB")

    @property
    def width(self) -> int:
        return self.left.shape[1]

    @property
    def height(self) -> int:
        return self.left.shape[0]


def load_image(path) -> np.ndarray:
    from PIL import Image

    with Image.open(path) as im:
        return np.array(im.convert("RGB"), dtype=np.uint8)


def load_pair(left_path, right_path) -> StereoPair:
    return StereoPair(load_image(left_path), load_image(right_path))


def synthetic_pair(width: int = 32, height: int = 24, k: int = 4, seed: int = 0, contrast: int = 4, noise: int = 8):
    """Low-contrast texture seen with a background disparity and a nearer rectangle.

    Returns (pair, ground-truth labels).  L[x, y] = R[x - d, y] + noise with
    d = 2(label - 1); pixels whose partner falls off the image get fresh texture.
    """
    rng = np.random.default_rng(seed)
    labels = np.ones((height, width), dtype=np.int64)
    if k >= 2:
        labels[:, :] = 2
        y0, y1 = height // 4, 3 * height // 4
        x0, x1 = width // 3, 2 * width // 3
        labels[y0:y1, x0:x1] = k
    lo = 128 - contrast
    right = rng.integers(lo, lo + 2 * contrast + 1, size=(height, width, 3), dtype=np.int64)
    left = np.zeros_like(right)
    for y in range(height):
        for x in range(width):
            d = 2 * (labels[y, x] - 1)
            if x - d >= 0:
                left[y, x] = right[y, x - d]
            else:
                left[y, x] = rng.integers(lo, lo + 2 * contrast + 1, size=3)
    left = left + rng.integers(-noise, noise + 1, size=left.shape)
    left = np.clip(left, 0, 255)
    return StereoPair(left.astype(np.uint8), right.astype(np.uint8)), labels


def _box_sum(a: np.ndarray, r: int) -> np.ndarray:
    """Sum over the (2r+1)^2 window clipped to the array, via cumulative sums."""
    H, W = a.shape
    c = np.zeros((H + 1, W + 1), dtype=object if a.dtype == object else np.int64)
    c[1:, 1:] = a.cumsum(0).cumsum(1)
    ys = np.arange(H)
    xs = np.arange(W)
    y0 = np.clip(ys - r, 0, H)[:, None]
    y1 = np.clip(ys + r + 1, 0, H)[:, None]
    x0 = np.clip(xs - r, 0, W)[None, :]
    x1 = np.clip(xs + r + 1, 0, W)[None, :]
    return c[y1, x1] - c[y0, x1] - c[y1, x0] + c[y0, x0]


def ssd_data_term(pair: StereoPair, k: int, window: int = 9, rounding: bool = True) -> List[List[object]]:
    """g_i(a) = averaged SSD between L around pixel i and R shifted left by d_a = 2(a-1).

    The window is clipped to pixels with a valid partner; an empty window
    costs 3*255^2.  With ``rounding`` the average is rounded half-up,
    otherwise it is kept as a Fraction.
    """
    if window % 2 != 1:
        raise ValueError("window size must be odd")
    r = window // 2
    H, W = pair.height, pair.width
    L = pair.left.astype(np.int64)
    R = pair.right.astype(np.int64)
    out = [[None] * k for _ in range(H * W)]
    for a in range(1, k + 1):
        d = 2 * (a - 1)
        sq = np.zeros((H, W), dtype=np.int64)
        valid = np.zeros((H, W), dtype=np.int64)
        if d < W:
            diff = L[:, d:, :] - R[:, : W - d, :]
            sq[:, d:] = (diff * diff).sum(axis=2)
            valid[:, d:] = 1
        S = _box_sum(sq, r)
        C = _box_sum(valid, r)
        for y in range(H):
            for x in range(W):
                s, c = int(S[y, x]), int(C[y, x])
                if c == 0:
                    v = EMPTY_WINDOW_COST
                elif rounding:
                    v = (2 * s + c) // (2 * c)
                else:
                    v = Fraction(s, c)
                out[y * W + x][a - 1] = v
    return out


def grid_edges(width: int, height: int, lam=1, diagonal: bool = True):
    """Edges of the (8-connected by default) pixel grid, all with weight lam."""
    edges = []
    steps = [(1, 0), (0, 1)] + ([(1, 1), (-1, 1)] if diagonal else [])
    for y in range(height):
        for x in range(width):
            for dx, dy in steps:
                x2, y2 = x + dx, y + dy
                if 0 <= x2 < width and 0 <= y2 < height:
                    edges.append((y * width + x, y2 * width + x2, lam))
    return edges


def stereo_instance(pair: StereoPair, k: int, lam=1, relaxation: str = "average", rounding: bool = True,
                    window: int = 9) -> PottsInstance:
    raw = ssd_data_term(pair, k, window, rounding)
    n = pair.width * pair.height
    return PottsInstance(n, k, grid_edges(pair.width, pair.height, lam), relax_potts(raw, relaxation), raw)


@dataclass
class LabelReport:
    x_min: KVector
    s_max: FrozenSet[int]
    classes: List[str]
    percentages: Dict[str, Fraction]
    max_count: dict
    x_max: KVector = ()
    min_value: Fraction = Fraction(0)
    extra: dict = field(default_factory=dict)

    def stats(self) -> dict:
        return {
            "gray_pct": _frac_str(self.percentages["gray"]),
            "red_pct": _frac_str(self.percentages["red"]),
            "blue_pct": _frac_str(self.percentages["blue"]),
            "max_count_factored": self.max_count["factored"],
            "max_count_total": self.max_count["total"],
        }


def _frac_str(q: Fraction) -> str:
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def classify_pixels(n: int, x_min: KVector, s_max) -> List[str]:
    gray = support(x_min)
    s_max = set(s_max)
    if not gray <= s_max:
        raise AssertionError("support of the minimum minimizer is not inside the maximal support")
    return ["gray" if i in gray else "red" if i in s_max else "blue" for i in range(n)]


def percentages(classes: Sequence[str]) -> Dict[str, Fraction]:
    n = len(classes)
    return {c: Fraction(100 * sum(1 for v in classes if v == c), n) for c in ("gray", "red", "blue")}


def persistent_report(inst: PottsInstance, build: Optional[PottsBuild] = None, locking: bool = False,
                      jobs: int = 1) -> LabelReport:
    if build is None:
        build = build_pip_potts(inst, locking=locking, jobs=jobs)
    R = r_poset(build)
    picks = [ls[0] for _, ls in R.choices]
    x_max = ideal_point(build.network, build.cuts, j_bar(R, [], picks))
    s_max = support(x_max)
    classes = classify_pixels(inst.n, build.minimum_minimizer, s_max)
    return LabelReport(
        x_min=build.minimum_minimizer,
        s_max=s_max,
        classes=classes,
        percentages=percentages(classes),
        max_count=count_maximal_minimizers(R),
        x_max=x_max,
        min_value=build.min_value,
    )


def render(report: LabelReport, width: int, height: int, k: int):
    """RGB label map: gray levels by label on gray pixels, pure red and blue elsewhere."""
    from PIL import Image

    img = np.zeros((height, width, 3), dtype=np.uint8)
    for i, c in enumerate(report.classes):
        y, x = divmod(i, width)
        if c == "gray":
            a = report.x_min[i]
            level = 255 * (a - 1) // (k - 1) if k > 1 else 255
            img[y, x] = (level, level, level)
        elif c == "red":
            img[y, x] = (255, 0, 0)
        else:
            img[y, x] = (0, 0, 255)
    return Image.fromarray(img, "RGB")


def save_ppm(image, path) -> None:
    image.save(path, format="PPM")
