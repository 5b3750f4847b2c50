"""Noisy-XOR dataset generation, bounding grids and the CSV wire format.

Training points are drawn around four cardinal points with uneven counts;
diagonal cardinals are class 1, anti-diagonal class 0.  The quoted noise
figure is a variance, so the per-axis standard deviation is its square root
(set ``noise_variance=0.25`` to reinterpret the figure as a standard
deviation of 0.5).
"""

import csv
import math
from dataclasses import dataclass

import numpy as np

from .seeds import child_seed

CARDINALS = ((1.0, 1.0), (-1.0, -1.0), (1.0, -1.0), (-1.0, 1.0))
CARDINAL_LABELS = (1, 1, 0, 0)
DEFAULT_COUNTS = (30, 100, 10, 80)
DEFAULT_NOISE_VARIANCE = 0.5
DEFAULT_GRID_SPACING = 0.1

CSV_HEADER = ("x1", "x2", "y")


@dataclass(frozen=True)
class XorRecipe:
    """Cardinal points, per-cardinal draw counts and isotropic noise level."""

    counts: tuple = DEFAULT_COUNTS
    noise_variance: float = DEFAULT_NOISE_VARIANCE
    cardinals: tuple = CARDINALS

    def __post_init__(self):
        if len(self.counts) != len(self.cardinals):
            raise ValueError("one draw count per cardinal point required")
        if any(int(k) != k or k < 0 for k in self.counts):
            raise ValueError("draw counts must be non-negative integers")
        if self.noise_variance < 0:
            raise ValueError("noise variance must be non-negative")

    @property
    def total(self) -> int:
        return int(sum(self.counts))


@dataclass
class Dataset:
    """Labelled 2-D points plus the seed and role they were generated with."""

    points: np.ndarray
    labels: np.ndarray
    seed: int | None = None
    provenance: str = "unknown"

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=float).reshape(-1, 2)
        self.labels = np.asarray(self.labels, dtype=int).ravel()
        if len(self.points) != len(self.labels):
            raise ValueError("points and labels must have equal length")
        if not np.all((self.labels == 0) | (self.labels == 1)):
            raise ValueError("labels must be 0 or 1")

    def __len__(self) -> int:
        return len(self.labels)


def generate(recipe: XorRecipe, seed: int, provenance: str = "train") -> Dataset:
    """Draw a noisy-XOR dataset; bit-identical for a fixed seed.

    Each cardinal c with count k contributes k points c + eps with
    eps ~ Normal(0, noise_variance * I2), emitted in cardinal order.
    """
    rng = np.random.default_rng(seed)
    std = math.sqrt(recipe.noise_variance)
    blocks = []
    labels = []
    for cardinal, count, label in zip(recipe.cardinals, recipe.counts, CARDINAL_LABELS):
        pts = np.asarray(cardinal, float) + rng.normal(0.0, std, size=(int(count), 2))
        blocks.append(pts)
        labels.extend([label] * int(count))
    points = np.concatenate(blocks) if blocks else np.empty((0, 2))
    return Dataset(points=points, labels=np.asarray(labels), seed=seed,
                   provenance=provenance)


def generate_test_suite(recipe: XorRecipe, base_seed: int, n_sets: int = 10):
    """Independent test sets with the same cardinal proportions.

    Child seeds are a pure function of ``base_seed`` and the set index via
    the package-wide stable hash, so any suite can be regenerated exactly.
    """
    if n_sets < 1:
        raise ValueError("need at least one test set")
    return [
        generate(recipe, child_seed(base_seed, "test", k), provenance=f"test-{k}")
        for k in range(1, n_sets + 1)
    ]


@dataclass(frozen=True)
class GridSpec:
    """Axis-aligned regular grid: origin, spacing and point counts per axis."""

    x1_min: float
    x2_min: float
    spacing: float
    n1: int
    n2: int

    def x1_values(self) -> np.ndarray:
        return self.x1_min + self.spacing * np.arange(self.n1)

    def x2_values(self) -> np.ndarray:
        return self.x2_min + self.spacing * np.arange(self.n2)

    def cells(self) -> np.ndarray:
        """All grid points, row-major with x1 as the slow axis: (n1 * n2, 2)."""
        g1, g2 = np.meshgrid(self.x1_values(), self.x2_values(), indexing="ij")
        return np.column_stack([g1.ravel(), g2.ravel()])

    def to_dict(self) -> dict:
        return {"x1_min": self.x1_min, "x2_min": self.x2_min,
                "spacing": self.spacing, "n1": self.n1, "n2": self.n2}

    @classmethod
    def from_dict(cls, d: dict) -> "GridSpec":
        return cls(x1_min=float(d["x1_min"]), x2_min=float(d["x2_min"]),
                   spacing=float(d["spacing"]), n1=int(d["n1"]), n2=int(d["n2"]))


def _snap_down(value: float, spacing: float) -> int:
    # largest k with k * spacing <= value, robust to representation noise
    return int(math.floor(value / spacing + 1e-9))


def _snap_up(value: float, spacing: float) -> int:
    return int(math.ceil(value / spacing - 1e-9))


def bounding_grid(data: Dataset, spacing: float = DEFAULT_GRID_SPACING) -> GridSpec:
    """Regular grid covering all points, edges snapped outward to the spacing."""
    if spacing <= 0:
        raise ValueError("spacing must be positive")
    if len(data) == 0:
        raise ValueError("cannot grid an empty dataset")
    lo = data.points.min(axis=0)
    hi = data.points.max(axis=0)
    i1, i2 = _snap_down(lo[0], spacing), _snap_down(lo[1], spacing)
    j1, j2 = _snap_up(hi[0], spacing), _snap_up(hi[1], spacing)
    return GridSpec(x1_min=i1 * spacing, x2_min=i2 * spacing, spacing=spacing,
                    n1=j1 - i1 + 1, n2=j2 - i2 + 1)


def write_dataset(data: Dataset, path) -> None:
    """Write points as CSV with 17 significant digits and integer labels."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for (x1, x2), y in zip(data.points, data.labels):
            writer.writerow([f"{x1:.17g}", f"{x2:.17g}", int(y)])


def read_dataset(path, provenance: str = "unknown", seed: int | None = None) -> Dataset:
    """Read a dataset CSV written by ``write_dataset``."""
    points = []
    labels = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if tuple(header) != CSV_HEADER:
            raise ValueError(f"unexpected dataset header {header!r} in {path}")
        for row in reader:
            points.append((float(row[0]), float(row[1])))
            labels.append(int(row[2]))
    return Dataset(points=np.asarray(points, float).reshape(-1, 2),
                   labels=np.asarray(labels), seed=seed, provenance=provenance)
