"""From multivariate time series to Zz-Gril feature vectors.

Each sample (``m`` channels by ``n`` time steps) is cut into overlapping
windows.  A window becomes either a correlation graph on the channels or a
point cloud with one point per channel; either way it is turned into a flag
filtration with ``L`` levels.  Levels are set by binning the filtration
values of the whole sample uniformly, so all windows of one sample share a
scale.
"""

from __future__ import annotations

import csv
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np

from zzgril.bifiltration import QuasiZigzagBifiltration
from zzgril.errors import ParameterError, StructuralError, ZzGrilError
from zzgril.landscape import DEFAULT_DEGREES, DEFAULT_KS, ZzGrilLandscape, landscape, sample_centers
from zzgril.simplicial import ABSENT, flag_births, pairwise_distances, uniform_levels_array

GRAPHS = "graphs"
POINTCLOUDS = "pointclouds"


@dataclass(frozen=True)
class Sample:
    id: str
    data: np.ndarray
    label: str | None = None


@dataclass
class TimeSeriesDataset:
    samples: list[Sample]

    def __post_init__(self) -> None:
        shapes = {s.data.shape[0] for s in self.samples}
        if len(shapes) > 1:
            raise ParameterError(f"samples disagree on the number of channels: {sorted(shapes)}")
        for s in self.samples:
            if s.data.ndim != 2:
                raise ParameterError(f"sample {s.id} is not a channels x time matrix")

    def __len__(self) -> int:
        return len(self.samples)

    @property
    def labels(self) -> list[str | None]:
        return [s.label for s in self.samples]


@dataclass(frozen=True)
class WindowConfig:
    """Featurization settings; ``None`` width/overlap pick the mode's defaults."""

    mode: str = POINTCLOUDS
    width: int | None = None
    overlap: int | None = None
    percentile: tuple[float, float] = (65.0, 75.0)
    levels: int = 8
    max_dim: int = 2
    ks: tuple[int, ...] = DEFAULT_KS
    degrees: tuple[int, ...] = DEFAULT_DEGREES
    centers: tuple[int, int] = (6, 6)
    seed: int = 0
    normalize: bool = False

    def __post_init__(self) -> None:
        if self.mode not in (GRAPHS, POINTCLOUDS):
            raise ParameterError(f"mode must be {GRAPHS!r} or {POINTCLOUDS!r}")
        lo, hi = self.percentile
        if not 0 <= lo <= hi <= 100:
            raise ParameterError("percentile range must satisfy 0 <= lo <= hi <= 100")
        if self.width is not None and self.width < 1:
            raise ParameterError("window width must be positive")
        if self.width is not None and self.overlap is not None and not 0 <= self.overlap < self.width:
            raise ParameterError("overlap must satisfy 0 <= overlap < width")
        if self.levels < 1 or self.max_dim < 1:
            raise ParameterError("levels and max_dim must be >= 1")
        if not self.ks or min(self.ks) < 1:
            raise ParameterError("ks must be positive")
        if not self.degrees or min(self.degrees) < 0 or max(self.degrees) > self.max_dim - 1:
            raise ParameterError(f"degrees must lie in 0..{self.max_dim - 1}")
        if min(self.centers) < 1:
            raise ParameterError("center lattice must be at least 1x1")

    def resolved(self, n: int) -> tuple[int, int]:
        """Window width and overlap for series of length ``n``."""
        w, ov = default_window(n, self.mode)
        w = self.width if self.width is not None else w
        ov = self.overlap if self.overlap is not None else (ov if self.width is None else default_overlap(w, self.mode))
        if not 0 <= ov < w:
            raise ParameterError(f"overlap {ov} incompatible with width {w}")
        return w, ov

    def to_dict(self) -> dict[str, Any]:
        d = asdict(self)
        d["percentile"] = list(self.percentile)
        d["ks"], d["degrees"], d["centers"] = list(self.ks), list(self.degrees), list(self.centers)
        return d

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "WindowConfig":
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(d) - known
        if unknown:
            raise ParameterError(f"unknown config keys: {sorted(unknown)}")
        d = dict(d)
        for key in ("percentile", "ks", "degrees", "centers"):
            if key in d:
                d[key] = tuple(d[key])
        return cls(**d)


def default_overlap(w: int, mode: str) -> int:
    if mode == POINTCLOUDS:
        return min(max(4, math.floor(0.7 * w)), w - 1)
    return math.floor(0.7 * w)


def default_window(n: int, mode: str) -> tuple[int, int]:
    """Default (width, overlap) for series length ``n``."""
    if mode == POINTCLOUDS:
        w = max(5, n // 128)
    elif mode == GRAPHS:
        w = max(2, min(n // 5, 128))
    else:
        raise ParameterError(f"unknown mode {mode!r}")
    return w, default_overlap(w, mode)


def windows(series: np.ndarray, w: int, overlap: int) -> list[np.ndarray]:
    """Left-aligned windows of width ``w`` overlapping by ``overlap``; a partial tail is dropped."""
    series = np.asarray(series)
    if series.ndim != 2:
        raise ParameterError("series must be a channels x time matrix")
    n = series.shape[1]
    if w < 1 or w > n:
        raise ParameterError(f"window width {w} outside 1..{n}")
    stride = w - overlap
    if overlap < 0 or stride < 1:
        raise ParameterError("overlap must satisfy 0 <= overlap < width")
    count = (n - w) // stride + 1
    return [series[:, i * stride:i * stride + w] for i in range(count)]


def pearson_matrix(window: np.ndarray) -> np.ndarray:
    """Pearson correlation between rows; constant rows correlate 0 with everything."""
    x = np.asarray(window, dtype=float)
    xc = x - x.mean(axis=1, keepdims=True)
    norm = np.sqrt((xc * xc).sum(axis=1))
    ok = norm > 0
    xn = np.zeros_like(xc)
    xn[ok] = xc[ok] / norm[ok, None]
    rho = np.clip(xn @ xn.T, -1.0, 1.0)
    np.fill_diagonal(rho, np.where(ok, 1.0, 0.0))
    return rho


def pearson_graph(window: np.ndarray, keep_percent: float) -> np.ndarray:
    """Edge values ``1 - rho`` for the ``keep_percent`` % most correlated pairs; NaN marks dropped edges.

    The number kept is ``ceil(keep_percent / 100 * m(m-1)/2)``; ties are
    broken by the pair order.
    """
    window = np.asarray(window, dtype=float)
    m = window.shape[0]
    if m < 2:
        raise ParameterError("a correlation graph needs at least two channels")
    if window.shape[1] < 2:
        raise ParameterError("a correlation graph needs windows of width >= 2")
    rho = pearson_matrix(window)
    iu = np.triu_indices(m, 1)
    vals = rho[iu]
    keep = math.ceil(keep_percent / 100.0 * len(vals) - 1e-9)
    order = np.argsort(-vals, kind="stable")[:keep]
    out = np.full((m, m), np.nan)
    rows, cols = iu[0][order], iu[1][order]
    out[rows, cols] = out[cols, rows] = 1.0 - vals[order]
    return out


def pointcloud_embed(window: np.ndarray) -> np.ndarray:
    """Row ``i`` of the window is point ``i``."""
    return np.array(window, dtype=float, copy=True)


def _edge_values(sample: np.ndarray, config: WindowConfig, sample_index: int) -> list[np.ndarray]:
    w, ov = config.resolved(sample.shape[1])
    data = np.asarray(sample, dtype=float)
    if config.normalize:
        mu = data.mean(axis=1, keepdims=True)
        sd = data.std(axis=1, keepdims=True)
        data = np.where(sd > 0, (data - mu) / np.where(sd > 0, sd, 1), 0.0)
    wins = windows(data, w, ov)
    if config.mode == POINTCLOUDS:
        return [pairwise_distances(pointcloud_embed(win)) for win in wins]
    rng = np.random.default_rng([config.seed, sample_index])
    lo, hi = config.percentile
    return [pearson_graph(win, rng.uniform(lo, hi)) for win in wins]


def sample_bifiltration(sample: np.ndarray, config: WindowConfig, sample_index: int = 0) -> QuasiZigzagBifiltration:
    """Quasi-zigzag bi-filtration of one sample."""
    values = _edge_values(sample, config, sample_index)
    m = values[0].shape[0]
    iu = np.triu_indices(m, 1)
    finite = np.concatenate([v[iu][~np.isnan(v[iu])] for v in values])
    lo, hi = (finite.min(), finite.max()) if len(finite) else (0.0, 0.0)
    simplices = None
    rows = []
    for v in values:
        vv = v.copy()
        np.fill_diagonal(vv, np.nan)
        el = uniform_levels_array(vv, lo, hi, config.levels)
        simplices, births = flag_births(el, config.max_dim)
        rows.append(births)
    births = np.stack(rows)
    return QuasiZigzagBifiltration(simplices, births, config.levels, validate=False)


def featurize_sample(sample: np.ndarray, config: WindowConfig, sample_index: int = 0, jobs: int = 1) -> ZzGrilLandscape:
    B = sample_bifiltration(sample, config, sample_index)
    rows, cols = config.centers
    centers = sample_centers(B.width, B.L, rows, cols)
    return landscape(B, centers, config.ks, config.degrees, jobs=jobs)


def _featurize_task(args):
    idx, sample_id, data, config = args
    try:
        return idx, featurize_sample(data, config, idx).feature_vector(), None
    except ZzGrilError as exc:
        return idx, None, f"{sample_id}: {exc}"


@dataclass
class FeatureMatrix:
    ids: list[str]
    names: list[str]
    values: np.ndarray
    labels: list[str | None] = field(default_factory=list)

    def to_csv(self, path: str | os.PathLike) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["sample_id", *self.names])
            for sid, row in zip(self.ids, self.values):
                w.writerow([sid, *row.tolist()])


def featurize(dataset: TimeSeriesDataset, config: WindowConfig, jobs: int = 1) -> FeatureMatrix:
    """Feature rows for every sample, in dataset order.

    Samples that fail raise a StructuralError listing every failing id.
    """
    if not dataset.samples:
        raise ParameterError("dataset is empty")
    tasks = [(i, s.id, s.data, config) for i, s in enumerate(dataset.samples)]
    results: list[Any] = [None] * len(tasks)
    failures = []
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(min(jobs, len(tasks))) as ex:
            outs = list(ex.map(_featurize_task, tasks, chunksize=max(1, len(tasks) // (4 * jobs))))
    else:
        outs = [_featurize_task(t) for t in tasks]
    for idx, vec, err in outs:
        if err:
            failures.append(err)
        results[idx] = vec
    if failures:
        raise StructuralError("featurization failed for: " + "; ".join(failures))
    first = dataset.samples[0]
    B = sample_bifiltration(first.data, config, 0)
    rows, cols = config.centers
    names = [
        f"H{p}_k{k}_x{c.x}_y{c.y}"
        for p in config.degrees
        for k in config.ks
        for c in sample_centers(B.width, B.L, rows, cols)
    ]
    return FeatureMatrix([s.id for s in dataset.samples], names, np.vstack(results), dataset.labels)


def load_dataset(directory: str | os.PathLike) -> TimeSeriesDataset:
    """One headerless CSV per sample (rows = channels) plus optional ``labels.csv``."""
    d = Path(directory)
    if not d.is_dir():
        raise ParameterError(f"{d} is not a directory")
    labels: dict[str, str] = {}
    lab = d / "labels.csv"
    if lab.exists():
        with open(lab, newline="") as fh:
            for row in csv.reader(fh):
                if not row or row[0] == "sample_id":
                    continue
                labels[row[0]] = row[1]
    samples = []
    for path in sorted(d.glob("*.csv")):
        if path.name == "labels.csv":
            continue
        try:
            data = np.loadtxt(path, delimiter=",", ndmin=2)
        except ValueError as exc:
            raise StructuralError(f"{path.name}: {exc}") from exc
        samples.append(Sample(path.stem, data, labels.get(path.stem)))
    if not samples:
        raise StructuralError(f"no sample CSV files in {d}")
    return TimeSeriesDataset(samples)


def save_dataset(dataset: TimeSeriesDataset, directory: str | os.PathLike) -> None:
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    for s in dataset.samples:
        np.savetxt(d / f"{s.id}.csv", s.data, delimiter=",", fmt="%.10g")
    if any(s.label is not None for s in dataset.samples):
        with open(d / "labels.csv", "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["sample_id", "label"])
            for s in dataset.samples:
                w.writerow([s.id, s.label])


def synthetic_dataset(n_samples: int, m: int, n: int, seed: int = 0, n_classes: int = 2) -> TimeSeriesDataset:
    """Channels driven by a few latent oscillators plus noise (FingerMovements-shaped when m=28, n=50).

    Class ``c`` uses ``2 + c`` latent groups, so classes differ in how many
    clusters the channel point clouds form.  Samples alternate classes.
    """
    rng = np.random.default_rng(seed)
    t = np.arange(n)
    samples = []
    for i in range(n_samples):
        label = i % n_classes
        groups = 2 + label
        freqs = rng.uniform(0.05, 0.3, size=groups)
        phases = rng.uniform(0, 2 * np.pi, size=groups)
        latent = 3.0 * np.sin(2 * np.pi * freqs[:, None] * t[None, :] + phases[:, None])
        member = np.arange(m) % groups
        data = latent[member] + 0.6 * rng.standard_normal((m, n))
        samples.append(Sample(f"s{i:04d}", data, str(label)))
    return TimeSeriesDataset(samples)
