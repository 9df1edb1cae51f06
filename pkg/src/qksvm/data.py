"""Dataset ingestion and the preprocessing pipeline.

Pipeline order: load -> prime-seeded subsample -> stratified split ->
standardize -> PCA -> angle scale. All statistics use the population (1/n)
convention, and every stage is a pure function of its inputs plus an explicit
seed.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ParseError

# Per-feature target interval for feature-map phase arguments.
ANGLE_LO = 0.0
ANGLE_HI = math.pi

_WDBC_BASE_NAMES = (
    "radius", "texture", "perimeter", "area", "smoothness",
    "compactness", "concavity", "concave_points", "symmetry",
    "fractal_dimension",
)
WDBC_FEATURE_NAMES = tuple(
    f"{name}_{stat}" for stat in ("mean", "se", "worst") for name in _WDBC_BASE_NAMES
)


@dataclass
class Dataset:
    """Feature matrix with labels in {-1, +1} and per-row identifiers."""

    features: np.ndarray
    labels: np.ndarray
    feature_names: tuple[str, ...] = ()
    source_ids: tuple[str, ...] = ()

    def __post_init__(self):
        self.features = np.atleast_2d(np.asarray(self.features, dtype=float))
        self.labels = np.asarray(self.labels, dtype=int)
        if self.features.shape[0] != self.labels.shape[0]:
            raise ValueError("features and labels disagree on row count")
        if not np.all(np.isfinite(self.features)):
            raise ValueError("features contain non-finite values")
        if not np.all(np.isin(self.labels, (-1, 1))):
            raise ValueError("labels must be -1 or +1")
        if not self.feature_names:
            self.feature_names = tuple(f"f{i}" for i in range(self.features.shape[1]))
        if len(self.feature_names) != self.features.shape[1]:
            raise ValueError("feature_names length does not match feature count")
        if not self.source_ids:
            self.source_ids = tuple(str(i) for i in range(self.features.shape[0]))
        if len(self.source_ids) != self.features.shape[0]:
            raise ValueError("source_ids length does not match row count")

    @property
    def n(self) -> int:
        return self.features.shape[0]

    @property
    def d(self) -> int:
        return self.features.shape[1]

    def subset(self, indices: np.ndarray) -> "Dataset":
        indices = np.asarray(indices, dtype=int)
        return Dataset(
            features=self.features[indices].copy(),
            labels=self.labels[indices].copy(),
            feature_names=self.feature_names,
            source_ids=tuple(self.source_ids[i] for i in indices),
        )

    def with_features(self, features: np.ndarray, names: tuple[str, ...] | None = None) -> "Dataset":
        return Dataset(
            features=features,
            labels=self.labels.copy(),
            feature_names=names if names is not None else (),
            source_ids=self.source_ids,
        )

    def require_both_classes(self, context: str) -> None:
        if self.n < 2 or len(np.unique(self.labels)) < 2:
            raise ValueError(f"{context} needs at least two examples and both classes")


def load_wdbc(path) -> Dataset:
    """Parse the 32-field WDBC CSV: id, diagnosis M/B, 30 real features.

    Malignant maps to +1 (the detection target), benign to -1. Malformed rows
    raise ParseError naming the 1-based row number.
    """
    features, labels, ids = [], [], []
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            fields = line.split(",")
            if len(fields) != 32:
                raise ParseError(f"row {lineno}: expected 32 fields, got {len(fields)}")
            diagnosis = fields[1]
            if diagnosis not in ("M", "B"):
                raise ParseError(f"row {lineno}: diagnosis must be M or B, got {diagnosis!r}")
            try:
                row = [float(v) for v in fields[2:]]
            except ValueError:
                raise ParseError(f"row {lineno}: non-numeric feature value") from None
            if not all(math.isfinite(v) for v in row):
                raise ParseError(f"row {lineno}: non-finite feature value")
            ids.append(fields[0])
            labels.append(1 if diagnosis == "M" else -1)
            features.append(row)
    if not features:
        raise ParseError(f"{path}: no data rows")
    return Dataset(
        features=np.array(features),
        labels=np.array(labels),
        feature_names=WDBC_FEATURE_NAMES,
        source_ids=tuple(ids),
    )


def load_simple_csv(path) -> Dataset:
    """Parse the generic format: one row per example, "label,f1,...,fd" with
    label +1 or -1. Useful for toy problems that are not WDBC-shaped."""
    features, labels = [], []
    width = None
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            fields = line.split(",")
            if len(fields) < 2:
                raise ParseError(f"row {lineno}: expected label plus at least one feature")
            if width is None:
                width = len(fields)
            elif len(fields) != width:
                raise ParseError(f"row {lineno}: expected {width} fields, got {len(fields)}")
            try:
                label = int(fields[0])
                row = [float(v) for v in fields[1:]]
            except ValueError:
                raise ParseError(f"row {lineno}: non-numeric value") from None
            if label not in (-1, 1):
                raise ParseError(f"row {lineno}: label must be +1 or -1, got {label}")
            if not all(math.isfinite(v) for v in row):
                raise ParseError(f"row {lineno}: non-finite feature value")
            labels.append(label)
            features.append(row)
    if not features:
        raise ParseError(f"{path}: no data rows")
    return Dataset(features=np.array(features), labels=np.array(labels))


def prime_seeds(count: int) -> list[int]:
    """First `count` primes, ascending, via a sieve of Eratosthenes."""
    if count < 1:
        raise ValueError("count must be >= 1")
    if count < 6:
        return [2, 3, 5, 7, 11][:count]
    # p_k < k*(ln k + ln ln k) for k >= 6
    bound = int(count * (math.log(count) + math.log(math.log(count)))) + 3
    sieve = np.ones(bound + 1, dtype=bool)
    sieve[:2] = False
    for p in range(2, int(math.isqrt(bound)) + 1):
        if sieve[p]:
            sieve[p * p :: p] = False
    primes = np.flatnonzero(sieve)
    return [int(p) for p in primes[:count]]


def _stratified_counts(labels: np.ndarray, total: int) -> dict[int, int]:
    """Per-class draw counts matching the class ratio, rounded (banker's)."""
    n = labels.shape[0]
    n_pos = int(np.sum(labels == 1))
    k_pos = round(total * n_pos / n)
    k_pos = min(max(k_pos, total - (n - n_pos)), n_pos, total)
    return {1: k_pos, -1: total - k_pos}


def _stratified_draw(ds: Dataset, size: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    counts = _stratified_counts(ds.labels, size)
    chosen = []
    for label in (1, -1):
        pool = np.flatnonzero(ds.labels == label)
        k = counts[label]
        if k > 0:
            chosen.append(rng.choice(pool, size=k, replace=False))
    return np.sort(np.concatenate(chosen))


def subsample_score(sub_features: np.ndarray, full_features: np.ndarray, eps: float = 1e-12) -> float:
    """Distribution-preservation score: summed normalized |mean| and |std| gaps.

    Lower is better; a subset identical in distribution to the full data
    scores 0.
    """
    mean_full = full_features.mean(axis=0)
    std_full = full_features.std(axis=0)
    mean_sub = sub_features.mean(axis=0)
    std_sub = sub_features.std(axis=0)
    denom = np.maximum(std_full, eps)
    return float(np.sum((np.abs(mean_sub - mean_full) + np.abs(std_sub - std_full)) / denom))


def subsample(full: Dataset, size: int, seeds) -> tuple[Dataset, int, float]:
    """Pick the seed whose stratified draw best preserves the full distribution.

    Every seed produces one candidate subset; the one with the smallest score
    wins, ties going to the smaller seed. Returns (subset, chosen_seed, score).
    """
    seeds = list(seeds)
    if not seeds:
        raise ValueError("seeds must be non-empty")
    if size < 2 or size > full.n:
        raise ValueError(f"subsample size must be in [2, {full.n}], got {size}")
    best_seed, best_score, best_idx = None, math.inf, None
    for seed in seeds:
        idx = _stratified_draw(full, size, seed)
        score = subsample_score(full.features[idx], full.features)
        if score < best_score or (score == best_score and (best_seed is None or seed < best_seed)):
            best_seed, best_score, best_idx = seed, score, idx
    return full.subset(best_idx), int(best_seed), float(best_score)


def fit_standardizer(train: Dataset) -> tuple[np.ndarray, np.ndarray]:
    """Per-feature mean and population std; constant features get divisor 1."""
    if train.n < 1:
        raise ValueError("cannot fit a standardizer on an empty dataset")
    mean = train.features.mean(axis=0)
    std = train.features.std(axis=0)
    std = np.where(std < 1e-12, 1.0, std)
    return mean, std


def apply_standardizer(ds: Dataset, mean: np.ndarray, std: np.ndarray) -> Dataset:
    return ds.with_features((ds.features - mean) / std, names=ds.feature_names)


def jacobi_eigh(A: np.ndarray, tol: float = 1e-12, max_sweeps: int = 60) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.

    Returns (eigenvalues, eigenvectors) with eigenvectors in columns, like
    numpy.linalg.eigh, but in unsorted order. Adequate for the d <= 30
    covariance matrices this package produces.
    """
    A = np.array(A, dtype=float)
    d = A.shape[0]
    if A.shape != (d, d) or np.max(np.abs(A - A.T)) > 1e-9 * max(1.0, np.max(np.abs(A))):
        raise ValueError("jacobi_eigh expects a symmetric square matrix")
    V = np.eye(d)
    scale = np.linalg.norm(A)
    if scale == 0.0:
        return np.zeros(d), V
    for _ in range(max_sweeps):
        off = math.sqrt(max(0.0, np.sum(A**2) - np.sum(np.diag(A) ** 2)))
        if off <= tol * scale:
            break
        for p in range(d - 1):
            for q in range(p + 1, d):
                apq = A[p, q]
                if abs(apq) <= 1e-300:
                    continue
                theta = 0.5 * (A[q, q] - A[p, p]) / apq
                if abs(theta) > 1e150:  # theta^2 would overflow; use the limit
                    t = 0.5 / theta
                else:
                    t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                rot_p = c * A[:, p] - s * A[:, q]
                rot_q = s * A[:, p] + c * A[:, q]
                A[:, p], A[:, q] = rot_p, rot_q
                rot_p = c * A[p, :] - s * A[q, :]
                rot_q = s * A[p, :] + c * A[q, :]
                A[p, :], A[q, :] = rot_p, rot_q
                A[p, q] = A[q, p] = 0.0
                rot_p = c * V[:, p] - s * V[:, q]
                rot_q = s * V[:, p] + c * V[:, q]
                V[:, p], V[:, q] = rot_p, rot_q
    return np.diag(A).copy(), V


@dataclass
class PcaModel:
    """Top-q principal axes of the training covariance, stored as rows."""

    mean: np.ndarray
    components: np.ndarray
    explained_variance_ratio: np.ndarray


def pca_fit(train: Dataset, q: int) -> PcaModel:
    """PCA of the population covariance via Jacobi eigendecomposition.

    Components are ordered by descending eigenvalue; each row's sign is fixed
    so its largest-magnitude entry is positive.
    """
    if q < 1 or q > train.d:
        raise ValueError(f"q must be in [1, {train.d}], got {q}")
    mean = train.features.mean(axis=0)
    centered = train.features - mean
    cov = (centered.T @ centered) / train.n
    eigvals, eigvecs = jacobi_eigh(cov)
    order = np.argsort(eigvals)[::-1]
    eigvals = np.maximum(eigvals[order], 0.0)
    components = eigvecs[:, order].T[:q].copy()
    for row in components:
        if row[np.argmax(np.abs(row))] < 0:
            row *= -1.0
    total = float(eigvals.sum())
    ratio = eigvals[:q] / total if total > 0 else np.zeros(q)
    return PcaModel(mean=mean, components=components, explained_variance_ratio=ratio)


def pca_transform(ds: Dataset, model: PcaModel) -> Dataset:
    projected = (ds.features - model.mean) @ model.components.T
    names = tuple(f"pc{i + 1}" for i in range(model.components.shape[0]))
    return ds.with_features(projected, names=names)


@dataclass
class AngleScaler:
    """Min-max scaler onto [lo, hi] radians, fitted on training features."""

    feature_min: np.ndarray
    feature_max: np.ndarray
    lo: float = ANGLE_LO
    hi: float = ANGLE_HI


def fit_angle_scaler(train: Dataset) -> AngleScaler:
    if train.n < 1:
        raise ValueError("cannot fit an angle scaler on an empty dataset")
    return AngleScaler(
        feature_min=train.features.min(axis=0),
        feature_max=train.features.max(axis=0),
    )


def _angle_transform(features: np.ndarray, scaler: AngleScaler) -> np.ndarray:
    span = scaler.feature_max - scaler.feature_min
    degenerate = span < 1e-12
    safe_span = np.where(degenerate, 1.0, span)
    unit = (features - scaler.feature_min) / safe_span
    scaled = scaler.lo + unit * (scaler.hi - scaler.lo)
    scaled = np.where(degenerate, 0.5 * (scaler.lo + scaler.hi), scaled)
    return np.clip(scaled, scaler.lo, scaler.hi)


def apply_angle_scaler(ds: Dataset, scaler: AngleScaler) -> Dataset:
    return ds.with_features(_angle_transform(ds.features, scaler), names=ds.feature_names)


def split(ds: Dataset, test_fraction: float, seed: int) -> tuple[Dataset, Dataset]:
    """Stratified train/test split; per-class test counts are
    round(class_count * test_fraction)."""
    if not 0.0 < test_fraction < 1.0:
        raise ValueError(f"test_fraction must be in (0, 1), got {test_fraction}")
    rng = np.random.default_rng(seed)
    test_idx = []
    for label in (1, -1):
        pool = np.flatnonzero(ds.labels == label)
        if pool.size < 2:
            raise ValueError(f"class {label:+d} has fewer than 2 members")
        k = round(pool.size * test_fraction)
        if k > 0:
            test_idx.append(rng.choice(pool, size=k, replace=False))
    test_idx = np.sort(np.concatenate(test_idx)) if test_idx else np.array([], dtype=int)
    mask = np.zeros(ds.n, dtype=bool)
    mask[test_idx] = True
    return ds.subset(np.flatnonzero(~mask)), ds.subset(test_idx)


@dataclass
class Preprocessing:
    """Fitted standardize -> PCA -> angle-scale chain applied before kernels.

    The PCA and angle stages are optional; classical kernels skip angle
    scaling since they need no bounded phase arguments.
    """

    mean: np.ndarray
    std: np.ndarray
    pca: PcaModel | None = None
    angle: AngleScaler | None = None

    @property
    def input_dim(self) -> int:
        return self.mean.shape[0]

    @property
    def output_dim(self) -> int:
        if self.pca is not None:
            return self.pca.components.shape[0]
        return self.input_dim

    def apply(self, features: np.ndarray) -> np.ndarray:
        features = np.atleast_2d(np.asarray(features, dtype=float))
        if features.shape[1] != self.input_dim:
            raise ValueError(
                f"expected {self.input_dim} features, got {features.shape[1]}"
            )
        out = (features - self.mean) / self.std
        if self.pca is not None:
            out = (out - self.pca.mean) @ self.pca.components.T
        if self.angle is not None:
            out = _angle_transform(out, self.angle)
        return out

    def apply_dataset(self, ds: Dataset) -> Dataset:
        return ds.with_features(self.apply(ds.features))


def fit_preprocessing(train: Dataset, q: int | None, with_angle: bool) -> Preprocessing:
    """Fit the chain on training data.

    The PCA stage is fitted only when q actually reduces the dimension;
    q=None keeps all features.
    """
    mean, std = fit_standardizer(train)
    standardized = apply_standardizer(train, mean, std)
    pca = None
    current = standardized
    if q is not None and q != train.d:
        pca = pca_fit(standardized, q)
        current = pca_transform(standardized, pca)
    angle = fit_angle_scaler(current) if with_angle else None
    return Preprocessing(mean=mean, std=std, pca=pca, angle=angle)
