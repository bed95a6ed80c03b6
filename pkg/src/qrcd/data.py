"""CSV ingestion, normalization, intercept handling and synthetic instances.

The regression pipeline mirrors the usual workflow: load a headered CSV,
optionally normalize every column (features and target) to zero mean and
unit sample standard deviation, then prepend the all-ones intercept column
to form the design matrix. Synthetic generators build instances with an
exactly controlled condition number from seeded orthogonal factors.
"""

import csv
import math
from dataclasses import dataclass, replace

import numpy as np

__all__ = [
    "DataError",
    "ParseError",
    "MissingColumn",
    "EmptyFile",
    "ConstantColumn",
    "Dataset",
    "load_csv",
    "normalize",
    "with_intercept",
    "synthesize",
    "synthesize_regression",
    "write_csv",
]


class DataError(Exception):
    """Base class for dataset-layer failures."""


class ParseError(DataError):
    pass


class MissingColumn(DataError):
    pass


class EmptyFile(DataError):
    pass


class ConstantColumn(DataError):
    pass


@dataclass(frozen=True)
class Dataset:
    """Feature matrix plus target vector, before intercept augmentation.

    normalization_stats maps column name -> (mean, std) for every feature
    and the target; it is None until normalize() has been applied.
    """

    feature_names: tuple[str, ...]
    features: np.ndarray  # n x p
    targets: np.ndarray  # length n
    target_name: str = "y"
    normalization_stats: dict[str, tuple[float, float]] | None = None

    def __post_init__(self):
        feats = np.array(self.features, dtype=float)
        targs = np.array(self.targets, dtype=float).reshape(-1)
        if feats.ndim != 2:
            raise DataError(f"features must be 2-D, got shape {feats.shape}")
        n, p = feats.shape
        if len(self.feature_names) != p:
            raise DataError("feature_names length does not match feature columns")
        if targs.shape != (n,):
            raise DataError("targets length does not match feature rows")
        if n < p + 1:
            raise DataError(f"need at least p+1={p + 1} rows for the intercept design, got {n}")
        feats.setflags(write=False)
        targs.setflags(write=False)
        object.__setattr__(self, "features", feats)
        object.__setattr__(self, "targets", targs)
        object.__setattr__(self, "feature_names", tuple(self.feature_names))

    @property
    def n_rows(self) -> int:
        return self.features.shape[0]

    @property
    def n_features(self) -> int:
        return self.features.shape[1]


def load_csv(path, target_column: str | None = None) -> Dataset:
    """Read a headered, comma-separated file into a Dataset.

    Every cell must parse as a finite decimal. The target column defaults
    to the last header name. Row order is preserved.

    Raises:
        EmptyFile: no header row.
        MissingColumn: target column absent, or a row is short.
        ParseError: a cell is not a finite number (row and column named).
    """
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise EmptyFile(f"{path}: no header row") from None
        header = [name.strip() for name in header]
        if target_column is None:
            target_column = header[-1]
        if target_column not in header:
            raise MissingColumn(f"{path}: no column named {target_column!r} in header {header}")
        rows: list[list[float]] = []
        for line_no, row in enumerate(reader, start=2):
            if not row or (len(row) == 1 and row[0].strip() == ""):
                continue  # ignore blank lines
            if len(row) != len(header):
                raise MissingColumn(
                    f"{path}: line {line_no} has {len(row)} cells, expected {len(header)}"
                )
            parsed = []
            for name, cell in zip(header, row):
                try:
                    value = float(cell)
                except ValueError:
                    value = math.nan
                if not math.isfinite(value):
                    raise ParseError(
                        f"{path}: line {line_no}, column {name!r}: "
                        f"cell {cell.strip()!r} is not a finite number"
                    )
                parsed.append(value)
            rows.append(parsed)
    if not rows:
        raise EmptyFile(f"{path}: header but no data rows")
    matrix = np.array(rows, dtype=float)
    target_idx = header.index(target_column)
    feature_names = [name for i, name in enumerate(header) if i != target_idx]
    feature_idx = [i for i in range(len(header)) if i != target_idx]
    return Dataset(
        feature_names=tuple(feature_names),
        features=matrix[:, feature_idx],
        targets=matrix[:, target_idx],
        target_name=target_column,
    )


def normalize(ds: Dataset) -> Dataset:
    """Transform every feature column and the target to zero mean and unit
    sample standard deviation (divisor n-1), recording the statistics.

    Raises:
        ConstantColumn: some column has standard deviation <= 1e-12.
    """
    stats: dict[str, tuple[float, float]] = {}

    def _scale(column: np.ndarray, name: str) -> np.ndarray:
        mean = float(column.mean())
        std = float(column.std(ddof=1))
        if std <= 1e-12:
            raise ConstantColumn(f"column {name!r} has zero variance")
        stats[name] = (mean, std)
        return (column - mean) / std

    features = np.column_stack(
        [_scale(ds.features[:, i], name) for i, name in enumerate(ds.feature_names)]
    ) if ds.n_features else ds.features.copy()
    targets = _scale(ds.targets, ds.target_name)
    return replace(ds, features=features, targets=targets, normalization_stats=stats)


def with_intercept(ds: Dataset) -> np.ndarray:
    """Design matrix with a leading all-ones column: n x (p + 1)."""
    return np.column_stack([np.ones(ds.n_rows), ds.features])


def _seeded_orthonormal(rng: np.random.Generator, rows: int, cols: int) -> np.ndarray:
    q, r = np.linalg.qr(rng.standard_normal((rows, cols)))
    return q * np.sign(np.diag(r))


def synthesize(n: int, d: int, condition_target: float, seed: int, *,
               scale: float = 1.0) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Random design with exactly controlled conditioning, plus targets.

    Builds A = U diag(s) V^T from seeded orthonormal factors with the
    eigenvalues of A^T A spaced geometrically over
    [scale^2, scale^2 * condition_target], so the built objective has
    condition number g = condition_target. Targets are A x_true plus
    gaussian noise of standard deviation 0.1.

    Returns (design_matrix, targets, true_coefficients).
    """
    if not n >= d >= 2:
        raise ValueError(f"need n >= d >= 2, got n={n}, d={d}")
    if condition_target < 1.0:
        raise ValueError(f"condition_target must be >= 1, got {condition_target}")
    rng = np.random.default_rng(seed)
    u = _seeded_orthonormal(rng, n, d)
    v = _seeded_orthonormal(rng, d, d)
    eigenvalues = condition_target ** (np.arange(d) / (d - 1))
    singular_values = scale * np.sqrt(eigenvalues)
    design = (u * singular_values) @ v.T
    x_true = rng.standard_normal(d)
    targets = design @ x_true + 0.1 * rng.standard_normal(n)
    return design, targets, x_true


def synthesize_regression(n: int, d: int, condition_target: float,
                          seed: int) -> tuple[Dataset, np.ndarray]:
    """Synthetic dataset whose intercept-augmented design has condition g.

    Generates d-1 feature columns exactly orthogonal to the all-ones
    vector, with feature-block eigenvalues spread geometrically across
    [n/sqrt(g), n*sqrt(g)]; together with the intercept column (eigenvalue
    n) the d-coordinate design has extreme-eigenvalue ratio
    condition_target. Coefficients x_true refer to the augmented design
    (intercept first).

    Returns (dataset, x_true).
    """
    if not n >= d >= 2:
        raise ValueError(f"need n >= d >= 2, got n={n}, d={d}")
    if condition_target < 1.0:
        raise ValueError(f"condition_target must be >= 1, got {condition_target}")
    rng = np.random.default_rng(seed)
    p = d - 1
    ones_dir = np.ones(n) / math.sqrt(n)
    g_mat = rng.standard_normal((n, p))
    g_mat -= np.outer(ones_dir, ones_dir @ g_mat)  # keep columns zero-mean
    u, r = np.linalg.qr(g_mat)
    u *= np.sign(np.diag(r))
    v = _seeded_orthonormal(rng, p, p)
    if p == 1:
        block_eigs = np.array([n * condition_target])  # ratio against the intercept
    else:
        block_eigs = n * condition_target ** np.linspace(-0.5, 0.5, p)
    features = (u * np.sqrt(block_eigs)) @ v.T
    x_true = rng.standard_normal(d)
    targets = x_true[0] + features @ x_true[1:] + 0.1 * rng.standard_normal(n)
    names = tuple(f"f{i + 1}" for i in range(p))
    return Dataset(feature_names=names, features=features, targets=targets), x_true


def write_csv(ds: Dataset, path) -> None:
    """Serialize a Dataset in load_csv format with 17-significant-digit cells."""
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(list(ds.feature_names) + [ds.target_name])
        for i in range(ds.n_rows):
            cells = [format(v, ".17g") for v in ds.features[i]]
            cells.append(format(ds.targets[i], ".17g"))
            writer.writerow(cells)
