"""
flight_data.py

Dataset schema and utilities for pilot physiological features and the
flight performance index (FPI).

Functions:
  - load_csv(path) / save_csv(dataset, path):
      Read and write datasets with the exact header HR,RA,RR,BI,FT,FPI.
      Values round-trip bit-exactly; errors carry the offending line number.

  - load_table_fixture():
      The 13 normalized sample records shipped with the package.

  - load_trace_csv(path) / compute_fpi(trace):
      Altitude traces (header h_ac,h_ex) and their root-mean-square
      deviation, which is the FPI.

  - pearson(x, y) / correlation_screen(dataset):
      Pearson correlation of each feature against FPI, in the fixed order
      HR, RA, RR, BI, FT.

  - generate_synthetic(n, noise_sd, stream):
      Synthetic stand-in for the unpublished flight experiment. Features are
      uniform on [0, 1]; FPI is synthetic_target(features) plus Gaussian
      noise, clamped to [0, 1].
"""
import io
import logging
import math
import re
from dataclasses import astuple, dataclass, field
from enum import Enum
from pathlib import Path
from typing import List, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from utils.errors import DataFileError, DatasetError, DimensionError, NonFiniteError, SchemaError, ZeroVarianceError
from utils.numerics import RandomStream

logger = logging.getLogger(__name__)

FEATURE_NAMES = ("HR", "RA", "RR", "BI", "FT")
TARGET_NAME = "FPI"
HEADER = FEATURE_NAMES + (TARGET_NAME,)
TRACE_HEADER = ("h_ac", "h_ex")

TABLE_FIXTURE = Path(__file__).with_name("tableI_excerpt.csv")

# synthetic_target: linear weights per feature, two interaction terms, and the
# exact range of the raw score over [0, 1]^5 used to rescale it into [0.1, 0.9]
SYNTHETIC_WEIGHTS = np.array([0.30, 0.25, -0.20, 0.20, -0.25])
SYNTHETIC_HR_RA = 0.30
SYNTHETIC_RR_FT = -0.20
SYNTHETIC_RAW_RANGE = (-0.65, 1.05)
SYNTHETIC_TARGET_RANGE = (0.1, 0.9)


class Provenance(str, Enum):
    SYNTHETIC = "synthetic"
    FILE = "file"


@dataclass(frozen=True)
class Record:
    """One flight: five physiological features and the FPI target"""

    hr: float
    ra: float
    rr: float
    bi: float
    ft: float
    fpi: float

    def __post_init__(self):
        for name, value in zip(HEADER, astuple(self)):
            if not math.isfinite(value):
                raise NonFiniteError(f"{name} must be finite, got {value!r}")

    @property
    def features(self) -> Tuple[float, float, float, float, float]:
        return (self.hr, self.ra, self.rr, self.bi, self.ft)


@dataclass(frozen=True)
class Dataset:
    records: Tuple[Record, ...]
    provenance: Provenance = field(default=Provenance.FILE, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "records", tuple(self.records))

    def __len__(self) -> int:
        return len(self.records)

    def require(self, minimum: int, purpose: str = "this operation") -> None:
        if len(self.records) < minimum:
            raise DatasetError(f"need ≥ {minimum} records for {purpose}, got {len(self.records)}")

    def features(self) -> np.ndarray:
        """k x 5 matrix in HEADER order"""
        return np.array([record.features for record in self.records], dtype=float).reshape(-1, len(FEATURE_NAMES))

    def targets(self) -> np.ndarray:
        return np.array([record.fpi for record in self.records], dtype=float)

    def subset(self, indices: Sequence[int]) -> "Dataset":
        return Dataset(tuple(self.records[i] for i in indices), self.provenance)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame([astuple(record) for record in self.records], columns=list(HEADER), dtype=float)

    @classmethod
    def from_arrays(cls, X, t, provenance: Provenance = Provenance.SYNTHETIC) -> "Dataset":
        X = np.asarray(X, dtype=float)
        t = np.asarray(t, dtype=float).ravel()
        if X.ndim != 2 or X.shape[1] != len(FEATURE_NAMES) or X.shape[0] != t.size:
            raise DimensionError(f"expected a k x {len(FEATURE_NAMES)} feature matrix and k targets")
        return cls(tuple(Record(*row, fpi) for row, fpi in zip(X.tolist(), t.tolist())), provenance)


@dataclass(frozen=True, eq=False)
class FlightTrace:
    """Actual and planned altitude at each sampling point"""

    actual: np.ndarray
    expected: np.ndarray

    def __post_init__(self):
        actual = np.asarray(self.actual, dtype=float).ravel()
        expected = np.asarray(self.expected, dtype=float).ravel()
        if actual.size != expected.size:
            raise DimensionError(f"trace has {actual.size} actual but {expected.size} expected samples")
        if actual.size == 0:
            raise DatasetError("trace is empty")
        if not (np.all(np.isfinite(actual)) and np.all(np.isfinite(expected))):
            raise NonFiniteError("trace contains NaN or infinite altitudes")
        object.__setattr__(self, "actual", actual)
        object.__setattr__(self, "expected", expected)


def _read_numeric_csv(path: Union[str, Path], header: Sequence[str]) -> List[Tuple[int, List[float]]]:
    """(line number, values) for every data row of a CSV whose first line must equal header"""
    path = Path(path)
    if not path.is_file():
        raise DataFileError(f"data file not found: {path}")
    try:
        raw = path.read_bytes()
    except OSError as e:
        raise DataFileError(f"cannot read {path}: {e.strerror}") from None
    try:
        text = raw.decode("utf-8-sig")
    except UnicodeDecodeError as e:
        line = raw[: e.start].count(b"\n") + 1
        raise SchemaError(f"{path} is not valid UTF-8 ({e.reason})", line=line) from None

    lines = text.split("\n")
    first_line = lines[0]
    if not first_line.strip():
        raise SchemaError(f"{path} is empty; expected header {','.join(header)}", line=1)
    columns = [name.strip() for name in first_line.rstrip("\r").split(",")]
    duplicates = sorted({name for name in columns if columns.count(name) > 1})
    if duplicates:
        raise SchemaError(f"duplicate header field(s) {', '.join(duplicates)}", line=1)
    missing = [name for name in header if name not in columns]
    if missing:
        raise SchemaError(
            f"missing column(s) {', '.join(missing)}; expected header {','.join(header)}", line=1
        )
    if columns != list(header):
        raise SchemaError(f"expected header {','.join(header)}, got {','.join(columns)}", line=1)

    try:
        frame = pd.read_csv(io.StringIO(text), header=None, dtype=str, keep_default_na=False, skip_blank_lines=False)
    except pd.errors.ParserError as e:
        match = re.search(r"line (\d+)", str(e))
        raise SchemaError(f"ragged row ({e})", line=int(match.group(1)) if match else None) from None

    # frame row i is file line i + 1; blank lines are kept by pandas and skipped here
    rows = []
    for index, cells in enumerate(frame.itertuples(index=False)):
        if index == 0 or (index < len(lines) and not lines[index].strip()):
            continue
        line = index + 1
        values = []
        for name, cell in zip(header, cells):
            if not isinstance(cell, str):
                raise SchemaError(f"ragged row: missing value for {name}", line=line)
            try:
                value = float(cell)
            except ValueError:
                raise SchemaError(f"non-numeric value {cell!r} in column {name}", line=line) from None
            if not math.isfinite(value):
                raise SchemaError(f"non-finite value {cell!r} in column {name}", line=line)
            values.append(value)
        rows.append((line, values))
    return rows


def load_csv(path: Union[str, Path]) -> Dataset:
    rows = _read_numeric_csv(path, HEADER)
    logger.info("loaded %d records from %s", len(rows), path)
    return Dataset(tuple(Record(*values) for _, values in rows), Provenance.FILE)


def save_csv(dataset: Dataset, path: Union[str, Path]) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    dataset.to_frame().to_csv(path, index=False, lineterminator="\n")


def load_table_fixture() -> Dataset:
    return load_csv(TABLE_FIXTURE)


def load_trace_csv(path: Union[str, Path]) -> FlightTrace:
    rows = _read_numeric_csv(path, TRACE_HEADER)
    if not rows:
        raise DatasetError(f"trace file {path} has no samples")
    values = np.array([row for _, row in rows], dtype=float)
    return FlightTrace(values[:, 0], values[:, 1])


def compute_fpi(trace: FlightTrace) -> float:
    """sqrt(sum((h_ac - h_ex)^2) / N)"""
    deviation = trace.actual - trace.expected
    return float(np.sqrt(np.mean(deviation ** 2)))


def pearson(x: Sequence[float], y: Sequence[float]) -> float:
    x = np.asarray(x, dtype=float).ravel()
    y = np.asarray(y, dtype=float).ravel()
    if x.size != y.size:
        raise DimensionError(f"pearson needs equal lengths, got {x.size} and {y.size}")
    if x.size < 2:
        raise DatasetError(f"pearson needs ≥ 2 values, got {x.size}")
    dx = x - x.mean()
    dy = y - y.mean()
    sxx = float(dx @ dx)
    syy = float(dy @ dy)
    if sxx == 0.0 or syy == 0.0:
        raise ZeroVarianceError("zero variance")
    r = float(dx @ dy) / math.sqrt(sxx * syy)
    return max(-1.0, min(1.0, r))


def correlation_screen(dataset: Dataset) -> List[Tuple[str, float]]:
    """(feature, r against FPI) for HR, RA, RR, BI, FT"""
    dataset.require(2, "correlation screening")
    X = dataset.features()
    t = dataset.targets()
    screen = []
    for column, name in enumerate(FEATURE_NAMES):
        try:
            screen.append((name, pearson(X[:, column], t)))
        except ZeroVarianceError:
            constant = name if np.ptp(X[:, column]) == 0 else TARGET_NAME
            raise ZeroVarianceError(f"zero variance in column {constant}", column=constant) from None
    return screen


def synthetic_target(X) -> np.ndarray:
    """
    Noise-free FPI of the synthetic generator.

    raw = 0.30 HR + 0.25 RA - 0.20 RR + 0.20 BI - 0.25 FT
          + 0.30 HR*RA - 0.20 RR*FT
    raw spans exactly [-0.65, 1.05] on [0, 1]^5 and is mapped affinely onto
    [0.1, 0.9]. Every feature has a non-zero partial derivative everywhere
    in the open box.
    """
    X = np.asarray(X, dtype=float).reshape(-1, len(FEATURE_NAMES))
    raw = X @ SYNTHETIC_WEIGHTS + SYNTHETIC_HR_RA * X[:, 0] * X[:, 1] + SYNTHETIC_RR_FT * X[:, 2] * X[:, 4]
    raw_lo, raw_hi = SYNTHETIC_RAW_RANGE
    out_lo, out_hi = SYNTHETIC_TARGET_RANGE
    return out_lo + (out_hi - out_lo) * (raw - raw_lo) / (raw_hi - raw_lo)


def generate_synthetic(n: int, noise_sd: float, stream: RandomStream) -> Dataset:
    if n < 1:
        raise DatasetError("n must be ≥ 1")
    if not noise_sd >= 0:
        raise DatasetError(f"noise_sd must be ≥ 0, got {noise_sd}")
    features = stream.random((n, len(FEATURE_NAMES)))
    noise = stream.normal(0.0, noise_sd, n)
    fpi = np.clip(synthetic_target(features) + noise, 0.0, 1.0)
    return Dataset.from_arrays(features, fpi, Provenance.SYNTHETIC)
