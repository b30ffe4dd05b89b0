"""
numerics.py

Deterministic numerical kernels used by every other module.

Contents:
  - Activation / apply_activation(kind, x):
      Hidden-node activation functions (sigmoid, tanh, sine, identity).

  - as_matrix(values, name):
      Builds an immutable, finite, two-dimensional float array.

  - least_squares_solve(H, T):
      Minimum-norm least-squares solution of H @ beta = T through a
      truncated SVD (Moore-Penrose pseudo-inverse).

  - RandomStream / uniform(stream, lo, hi):
      Seeded random streams. The generator is numpy's PCG64 seeded through
      SeedSequence; child streams are derived from (seed, labels) so any
      unit of work can own an independent, reproducible stream.
"""
import logging
import zlib
from enum import Enum
from typing import Optional, Tuple, Union

import numpy as np

from utils.errors import ConfigError, DimensionError, NonFiniteError

logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray, list, tuple]

_U64 = 2 ** 64


class Activation(str, Enum):
    """Activation kinds selectable for the hidden layer"""

    SIGMOID = "sigmoid"
    TANH = "tanh"
    SINE = "sine"
    IDENTITY = "identity"

    @classmethod
    def parse(cls, value: Union[str, "Activation"]) -> "Activation":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).strip().lower())
        except ValueError:
            choices = ", ".join(kind.value for kind in cls)
            raise ConfigError(f"unknown activation '{value}' (choose from {choices})") from None


def _sigmoid(values: np.ndarray) -> np.ndarray:
    # exp of a non-positive argument never overflows
    z = np.exp(-np.abs(values))
    return np.where(values >= 0, 1.0 / (1.0 + z), z / (1.0 + z))


_ACTIVATIONS = {
    Activation.SIGMOID: _sigmoid,
    Activation.TANH: np.tanh,
    Activation.SINE: np.sin,
    Activation.IDENTITY: lambda values: values.copy(),
}


def apply_activation(kind: Union[str, Activation], x: ArrayLike) -> ArrayLike:
    """
    Apply an activation elementwise.

    Scalars come back as Python floats, arrays as arrays of the same shape.
    """
    function = _ACTIVATIONS[Activation.parse(kind)]
    values = np.asarray(x, dtype=float)
    result = function(values)
    if result.ndim == 0:
        return float(result)
    return result


def as_matrix(values: ArrayLike, name: str = "matrix") -> np.ndarray:
    """
    Validate and freeze a matrix.

    One-dimensional input is read as a single column. The returned array is
    a read-only float64 copy with at least one row and one column and only
    finite entries.
    """
    try:
        array = np.array(values, dtype=float)
    except (TypeError, ValueError) as e:
        raise DimensionError(f"{name} is not a rectangular numeric array: {e}") from None
    if array.ndim == 1:
        array = array.reshape(-1, 1)
    if array.ndim != 2:
        raise DimensionError(f"{name} must be two-dimensional, got {array.ndim} dimensions")
    rows, cols = array.shape
    if rows < 1 or cols < 1:
        raise DimensionError(f"{name} must have at least one row and one column, got {rows}x{cols}")
    if not np.all(np.isfinite(array)):
        raise NonFiniteError(f"{name} contains NaN or infinite entries")
    array.setflags(write=False)
    return array


def least_squares_solve(H: ArrayLike, T: ArrayLike) -> np.ndarray:
    """
    Solve min ||H beta - T||^2, returning the minimum-norm minimizer.

    Singular values at or below max(k, L) * eps * sigma_max are treated as
    zero. A one-dimensional T gives a one-dimensional beta of length L,
    otherwise beta is L x m.
    """
    vector_target = np.ndim(T) == 1
    H = as_matrix(H, "H")
    T = as_matrix(T, "T")
    if H.shape[0] != T.shape[0]:
        raise DimensionError(f"H has {H.shape[0]} rows but T has {T.shape[0]}")

    U, singular, Vt = np.linalg.svd(H, full_matrices=False)
    sigma_max = singular[0] if singular.size else 0.0
    tolerance = max(H.shape) * np.finfo(float).eps * sigma_max
    keep = singular > tolerance
    inverse = np.zeros_like(singular)
    inverse[keep] = 1.0 / singular[keep]
    if not keep.all():
        logger.debug("least_squares_solve: rank %d of %d", int(keep.sum()), singular.size)

    beta = Vt.T @ (inverse[:, None] * (U.T @ T))
    if vector_target:
        return beta.ravel()
    return beta


def _label_to_int(label: Union[int, str]) -> int:
    if isinstance(label, (bool, np.bool_)):
        raise ConfigError("stream labels must be integers or strings")
    if isinstance(label, (int, np.integer)):
        if label < 0:
            raise ConfigError(f"stream labels must be non-negative, got {label}")
        return int(label)
    if isinstance(label, str):
        # offset keeps string labels apart from small integer labels
        return zlib.crc32(label.encode("utf-8")) + 2 ** 32
    raise ConfigError(f"stream labels must be integers or strings, got {type(label).__name__}")


class RandomStream:
    """
    Seeded random stream (PCG64 via SeedSequence).

    A stream is single-owner. Work that runs in parallel derives its own
    child with child(*labels); the child depends only on the root seed and
    the label path, never on how much the parent has been consumed.
    """

    def __init__(self, seed: int, spawn_key: Tuple[int, ...] = ()):
        if isinstance(seed, bool) or not isinstance(seed, (int, np.integer)):
            raise ConfigError(f"seed must be an integer, got {seed!r}")
        if not 0 <= int(seed) < _U64:
            raise ConfigError(f"seed must be a 64-bit unsigned integer, got {seed}")
        self.seed = int(seed)
        self.spawn_key = tuple(int(part) for part in spawn_key)
        self._seed_sequence = np.random.SeedSequence(entropy=self.seed, spawn_key=self.spawn_key)
        self._generator = np.random.Generator(np.random.PCG64(self._seed_sequence))

    def __repr__(self) -> str:
        return f"RandomStream(seed={self.seed}, spawn_key={self.spawn_key})"

    def child(self, *labels: Union[int, str]) -> "RandomStream":
        """Derive an independent stream identified by labels"""
        return RandomStream(self.seed, self.spawn_key + tuple(_label_to_int(label) for label in labels))

    def spawn_seed(self) -> int:
        """A 64-bit seed derived from this stream's identity"""
        return int(self._seed_sequence.generate_state(1, np.uint64)[0])

    def random(self, size: Optional[Union[int, Tuple[int, ...]]] = None):
        """Uniform draws on [0, 1)"""
        if size is None:
            return float(self._generator.random())
        return self._generator.random(size)

    def uniform(self, lo: float, hi: float, size: Optional[Union[int, Tuple[int, ...]]] = None):
        """Uniform draws on [lo, hi)"""
        if not lo < hi:
            raise ConfigError(f"uniform needs lo < hi, got lo={lo}, hi={hi}")
        if size is None:
            return float(self._generator.uniform(lo, hi))
        return self._generator.uniform(lo, hi, size)

    def normal(self, loc: float = 0.0, scale: float = 1.0, size: Optional[Union[int, Tuple[int, ...]]] = None):
        if scale < 0:
            raise ConfigError(f"normal scale must be non-negative, got {scale}")
        if size is None:
            return float(self._generator.normal(loc, scale))
        return self._generator.normal(loc, scale, size)

    def permutation(self, n: int) -> np.ndarray:
        return self._generator.permutation(n)


def uniform(stream: RandomStream, lo: float, hi: float) -> float:
    """One uniform draw on [lo, hi) from stream"""
    return stream.uniform(lo, hi)
