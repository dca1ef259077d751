"""Dense matrix arithmetic shared by every other module.

Matrices are plain 2-D float64 numpy arrays in row-major layout with rows
as batch samples.  The helpers here add the shape/finiteness checking that
the rest of the package relies on; heavy lifting is delegated to numpy.
"""

import numpy as np


class ShapeError(ValueError):
    """Operands have incompatible shapes."""


class NumericError(ArithmeticError):
    """An operation produced a non-finite value."""


def as_matrix(a) -> np.ndarray:
    """Coerce to a 2-D float64 array, rejecting other ranks."""
    m = np.asarray(a, dtype=np.float64)
    if m.ndim != 2:
        raise ShapeError(f"expected a 2-D matrix, got shape {m.shape}")
    return m


def check_finite(a: np.ndarray, context: str = "matrix"):
    """Raise NumericError naming the first offending index, if any."""
    if not np.all(np.isfinite(a)):
        idx = tuple(int(i) for i in np.argwhere(~np.isfinite(np.asarray(a)))[0])
        raise NumericError(f"non-finite value in {context} at index {idx}")
    return a


def matmul(a, b) -> np.ndarray:
    a = as_matrix(a)
    b = as_matrix(b)
    if a.shape[1] != b.shape[0]:
        raise ShapeError(f"matmul shape mismatch: {a.shape} x {b.shape}")
    return check_finite(a @ b, "matmul result")


def map_elementwise(a, f) -> np.ndarray:
    a = as_matrix(a)
    out = np.vectorize(f, otypes=[np.float64])(a) if not _is_vectorized(f, a) else f(a)
    out = np.asarray(out, dtype=np.float64)
    if out.shape != a.shape:
        raise ShapeError(f"elementwise map changed shape {a.shape} -> {out.shape}")
    return check_finite(out, "elementwise map result")


def _is_vectorized(f, a) -> bool:
    try:
        probe = f(a[:1, :1])
    except Exception:
        return False
    return np.shape(probe) == (1, 1)


def add_row_broadcast(a, bias) -> np.ndarray:
    a = as_matrix(a)
    bias = np.asarray(bias, dtype=np.float64).reshape(-1)
    if bias.shape[0] != a.shape[1]:
        raise ShapeError(f"bias length {bias.shape[0]} != cols {a.shape[1]}")
    return check_finite(a + bias[None, :], "row broadcast result")
