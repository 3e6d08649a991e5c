"""Dense complex linear-algebra kernels.

Matrices throughout the package are plain ``numpy.ndarray`` objects with
dtype ``complex128`` in row-major layout.  All problem sizes are tiny
(centers are a handful of sites, exponentials are capped at 64), so the
routines here favour explicit algorithms with strict error reporting over
raw speed: a partial-pivot LU with a hard singularity threshold, a
scaling-and-squaring matrix exponential used as a propagation oracle, and
analytic eigenvalues for 2x2 matrices.

The shared on-disk matrix format is JSON::

    {"n": 2, "re": [[...], [...]], "im": [[...], [...]]}

Non-square matrices (channel-coupling blocks) carry explicit ``rows`` and
``cols`` keys instead of ``n``.  Parsers reject ragged rows and non-finite
entries.
"""

from __future__ import annotations

import math
from typing import Any

import numpy as np

from .errors import DimensionTooLargeError, SingularMatrixError

# Pivot threshold, relative to the largest magnitude in the working column.
# Below it the factorization reports SingularMatrixError instead of
# continuing with a near-zero pivot.
PIVOT_RTOL = 1e-12

# Hard cap for expm(); it is an oracle for small propagators, not a workhorse.
EXPM_MAX_DIM = 64

_EXPM_TAYLOR_TERMS = 18
_EXPM_TARGET_NORM = 0.5


def as_complex_matrix(a: Any, *, square: bool = False, name: str = "matrix") -> np.ndarray:
    """Coerce ``a`` to a finite 2-D complex128 array (copy only if needed)."""
    arr = np.asarray(a, dtype=np.complex128)
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ValueError(f"{name} must be 2-D with at least one entry, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains NaN or Inf entries")
    if square and arr.shape[0] != arr.shape[1]:
        raise ValueError(f"{name} must be square, got shape {arr.shape}")
    return arr


def frob(a: np.ndarray) -> float:
    """Frobenius norm as a plain float."""
    return float(np.linalg.norm(a, "fro"))


def _lu_decompose(a: np.ndarray, *, raise_on_singular: bool = True):
    """Row-pivoted in-place LU.

    Returns ``(lu, perm, swaps, singular)`` with L below the unit diagonal
    and U on/above it.  A pivot counts as singular when its magnitude is at
    most ``PIVOT_RTOL`` times the largest magnitude in the working column.
    """
    lu = np.array(a, dtype=np.complex128, copy=True)
    n = lu.shape[0]
    perm = np.arange(n)
    swaps = 0
    for col in range(n):
        column = np.abs(lu[:, col])
        local = col + int(np.argmax(column[col:]))
        pivot = column[local]
        if pivot <= PIVOT_RTOL * float(column.max()):
            if raise_on_singular:
                raise SingularMatrixError(
                    f"pivot {pivot:.3e} in column {col} below threshold"
                )
            return lu, perm, swaps, True
        if local != col:
            lu[[col, local]] = lu[[local, col]]
            perm[[col, local]] = perm[[local, col]]
            swaps += 1
        lu[col + 1:, col] /= lu[col, col]
        lu[col + 1:, col + 1:] -= np.outer(lu[col + 1:, col], lu[col, col + 1:])
    return lu, perm, swaps, False


def solve_linear(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Solve ``A X = B`` by LU with partial pivoting.

    ``b`` may be a vector or a matrix of right-hand sides; the result has
    the same shape.  Raises :class:`SingularMatrixError` when a pivot falls
    below the threshold.
    """
    a = as_complex_matrix(a, square=True, name="A")
    rhs = np.asarray(b, dtype=np.complex128)
    vector_input = rhs.ndim == 1
    if vector_input:
        rhs = rhs[:, None]
    if rhs.ndim != 2 or rhs.shape[0] != a.shape[0]:
        raise ValueError(f"B has shape {rhs.shape}, expected {a.shape[0]} rows")
    if not np.all(np.isfinite(rhs)):
        raise ValueError("B contains NaN or Inf entries")

    lu, perm, _, _ = _lu_decompose(a)
    n = a.shape[0]
    x = rhs[perm].copy()
    for i in range(1, n):
        x[i] -= lu[i, :i] @ x[:i]
    for i in range(n - 1, -1, -1):
        x[i] -= lu[i, i + 1:] @ x[i + 1:]
        x[i] /= lu[i, i]
    return x[:, 0] if vector_input else x


def invert(a: np.ndarray) -> np.ndarray:
    """Matrix inverse via :func:`solve_linear` against the identity."""
    a = as_complex_matrix(a, square=True, name="A")
    return solve_linear(a, np.eye(a.shape[0], dtype=np.complex128))


def determinant(a: np.ndarray) -> complex:
    """Determinant from the LU pivots; returns 0 when the pivoting aborts."""
    a = as_complex_matrix(a, square=True, name="A")
    lu, _, swaps, singular = _lu_decompose(a, raise_on_singular=False)
    if singular:
        return 0.0 + 0.0j
    det = complex(np.prod(np.diag(lu)))
    return -det if swaps % 2 else det


def expm(m: np.ndarray) -> np.ndarray:
    """Matrix exponential by scaling and squaring.

    The argument is scaled by ``2**s`` until its 1-norm is at most 0.5,
    an 18-term Taylor series is summed, and the result squared ``s`` times.
    Capped at 64x64; this routine backs exact-propagation oracles only.
    """
    m = as_complex_matrix(m, square=True, name="M")
    n = m.shape[0]
    if n > EXPM_MAX_DIM:
        raise DimensionTooLargeError(f"expm capped at {EXPM_MAX_DIM}, got {n}")
    norm1 = float(np.abs(m).sum(axis=0).max())
    s = 0 if norm1 <= _EXPM_TARGET_NORM else int(math.ceil(math.log2(norm1 / _EXPM_TARGET_NORM)))
    x = m / (2.0 ** s)
    result = np.eye(n, dtype=np.complex128)
    term = np.eye(n, dtype=np.complex128)
    for j in range(1, _EXPM_TAYLOR_TERMS + 1):
        term = (term @ x) / j
        result += term
    for _ in range(s):
        result = result @ result
    return result


def eig2(a: np.ndarray) -> tuple[complex, complex]:
    """Both eigenvalues of a 2x2 matrix, ordered by (Re, Im) ascending.

    Roots of ``z**2 - tr(A) z + det(A)``; a degenerate root is returned twice.
    """
    a = as_complex_matrix(a, square=True, name="A")
    if a.shape != (2, 2):
        raise ValueError(f"eig2 expects a 2x2 matrix, got shape {a.shape}")
    tr = complex(a[0, 0] + a[1, 1])
    det = complex(a[0, 0] * a[1, 1] - a[0, 1] * a[1, 0])
    disc = complex(np.sqrt(complex(tr * tr - 4.0 * det)))
    lam1 = 0.5 * (tr - disc)
    lam2 = 0.5 * (tr + disc)
    first, second = sorted((lam1, lam2), key=lambda z: (z.real, z.imag))
    return first, second


def matrix_to_json(a: np.ndarray) -> dict:
    """Serialize a matrix to the shared JSON format (square uses ``n``)."""
    a = as_complex_matrix(a)
    rows, cols = a.shape
    payload: dict[str, Any] = {"n": rows} if rows == cols else {"rows": rows, "cols": cols}
    payload["re"] = [[float(v) for v in row] for row in a.real]
    payload["im"] = [[float(v) for v in row] for row in a.imag]
    return payload


def matrix_from_json(obj: dict) -> np.ndarray:
    """Parse the shared JSON matrix format, rejecting ragged or non-finite data."""
    if not isinstance(obj, dict):
        raise ValueError("matrix JSON must be an object")
    if "n" in obj:
        rows = cols = obj["n"]
    elif "rows" in obj and "cols" in obj:
        rows, cols = obj["rows"], obj["cols"]
    else:
        raise ValueError("matrix JSON needs either 'n' or 'rows'/'cols'")
    if not (isinstance(rows, int) and isinstance(cols, int) and rows >= 1 and cols >= 1):
        raise ValueError(f"invalid matrix dimensions {rows}x{cols}")
    parts = []
    for key in ("re", "im"):
        block = obj.get(key)
        if not isinstance(block, list) or len(block) != rows:
            raise ValueError(f"'{key}' must be a list of {rows} rows")
        for i, row in enumerate(block):
            if not isinstance(row, list) or len(row) != cols:
                raise ValueError(f"'{key}' row {i} is ragged (expected {cols} entries)")
        parts.append(np.asarray(block, dtype=np.float64))
    arr = parts[0] + 1j * parts[1]
    return as_complex_matrix(arr, name="matrix JSON")
