"""Dense complex matrices, minors and k-multiplicative compounds."""

import logging
from typing import Optional, Sequence

import numpy as np
from scipy.linalg import svdvals

from config import Config
from errors import InvalidOrderError, MatrixShapeError
from models import CompoundMatrix, Matrix
from services.combinat import check_tuple, enumerate_tuples

logger = logging.getLogger(__name__)

# Row blocks of the compound are built at most this many minors at a time
_MINOR_BATCH = 65536


def as_matrix(data, name: str = 'matrix') -> Matrix:
    """Coerce to a finite 2-D complex128 array"""
    try:
        a = np.array(data, dtype=np.complex128)
    except (TypeError, ValueError) as e:
        raise MatrixShapeError(f'{name}: entries are not numeric ({e})') from None
    if a.ndim == 1:
        a = a.reshape(-1, 1)
    if a.ndim != 2 or a.shape[0] < 1 or a.shape[1] < 1:
        raise MatrixShapeError(f'{name}: expected a non-empty 2-D matrix, got shape {a.shape}')
    if not np.all(np.isfinite(a)):
        raise MatrixShapeError(f'{name}: NaN or Inf entries are not accepted')
    return a


def as_vector(data, n: Optional[int] = None, name: str = 'vector') -> np.ndarray:
    v = as_matrix(data, name)
    if 1 not in v.shape:
        raise MatrixShapeError(f'{name}: expected a vector, got shape {v.shape}')
    v = v.ravel()
    if n is not None and v.shape[0] != n:
        raise MatrixShapeError(f'{name}: expected length {n}, got {v.shape[0]}')
    return v


def as_square(data, name: str = 'matrix') -> Matrix:
    a = as_matrix(data, name)
    if a.shape[0] != a.shape[1]:
        raise MatrixShapeError(f'{name}: expected a square matrix, got shape {a.shape}')
    return a


def conjugate_transpose(a) -> Matrix:
    return as_matrix(a).conj().T


def minor(a, row_tuple: Sequence[int], col_tuple: Sequence[int]) -> complex:
    """det A[alpha|beta] for 1-based index tuples"""
    a = as_matrix(a)
    rows = check_tuple(row_tuple, a.shape[0])
    cols = check_tuple(col_tuple, a.shape[1])
    if len(rows) != len(cols):
        raise MatrixShapeError(f'row tuple {rows} and column tuple {cols} differ in length')
    sub = a[np.ix_(np.array(rows) - 1, np.array(cols) - 1)]
    return complex(np.linalg.det(sub))


def kcompound(a, k: int) -> CompoundMatrix:
    """The k-multiplicative compound A^(k).

    Entry (i, j) is the minor on the i-th tuple of Q(k, rows) and the j-th
    tuple of Q(k, cols). Each minor is an LU determinant of a k x k block.
    """
    a = as_matrix(a)
    n, m = a.shape
    if k < 1 or k > min(n, m):
        raise InvalidOrderError(f'order k={k} outside 1..{min(n, m)} for a {n}x{m} matrix')
    row_index = enumerate_tuples(n, k)
    col_index = enumerate_tuples(m, k)
    rows = row_index.index_array()
    cols = col_index.index_array()

    out = np.empty((len(row_index), len(col_index)), dtype=np.complex128)
    step = max(1, _MINOR_BATCH // max(1, len(col_index)))
    for start in range(0, len(row_index), step):
        r = rows[start:start + step]
        blocks = a[r[:, None, :, None], cols[None, :, None, :]]
        out[start:start + step] = np.linalg.det(blocks)

    return CompoundMatrix(
        base_rows=n,
        base_cols=m,
        order=k,
        matrix=out,
        row_index=row_index,
        col_index=col_index,
    )


def compound(a, k: int) -> Matrix:
    """Shortcut for kcompound(a, k).matrix"""
    return kcompound(a, k).matrix


def wedge(columns) -> np.ndarray:
    """[x^1 ... x^k]^(k) as a C(n, k) vector"""
    x = as_matrix(columns, 'columns')
    n, k = x.shape
    if k > n:
        raise MatrixShapeError(f'{k} columns in dimension {n}: no k-parallelotope')
    return compound(x, k)[:, 0]


def volume(x_columns) -> float:
    """Volume of the parallelotope spanned by the columns of an n x k matrix"""
    return float(np.linalg.norm(wedge(x_columns)))


def rank_tolerance(singular_values: np.ndarray, shape, rtol: Optional[float] = None,
                   reference: Optional[float] = None) -> float:
    """rtol * reference, rtol defaulting to max(rows, cols) * eps.

    reference is sigma_max of the matrix itself unless the rank is measured
    against another scale, e.g. sigma_max(A)^k for a k-compound of A.
    """
    if rtol is None:
        rtol = Config.RANK_RTOL
    if rtol is None:
        rtol = max(shape) * np.finfo(float).eps
    if reference is None:
        if singular_values.size == 0:
            return 0.0
        reference = singular_values[0]
    return rtol * reference


def numerical_rank(a, rtol: Optional[float] = None, reference: Optional[float] = None) -> int:
    """Count of singular values above rtol * reference"""
    a = np.asarray(a)
    if a.size == 0:
        return 0
    s = svdvals(a)
    tol = rank_tolerance(s, a.shape, rtol, reference)
    return int(np.sum(s > tol))


def compound_rank(a, k: int, rtol: Optional[float] = None) -> int:
    """rank(A^(k)), singular values measured against sigma_max(A)^k.

    A compound of a rank-deficient matrix holds only roundoff in the
    directions that vanish, so its own sigma_max is no scale for it.
    """
    a = as_matrix(a)
    c = compound(a, k)
    sigma_max = svdvals(a)[0]
    if sigma_max == 0:
        return 0
    s = svdvals(c)
    tol = rank_tolerance(s, c.shape + a.shape, rtol, reference=sigma_max ** k)
    return int(np.sum(s > tol))


def gram_schmidt(columns, rtol: float = 1e-10) -> Matrix:
    """Orthonormal basis from the columns in order, dependent columns skipped.

    Modified Gram-Schmidt with one reorthogonalization pass. The kept
    vectors have positive coefficients on their own source column.
    """
    x = as_matrix(columns, 'columns')
    n = x.shape[0]
    scale = max(np.linalg.norm(x, axis=0).max(), np.finfo(float).tiny)
    basis = []
    for j in range(x.shape[1]):
        v = x[:, j].copy()
        for _ in range(2):
            for q in basis:
                v -= (q.conj() @ v) * q
        norm = np.linalg.norm(v)
        if norm > rtol * scale:
            basis.append(v / norm)
    if not basis:
        return np.zeros((n, 0), dtype=np.complex128)
    return np.column_stack(basis)
