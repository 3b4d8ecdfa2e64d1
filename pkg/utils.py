import csv
import json
import logging
import numbers
import os

import numpy as np

from config import Config
from errors import MatrixFileError, MatrixShapeError
from services.compound import as_matrix

logger = logging.getLogger(__name__)


def _parse_entry(entry, position):
    if isinstance(entry, bool):
        raise MatrixFileError(f'entry {position} is a boolean')
    if isinstance(entry, numbers.Real):
        return complex(entry, 0.0)
    if isinstance(entry, list) and len(entry) == 2 and all(
            isinstance(part, numbers.Real) and not isinstance(part, bool) for part in entry):
        return complex(entry[0], entry[1])
    raise MatrixFileError(f'entry {position} must be a real number or a [re, im] pair, got {entry!r}')


def parse_matrix(payload) -> np.ndarray:
    """Matrix from a decoded {rows, cols, data} document"""
    if not isinstance(payload, dict):
        raise MatrixFileError('matrix file must hold a JSON object')
    missing = [key for key in ('rows', 'cols', 'data') if key not in payload]
    if missing:
        raise MatrixFileError(f'matrix file lacks {", ".join(missing)}')

    rows, cols, data = payload['rows'], payload['cols'], payload['data']
    if not all(isinstance(v, int) and not isinstance(v, bool) and v > 0 for v in (rows, cols)):
        raise MatrixFileError(f'rows and cols must be positive integers, got {rows!r} and {cols!r}')
    if not isinstance(data, list) or len(data) != rows:
        raise MatrixFileError(f'data must be a list of {rows} rows')

    out = np.empty((rows, cols), dtype=np.complex128)
    for i, row in enumerate(data):
        if not isinstance(row, list) or len(row) != cols:
            raise MatrixFileError(f'row {i} must hold {cols} entries')
        for j, entry in enumerate(row):
            out[i, j] = _parse_entry(entry, (i, j))
    if not np.all(np.isfinite(out)):
        raise MatrixFileError('NaN or Inf entries are not accepted')
    return out


def read_matrix(path) -> np.ndarray:
    try:
        with open(path, 'r') as f:
            payload = json.load(f)
    except OSError as e:
        raise MatrixFileError(f'cannot read {path}: {e.strerror}') from e
    except json.JSONDecodeError as e:
        raise MatrixFileError(f'{path} is not valid JSON: {e}') from e
    logger.debug(f'read matrix file {path}')
    return parse_matrix(payload)


def read_vector(path, n=None) -> np.ndarray:
    """A single-row or single-column matrix file as a vector"""
    m = read_matrix(path)
    if 1 not in m.shape:
        raise MatrixShapeError(f'{path}: expected a vector, got shape {m.shape}')
    v = m.ravel()
    if n is not None and v.shape[0] != n:
        raise MatrixShapeError(f'{path}: expected length {n}, got {v.shape[0]}')
    return v


def _round(x: float, precision: int) -> float:
    value = float(format(x, f'.{precision}g'))
    return 0.0 if value == 0 else value


def scalar_to_json(value, precision: int = 17):
    """A number when the imaginary part rounds to zero, else [re, im]"""
    z = complex(value)
    re, im = _round(z.real, precision), _round(z.imag, precision)
    return re if im == 0 else [re, im]


def matrix_to_file_dict(a, precision: int = 17) -> dict:
    """{rows, cols, data} with real entries as numbers and complex ones as [re, im]"""
    a = as_matrix(a)
    data = [[scalar_to_json(z, precision) for z in row] for row in a]
    return {'rows': a.shape[0], 'cols': a.shape[1], 'data': data}


def write_matrix(path, a, precision: int = 17):
    folder = os.path.dirname(path)
    if folder and not os.path.exists(folder):
        os.makedirs(folder)
    with open(path, 'w') as f:
        json.dump(matrix_to_file_dict(a, precision), f)
        f.write('\n')


def chop(a, tol=None):
    """Zero real and imaginary parts below tol times the largest magnitude"""
    tol = Config.DISPLAY_ZERO_TOL if tol is None else tol
    a = np.array(a, dtype=np.complex128)
    scale = max(np.abs(a).max(initial=0.0), 1.0)
    re = np.where(np.abs(a.real) <= tol * scale, 0.0, a.real)
    im = np.where(np.abs(a.imag) <= tol * scale, 0.0, a.imag)
    return re + 1j * im


def format_scalar(value, precision: int = 12) -> str:
    """Shortest %g rendering; complex values as re+imj, negative zero as 0"""
    z = complex(value)
    re = format(_round(z.real, precision), f'.{precision}g')
    if _round(z.imag, precision) == 0:
        return re
    im = format(_round(z.imag, precision), f'.{precision}g')
    sign = '' if im.startswith('-') else '+'
    if re == '0':
        return f'{im}j'
    return f'{re}{sign}{im}j'


def format_matrix_csv(a, precision: int = 12):
    """Rows of rendered entries, no header"""
    return [[format_scalar(z, precision) for z in row] for row in as_matrix(a)]


def write_csv(stream_or_path, header, rows, precision: int = 12):
    """CSV with a header row, ',' separator and LF line endings.

    Numeric cells are rendered with format_scalar; strings pass through.
    """
    def cell(value):
        if isinstance(value, str):
            return value
        if isinstance(value, (int, np.integer)) and not isinstance(value, bool):
            return str(int(value))
        return format_scalar(value, precision)

    def emit(f):
        writer = csv.writer(f, lineterminator='\n')
        writer.writerow(header)
        for row in rows:
            writer.writerow([cell(v) for v in row])

    if isinstance(stream_or_path, (str, os.PathLike)):
        with open(stream_or_path, 'w', newline='') as f:
            emit(f)
    else:
        emit(stream_or_path)
