"""Matrix pencils A - lambda B and their k-multiplicative compounds."""

import logging
from itertools import combinations
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np
from scipy.linalg import LinAlgError, null_space, qz, svdvals

from config import Config
from errors import (
    InvalidOrderError,
    MatrixShapeError,
    NotAnEigenpairError,
    GsdConvergenceError,
    SingularPencilError,
)
from models import GenEig, GsdResult, Pencil, RegularityReport
from services.combinat import check_order
from services.compound import as_square, as_vector, compound, wedge

logger = logging.getLogger(__name__)

# Unit kernel vectors closer than this are treated as one direction
_INDEPENDENCE_TOL = 1e-6


def make_pencil(a, b) -> Pencil:
    a = as_square(a, 'A')
    b = as_square(b, 'B')
    if a.shape != b.shape:
        raise MatrixShapeError(f'A is {a.shape} but B is {b.shape}')
    return Pencil(a, b)


def shift_ladder(count: int) -> List[float]:
    """0, 1, -1, 2, -2, ... truncated to count values"""
    shifts = [0.0]
    i = 1
    while len(shifts) < count:
        shifts.append(float(i))
        if len(shifts) < count:
            shifts.append(-float(i))
        i += 1
    return shifts[:count]


def chordal_distance(e1: GenEig, e2: GenEig) -> float:
    """Chordal metric on homogeneous pairs; handles infinity uniformly"""
    num = abs(e1.alpha * e2.beta - e2.alpha * e1.beta)
    den = np.hypot(abs(e1.alpha), abs(e1.beta)) * np.hypot(abs(e2.alpha), abs(e2.beta))
    return float(num / den) if den > 0 else 0.0


def eigenvalue_products(eigs: Sequence[GenEig], k: int) -> List[GenEig]:
    """k-fold products over Q(k, len(eigs)); infinite times anything is infinite"""
    products = []
    for idx in combinations(range(len(eigs)), k):
        alpha = complex(np.prod([eigs[i].alpha for i in idx]))
        beta = complex(np.prod([eigs[i].beta for i in idx]))
        products.append(GenEig(alpha, beta, infinite=any(eigs[i].infinite for i in idx)))
    return products


def _is_upper(m: np.ndarray) -> bool:
    return not np.any(np.tril(m, -1))


def _kernel_vector(m: np.ndarray) -> np.ndarray:
    """Right singular vector of the smallest singular value"""
    _, _, vh = np.linalg.svd(m)
    return vh[-1].conj()


class PencilService:
    def __init__(self,
                 tol: Optional[float] = None,
                 gsd_tol: Optional[float] = None,
                 eigenpair_tol: Optional[float] = None,
                 shifts: Optional[Sequence[complex]] = None):
        self.tol = tol or Config.PENCIL_TOL
        self.gsd_tol = gsd_tol or Config.GSD_TOL
        self.eigenpair_tol = eigenpair_tol or Config.EIGENPAIR_TOL
        self.shifts = list(shifts) if shifts else None

    @staticmethod
    def _scale(p: Pencil) -> float:
        return max(np.linalg.norm(p.a), np.linalg.norm(p.b))

    def _full_rank(self, m: np.ndarray, reference: float) -> bool:
        if reference == 0:
            return False
        return svdvals(m)[-1] > self.tol * reference

    def is_singular_matrix(self, m: np.ndarray) -> bool:
        """det(m) = 0 in the sense of numerical rank deficiency"""
        return not self._full_rank(m, np.linalg.norm(m))

    def candidate_shifts(self, n: int, shifts: Optional[Iterable[complex]] = None) -> List[complex]:
        if shifts is not None:
            return list(shifts)
        if self.shifts is not None:
            return list(self.shifts)
        return shift_ladder(n + 1)

    def gsd(self, p: Pencil) -> GsdResult:
        """Generalized Schur decomposition U A V = T, U B V = S"""
        n = p.dimension
        if _is_upper(p.a) and _is_upper(p.b):
            eye = np.eye(n, dtype=np.complex128)
            return GsdResult(u=eye, v=eye, t=p.a.copy(), s=p.b.copy(), residuals={})

        try:
            t, s, q, z = qz(p.a, p.b, output='complex')
        except (LinAlgError, ValueError) as e:
            logger.error(f'QZ iteration failed on a {n}x{n} pencil: {str(e)}')
            raise GsdConvergenceError(f'QZ iteration failed: {e}', {'n': n}) from e

        u = q.conj().T
        v = z
        eye = np.eye(n)
        norm_a = np.linalg.norm(p.a) or 1.0
        norm_b = np.linalg.norm(p.b) or 1.0
        residuals = {
            'reconstruction_a': np.linalg.norm(u @ p.a @ v - t) / norm_a,
            'reconstruction_b': np.linalg.norm(u @ p.b @ v - s) / norm_b,
            'unitary_u': np.linalg.norm(u.conj().T @ u - eye),
            'unitary_v': np.linalg.norm(v.conj().T @ v - eye),
            'lower_t': np.abs(np.tril(t, -1)).max(initial=0.0) / norm_a,
            'lower_s': np.abs(np.tril(s, -1)).max(initial=0.0) / norm_b,
        }
        worst = max(residuals.values())
        if worst > self.gsd_tol:
            logger.error(f'GSD residuals rejected: {residuals}')
            raise GsdConvergenceError(
                f'GSD residual {worst:.3e} exceeds tolerance {self.gsd_tol:.1e}', residuals)
        return GsdResult(u=u, v=v, t=t, s=s, residuals=residuals)

    def generalized_eigenvalues(self, p: Pencil) -> List[GenEig]:
        """The n diagonal pairs (T_ii, S_ii) of a GSD.

        Raises SingularPencilError when a pair is numerically (0, 0).
        """
        scale = self._scale(p)
        if scale == 0:
            raise SingularPencilError('zero pencil is singular')
        result = self.gsd(p)
        threshold = self.tol * scale
        eigs = []
        for i in range(p.dimension):
            alpha = complex(result.t[i, i])
            beta = complex(result.s[i, i])
            if abs(alpha) <= threshold and abs(beta) <= threshold:
                logger.error(f'singular pencil: diagonal pair {i} is ({alpha}, {beta})')
                raise SingularPencilError(
                    f'singular pencil: diagonal pair {i} is numerically (0, 0)',
                    {'position': i, 'alpha': alpha, 'beta': beta})
            eigs.append(GenEig(alpha, beta, infinite=abs(beta) <= threshold))
        return eigs

    def is_regular(self, p: Pencil, shifts: Optional[Iterable[complex]] = None,
                   scale: Optional[Tuple[float, float]] = None) -> RegularityReport:
        """Walk the shift ladder until A - lambda B has full numerical rank.

        det(A - lambda B) has degree at most n, so n + 1 failed shifts
        prove the pencil singular. scale replaces (||A||_F, ||B||_F) as the
        reference of the rank test.
        """
        n = p.dimension
        candidates = self.candidate_shifts(n, shifts)
        if len(candidates) < n + 1:
            logger.warning(f'{len(candidates)} shifts cannot certify singularity of a {n}x{n} pencil')
        det_a = complex(np.linalg.det(p.a))
        det_b = complex(np.linalg.det(p.b))
        if scale is None:
            scale = (np.linalg.norm(p.a), np.linalg.norm(p.b))
        norm_a, norm_b = scale

        for tried, lam in enumerate(candidates, start=1):
            if self._full_rank(p.a - lam * p.b, norm_a + abs(lam) * norm_b):
                logger.info(f'pencil regular, witness shift {lam}')
                return RegularityReport(
                    regular=True,
                    witness_lambda=complex(lam),
                    det_a=det_a,
                    det_b=det_b,
                    shifts_tried=tried,
                )

        common = null_space(np.vstack([p.a, p.b]), rcond=self.tol)
        return RegularityReport(
            regular=False,
            witness_lambda=None,
            det_a=det_a,
            det_b=det_b,
            common_kernel_vector=common[:, 0] if common.shape[1] else None,
            shifts_tried=len(candidates),
        )

    def normal_rank(self, p: Pencil) -> int:
        """max over n + 1 ladder shifts of rank(A - lambda B)"""
        norm_a = np.linalg.norm(p.a)
        norm_b = np.linalg.norm(p.b)
        best = 0
        for lam in shift_ladder(p.dimension + 1):
            reference = norm_a + abs(lam) * norm_b
            if reference == 0:
                continue
            s = svdvals(p.a - lam * p.b)
            best = max(best, int(np.sum(s > self.tol * reference)))
        return best

    def kcompound_pencil(self, p: Pencil, k: int) -> Pencil:
        check_order(p.dimension, k)
        return Pencil(compound(p.a, k), compound(p.b, k))

    def compound_kernel_witness(self, p: Pencil, k: int) -> np.ndarray:
        """Unit z with A^(k) z = B^(k) z = 0, for singular A and B.

        Wedges x in ker A and y in ker B, completed by orthonormal vectors
        of their complement; a single common direction is used when x and
        y coincide.
        """
        n = p.dimension
        x = _kernel_vector(p.a)
        y = _kernel_vector(p.b)
        if svdvals(np.column_stack([x, y]))[-1] > _INDEPENDENCE_TOL:
            cols = [x, y]
        else:
            cols = [_kernel_vector(np.vstack([p.a, p.b]))]
        complement = null_space(np.column_stack(cols).conj().T)
        need = k - len(cols)
        if need > complement.shape[1]:
            raise InvalidOrderError(f'order k={k} exceeds dimension {n}')
        z = wedge(np.column_stack(cols + [complement[:, i] for i in range(need)]))
        return z / np.linalg.norm(z)

    def compound_is_regular(self, p: Pencil, k: int,
                            shifts: Optional[Iterable[complex]] = None) -> RegularityReport:
        """Shift ladder on (A,B)^(k), ranks measured against ||A||_F^k and ||B||_F^k"""
        scale = (np.linalg.norm(p.a) ** k, np.linalg.norm(p.b) ** k)
        return self.is_regular(self.kcompound_pencil(p, k), shifts, scale=scale)

    def compound_regularity(self, p: Pencil, k: int) -> RegularityReport:
        """Regularity of (A,B)^(k), k >= 2: singular iff det A = det B = 0.

        A singular report carries a common kernel vector of A^(k) and B^(k).
        """
        n = p.dimension
        if k < 2 or k > n:
            raise InvalidOrderError(f'compound regularity needs 2 <= k <= {n}, got k={k}')
        det_a = complex(np.linalg.det(p.a))
        det_b = complex(np.linalg.det(p.b))
        a_singular = self.is_singular_matrix(p.a)
        b_singular = self.is_singular_matrix(p.b)
        compound_pencil = self.kcompound_pencil(p, k)

        if not (a_singular and b_singular):
            ladder = self.compound_is_regular(p, k)
            if not ladder.regular:
                logger.warning(f'k={k}: determinant test says regular but no full-rank shift found')
            return RegularityReport(
                regular=True,
                witness_lambda=ladder.witness_lambda,
                det_a=det_a,
                det_b=det_b,
                order=k,
                shifts_tried=ladder.shifts_tried,
            )

        z = self.compound_kernel_witness(p, k)
        residual = max(np.linalg.norm(compound_pencil.a @ z), np.linalg.norm(compound_pencil.b @ z))
        if residual > Config.RESIDUAL_TOL:
            logger.warning(f'k={k}: kernel witness residual {residual:.3e}')
        return RegularityReport(
            regular=False,
            witness_lambda=None,
            det_a=det_a,
            det_b=det_b,
            common_kernel_vector=z,
            order=k,
        )

    def compound_eigenpair(self,
                           p: Pencil,
                           eigenpairs: Sequence[Tuple[complex, np.ndarray]],
                           k: int) -> Tuple[complex, np.ndarray]:
        """(prod lambda_i, [v^1 ... v^k]^(k)) from k eigenpairs of (A, B)"""
        n = p.dimension
        check_order(n, k)
        if len(eigenpairs) != k:
            raise InvalidOrderError(f'expected {k} eigenpairs, got {len(eigenpairs)}')
        norm_a = np.linalg.norm(p.a, 2)
        norm_b = np.linalg.norm(p.b, 2)
        vectors = []
        for i, (lam, v) in enumerate(eigenpairs):
            v = as_vector(v, n, f'eigenvector {i}')
            residual = np.linalg.norm(p.a @ v - lam * (p.b @ v))
            bound = self.eigenpair_tol * (norm_a + abs(lam) * norm_b) * np.linalg.norm(v)
            if residual > bound:
                raise NotAnEigenpairError(
                    f'pair {i}: residual {residual:.3e} exceeds {bound:.3e}',
                    {'pair': i, 'residual': residual})
            vectors.append(v)
        lam_tilde = complex(np.prod([lam for lam, _ in eigenpairs]))
        return lam_tilde, wedge(np.column_stack(vectors))


# Initialize service instance
pencil_service = PencilService()
