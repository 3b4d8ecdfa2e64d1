"""Drazin index and Drazin inverse of square matrices."""

import logging
from typing import List, Optional, Tuple

import numpy as np
from scipy.linalg import svdvals

from config import Config
from errors import IllConditionedCoreError
from models import DrazinResult, Matrix
from services.compound import as_square, numerical_rank, rank_tolerance

logger = logging.getLogger(__name__)


class DrazinService:
    def __init__(self,
                 rank_rtol: Optional[float] = None,
                 cond_limit: Optional[float] = None,
                 allowance: Optional[float] = None):
        self.rank_rtol = rank_rtol or Config.RANK_RTOL
        self.cond_limit = cond_limit or Config.DRAZIN_COND_LIMIT
        self.allowance = allowance or Config.POWER_RANK_ALLOWANCE

    def _power_rank(self, power: np.ndarray, j: int) -> int:
        # Powers of a matrix divided by its reference scale are bounded by
        # one, so the reference of the j-th power is one as well
        rtol = rank_tolerance(np.empty(0), power.shape, self.rank_rtol, reference=1.0)
        return numerical_rank(power, rtol=j * self.allowance * rtol, reference=1.0)

    def _scaled_powers(self, a: Matrix, reference: Optional[float]) -> Tuple[float, List[np.ndarray], List[int], int]:
        """Powers of a / scale and the rank sequence up to the index.

        scale is max(reference, ||a||_2), so ranks are measured against the
        reference when a is only roundoff on that scale.
        """
        n = a.shape[0]
        scale = max(reference or 0.0, np.linalg.norm(a, 2))
        unit = a / scale
        powers = [np.eye(n, dtype=np.complex128), unit]
        ranks = [n, self._power_rank(unit, 1)]
        while ranks[-1] != ranks[-2]:
            if len(ranks) > n + 1:
                # rank(A^q) = rank(A^(q+1)) for some q <= n in exact arithmetic
                logger.warning(f'rank sequence {ranks} did not settle within {n} powers')
                break
            powers.append(powers[-1] @ unit)
            ranks.append(self._power_rank(powers[-1], len(powers) - 1))
        return scale, powers, ranks, len(ranks) - 2

    def drazin_index(self, a, reference: Optional[float] = None) -> int:
        """Minimal q >= 0 with rank(A^q) = rank(A^(q+1))"""
        a = as_square(a)
        if not np.any(a):
            return 1
        return self._scaled_powers(a, reference)[3]

    def drazin_inverse(self, a, reference: Optional[float] = None) -> DrazinResult:
        """A^D = X (Y^* A X)^-1 Y^*, X and Y orthonormal bases of range(A^q)
        and range((A^q)^*).

        reference is the scale ranks are measured against, ||A||_2 when
        absent. A k-compound of M is ranked against ||M||_2^k.
        """
        a = as_square(a)
        n = a.shape[0]
        if not np.any(a):
            return DrazinResult(index=1, inverse=np.zeros((n, n), dtype=np.complex128), rank_sequence=[n, 0, 0],
                                range_basis=np.zeros((n, 0), dtype=np.complex128))

        scale, powers, ranks, q = self._scaled_powers(a, reference)
        r = ranks[q]
        if r == 0:
            return DrazinResult(index=q, inverse=np.zeros((n, n), dtype=np.complex128), rank_sequence=ranks,
                                range_basis=np.zeros((n, 0), dtype=np.complex128))

        u, _, vh = np.linalg.svd(powers[q])
        x = u[:, :r]
        y = vh[:r].conj().T
        core = y.conj().T @ powers[1] @ x
        s = svdvals(core)
        cond = s[0] / s[-1]
        if cond > self.cond_limit:
            diagnostics = {'index': q, 'core_rank': r, 'condition': cond, 'limit': self.cond_limit}
            logger.error(f'Drazin core too ill-conditioned: {diagnostics}')
            raise IllConditionedCoreError(
                f'Drazin core condition {cond:.3e} exceeds {self.cond_limit:.1e}', diagnostics)

        # (A / scale)^D = scale * A^D
        inverse = x @ np.linalg.solve(core, y.conj().T) / scale
        return DrazinResult(index=q, inverse=inverse, rank_sequence=ranks, range_basis=x)


# Initialize service instance
drazin_service = DrazinService()
