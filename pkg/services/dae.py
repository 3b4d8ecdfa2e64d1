"""Analysis and simulation of B x(j+1) = A x(j) and its k-compound systems."""

import logging
from typing import Iterable, List, Optional

import numpy as np
from scipy.linalg import eigvals, lstsq, schur, svdvals

from config import Config
from errors import (
    HypothesisViolatedError,
    InconsistentInitialConditionError,
    InvalidOrderError,
    InvariantViolationError,
    MatrixShapeError,
    UntractableSystemError,
)
from models import (
    ConsistencyCheck,
    DaeAnalysis,
    DaeSystem,
    GenEig,
    StabilityVerdict,
    StableSubspaceReport,
    StepResult,
    Trajectory,
    VolumeTrace,
)
from services.combinat import check_order, choose
from services.compound import as_matrix, as_square, as_vector, compound, wedge
from services.drazin import DrazinService, drazin_service
from services.pencil import PencilService, eigenvalue_products, make_pencil, pencil_service

logger = logging.getLogger(__name__)


def make_system(a, b) -> DaeSystem:
    p = make_pencil(a, b)
    return DaeSystem(p.a, p.b)


def classify(finite_eigs: List[GenEig], margin: float) -> StabilityVerdict:
    """stable if every finite eigenvalue is inside 1 - margin, marginal if
    none is outside 1 + margin but some sit in the band"""
    moduli = [e.modulus for e in finite_eigs]
    if all(m < 1 - margin for m in moduli):
        return StabilityVerdict.STABLE
    if any(m > 1 + margin for m in moduli):
        return StabilityVerdict.UNSTABLE
    return StabilityVerdict.MARGINAL


class DaeService:
    def __init__(self,
                 pencils: Optional[PencilService] = None,
                 drazin: Optional[DrazinService] = None,
                 residual_tol: Optional[float] = None,
                 consistency_tol: Optional[float] = None,
                 stability_margin: Optional[float] = None):
        self.pencils = pencils or pencil_service
        self.drazin = drazin or drazin_service
        self.residual_tol = residual_tol or Config.RESIDUAL_TOL
        self.consistency_tol = consistency_tol or Config.CONSISTENCY_TOL
        self.stability_margin = stability_margin or Config.STABILITY_MARGIN

    def analyze(self, sys: DaeSystem, shifts: Optional[Iterable[complex]] = None) -> DaeAnalysis:
        """Tractability, shifted matrices, Drazin propagator, consistency
        subspace and stability of one system"""
        p = sys.pencil()
        report = self.pencils.is_regular(p, shifts)
        if not report.regular:
            logger.info(f'{sys.dimension}-dimensional system is not tractable')
            return DaeAnalysis(system=sys, tractable=False)

        lam = report.witness_lambda
        shifted = sys.a - lam * sys.b
        b_hat = np.linalg.solve(shifted, sys.b)
        a_hat = np.linalg.solve(shifted, sys.a)

        commutator = np.linalg.norm(b_hat @ a_hat - a_hat @ b_hat)
        if commutator > self.residual_tol * max(1.0, np.linalg.norm(b_hat) * np.linalg.norm(a_hat)):
            logger.warning(f'shift {lam}: B_hat and A_hat fail to commute ({commutator:.3e})')

        # Entries of b_hat carry roundoff of order eps * cond(A - lambda B)
        s = svdvals(shifted)
        reference = max(1.0, np.linalg.norm(b_hat, 2)) * s[0] / s[-1]
        drazin = self.drazin.drazin_inverse(b_hat, reference=reference)
        propagator = drazin.inverse @ a_hat
        q = drazin.index
        basis = drazin.range_basis

        # Finite eigenvalues of (A, B) are those of the propagator on V^1;
        # the remaining n - dim V^1 are infinite
        restricted = basis.conj().T @ propagator @ basis
        finite = [GenEig(complex(mu), 1.0) for mu in eigvals(restricted)] if basis.shape[1] else []
        verdict = classify(finite, self.stability_margin)

        return DaeAnalysis(
            system=sys,
            tractable=True,
            shift_lambda=lam,
            b_hat=b_hat,
            a_hat=a_hat,
            drazin_index=q,
            propagator=propagator,
            consistency_basis=basis,
            finite_eigs=finite,
            infinite_count=sys.dimension - len(finite),
            stable=verdict is StabilityVerdict.STABLE,
            verdict=verdict,
            b_hat_nilpotent=drazin.core_rank == 0 and bool(np.any(np.abs(b_hat) > self.residual_tol)),
            rank_sequence=drazin.rank_sequence,
        )

    @staticmethod
    def require_tractable(analysis: DaeAnalysis):
        if not analysis.tractable:
            raise UntractableSystemError('the pencil (A, B) is singular, so the system is not tractable')

    def is_consistent(self, analysis: DaeAnalysis, x0) -> ConsistencyCheck:
        """Orthogonal distance of x0 from range((B_hat)^index)"""
        self.require_tractable(analysis)
        x0 = as_vector(x0, analysis.system.dimension, 'x0')
        basis = analysis.consistency_basis
        distance = float(np.linalg.norm(x0 - basis @ (basis.conj().T @ x0)))
        return ConsistencyCheck(
            consistent=distance <= self.consistency_tol * np.linalg.norm(x0),
            distance=distance,
        )

    def propagate(self, analysis: DaeAnalysis, x0, steps: int) -> Trajectory:
        """x(j) = ((B_hat)^D A_hat)^j x0 for j = 0..steps"""
        check = self.is_consistent(analysis, x0)
        if not check.consistent:
            logger.error(f'inconsistent initial condition, distance {check.distance:.3e}')
            raise InconsistentInitialConditionError(
                f'initial condition is {check.distance:.3e} away from the consistency subspace',
                check.distance)

        a, b = analysis.system.a, analysis.system.b
        scale = np.linalg.norm(a, 2) + np.linalg.norm(b, 2)
        states = [as_vector(x0, name='x0')]
        residuals = []
        for j in range(steps):
            states.append(analysis.propagator @ states[-1])
            residual = float(np.linalg.norm(b @ states[-1] - a @ states[-2]))
            if residual > self.residual_tol * scale * max(np.linalg.norm(states[-2]), 1e-300):
                logger.warning(f'step {j}: residual {residual:.3e} above tolerance')
            residuals.append(residual)
        return Trajectory(times=list(range(steps + 1)), states=states, residuals=residuals)

    def kcompound_dae(self, sys: DaeSystem, k: int) -> DaeSystem:
        check_order(sys.dimension, k)
        return DaeSystem(compound(sys.a, k), compound(sys.b, k))

    def volume_trace(self, sys: DaeSystem, initial_columns, steps: int,
                     analysis: Optional[DaeAnalysis] = None) -> VolumeTrace:
        """Propagate k consistent columns and track y(j) = X(j)^(k)"""
        columns = as_matrix(initial_columns, 'initial columns')
        n, k = columns.shape
        if n != sys.dimension:
            raise MatrixShapeError(f'initial columns have {n} rows, system dimension is {sys.dimension}')
        check_order(n, k)
        analysis = analysis or self.analyze(sys)
        self.require_tractable(analysis)

        trajectories = []
        for i in range(k):
            check = self.is_consistent(analysis, columns[:, i])
            if not check.consistent:
                logger.error(f'column {i} inconsistent, distance {check.distance:.3e}')
                raise InconsistentInitialConditionError(
                    f'column {i} is {check.distance:.3e} away from the consistency subspace',
                    check.distance, column=i)
            trajectories.append(self.propagate(analysis, columns[:, i], steps))

        compound_sys = self.kcompound_dae(sys, k)
        scale = np.linalg.norm(compound_sys.a, 2) + np.linalg.norm(compound_sys.b, 2)
        ys = [wedge(np.column_stack([t.states[j] for t in trajectories])) for j in range(steps + 1)]
        compound_residuals = []
        for j in range(steps):
            residual = float(np.linalg.norm(compound_sys.b @ ys[j + 1] - compound_sys.a @ ys[j]))
            if residual > self.residual_tol * scale * max(np.linalg.norm(ys[j]), 1.0):
                logger.warning(f'step {j}: compound residual {residual:.3e} above tolerance')
            compound_residuals.append(residual)

        return VolumeTrace(
            k=k,
            compound_states=ys,
            volumes=[float(np.linalg.norm(y)) for y in ys],
            compound_residuals=compound_residuals,
            trajectories=trajectories,
        )

    def _check_compound_regular(self, sys: DaeSystem, k: int):
        if k >= 2 and not self.pencils.compound_regularity(sys.pencil(), k).regular:
            raise HypothesisViolatedError(
                f'(A,B)^({k}) is singular (det A = det B = 0); use compound_singular_witness')

    def compound_analysis(self, sys: DaeSystem, k: int,
                          shifts: Optional[Iterable[complex]] = None) -> DaeAnalysis:
        """Analysis of the k-compound system, its consistency dimension
        checked against C(dim V^1, k)"""
        check_order(sys.dimension, k)
        shifts = list(shifts) if shifts is not None else None
        base = self.analyze(sys, shifts)
        if not base.tractable:
            raise HypothesisViolatedError('(A, B) is singular')
        if k == 1:
            return base
        self._check_compound_regular(sys, k)

        compound_result = self.analyze(self.kcompound_dae(sys, k), shifts)
        dim_k = compound_result.consistency_dim
        expected = choose(base.consistency_dim, k)
        if dim_k != expected:
            logger.error(f'dim V^{k} = {dim_k} but C({base.consistency_dim}, {k}) = {expected}')
            raise InvariantViolationError(
                f'dimension law failed: dim V^{k} = {dim_k}, expected {expected}',
                {'dim_k': dim_k, 'dim_1': base.consistency_dim, 'k': k})
        return compound_result

    def compound_consistency_dim(self, sys: DaeSystem, k: int) -> int:
        """dim V^k from the k-compound system"""
        return self.compound_analysis(sys, k).consistency_dim

    def compound_singular_witness(self, sys: DaeSystem, k: int) -> np.ndarray:
        """Nonzero z with A^(k) z = B^(k) z = 0: a constant solution of the
        k-compound system that is not the compound of original solutions"""
        if k < 2 or k > sys.dimension:
            raise InvalidOrderError(f'witness needs 2 <= k <= {sys.dimension}, got k={k}')
        p = sys.pencil()
        if not self.pencils.is_regular(p).regular:
            raise HypothesisViolatedError('(A, B) must be regular')
        if not (self.pencils.is_singular_matrix(sys.a) and self.pencils.is_singular_matrix(sys.b)):
            raise HypothesisViolatedError('witness needs det A = det B = 0')

        z = self.pencils.compound_kernel_witness(p, k)
        compound_sys = self.kcompound_dae(sys, k)
        # y(j) = z for all j: B^(k) z - A^(k) z
        residual = np.linalg.norm(compound_sys.b @ z - compound_sys.a @ z)
        if residual > self.residual_tol:
            logger.warning(f'constant compound solution residual {residual:.3e}')
        return z

    def stable_subspace_bound(self, sys: DaeSystem, k: int,
                              analysis: Optional[DaeAnalysis] = None) -> StableSubspaceReport:
        """Stable-subspace guarantee from stability of the k-compound system.

        When (A,B)^(k) is regular and every k-fold product of finite
        eigenvalues is inside the unit disk, some dim V^1 - k + 1 dimensional
        subspace of consistent initial conditions decays to zero.
        """
        analysis = analysis or self.analyze(sys)
        self.require_tractable(analysis)
        s = analysis.consistency_dim
        if k < 1 or k > s:
            raise HypothesisViolatedError(f'k={k} must lie in 1..dim V^1 = {s}')

        compound_regular = k == 1 or self.pencils.compound_regularity(sys.pencil(), k).regular
        products = eigenvalue_products(analysis.finite_eigs, k)
        largest = max((abs(e.value) for e in products), default=0.0)
        compound_stable = compound_regular and largest < 1 - self.stability_margin
        empty = np.zeros((sys.dimension, 0), dtype=np.complex128)
        if not compound_stable:
            return StableSubspaceReport(
                compound_stable=False,
                compound_regular=compound_regular,
                guaranteed_stable_dim=None,
                stable_basis=empty,
                largest_product=largest,
            )

        basis = analysis.consistency_basis
        restricted = basis.conj().T @ analysis.propagator @ basis
        _, z, sdim = schur(restricted, output='complex',
                           sort=lambda x: abs(x) < 1 - self.stability_margin)
        guaranteed = s - k + 1
        if sdim < guaranteed:
            logger.warning(f'only {sdim} stable directions found, {guaranteed} guaranteed')
        return StableSubspaceReport(
            compound_stable=True,
            compound_regular=True,
            guaranteed_stable_dim=guaranteed,
            stable_basis=basis @ z[:, :sdim],
            largest_product=largest,
        )

    def step_time_varying(self, b_next, a_now, x_now) -> StepResult:
        """Minimum-norm least-squares step of B(j+1) x(j+1) = A(j) x(j)"""
        b_next = as_square(b_next, 'B(j+1)')
        a_now = as_square(a_now, 'A(j)')
        if a_now.shape != b_next.shape:
            raise MatrixShapeError(f'A(j) is {a_now.shape} but B(j+1) is {b_next.shape}')
        x_now = as_vector(x_now, a_now.shape[0], 'x(j)')
        rhs = a_now @ x_now
        x_next, _, rank, _ = lstsq(b_next, rhs, cond=Config.PENCIL_TOL)
        residual = float(np.linalg.norm(b_next @ x_next - rhs))
        return StepResult(x_next=x_next, residual=residual, freedom_dim=b_next.shape[1] - int(rank))

    @staticmethod
    def project(basis, states) -> np.ndarray:
        """Coordinates basis^* x(j) of each state, one row per time"""
        basis = np.asarray(basis)
        return np.array([basis.conj().T @ x for x in states])


def propagator_shift_spread(analyses: List[DaeAnalysis]) -> float:
    """Largest distance between propagators of one system under different shifts"""
    props = [a.propagator for a in analyses]
    return max((np.linalg.norm(p - props[0]) for p in props[1:]), default=0.0)


def subspace_gap(u: np.ndarray, v: np.ndarray) -> float:
    """Sine of the largest principal angle between two orthonormal bases"""
    if u.shape[1] != v.shape[1]:
        return 1.0
    if u.shape[1] == 0:
        return 0.0
    # ||(I - U U^*) V||_2, accurate for small angles where 1 - cos^2 is not
    return float(svdvals(v - u @ (u.conj().T @ v))[0])


# Initialize service instance
dae_service = DaeService()
