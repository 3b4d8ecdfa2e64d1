import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy.linalg import eig

from errors import InvalidOrderError, MatrixShapeError, NotAnEigenpairError, SingularPencilError
from models import GenEig
from services.compound import compound, volume
from services.pencil import (
    PencilService,
    chordal_distance,
    eigenvalue_products,
    make_pencil,
    pencil_service,
    shift_ladder,
)
from tests.oracles import (
    PROPERTY_CASES,
    chordal_match,
    determinant_polynomial_eigs,
    random_matrix,
    singular_matrix,
    weierstrass_instance,
)

INF = GenEig(1.0, 0.0, infinite=True)


def finite(value):
    return GenEig(complex(value), 1.0)


class TestHelpers:
    def test_shift_ladder(self):
        assert shift_ladder(5) == [0, 1, -1, 2, -2]
        assert shift_ladder(1) == [0]

    def test_chordal_distance(self):
        assert chordal_distance(INF, GenEig(3.0, 0.0, infinite=True)) == 0.0
        assert chordal_distance(finite(2), GenEig(4.0, 2.0)) == pytest.approx(0.0)
        assert chordal_distance(finite(0), INF) == pytest.approx(1.0)

    def test_eigenvalue_products(self):
        products = eigenvalue_products([finite(2), finite(3), INF], 2)
        assert [p.infinite for p in products] == [False, True, True]
        assert products[0].value == pytest.approx(6)

    def test_make_pencil_shapes(self):
        with pytest.raises(MatrixShapeError):
            make_pencil(np.eye(2), np.eye(3))
        with pytest.raises(MatrixShapeError):
            make_pencil(np.ones((2, 3)), np.ones((2, 3)))


class TestGsd:
    def test_factors(self, rng):
        for _ in range(20):
            n = int(rng.integers(1, 7))
            p = make_pencil(random_matrix(rng, n, complex_entries=True), random_matrix(rng, n))
            result = pencil_service.gsd(p)
            assert_allclose(result.u @ p.a @ result.v, result.t, atol=1e-12)
            assert_allclose(result.u @ p.b @ result.v, result.s, atol=1e-12)
            assert_allclose(np.tril(result.t, -1), 0, atol=1e-12)
            assert_allclose(np.tril(result.s, -1), 0, atol=1e-12)

    def test_triangular_shortcut(self):
        p = make_pencil(np.diag([0, 1, 2]), np.diag([1, 2, 0]))
        result = pencil_service.gsd(p)
        assert_allclose(result.u, np.eye(3))
        assert_allclose(result.t, p.a)


class TestGeneralizedEigenvalues:
    def test_periodic(self, periodic):
        eigs = pencil_service.generalized_eigenvalues(periodic.pencil())
        assert chordal_match(eigs, [finite(1j), finite(-1j), INF], 1e-8)

    def test_periodic_compound(self, periodic):
        p2 = pencil_service.kcompound_pencil(periodic.pencil(), 2)
        eigs = pencil_service.generalized_eigenvalues(p2)
        assert chordal_match(eigs, [finite(1), INF, INF], 1e-8)

    def test_diagonal(self, diag_pencil):
        eigs = pencil_service.generalized_eigenvalues(diag_pencil.pencil())
        assert [e.display() for e in eigs] == ['0', '0.5', 'inf']

    def test_identity_pencil(self):
        eigs = pencil_service.generalized_eigenvalues(make_pencil(np.eye(4), np.eye(4)))
        assert all(e.value == pytest.approx(1) for e in eigs)

    def test_singular_pencil(self):
        p = make_pencil(np.diag([1, 0]), np.diag([1, 0]))
        with pytest.raises(SingularPencilError):
            pencil_service.generalized_eigenvalues(p)

    def test_matches_determinant_polynomial(self, rng):
        for _ in range(50):
            n = int(rng.integers(1, 5))
            a = random_matrix(rng, n)
            b = random_matrix(rng, n)
            if rng.integers(2):
                b[:, -1] = 0
            eigs = pencil_service.generalized_eigenvalues(make_pencil(a, b))
            assert chordal_match(eigs, determinant_polynomial_eigs(a, b), 1e-6)


class TestRegularity:
    def test_periodic_regular_at_zero(self, periodic):
        report = pencil_service.is_regular(periodic.pencil())
        assert report.regular
        assert report.witness_lambda == 0
        assert report.det_a == pytest.approx(-1)
        assert report.det_b == pytest.approx(0)

    def test_singular_common_kernel(self):
        report = pencil_service.is_regular(make_pencil(np.diag([1, 0]), np.diag([2, 0])))
        assert not report.regular
        assert report.shifts_tried == 3
        assert_allclose(np.abs(report.common_kernel_vector), [0, 1], atol=1e-12)

    def test_shift_override(self):
        a = np.diag([0.0, 1.0])
        report = PencilService(shifts=[0, 5]).is_regular(make_pencil(a, np.eye(2)))
        assert report.witness_lambda == 5

    def test_normal_rank(self):
        assert pencil_service.normal_rank(make_pencil(np.diag([1, 0]), np.diag([2, 0]))) == 1
        assert pencil_service.normal_rank(make_pencil(np.eye(3), np.zeros((3, 3)))) == 3


class TestCompoundPencil:
    def test_singular_compound_witness(self, diag_pencil):
        p = diag_pencil.pencil()
        p2 = pencil_service.kcompound_pencil(p, 2)
        assert_allclose(p2.a, np.diag([0, 0, 2]))
        assert_allclose(p2.b, np.diag([2, 0, 0]))

        report = pencil_service.compound_regularity(p, 2)
        assert not report.regular
        assert_allclose(np.abs(report.common_kernel_vector), [0, 1, 0], atol=1e-12)

    def test_regular_when_one_factor_invertible(self, periodic):
        report = pencil_service.compound_regularity(periodic.pencil(), 2)
        assert report.regular
        assert report.order == 2
        assert report.witness_lambda is not None

    def test_order_range(self, periodic):
        with pytest.raises(InvalidOrderError):
            pencil_service.compound_regularity(periodic.pencil(), 1)
        with pytest.raises(InvalidOrderError):
            pencil_service.compound_regularity(periodic.pencil(), 4)

    def test_singularity_criterion_agrees(self, rng):
        """det A = det B = 0, direct detection and a common kernel agree"""
        for i in range(PROPERTY_CASES):
            n = int(rng.integers(3, 7))
            k = int(rng.integers(2, n + 1))
            kind = i % 3
            a = singular_matrix(rng, n) if kind < 2 else random_matrix(rng, n) + 2 * n * np.eye(n)
            b = singular_matrix(rng, n) if kind == 0 else random_matrix(rng, n) + 2 * n * np.eye(n)
            if i % 2:
                a, b = b, a
            p = make_pencil(a, b)

            criterion = pencil_service.is_singular_matrix(p.a) and pencil_service.is_singular_matrix(p.b)
            direct = not pencil_service.compound_is_regular(p, k).regular
            report = pencil_service.compound_regularity(p, k)
            assert criterion == direct == (not report.regular) == (kind == 0)

            if not report.regular:
                z = report.common_kernel_vector
                p_k = pencil_service.kcompound_pencil(p, k)
                residual = max(np.linalg.norm(p_k.a @ z), np.linalg.norm(p_k.b @ z))
                assert residual <= 1e-8 * np.linalg.norm(z)

    def test_compound_spectrum_is_products(self, rng):
        for _ in range(PROPERTY_CASES):
            n = int(rng.integers(2, 6))
            k = int(rng.integers(2, n + 1))
            a, b, mu, _, _ = weierstrass_instance(rng, n, defective=False)
            p = make_pencil(a, b)
            eigs = pencil_service.generalized_eigenvalues(p)
            expected = [finite(m) for m in mu] + [INF] * (n - len(mu))
            assert chordal_match(eigs, expected, 1e-8)

            compound_eigs = pencil_service.generalized_eigenvalues(pencil_service.kcompound_pencil(p, k))
            assert chordal_match(compound_eigs, eigenvalue_products(expected, k), 1e-7)

    def test_matrix_polynomial_is_a_different_object(self):
        a, b = np.diag([2.0, 3.0]), np.eye(2)
        lam = 1.0
        polynomial = compound(a - lam * b, 2)[0, 0]
        pencil = compound(a, 2)[0, 0] - lam * compound(b, 2)[0, 0]
        assert polynomial == pytest.approx(2)
        assert pencil == pytest.approx(5)


class TestCompoundEigenpair:
    def test_diagonal(self):
        p = make_pencil(np.diag([1.0, 2.0, 3.0]), np.eye(3))
        lam, v = pencil_service.compound_eigenpair(p, [(1, np.eye(3)[:, 0]), (2, np.eye(3)[:, 1])], 2)
        assert lam == pytest.approx(2)
        assert_allclose(v, [1, 0, 0])

    def test_rejects_non_eigenpair(self):
        p = make_pencil(np.diag([1.0, 2.0, 3.0]), np.eye(3))
        with pytest.raises(NotAnEigenpairError):
            pencil_service.compound_eigenpair(p, [(1, np.eye(3)[:, 0]), (5, np.eye(3)[:, 1])], 2)

    def test_wrong_count(self):
        p = make_pencil(np.eye(3), np.eye(3))
        with pytest.raises(InvalidOrderError):
            pencil_service.compound_eigenpair(p, [(1, np.eye(3)[:, 0])], 2)

    def test_volume_scaling(self, rng):
        for _ in range(50):
            n = int(rng.integers(2, 5))
            k = int(rng.integers(1, n + 1))
            a = random_matrix(rng, n, complex_entries=True)
            b = random_matrix(rng, n, complex_entries=True) + 2 * n * np.eye(n)
            w, vr = eig(a, b)
            pairs = [(w[i], vr[:, i]) for i in range(k)]
            p = make_pencil(a, b)
            lam, z = pencil_service.compound_eigenpair(p, pairs, k)
            assert_allclose(compound(a, k) @ z, lam * (compound(b, k) @ z), atol=1e-8)
            x = np.column_stack([v for _, v in pairs])
            assert volume(a @ x) == pytest.approx(abs(lam) * volume(b @ x), rel=1e-8)
