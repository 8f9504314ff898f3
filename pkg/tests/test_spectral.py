import numpy as np
import pytest

from app.exceptions import (
    ConvergenceError,
    DimensionError,
    HypothesisError,
    ResolventError,
)
from app.lab.matcore import CMatrix, MatrixKind
from app.lab.spectral import (
    SpectralDecomposition,
    _jacobi_hermitian,
    _one_sided_jacobi,
    _round_robin,
    abs_matrices,
    abs_matrix,
    eig_hermitian,
    eigvalsh_stack,
    resolvent_defect,
    singular_values,
    singular_values_many,
    svd,
)


def hermitian(ginibre, n):
    g = ginibre(n)
    return (g + g.H) / 2


@pytest.mark.parametrize('n', [1, 2, 5, 8])
def test_eig_hermitian_reconstructs(ginibre, n):
    a = hermitian(ginibre, n)
    decomp = eig_hermitian(a)
    values = decomp.values.real
    assert np.all(np.diff(values) <= 0)
    np.testing.assert_allclose(
        values, np.sort(np.linalg.eigvalsh(a.array))[::-1], atol=1e-12
    )
    np.testing.assert_allclose(decomp.matrix().array, a.array, atol=1e-12)


def test_eig_hermitian_rejects_non_hermitian():
    with pytest.raises(HypothesisError):
        eig_hermitian(CMatrix(np.array([[0, 1], [0, 0]])))
    with pytest.raises(DimensionError):
        eig_hermitian(CMatrix.zeros(2, 3))


def test_eigvalsh_stack_matches_individual_solves(ginibre):
    stack = np.stack([hermitian(ginibre, 4).array for _ in range(6)])
    values = eigvalsh_stack(stack)
    assert values.shape == (6, 4)
    for row, matrix in zip(values, stack):
        np.testing.assert_allclose(
            row, np.sort(np.linalg.eigvalsh(matrix))[::-1], atol=1e-12
        )


def test_jacobi_sweep_cap_raises(ginibre):
    a = hermitian(ginibre, 4).array
    with pytest.raises(ConvergenceError):
        _jacobi_hermitian(a[None], max_sweeps=0)
    with pytest.raises(ConvergenceError):
        _one_sided_jacobi(ginibre(4).array[None], max_sweeps=0)


@pytest.mark.parametrize('n', [2, 3, 7, 8])
def test_round_robin_covers_every_pair_once(n):
    pairs = [
        (int(p), int(q))
        for ps, qs in _round_robin(n)
        for p, q in zip(ps, qs)
    ]
    assert sorted(pairs) == [(p, q) for p in range(n) for q in range(p + 1, n)]


@pytest.mark.parametrize('shape', [(1, 1), (4, 4), (5, 3), (3, 5), (8, 8)])
def test_svd_factors(ginibre, shape):
    a = ginibre(*shape)
    result = svd(a)
    s = result.values
    assert np.all(np.diff(s) <= 0)
    np.testing.assert_allclose(result.matrix().array, a.array, atol=1e-12)
    u, v = result.U.array, result.V.array
    np.testing.assert_allclose(u.conj().T @ u, np.eye(shape[0]), atol=1e-12)
    np.testing.assert_allclose(v.conj().T @ v, np.eye(shape[1]), atol=1e-12)


def test_singular_values_against_reference(ginibre):
    for n in (2, 3, 4, 6, 8):
        for _ in range(20):
            a = ginibre(n)
            s = singular_values(a)
            np.testing.assert_allclose(
                s, np.linalg.svd(a.array, compute_uv=False), rtol=1e-10, atol=1e-12
            )
            gram = np.linalg.eigvalsh(a.array.conj().T @ a.array)
            np.testing.assert_allclose(
                s**2, np.sort(gram)[::-1], rtol=1e-9, atol=1e-12
            )


def test_svd_rank_deficient():
    x = np.array([1, 2j, -1, 0.5])
    a = CMatrix(np.outer(x, x.conj()))
    result = svd(a)
    np.testing.assert_allclose(
        result.values, [np.vdot(x, x).real, 0, 0, 0], atol=1e-12
    )
    u = result.U.array
    np.testing.assert_allclose(u.conj().T @ u, np.eye(4), atol=1e-12)
    np.testing.assert_allclose(result.matrix().array, a.array, atol=1e-12)


def test_svd_of_empty_matrix():
    result = svd(CMatrix.zeros(0, 2))
    assert result.singular_values == ()
    assert result.V.shape == (2, 2)


def test_abs_matrix(ginibre):
    a = ginibre(5)
    m = abs_matrix(a).array
    np.testing.assert_array_equal(m, m.conj().T)
    np.testing.assert_allclose(m @ m, a.array.conj().T @ a.array, atol=1e-12)
    assert np.all(np.linalg.eigvalsh(m) > -1e-12)
    with pytest.raises(DimensionError):
        abs_matrix(CMatrix.zeros(2, 3))


def test_abs_of_scalar():
    assert abs_matrix(CMatrix.diag([-0.5])).array[0, 0] == pytest.approx(0.5)


def test_singular_values_many_mixed_shapes(ginibre):
    mats = [
        ginibre(4),
        ginibre(3, 5),
        ginibre(4),
        CMatrix.zeros(0, 3),
        ginibre(1),
    ]
    values = singular_values_many(mats)
    assert [len(s) for s in values] == [4, 3, 4, 0, 1]
    for s, mat in zip(values, mats):
        if mat.rows and mat.cols:
            np.testing.assert_allclose(
                s, np.linalg.svd(mat.array, compute_uv=False), atol=1e-12
            )


def test_singular_values_many_batch_matches_single_calls(ginibre):
    mats = [ginibre(5) for _ in range(7)]
    for batched, mat in zip(singular_values_many(mats), mats):
        np.testing.assert_allclose(batched, singular_values(mat), atol=1e-13)


def test_abs_matrices_batch(ginibre):
    mats = [ginibre(3), ginibre(5), ginibre(3)]
    for m, a in zip(abs_matrices(mats), mats):
        np.testing.assert_allclose(
            m.array @ m.array, a.array.conj().T @ a.array, atol=1e-12
        )
    with pytest.raises(DimensionError):
        abs_matrices([ginibre(2), CMatrix.zeros(2, 3)])


def test_absolute_of_decomposition_matches_abs_matrix(in_disk):
    a, decomp = in_disk(5)
    np.testing.assert_allclose(
        decomp.absolute().array, abs_matrix(a).array, atol=1e-11
    )


def unit_circle(count=100):
    return np.exp(2j * np.pi * np.arange(count) / count)


def test_resolvent_defect_of_normal_matrices(in_disk, rng):
    for _ in range(50):
        a, decomp = in_disk(int(rng.integers(2, 9)))
        assert resolvent_defect(a, decomp, unit_circle()) <= 1e-8


def test_resolvent_defect_of_jordan_block():
    a = CMatrix(np.array([[0, 0.9], [0, 0]]))
    decomp = SpectralDecomposition(CMatrix.identity(2), (0, 0))
    assert resolvent_defect(a, decomp, unit_circle()) > 0.1


def test_resolvent_defect_rejects_samples_on_the_spectrum(in_disk):
    a, decomp = in_disk(3, MatrixKind.HERMITIAN_IN_DISK)
    with pytest.raises(ResolventError):
        resolvent_defect(a, decomp, [decomp.eigenvalues[0]])


def test_decomposition_needs_unitary_basis():
    with pytest.raises(HypothesisError):
        SpectralDecomposition(CMatrix.diag([1, 2]), (0.1, 0.2))
    with pytest.raises(DimensionError):
        SpectralDecomposition(CMatrix.identity(2), (0.1,))
