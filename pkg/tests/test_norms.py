import numpy as np
import pytest

from app.exceptions import DimensionError
from app.lab.matcore import CMatrix, MatrixKind, RandomSpec, haar_unitary
from app.lab.norms import (
    audit_grid,
    check_direct_sum_identities,
    check_submultiplicative,
    check_submultiplicative_grid,
    direct_sum_values,
    hs_norm_direct,
    kyfan_dominance_check,
    norm_from_singular_values,
    opnorm,
    uinorm,
)
from app.lab.reports import NormKind, Tolerance
from app.lab.spectral import abs_matrix, singular_values


@pytest.mark.parametrize(
    'kind, expected',
    [
        (NormKind.operator(), 4.0),
        (NormKind.hilbert_schmidt(), 5.0),
        (NormKind.schatten(1), 7.0),
        (NormKind.schatten(2), 5.0),
        (NormKind.schatten(3), (27 + 64) ** (1 / 3)),
        (NormKind.kyfan(1), 4.0),
        (NormKind.kyfan(2), 7.0),
        (NormKind.kyfan(5), 7.0),
    ],
)
def test_norms_of_diagonal(kind, expected):
    assert uinorm(CMatrix.diag([3, 4]), kind) == pytest.approx(expected, rel=1e-14)


def test_norms_of_zero_and_empty():
    for kind in audit_grid(3):
        assert uinorm(CMatrix.zeros(3), kind) == 0.0
    assert norm_from_singular_values(np.array([]), NormKind.operator()) == 0.0


def test_hs_agrees_with_entrywise_sum(ginibre):
    for shape in [(1, 1), (3, 3), (4, 2), (2, 6)]:
        a = ginibre(*shape)
        assert uinorm(a, NormKind.hilbert_schmidt()) == pytest.approx(
            hs_norm_direct(a), rel=1e-12
        )


def test_schatten_is_non_increasing_in_p(ginibre):
    a = ginibre(6)
    values = [uinorm(a, NormKind.schatten(p)) for p in (1, 1.5, 2, 3, 5, np.inf)]
    assert all(x >= y - 1e-12 for x, y in zip(values, values[1:]))
    assert values[-1] == pytest.approx(opnorm(a), rel=1e-14)


def test_unitary_invariance(ginibre):
    a = ginibre(5)
    u = haar_unitary(RandomSpec(5, 1, kind=MatrixKind.UNITARY))
    v = haar_unitary(RandomSpec(5, 2, kind=MatrixKind.UNITARY))
    for kind in audit_grid(5):
        assert uinorm(u @ a @ v, kind) == pytest.approx(uinorm(a, kind), rel=1e-12)


def test_audit_grid():
    grid = audit_grid(4)
    assert len(grid) == 7 + 4
    assert [k.label for k in grid[:3]] == [
        'operator',
        'hilbert-schmidt',
        'schatten(1)',
    ]
    assert grid[-1] == NormKind.kyfan(4)


@pytest.mark.parametrize(
    'label', ['operator', 'hilbert-schmidt', 'schatten(1.5)', 'kyfan(3)']
)
def test_label_round_trip(label):
    assert NormKind.from_label(label).label == label


@pytest.mark.parametrize('label', ['schatten', 'kyfan(0)', 'frobenius', 'operator(2)'])
def test_bad_labels(label):
    with pytest.raises(ValueError):
        NormKind.from_label(label)


def test_submultiplicative_holds(ginibre):
    for _ in range(20):
        a, b, x = ginibre(4), ginibre(4), ginibre(4)
        for kind in audit_grid(4):
            assert check_submultiplicative(a, b, x, kind).holds


def test_submultiplicative_needs_compatible_shapes(ginibre):
    with pytest.raises(DimensionError):
        check_submultiplicative(
            ginibre(2), ginibre(3), ginibre(2), NormKind.operator()
        )


def test_direct_sum_identities(ginibre):
    report = check_direct_sum_identities(ginibre(3), ginibre(2))
    assert report.holds
    assert report.lhs <= 1e-12
    assert report.norm_label == 'singular-values'


def test_kyfan_dominance_checks_schatten_norms(ginibre):
    x = ginibre(4)
    report = kyfan_dominance_check(x, 2 * x)
    assert report.params['premise'] is True
    assert report.holds
    assert report.slack > 0


def test_kyfan_dominance_premise_failure():
    report = kyfan_dominance_check(2 * CMatrix.identity(2), CMatrix.identity(2))
    assert report.params['premise'] is False
    assert report.params['status'] == 'premise not satisfied'
    assert report.params['failing_k'] == 1


def test_tolerance_budget():
    tol = Tolerance(atol=1e-10, rtol=1e-9)
    assert tol.holds(1.0, 1.0 - 5e-10)
    assert not tol.holds(1.0, 1.0 - 5e-9)
    assert tol.holds(0.0, -5e-11)


def test_large_schatten_index_approaches_operator_norm(ginibre):
    for n in (2, 4, 8):
        a = ginibre(n)
        top = opnorm(a)
        s64 = uinorm(a, NormKind.schatten(64))
        assert top - 1e-12 <= s64 <= top * n ** (1 / 64) + 1e-12
        assert s64 == pytest.approx(top, rel=0.04)


def test_norm_of_absolute_value(ginibre):
    for n in (1, 3, 6):
        x = ginibre(n)
        abs_x = abs_matrix(x)
        for kind in audit_grid(n):
            assert uinorm(abs_x, kind) == pytest.approx(
                uinorm(x, kind), rel=1e-10
            )


def test_singular_values_of_products(ginibre):
    for _ in range(20):
        a, b, x = ginibre(4), ginibre(4), ginibre(4)
        scale = opnorm(a) * opnorm(b)
        lhs, rhs = singular_values(a @ x @ b), scale * singular_values(x)
        assert np.all(lhs <= rhs + 1e-10 + 1e-9 * rhs)


def test_submultiplicative_grid(ginibre):
    a, b, x = ginibre(3), ginibre(3), ginibre(3)
    reports = check_submultiplicative_grid(a, b, x)
    assert [r.norm_kind for r in reports] == audit_grid(3)
    assert all(r.holds for r in reports)
    index = audit_grid(3).index(NormKind.schatten(3))
    single = check_submultiplicative(a, b, x, NormKind.schatten(3))
    assert single.lhs == pytest.approx(reports[index].lhs, rel=1e-14)
    assert single.rhs == pytest.approx(reports[index].rhs, rel=1e-14)


def test_direct_sum_values():
    values = direct_sum_values(np.array([3.0, 1.0]), np.array([2.0]))
    np.testing.assert_array_equal(values, [3.0, 2.0, 1.0])
    assert direct_sum_values().size == 0


def test_hs_oracle_on_random_matrices(rng):
    for _ in range(100):
        rows, cols = rng.integers(1, 9, size=2)
        a = CMatrix(
            rng.standard_normal((rows, cols))
            + 1j * rng.standard_normal((rows, cols))
        )
        assert uinorm(a, NormKind.schatten(2)) == pytest.approx(
            hs_norm_direct(a), rel=1e-10
        )
        s = singular_values(a)
        gram = np.sort(np.linalg.eigvalsh(a.array.conj().T @ a.array))[::-1]
        roots = np.sqrt(np.clip(gram[: len(s)], 0.0, None))
        np.testing.assert_allclose(s, roots, rtol=1e-10, atol=1e-10 * s[0])


def test_unitary_invariance_over_random_unitaries(rng):
    for trial in range(100):
        n = int(rng.integers(1, 9))
        a = CMatrix(
            rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        )
        u = haar_unitary(RandomSpec(n, 2 * trial, kind=MatrixKind.UNITARY))
        v = haar_unitary(RandomSpec(n, 2 * trial + 1, kind=MatrixKind.UNITARY))
        moved = u @ a @ v
        for kind in audit_grid(n):
            assert uinorm(moved, kind) == pytest.approx(
                uinorm(a, kind), rel=1e-9
            )
