import logging
from typing import Iterable

import numpy as np

from app.exceptions import DimensionError

from .matcore import CMatrix, block_offdiag, direct_sum
from .reports import (
    DEFAULT_TOLERANCE,
    IneqReport,
    NormKind,
    Tolerance,
    make_report,
)
from .spectral import singular_values, singular_values_many

logger = logging.getLogger(__name__)

SCHATTEN_GRID = (1.0, 1.5, 2.0, 3.0, 5.0)
DOMINANCE_PS = (1.0, 1.5, 2.0, 3.0, 5.0, np.inf)


def audit_grid(n: int) -> list[NormKind]:
    """Finite stand-in for "every unitarily invariant norm".

    The Ky Fan norms decide all of them (Ky Fan dominance); the Schatten
    members and the operator/HS norms are the familiar named cases.
    """
    return [
        NormKind.operator(),
        NormKind.hilbert_schmidt(),
        *(NormKind.schatten(p) for p in SCHATTEN_GRID),
        *(NormKind.kyfan(k) for k in range(1, n + 1)),
    ]


def norm_from_singular_values(s: np.ndarray, kind: NormKind) -> float:
    s = np.asarray(s, dtype=np.float64)
    if s.size == 0:
        return 0.0
    if kind.tag == 'operator':
        return float(s.max())
    if kind.tag == 'hilbert-schmidt':
        return float(np.sqrt(np.sum(s**2)))
    if kind.tag == 'kyfan':
        # s_j = 0 beyond the rank, so large k is the full sum
        return float(np.sum(np.sort(s)[::-1][: kind.k]))

    top = s.max()
    if top == 0:
        return 0.0
    if np.isinf(kind.p):
        return float(top)
    return float(top * np.sum((s / top) ** kind.p) ** (1 / kind.p))


def direct_sum_values(*values: np.ndarray) -> np.ndarray:
    """Singular values of a direct sum: the union of the blocks' values,
    non-increasing."""
    if not values:
        return np.zeros(0)
    joined = np.concatenate([np.asarray(v, dtype=np.float64) for v in values])
    return np.sort(joined)[::-1]


def uinorm(a: CMatrix, kind: NormKind) -> float:
    return norm_from_singular_values(singular_values(a), kind)


def opnorm(a: CMatrix) -> float:
    return uinorm(a, NormKind.operator())


def hs_norm_direct(a: CMatrix) -> float:
    """Entrywise root-sum-of-squares; independent of the SVD path."""
    return float(np.sqrt(np.sum(np.abs(a.array) ** 2)))


def check_submultiplicative_grid(
    a: CMatrix,
    b: CMatrix,
    x: CMatrix,
    kinds: Iterable[NormKind] | None = None,
    tol: Tolerance = DEFAULT_TOLERANCE,
) -> list[IneqReport]:
    """|||AXB||| <= ||A|| ||B|| |||X||| for every kind (the audit grid of X by
    default), from one set of singular values per matrix."""
    if a.cols != x.rows or x.cols != b.rows:
        raise DimensionError(
            f'AXB is not defined for {a.shape}, {x.shape}, {b.shape}'
        )
    s_a, s_b, s_x, s_axb = singular_values_many([a, b, x, a @ x @ b])
    scale = (s_a.max() if s_a.size else 0.0) * (s_b.max() if s_b.size else 0.0)
    kinds = list(kinds) if kinds is not None else audit_grid(min(x.shape))
    return [
        make_report(
            'submultiplicative',
            kind,
            norm_from_singular_values(s_axb, kind),
            float(scale) * norm_from_singular_values(s_x, kind),
            tol,
        )
        for kind in kinds
    ]


def check_submultiplicative(
    a: CMatrix,
    b: CMatrix,
    x: CMatrix,
    kind: NormKind,
    tol: Tolerance = DEFAULT_TOLERANCE,
) -> IneqReport:
    """|||AXB||| <= ||A|| ||B|| |||X|||."""
    return check_submultiplicative_grid(a, b, x, [kind], tol)[0]


def check_direct_sum_identities(
    a: CMatrix, b: CMatrix, tol: Tolerance = DEFAULT_TOLERANCE
) -> IneqReport:
    """Max defect of the identities ||A+B|| = max, ||A+B||_2 = root-sum
    (+ meaning direct sum) and |||[[0, A], [B, 0]]||| = |||A + B||| over the
    audit grid."""
    if not (a.is_square and b.is_square):
        raise DimensionError('Direct sum identities need square blocks')
    s_sum, s_block, s_a, s_b = singular_values_many(
        [direct_sum(a, b), block_offdiag(a, b), a, b]
    )

    op = NormKind.operator()
    hs = NormKind.hilbert_schmidt()
    op_defect = abs(
        norm_from_singular_values(s_sum, op)
        - max(norm_from_singular_values(s_a, op), norm_from_singular_values(s_b, op))
    )
    hs_defect = abs(
        norm_from_singular_values(s_sum, hs)
        - np.sqrt(
            norm_from_singular_values(s_a, hs) ** 2
            + norm_from_singular_values(s_b, hs) ** 2
        )
    )
    block_defect = max(
        abs(
            norm_from_singular_values(s_block, kind)
            - norm_from_singular_values(s_sum, kind)
        )
        for kind in audit_grid(a.rows + b.rows)
    )
    defect = max(op_defect, hs_defect, block_defect)
    return make_report(
        'direct_sum_identities',
        None,
        defect,
        0.0,
        tol,
        operator_defect=op_defect,
        hs_defect=hs_defect,
        block_defect=block_defect,
    )


def kyfan_dominance_check(
    x: CMatrix, y: CMatrix, tol: Tolerance = DEFAULT_TOLERANCE
) -> IneqReport:
    """If every Ky Fan norm of X is at most that of Y, then so is every
    Schatten norm in DOMINANCE_PS."""
    if x.shape != y.shape:
        raise DimensionError(f'Shapes differ: {x.shape} vs {y.shape}')
    sx, sy = singular_values_many([x, y])
    kx, ky = np.cumsum(sx), np.cumsum(sy)
    failing = [
        k + 1 for k in range(len(kx)) if not tol.holds(kx[k], ky[k])
    ]
    if failing:
        return make_report(
            'kyfan_dominance',
            NormKind.kyfan(failing[0]),
            0.0,
            0.0,
            tol,
            premise=False,
            status='premise not satisfied',
            failing_k=failing[0],
        )

    worst = None
    for p in DOMINANCE_PS:
        kind = NormKind.schatten(p)
        lhs = norm_from_singular_values(sx, kind)
        rhs = norm_from_singular_values(sy, kind)
        if worst is None or rhs - lhs < worst[2] - worst[1]:
            worst = (kind, lhs, rhs)
    kind, lhs, rhs = worst
    return make_report(
        'kyfan_dominance', kind, lhs, rhs, tol, premise=True, status='checked'
    )
