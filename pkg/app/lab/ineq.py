"""One checker per norm inequality.

Every checker builds the two sides exactly as stated, takes singular values
once per matrix (matrices of one shape in a single batched Jacobi run) and
evaluates the requested norms from them. A direct sum enters through its
singular values, the union of those of its blocks. Checkers whose statement
fixes the Hilbert-Schmidt norm return a single report; the others return one
report per norm kind (the audit grid unless ``kinds`` is given). Matrices A,
B that enter through f(A), g(B) or d_A are passed as SpectralDecompositions
so that the hypotheses (normal, spectrum in the open unit disk) are known
rather than estimated.
"""

import logging
import math
from dataclasses import replace
from enum import Enum
from typing import Iterable

import numpy as np

from app.environments import DEFAULT_ANGLE_COUNT, DEFAULT_CONTOUR_NODES
from app.exceptions import DimensionError, HypothesisError

from .herglotz import (
    ContourSpec,
    HerglotzFunction,
    apply_contour,
    apply_spectral,
    dist_boundary_spectrum,
    numerical_range_distances,
)
from .matcore import CMatrix
from .norms import (
    audit_grid,
    direct_sum_values,
    hs_norm_direct,
    norm_from_singular_values,
)
from .reports import (
    DEFAULT_TOLERANCE,
    IneqReport,
    NormKind,
    Tolerance,
    make_report,
)
from .spectral import (
    SpectralDecomposition,
    abs_matrices,
    check_hermitian,
    eig_hermitian,
    resolvent_defect,
    singular_values_many,
)

logger = logging.getLogger(__name__)

SQRT2 = math.sqrt(2)
HS = NormKind.hilbert_schmidt()


class SignVariant(str, Enum):
    PLUS = 'plus'
    MINUS = 'minus'

    @property
    def factor(self) -> int:
        return 1 if self is SignVariant.PLUS else -1


# Helpers


def _in_disk(decomp: SpectralDecomposition, label: str) -> float:
    if decomp.spectral_radius >= 1:
        raise HypothesisError(
            f'sigma({label}) is not inside the open unit disk '
            f'(spectral radius {decomp.spectral_radius})'
        )
    return dist_boundary_spectrum(decomp)


def _hermitian(decomp: SpectralDecomposition, label: str):
    if np.max(np.abs(decomp.values.imag), initial=0.0) > 1e-12:
        raise HypothesisError(f'{label} is not Hermitian (complex spectrum)')


def _bounded_below(x: CMatrix, m: float):
    """X = X* with lambda_min(X) >= m > 0."""
    if m <= 0:
        raise HypothesisError(f'm must be positive, got {m}')
    check_hermitian(x, 'X')
    lambda_min = eig_hermitian(x).eigenvalues[-1].real
    if lambda_min < m - 1e-10 * max(1.0, m):
        raise HypothesisError(
            f'X >= mI fails: lambda_min(X)={lambda_min} < m={m}'
        )


def _same_size(*mats: CMatrix):
    shapes = {m.shape for m in mats}
    if len(shapes) != 1 or not mats[0].is_square:
        raise DimensionError(f'Expected equal square matrices, got {shapes}')


def _kinds(kinds: Iterable[NormKind] | None, n: int) -> list[NormKind]:
    return list(kinds) if kinds is not None else audit_grid(n)


def _grid_values(
    name: str,
    kinds: list[NormKind],
    s_lhs: np.ndarray,
    s_rhs: np.ndarray,
    factor: float,
    tol: Tolerance,
    **params,
) -> list[IneqReport]:
    """|||lhs||| <= factor * |||rhs||| for every kind, from singular values."""
    return [
        make_report(
            name,
            kind,
            norm_from_singular_values(s_lhs, kind),
            factor * norm_from_singular_values(s_rhs, kind),
            tol,
            **params,
        )
        for kind in kinds
    ]


def _grid(
    name: str,
    kinds: list[NormKind],
    lhs: CMatrix,
    rhs: CMatrix,
    factor: float,
    tol: Tolerance,
    **params,
) -> list[IneqReport]:
    s_lhs, s_rhs = singular_values_many([lhs, rhs])
    return _grid_values(name, kinds, s_lhs, s_rhs, factor, tol, **params)


def _hs_report(name, lhs, rhs, tol, **params) -> IneqReport:
    return make_report(
        name, HS, hs_norm_direct(lhs), hs_norm_direct(rhs), tol, **params
    )


def _sv_report(
    name: str,
    s_lhs: np.ndarray,
    factor: float,
    s_rhs: np.ndarray,
    tol: Tolerance,
    **params,
) -> IneqReport:
    """s_j(lhs) <= factor * s_j(rhs) for every j; the report carries the j
    with the smallest slack."""
    s_rhs = factor * np.asarray(s_rhs)
    padded = np.zeros_like(s_rhs)
    padded[: len(s_lhs)] = s_lhs
    slack = s_rhs - padded
    j = int(np.argmin(slack))
    report = make_report(name, None, padded[j], s_rhs[j], tol, j=j + 1, **params)
    holds = all(tol.holds(l, r) for l, r in zip(padded, s_rhs))
    return replace(report, holds=holds)


def _re(m: CMatrix) -> CMatrix:
    return (m + m.H) / 2


# Prior bounds for G1 operators


PRIOR_FORMS = ('1.2', '1.3', '1.4', '1.5')
PRIOR_DISTANCES = ('spectrum', 'numrange')


def check_prior(
    a_dec: SpectralDecomposition,
    b_dec: SpectralDecomposition,
    x: CMatrix,
    f: HerglotzFunction,
    g: HerglotzFunction,
    which: str,
    kinds: Iterable[NormKind] | None = None,
    tol: Tolerance = DEFAULT_TOLERANCE,
    distance: str = 'spectrum',
    angle_count: int = DEFAULT_ANGLE_COUNT,
) -> list[IneqReport]:
    """The four 2*sqrt(2)/(d_A d_B) bounds for f(A)X -+ Xg(B) and
    f(A)Xg(B) -+ X.

    With ``distance='numrange'`` the constant uses D_A = dist(unit circle,
    cl W(A)) in place of d_A.
    """
    if which not in PRIOR_FORMS:
        raise ValueError(f'which must be one of {PRIOR_FORMS}, got {which!r}')
    if distance not in PRIOR_DISTANCES:
        raise ValueError(
            f'distance must be one of {PRIOR_DISTANCES}, got {distance!r}'
        )
    d_a, d_b = _in_disk(a_dec, 'A'), _in_disk(b_dec, 'B')
    a, b = a_dec.matrix(), b_dec.matrix()
    _same_size(a, b, x)
    if distance == 'numrange':
        d_a, d_b = numerical_range_distances([a, b], angle_count)
        name, params = f'prior.numrange.{which}', {'D_A': d_a, 'D_B': d_b}
    else:
        name, params = f'prior.{which}', {'d_A': d_a, 'd_B': d_b}
    fa, gb = apply_spectral(f, a_dec), apply_spectral(g, b_dec)

    if which == '1.2':
        lhs = fa @ x - x @ gb
    elif which == '1.3':
        lhs = fa @ x + x @ gb
    elif which == '1.4':
        lhs = fa @ x @ gb - x
    else:
        lhs = fa @ x @ gb + x

    if which in ('1.2', '1.4'):
        first, second = abs_matrices([a @ x, x @ b])
    else:
        first, second = abs_matrices([a @ x @ b, x])

    return _grid(
        name,
        _kinds(kinds, a.rows),
        lhs,
        first + second,
        2 * SQRT2 / (d_a * d_b),
        tol,
        **params,
    )


# Hilbert-Schmidt bounds for Hermitian A, B


def check_thm21_first(
    a_dec: SpectralDecomposition,
    b_dec: SpectralDecomposition,
    x: CMatrix,
    f: HerglotzFunction,
    g: HerglotzFunction,
    sign: SignVariant,
    tol: Tolerance = DEFAULT_TOLERANCE,
    name: str = 'thm21_first',
) -> IneqReport:
    """||f(A)X + Xg(B) +- f(A)Xg(B)||_2 against
    ||(X+|A|X)/d_A + (X+X|B|)/d_B + (I+|A|)X(I+|B|)/(d_A d_B)||_2."""
    sign = SignVariant(sign)
    _hermitian(a_dec, 'A')
    _hermitian(b_dec, 'B')
    d_a, d_b = _in_disk(a_dec, 'A'), _in_disk(b_dec, 'B')
    fa, gb = apply_spectral(f, a_dec), apply_spectral(g, b_dec)
    abs_a, abs_b = a_dec.absolute(), b_dec.absolute()
    i_a, i_b = CMatrix.identity(a_dec.dim), CMatrix.identity(b_dec.dim)

    lhs = fa @ x + x @ gb + sign.factor * (fa @ x @ gb)
    rhs = (
        (x + abs_a @ x) / d_a
        + (x + x @ abs_b) / d_b
        + (i_a + abs_a) @ x @ (i_b + abs_b) / (d_a * d_b)
    )
    return _hs_report(
        f'{name}.{sign.value}', lhs, rhs, tol, d_A=d_a, d_B=d_b, sign=sign.value
    )


def check_thm21_second(
    a_dec: SpectralDecomposition,
    b_dec: SpectralDecomposition,
    x: CMatrix,
    f: HerglotzFunction,
    g: HerglotzFunction,
    sign: SignVariant,
    tol: Tolerance = DEFAULT_TOLERANCE,
    name: str = 'thm21_second',
) -> IneqReport:
    """||f(A)Xg(B) +- g(B)Xf(A)||_2 against
    ||((I+|A|)X(I+|B|) + (I+|B|)X(I+|A|)) / (d_A d_B)||_2."""
    sign = SignVariant(sign)
    _hermitian(a_dec, 'A')
    _hermitian(b_dec, 'B')
    _same_size(a_dec.matrix(), b_dec.matrix(), x)
    d_a, d_b = _in_disk(a_dec, 'A'), _in_disk(b_dec, 'B')
    fa, gb = apply_spectral(f, a_dec), apply_spectral(g, b_dec)
    eye = CMatrix.identity(a_dec.dim)
    p, q = eye + a_dec.absolute(), eye + b_dec.absolute()

    lhs = fa @ x @ gb + sign.factor * (gb @ x @ fa)
    rhs = (p @ x @ q + q @ x @ p) / (d_a * d_b)
    return _hs_report(
        f'{name}.{sign.value}', lhs, rhs, tol, d_A=d_a, d_B=d_b, sign=sign.value
    )


def check_cor22(
    a_dec: SpectralDecomposition,
    b_dec: SpectralDecomposition,
    f: HerglotzFunction,
    g: HerglotzFunction,
    sign: SignVariant,
    which: str,
    tol: Tolerance = DEFAULT_TOLERANCE,
) -> IneqReport:
    """The Hilbert-Schmidt bounds with X = I."""
    eye = CMatrix.identity(a_dec.dim)
    if which == 'first':
        return check_thm21_first(
            a_dec, b_dec, eye, f, g, sign, tol, name='cor22.first'
        )
    if which == 'second':
        return check_thm21_second(
            a_dec, b_dec, eye, f, g, sign, tol, name='cor22.second'
        )
    raise ValueError(f"which must be 'first' or 'second', got {which!r}")


# Singular value bounds for AX +- YB


def _lem23_values(a, b, x, y, sign):
    """Singular values of AX +- YB, X + Y (direct sum), and ||A||, ||B||."""
    _same_size(a, b, x, y)
    lhs = a @ x + SignVariant(sign).factor * (y @ b)
    s_lhs, s_x, s_y, s_a, s_b = singular_values_many([lhs, x, y, a, b])
    return s_lhs, direct_sum_values(s_x, s_y), float(s_a[0]), float(s_b[0])


def check_lem23_sv(
    a: CMatrix,
    b: CMatrix,
    x: CMatrix,
    y: CMatrix,
    sign: SignVariant,
    tol: Tolerance = DEFAULT_TOLERANCE,
) -> IneqReport:
    """s_j(AX +- YB) <= 2 sqrt(||A|| ||B||) s_j(X + Y) (direct sum)."""
    sign = SignVariant(sign)
    s_lhs, s_sum, norm_a, norm_b = _lem23_values(a, b, x, y, sign)
    return _sv_report(
        f'lem23_sv.{sign.value}',
        s_lhs,
        2 * math.sqrt(norm_a * norm_b),
        s_sum,
        tol,
        norm_A=norm_a,
        norm_B=norm_b,
        sign=sign.value,
    )


def check_lem23_norm(
    a: CMatrix,
    b: CMatrix,
    x: CMatrix,
    y: CMatrix,
    sign: SignVariant,
    kinds: Iterable[NormKind] | None = None,
    tol: Tolerance = DEFAULT_TOLERANCE,
    name: str = 'lem23_norm',
) -> list[IneqReport]:
    """|||(AX +- YB) + 0||| <= 2 sqrt(||A|| ||B||) |||X + Y||| (direct
    sums)."""
    sign = SignVariant(sign)
    s_lhs, s_sum, norm_a, norm_b = _lem23_values(a, b, x, y, sign)
    return _grid_values(
        f'{name}.{sign.value}',
        _kinds(kinds, a.rows),
        s_lhs,
        s_sum,
        2 * math.sqrt(norm_a * norm_b),
        tol,
        norm_A=norm_a,
        norm_B=norm_b,
        sign=sign.value,
    )


def check_lem23_scaled(
    a: CMatrix,
    b: CMatrix,
    x: CMatrix,
    y: CMatrix,
    sign: SignVariant,
    t: float,
    tol: Tolerance = DEFAULT_TOLERANCE,
) -> IneqReport:
    """s_j(AX +- YB) <= (t||A|| + ||B||/t) s_j(X/t + tY), valid for every
    t > 0; the direct sum picks up the rescaling too."""
    if t <= 0:
        raise ValueError(f't must be positive, got {t}')
    sign = SignVariant(sign)
    _same_size(a, b, x, y)
    lhs = a @ x + sign.factor * (y @ b)
    s_lhs, s_x, s_y, s_a, s_b = singular_values_many(
        [lhs, x / t, t * y, a, b]
    )
    return _sv_report(
        f'lem23_scaled.{sign.value}',
        s_lhs,
        t * float(s_a[0]) + float(s_b[0]) / t,
        direct_sum_values(s_x, s_y),
        tol,
        t=t,
        sign=sign.value,
    )


def optimal_scale(a: float, b: float) -> tuple[float, float]:
    """argmin and min over t > 0 of t*a + b/t, i.e. (sqrt(b/a), 2 sqrt(ab))."""
    if a <= 0 or b <= 0:
        raise ValueError('optimal_scale needs a, b > 0')
    return math.sqrt(b / a), 2 * math.sqrt(a * b)


# Bounds through the singular value lemma


THM24_FORMS = ('difference', 'sum')


def check_thm24(
    a_dec: SpectralDecomposition,
    b_dec: SpectralDecomposition,
    x: CMatrix,
    y: CMatrix,
    f: HerglotzFunction,
    g: HerglotzFunction,
    sign: SignVariant,
    form: str,
    kinds: Iterable[NormKind] | None = None,
    tol: Tolerance = DEFAULT_TOLERANCE,
) -> list[IneqReport]:
    sign = SignVariant(sign)
    if form not in THM24_FORMS:
        raise ValueError(f'form must be one of {THM24_FORMS}, got {form!r}')
    a, b = a_dec.matrix(), b_dec.matrix()
    _same_size(a, b, x, y)
    d_a, d_b = _in_disk(a_dec, 'A'), _in_disk(b_dec, 'B')
    fa, fb = apply_spectral(f, a_dec), apply_spectral(f, b_dec)
    ga, gb = apply_spectral(g, a_dec), apply_spectral(g, b_dec)

    if form == 'difference':
        p, q = fa - gb, fb - ga
        scale_matrix = a_dec.absolute() + b_dec.absolute()
    else:
        p, q = fa + gb, fb + ga
        (abs_ab,) = abs_matrices([a @ b])
        scale_matrix = CMatrix.identity(a.rows) + abs_ab

    lhs = p @ x + sign.factor * (y @ q)
    s_lhs, s_x, s_y, s_scale = singular_values_many([lhs, x, y, scale_matrix])
    return _grid_values(
        f'thm24.{form}.{sign.value}',
        _kinds(kinds, a.rows),
        s_lhs,
        direct_sum_values(s_x, s_y),
        4 * SQRT2 / (d_a * d_b) * float(s_scale[0]),
        tol,
        d_A=d_a,
        d_B=d_b,
        sign=sign.value,
        form=form,
    )


# Bounds for f(A)X +- X conj-f(B)


def _thm25_sides(a_dec, b_dec, x, f, sign, left_conjugate):
    a, b = a_dec.matrix(), b_dec.matrix()
    fa = apply_spectral(f, a_dec, conjugate=left_conjugate)
    fb = apply_spectral(f, b_dec, conjugate=not left_conjugate)
    lhs = fa @ x + sign.factor * (x @ fb)
    if left_conjugate:
        # X - A*XB  /  |A*X| + |XB|
        if sign is SignVariant.PLUS:
            return lhs, x - a.H @ x @ b, 2.0
        first, second = abs_matrices([a.H @ x, x @ b])
        return lhs, first + second, 2 * SQRT2
    if sign is SignVariant.PLUS:
        return lhs, x - a @ x @ b.H, 2.0
    first, second = abs_matrices([a @ x, x @ b.H])
    return lhs, first + second, 2 * SQRT2


def check_thm25(
    a_dec: SpectralDecomposition,
    b_dec: SpectralDecomposition,
    x: CMatrix,
    f: HerglotzFunction,
    sign: SignVariant,
    kinds: Iterable[NormKind] | None = None,
    tol: Tolerance = DEFAULT_TOLERANCE,
) -> list[IneqReport]:
    """plus:  |||f(A)X + X fbar(B)||| <= 2/(d_A d_B) |||X - AXB*|||
    minus: |||f(A)X - X fbar(B)||| <= 2 sqrt2/(d_A d_B) ||| |AX| + |XB*| |||
    """
    sign = SignVariant(sign)
    d_a, d_b = _in_disk(a_dec, 'A'), _in_disk(b_dec, 'B')
    lhs, rhs, const = _thm25_sides(a_dec, b_dec, x, f, sign, False)
    return _grid(
        f'thm25.{sign.value}',
        _kinds(kinds, a_dec.dim),
        lhs,
        rhs,
        const / (d_a * d_b),
        tol,
        d_A=d_a,
        d_B=d_b,
        sign=sign.value,
    )


def check_remark_conj(
    a_dec: SpectralDecomposition,
    b_dec: SpectralDecomposition,
    x: CMatrix,
    f: HerglotzFunction,
    sign: SignVariant,
    kinds: Iterable[NormKind] | None = None,
    tol: Tolerance = DEFAULT_TOLERANCE,
) -> list[IneqReport]:
    """The mirror bounds with the conjugate function on the left:
    fbar(A)X +- Xf(B) against X - A*XB or |A*X| + |XB|."""
    sign = SignVariant(sign)
    d_a, d_b = _in_disk(a_dec, 'A'), _in_disk(b_dec, 'B')
    lhs, rhs, const = _thm25_sides(a_dec, b_dec, x, f, sign, True)
    return _grid(
        f'remark_conj.{sign.value}',
        _kinds(kinds, a_dec.dim),
        lhs,
        rhs,
        const / (d_a * d_b),
        tol,
        d_A=d_a,
        d_B=d_b,
        sign=sign.value,
    )


def check_dadar(
    a: CMatrix,
    b: CMatrix,
    x: CMatrix,
    alpha: float,
    beta: float,
    kinds: Iterable[NormKind] | None = None,
    tol: Tolerance = DEFAULT_TOLERANCE,
) -> list[IneqReport]:
    """|||e^{-i beta} AX + e^{i alpha} XB*||| <= sqrt2 ||| |AX| + |XB*| |||."""
    ax, xb = a @ x, x @ b.H
    lhs = complex(np.exp(-1j * beta)) * ax + complex(np.exp(1j * alpha)) * xb
    abs_ax, abs_xb = abs_matrices([ax, xb])
    return _grid(
        'dadar',
        _kinds(kinds, a.rows),
        lhs,
        abs_ax + abs_xb,
        SQRT2,
        tol,
        alpha=float(alpha),
        beta=float(beta),
    )


def check_numrange_variant(
    a_dec: SpectralDecomposition,
    b_dec: SpectralDecomposition,
    x: CMatrix,
    f: HerglotzFunction,
    sign: SignVariant,
    kinds: Iterable[NormKind] | None = None,
    tol: Tolerance = DEFAULT_TOLERANCE,
    angle_count: int = DEFAULT_ANGLE_COUNT,
) -> list[IneqReport]:
    """The f(A)X +- X fbar(B) bounds with D_A = dist(unit circle, cl W(A))
    in place of d_A."""
    sign = SignVariant(sign)
    _in_disk(a_dec, 'A')
    _in_disk(b_dec, 'B')
    big_d_a, big_d_b = numerical_range_distances(
        [a_dec.matrix(), b_dec.matrix()], angle_count
    )
    lhs, rhs, const = _thm25_sides(a_dec, b_dec, x, f, sign, False)
    return _grid(
        f'numrange.{sign.value}',
        _kinds(kinds, a_dec.dim),
        lhs,
        rhs,
        const / (big_d_a * big_d_b),
        tol,
        D_A=big_d_a,
        D_B=big_d_b,
        sign=sign.value,
    )


COR_REF_FORMS = ('re', 'pair')


def check_cor_ref(
    a_dec: SpectralDecomposition,
    f: HerglotzFunction,
    form: str = 're',
    b_dec: SpectralDecomposition | None = None,
    kinds: Iterable[NormKind] | None = None,
    tol: Tolerance = DEFAULT_TOLERANCE,
) -> list[IneqReport]:
    """re:   |||Re f(A)||| <= 1/d_A^2 |||I - AA*|||
    pair: |||f(A) + fbar(B)||| <= 2/(d_A d_B) |||I - AB*|||"""
    if form not in COR_REF_FORMS:
        raise ValueError(f'form must be one of {COR_REF_FORMS}, got {form!r}')
    b_dec = a_dec if b_dec is None else b_dec
    d_a, d_b = _in_disk(a_dec, 'A'), _in_disk(b_dec, 'B')
    a, b = a_dec.matrix(), b_dec.matrix()
    eye = CMatrix.identity(a.rows)
    fa = apply_spectral(f, a_dec)

    if form == 're':
        lhs, rhs, const = _re(fa), eye - a @ a.H, 1 / d_a**2
    else:
        _same_size(a, b)
        lhs = fa + apply_spectral(f, b_dec, conjugate=True)
        rhs, const = eye - a @ b.H, 2 / (d_a * d_b)
    return _grid(
        f'cor_ref.{form}',
        _kinds(kinds, a.rows),
        lhs,
        rhs,
        const,
        tol,
        d_A=d_a,
        d_B=d_b,
        form=form,
    )


# Positive multipliers


POS_VARIANTS = ('stated-plus', 'proof-minus')


def check_pos_multiplier(
    a: CMatrix,
    b: CMatrix,
    x: CMatrix,
    m: float,
    variant: str,
    kinds: Iterable[NormKind] | None = None,
    tol: Tolerance = DEFAULT_TOLERANCE,
) -> list[IneqReport]:
    """m |||A - B||| against |||AX + XB||| (stated-plus) or |||AX - XB|||
    (proof-minus) for self-adjoint A, B and X >= mI > 0.

    Violations of the stated-plus variant are reported, never raised.
    """
    if variant not in POS_VARIANTS:
        raise ValueError(
            f'variant must be one of {POS_VARIANTS}, got {variant!r}'
        )
    _same_size(a, b, x)
    check_hermitian(a, 'A')
    check_hermitian(b, 'B')
    _bounded_below(x, m)

    rhs = a @ x + x @ b if variant == 'stated-plus' else a @ x - x @ b
    return _grid(
        f'pos_multiplier.{variant}',
        _kinds(kinds, a.rows),
        float(m) * (a - b),
        rhs,
        1.0,
        tol,
        m=float(m),
        variant=variant,
    )


PROP_VARIANTS = ('stated', 'unitary-case')


def check_prop_rediff(
    a_dec: SpectralDecomposition,
    b_dec: SpectralDecomposition,
    x: CMatrix,
    m: float,
    f: HerglotzFunction,
    variant: str,
    kinds: Iterable[NormKind] | None = None,
    tol: Tolerance = DEFAULT_TOLERANCE,
) -> list[IneqReport]:
    """m |||Re f(A) - Re f(B)||| against
    (|||X - AXB*||| + |||X - A*XB|||)/(d_A d_B) (stated) or
    2/(d_A d_B) |||X - AXB*||| (unitary-case, run on near-unitary A, B).

    Evaluated in recording mode; no outcome is asserted here.
    """
    if variant not in PROP_VARIANTS:
        raise ValueError(
            f'variant must be one of {PROP_VARIANTS}, got {variant!r}'
        )
    d_a, d_b = _in_disk(a_dec, 'A'), _in_disk(b_dec, 'B')
    a, b = a_dec.matrix(), b_dec.matrix()
    _same_size(a, b, x)
    _bounded_below(x, m)

    lhs = _re(apply_spectral(f, a_dec)) - _re(apply_spectral(f, b_dec))
    params = {'m': float(m), 'variant': variant, 'd_A': d_a, 'd_B': d_b}
    if variant == 'unitary-case':
        params['delta'] = max(d_a, d_b)
        s_lhs, s_first = singular_values_many([lhs, x - a @ x @ b.H])
    else:
        s_lhs, s_first, s_second = singular_values_many(
            [lhs, x - a @ x @ b.H, x - a.H @ x @ b]
        )

    reports = []
    for kind in _kinds(kinds, a.rows):
        left = m * norm_from_singular_values(s_lhs, kind)
        if variant == 'stated':
            right = (
                norm_from_singular_values(s_first, kind)
                + norm_from_singular_values(s_second, kind)
            ) / (d_a * d_b)
        else:
            right = 2 * norm_from_singular_values(s_first, kind) / (d_a * d_b)
        reports.append(
            make_report(
                f'prop_rediff.{variant}', kind, left, right, tol, **params
            )
        )
    return reports


REMARK_BLOCK_FORMS = ('general', 'diagonal')


def check_remark_block(
    a_dec: SpectralDecomposition,
    b_dec: SpectralDecomposition,
    x: CMatrix,
    y: CMatrix,
    f: HerglotzFunction,
    form: str = 'general',
    kinds: Iterable[NormKind] | None = None,
    tol: Tolerance = DEFAULT_TOLERANCE,
) -> list[IneqReport]:
    """general:  |||((f(A)+fbar(B))X - Y(f(B)+fbar(A))) + 0|||
                 <= 4/(d_A d_B) ||I - AB*|| |||X + Y|||
    diagonal: |||(Re f(A) X - Y Re f(A)) + 0||| <= 2/d_A^2 ||I - AA*|| |||X + Y|||
    (+ between blocks meaning direct sum)."""
    if form not in REMARK_BLOCK_FORMS:
        raise ValueError(
            f'form must be one of {REMARK_BLOCK_FORMS}, got {form!r}'
        )
    if form == 'diagonal':
        b_dec = a_dec
    a, b = a_dec.matrix(), b_dec.matrix()
    _same_size(a, b, x, y)
    d_a, d_b = _in_disk(a_dec, 'A'), _in_disk(b_dec, 'B')
    eye = CMatrix.identity(a.rows)

    if form == 'general':
        p = apply_spectral(f, a_dec) + apply_spectral(f, b_dec, conjugate=True)
        q = apply_spectral(f, b_dec) + apply_spectral(f, a_dec, conjugate=True)
        lhs, defect, const = p @ x - y @ q, eye - a @ b.H, 4 / (d_a * d_b)
    else:
        re_fa = _re(apply_spectral(f, a_dec))
        lhs, defect, const = re_fa @ x - y @ re_fa, eye - a @ a.H, 2 / d_a**2
    s_lhs, s_x, s_y, s_defect = singular_values_many([lhs, x, y, defect])
    return _grid_values(
        f'remark_block.{form}',
        _kinds(kinds, a.rows),
        s_lhs,
        direct_sum_values(s_x, s_y),
        const * float(s_defect[0]),
        tol,
        d_A=d_a,
        d_B=d_b,
        form=form,
    )


# Identities checked against a numerical budget


def unit_circle_samples(count: int) -> np.ndarray:
    return np.exp(2j * np.pi * np.arange(count) / count)


def check_g1_resolvent(
    a_dec: SpectralDecomposition,
    samples=None,
    budget: float = 1e-8,
    tol: Tolerance = DEFAULT_TOLERANCE,
) -> IneqReport:
    """Resolvent-norm defect of a normal matrix against ``budget``."""
    samples = unit_circle_samples(100) if samples is None else samples
    defect = resolvent_defect(a_dec.matrix(), a_dec, samples)
    return make_report(
        'g1_identity', None, defect, budget, tol, samples=len(samples)
    )


def check_calculus_oracle(
    a_dec: SpectralDecomposition,
    f: HerglotzFunction,
    nodes: int = DEFAULT_CONTOUR_NODES,
    budget: float = 1e-9,
    tol: Tolerance = DEFAULT_TOLERANCE,
) -> IneqReport:
    """||spectral f(A) - contour f(A)||_2 against budget (1 + ||f(A)||_2)."""
    _in_disk(a_dec, 'A')
    spectral = apply_spectral(f, a_dec)
    contour = apply_contour(
        f, a_dec.matrix(), ContourSpec.around(a_dec, nodes), a_dec
    )
    return make_report(
        'calculus_oracle',
        HS,
        hs_norm_direct(spectral - contour),
        budget * (1 + hs_norm_direct(spectral)),
        tol,
        nodes=nodes,
    )
