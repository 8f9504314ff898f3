"""Jacobi-family factorizations.

Both solvers use a round-robin pair ordering, so each step rotates n/2
disjoint planes in a single vectorized update, and both run over a whole
stack of matrices at once: Hermitian eigenproblems by two-sided complex
Jacobi rotations, the SVD by one-sided Jacobi on the columns. Callers with
several matrices of one shape batch them through ``singular_values_many``
and ``abs_matrices``.
"""

import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from app.environments import JACOBI_MAX_SWEEPS, JACOBI_TOL
from app.exceptions import (
    ConvergenceError,
    DimensionError,
    HypothesisError,
    ResolventError,
)

from .matcore import CMatrix

logger = logging.getLogger(__name__)

EPS = np.finfo(np.float64).eps


@dataclass(frozen=True)
class SpectralDecomposition:
    U: CMatrix
    eigenvalues: tuple[complex, ...]

    def __post_init__(self):
        object.__setattr__(
            self, 'eigenvalues', tuple(complex(v) for v in self.eigenvalues)
        )
        n = len(self.eigenvalues)
        if self.U.shape != (n, n):
            raise DimensionError(
                f'U has shape {self.U.shape} for {n} eigenvalues'
            )
        u = self.U.array
        defect = np.linalg.norm(u.conj().T @ u - np.eye(n))
        if defect > 1e-10 * max(n, 1):
            raise HypothesisError(
                f'Eigenvector matrix is not unitary (defect {defect:.3e})'
            )

    @property
    def dim(self) -> int:
        return len(self.eigenvalues)

    @property
    def values(self) -> np.ndarray:
        return np.array(self.eigenvalues, dtype=np.complex128)

    @property
    def is_real(self) -> bool:
        return bool(np.all(self.values.imag == 0))

    @property
    def spectral_radius(self) -> float:
        return float(np.max(np.abs(self.values))) if self.dim else 0.0

    def apply(self, values) -> CMatrix:
        """U diag(values) U*."""
        u = self.U.array
        out = (u * np.asarray(values, dtype=np.complex128)) @ u.conj().T
        return CMatrix(out)

    def matrix(self) -> CMatrix:
        out = self.apply(self.values).array
        if self.is_real:
            out = (out + out.conj().T) / 2
        return CMatrix(out)

    def absolute(self) -> CMatrix:
        """|A| = U diag(|lambda_j|) U*, exact for the normal matrix held here."""
        out = self.apply(np.abs(self.values)).array
        return CMatrix((out + out.conj().T) / 2)


@dataclass(frozen=True)
class SVDResult:
    U: CMatrix
    singular_values: tuple[float, ...]
    V: CMatrix

    @property
    def values(self) -> np.ndarray:
        return np.array(self.singular_values, dtype=np.float64)

    def matrix(self) -> CMatrix:
        m, n = self.U.rows, self.V.rows
        sigma = np.zeros((m, n))
        k = len(self.singular_values)
        sigma[:k, :k] = np.diag(self.values)
        return CMatrix(self.U.array @ sigma @ self.V.array.conj().T)


def _sweep_tol(n: int) -> float:
    return max(JACOBI_TOL, 4 * n * EPS)


@lru_cache(maxsize=64)
def _round_robin(n: int) -> tuple[tuple[np.ndarray, np.ndarray], ...]:
    players = list(range(n)) + ([-1] if n % 2 else [])
    size = len(players)
    rounds = []
    for _ in range(size - 1):
        pairs = [
            (players[i], players[size - 1 - i]) for i in range(size // 2)
        ]
        pairs = [(min(p, q), max(p, q)) for p, q in pairs if -1 not in (p, q)]
        ps = np.array([p for p, _ in pairs], dtype=int)
        qs = np.array([q for _, q in pairs], dtype=int)
        rounds.append((ps, qs))
        players = [players[0], players[-1]] + players[1:-1]
    return tuple(rounds)


def _rotation(gamma, mag, active, diag_p, diag_q):
    """c, s and phase of the rotations that annihilate ``gamma`` between
    the diagonal entries diag_p and diag_q; inactive entries get c=1, s=0."""
    safe = np.where(active, mag, 1.0)
    phase = np.where(active, gamma / safe, 1.0)
    zeta = (diag_q - diag_p) / (2 * safe)
    t = np.where(zeta >= 0, 1.0, -1.0) / (np.abs(zeta) + np.sqrt(1 + zeta * zeta))
    t = np.where(active, t, 0.0)
    c = 1 / np.sqrt(1 + t * t)
    return c, c * t, phase


def _rotate_columns(x, ps, qs, c, s, phase):
    # X <- X W with W = [[c, s], [-s e^{-i phi}, c e^{-i phi}]] on each pair
    cph = phase.conj()[:, None, :]
    c, s = c[:, None, :], s[:, None, :]
    cp, cq = x[:, :, ps], x[:, :, qs]
    x[:, :, ps] = c * cp - s * cph * cq
    x[:, :, qs] = s * cp + c * cph * cq


def _rotate_rows(x, ps, qs, c, s, phase):
    # X <- W* X
    ph = phase[:, :, None]
    c, s = c[:, :, None], s[:, :, None]
    rp, rq = x[:, ps, :], x[:, qs, :]
    x[:, ps, :] = c * rp - s * ph * rq
    x[:, qs, :] = s * rp + c * ph * rq


def _jacobi_hermitian(
    stack: np.ndarray,
    max_sweeps: int = JACOBI_MAX_SWEEPS,
    vectors: bool = True,
):
    a = np.array(stack, dtype=np.complex128, copy=True)
    batch, n, _ = a.shape
    v = np.tile(np.eye(n, dtype=np.complex128), (batch, 1, 1)) if vectors else None
    if n < 2:
        return a.diagonal(axis1=1, axis2=2).real.copy(), v

    tol = _sweep_tol(n)
    mass = np.linalg.norm(a, axis=(1, 2))
    offdiag = ~np.eye(n, dtype=bool)
    tiny = np.finfo(np.float64).tiny

    with np.errstate(over='ignore'):
        for sweep in range(max_sweeps + 1):
            off = np.sqrt(np.sum(np.abs(a[:, offdiag]) ** 2, axis=1))
            if np.all(off <= tol * mass):
                logger.debug(f'Hermitian Jacobi converged after {sweep} sweeps')
                return a.diagonal(axis1=1, axis2=2).real.copy(), v
            if sweep == max_sweeps:
                break

            # disjoint (p, q) planes of a round are rotated together
            for ps, qs in _round_robin(n):
                apq = a[:, ps, qs]
                mag = np.abs(apq)
                active = mag > tiny
                if not np.any(active):
                    continue
                c, s, phase = _rotation(
                    apq, mag, active, a[:, ps, ps].real, a[:, qs, qs].real
                )
                _rotate_columns(a, ps, qs, c, s, phase)
                _rotate_rows(a, ps, qs, c, s, phase)
                a[:, ps, qs] = 0
                a[:, qs, ps] = 0
                a[:, ps, ps] = a[:, ps, ps].real
                a[:, qs, qs] = a[:, qs, qs].real
                if v is not None:
                    _rotate_columns(v, ps, qs, c, s, phase)

    raise ConvergenceError(
        f'Hermitian Jacobi did not converge in {max_sweeps} sweeps'
    )


def check_hermitian(a: CMatrix, label: str = 'Matrix', tol: float = 1e-8):
    if not a.is_square:
        raise DimensionError(f'Expected a square matrix, got {a.shape}')
    x = a.array
    if np.linalg.norm(x - x.conj().T) > tol * (1 + np.linalg.norm(x)):
        raise HypothesisError(f'{label} is not Hermitian')


def eig_hermitian(a: CMatrix) -> SpectralDecomposition:
    check_hermitian(a)
    w, v = _jacobi_hermitian(a.array[None, :, :])
    w, v = w[0], v[0]
    order = np.argsort(-w, kind='stable')
    return SpectralDecomposition(
        CMatrix(v[:, order]), tuple(complex(x) for x in w[order])
    )


def eigvalsh_stack(stack: np.ndarray) -> np.ndarray:
    """Eigenvalues (non-increasing) of each Hermitian matrix in a stack of
    shape (batch, n, n)."""
    stack = np.asarray(stack, dtype=np.complex128)
    if stack.ndim != 3 or stack.shape[1] != stack.shape[2]:
        raise DimensionError(f'Expected a (batch, n, n) stack, got {stack.shape}')
    w, _ = _jacobi_hermitian(stack, vectors=False)
    return -np.sort(-w, axis=1, kind='stable')


def _one_sided_jacobi(
    stack: np.ndarray,
    max_sweeps: int = JACOBI_MAX_SWEEPS,
    vectors: bool = True,
):
    """Rotate the columns of every (m, n) matrix of the stack, m >= n,
    until they are mutually orthogonal.

    Returns the rotated stack, whose column norms are the singular values,
    and the accumulated right rotations when ``vectors`` is set.
    """
    a = np.array(stack, dtype=np.complex128, copy=True)
    batch, m, n = a.shape
    v = np.tile(np.eye(n, dtype=np.complex128), (batch, 1, 1)) if vectors else None
    tol = _sweep_tol(m)

    with np.errstate(over='ignore'):
        for sweep in range(max_sweeps):
            rotated = 0
            for ps, qs in _round_robin(n):
                cp, cq = a[:, :, ps], a[:, :, qs]
                alpha = np.sum(np.abs(cp) ** 2, axis=1)
                beta = np.sum(np.abs(cq) ** 2, axis=1)
                gamma = np.sum(cp.conj() * cq, axis=1)
                mag = np.abs(gamma)
                active = mag > tol * np.sqrt(alpha * beta)
                if not np.any(active):
                    continue
                rotated += int(np.count_nonzero(active))

                c, s, phase = _rotation(gamma, mag, active, alpha, beta)
                _rotate_columns(a, ps, qs, c, s, phase)
                if v is not None:
                    _rotate_columns(v, ps, qs, c, s, phase)

            if rotated == 0:
                logger.debug(f'One-sided Jacobi converged after {sweep} sweeps')
                return a, v

    raise ConvergenceError(f'SVD did not converge in {max_sweeps} sweeps')


def _complete_basis(cols: np.ndarray, m: int) -> np.ndarray:
    k = cols.shape[1]
    if k == m:
        return cols
    q, _ = np.linalg.qr(np.hstack([cols, np.eye(m, dtype=np.complex128)]))
    return np.hstack([cols, q[:, k:m]])


def svd(a: CMatrix) -> SVDResult:
    m, n = a.shape
    if m == 0 or n == 0:
        return SVDResult(CMatrix.identity(m), (), CMatrix.identity(n))
    if m < n:
        flipped = svd(a.H)
        return SVDResult(flipped.V, flipped.singular_values, flipped.U)

    work, v = _one_sided_jacobi(a.array[None])
    work, v = work[0], v[0]
    s = np.linalg.norm(work, axis=0)
    order = np.argsort(-s, kind='stable')
    s, work, v = s[order], work[:, order], v[:, order]

    cutoff = s[0] * 10 * max(m, n) * EPS
    rank = int(np.count_nonzero(s > cutoff))
    u = _complete_basis(work[:, :rank] / s[:rank], m)
    return SVDResult(CMatrix(u), tuple(float(x) for x in s), CMatrix(v))


def _by_shape(mats) -> dict[tuple[int, int], list[int]]:
    groups: dict[tuple[int, int], list[int]] = {}
    for i, mat in enumerate(mats):
        groups.setdefault(mat.shape, []).append(i)
    return groups


def singular_values_many(mats: Sequence[CMatrix]) -> list[np.ndarray]:
    """Singular values (non-increasing) of several matrices; matrices of the
    same shape share one batched Jacobi run."""
    out: list[np.ndarray] = [np.zeros(0)] * len(mats)
    for (m, n), members in _by_shape(mats).items():
        if m == 0 or n == 0:
            continue
        stack = np.stack([mats[i].array for i in members])
        if m < n:
            stack = stack.conj().transpose(0, 2, 1)
        work, _ = _one_sided_jacobi(stack, vectors=False)
        s = -np.sort(-np.linalg.norm(work, axis=1), axis=1, kind='stable')
        for i, row in zip(members, s):
            out[i] = row
    return out


def singular_values(a: CMatrix) -> np.ndarray:
    return singular_values_many([a])[0]


def abs_matrices(mats: Sequence[CMatrix]) -> list[CMatrix]:
    """|A| = (A*A)^{1/2} = V diag(s) V* for each matrix, batched by size."""
    for mat in mats:
        if not mat.is_square:
            raise DimensionError(f'|A| needs a square matrix, got {mat.shape}')
    out: list[CMatrix] = [None] * len(mats)
    for _, members in _by_shape(mats).items():
        stack = np.stack([mats[i].array for i in members])
        work, v = _one_sided_jacobi(stack)
        s = np.linalg.norm(work, axis=1)
        vh = v.conj().transpose(0, 2, 1)
        absolute = (v * s[:, None, :]) @ vh
        absolute = (absolute + absolute.conj().transpose(0, 2, 1)) / 2
        for i, matrix in zip(members, absolute):
            out[i] = CMatrix(matrix)
    return out


def abs_matrix(a: CMatrix) -> CMatrix:
    """|A| = (A*A)^{1/2} = V diag(s) V*."""
    return abs_matrices([a])[0]


def resolvent_defect(
    a: CMatrix,
    decomp: SpectralDecomposition,
    z_samples,
    min_distance: float = 1e-3,
) -> float:
    """max_z | ||(z - A)^{-1}|| - 1/dist(z, sigma(A)) | over the samples.

    ||(z - A)^{-1}|| is 1/s_min(z - A), with s_min^2 the smallest
    eigenvalue of (z - A)*(z - A); all samples go through one batched
    eigensolve. A value near zero means A satisfies the growth condition at
    the samples.
    """
    if not a.is_square or a.rows != decomp.dim:
        raise DimensionError('Matrix and decomposition sizes differ')
    z = np.atleast_1d(np.asarray(z_samples, dtype=np.complex128))
    if z.size == 0:
        return 0.0
    dist = np.min(np.abs(z[:, None] - decomp.values[None, :]), axis=1)
    close = int(np.argmin(dist))
    if dist[close] < min_distance:
        raise ResolventError(
            f'Sample {z[close]} lies within {dist[close]:.2e} of the spectrum'
        )

    shifted = z[:, None, None] * np.eye(a.rows) - a.array
    gram = shifted.conj().transpose(0, 2, 1) @ shifted
    s_min = np.sqrt(np.maximum(eigvalsh_stack(gram)[:, -1], 0.0))
    if np.any(s_min == 0):
        raise ResolventError('z - A is singular at a sample')
    return float(np.max(np.abs(1 / s_min - 1 / dist)))
