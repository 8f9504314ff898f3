import logging
from dataclasses import dataclass
from enum import Enum
from numbers import Number

import numpy as np

from app.exceptions import ConfigError, DimensionError, LabError

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class CMatrix:
    """Dense complex matrix value.

    The wrapped array is copied on construction and marked read-only, so a
    CMatrix never changes after it is built. Every operation returns a new
    value.
    """

    array: np.ndarray

    # numpy scalars on the left defer to __rmul__
    __array_ufunc__ = None

    def __post_init__(self):
        data = np.array(self.array, dtype=np.complex128, copy=True)
        if data.ndim != 2:
            raise DimensionError(
                f'Matrix must be two-dimensional, got shape {data.shape}'
            )
        if not np.all(np.isfinite(data)):
            raise LabError('Matrix entries must be finite')
        data.setflags(write=False)
        object.__setattr__(self, 'array', data)

    # Constructors
    @classmethod
    def from_entries(cls, rows: int, cols: int, entries) -> 'CMatrix':
        entries = list(entries)
        if len(entries) != rows * cols:
            raise DimensionError(
                f'Expected {rows * cols} entries, got {len(entries)}'
            )
        return cls(np.array(entries, dtype=np.complex128).reshape(rows, cols))

    @classmethod
    def identity(cls, n: int) -> 'CMatrix':
        return cls(np.eye(n, dtype=np.complex128))

    @classmethod
    def zeros(cls, rows: int, cols: int | None = None) -> 'CMatrix':
        cols = rows if cols is None else cols
        return cls(np.zeros((rows, cols), dtype=np.complex128))

    @classmethod
    def diag(cls, values) -> 'CMatrix':
        return cls(np.diag(np.asarray(values, dtype=np.complex128)))

    # Shape
    @property
    def rows(self) -> int:
        return self.array.shape[0]

    @property
    def cols(self) -> int:
        return self.array.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.array.shape

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    @property
    def entries(self) -> tuple[complex, ...]:
        return tuple(complex(value) for value in self.array.ravel())

    # Algebra
    @property
    def H(self) -> 'CMatrix':
        return CMatrix(self.array.conj().T)

    def __add__(self, other: 'CMatrix') -> 'CMatrix':
        return CMatrix(self.array + _operand(other))

    def __sub__(self, other: 'CMatrix') -> 'CMatrix':
        return CMatrix(self.array - _operand(other))

    def __neg__(self) -> 'CMatrix':
        return CMatrix(-self.array)

    def __matmul__(self, other: 'CMatrix') -> 'CMatrix':
        other = _operand(other)
        if self.cols != other.shape[0]:
            raise DimensionError(
                f'Cannot multiply {self.shape} by {other.shape}'
            )
        return CMatrix(self.array @ other)

    def __mul__(self, scalar: Number) -> 'CMatrix':
        if not isinstance(scalar, Number):
            return NotImplemented
        return CMatrix(self.array * scalar)

    __rmul__ = __mul__

    def __truediv__(self, scalar: Number) -> 'CMatrix':
        if not isinstance(scalar, Number):
            return NotImplemented
        return CMatrix(self.array / scalar)

    def __eq__(self, other) -> bool:
        if not isinstance(other, CMatrix):
            return NotImplemented
        return np.array_equal(self.array, other.array)

    __hash__ = None

    def __repr__(self) -> str:
        return f'CMatrix({self.rows}x{self.cols})'


def _operand(value) -> np.ndarray:
    if isinstance(value, CMatrix):
        return value.array
    return np.asarray(value, dtype=np.complex128)


class MatrixKind(str, Enum):
    HERMITIAN_IN_DISK = 'hermitian-in-disk'
    NORMAL_IN_DISK = 'normal-in-disk'
    UNITARY = 'unitary'
    GENERAL_BOUNDED = 'general-bounded'


@dataclass(frozen=True)
class RandomSpec:
    dim: int
    seed: int
    spectrum_radius: float = 0.9
    kind: MatrixKind = MatrixKind.GENERAL_BOUNDED

    def __post_init__(self):
        object.__setattr__(self, 'kind', MatrixKind(self.kind))
        if self.dim < 1:
            raise ConfigError(f'dim must be positive, got {self.dim}')
        if not 0 <= self.seed < 2**64:
            raise ConfigError('seed must be a 64-bit unsigned integer')
        in_disk = self.kind in (
            MatrixKind.HERMITIAN_IN_DISK,
            MatrixKind.NORMAL_IN_DISK,
        )
        if in_disk and not 0 < self.spectrum_radius < 1:
            raise ConfigError(
                f'spectrum_radius must lie in (0, 1), got {self.spectrum_radius}'
            )

    def rng(self) -> np.random.Generator:
        return np.random.default_rng(self.seed)


@dataclass(frozen=True)
class MatrixClass:
    hermitian: bool
    normal: bool
    unitary: bool
    contraction: bool


def direct_sum(a: CMatrix, b: CMatrix) -> CMatrix:
    """Block-diagonal matrix diag(A, B)."""
    out = np.zeros((a.rows + b.rows, a.cols + b.cols), dtype=np.complex128)
    out[: a.rows, : a.cols] = a.array
    out[a.rows :, a.cols :] = b.array
    return CMatrix(out)


def block_offdiag(a: CMatrix, b: CMatrix) -> CMatrix:
    """The 2x2 block matrix [[0, A], [B, 0]]."""
    if not (a.is_square and b.is_square):
        raise DimensionError(
            f'Off-diagonal blocks must be square, got {a.shape} and {b.shape}'
        )
    out = np.zeros((a.rows + b.rows, a.cols + b.cols), dtype=np.complex128)
    out[: a.rows, b.cols :] = a.array
    out[a.rows :, : b.cols] = b.array
    return CMatrix(out)


def _ginibre(rng: np.random.Generator, rows: int, cols: int) -> np.ndarray:
    # 1/sqrt(2) keeps unit variance per entry
    return (
        rng.standard_normal((rows, cols))
        + 1j * rng.standard_normal((rows, cols))
    ) / np.sqrt(2)


def _haar(rng: np.random.Generator, n: int) -> np.ndarray:
    q, r = np.linalg.qr(_ginibre(rng, n, n))
    d = np.diag(r)
    # diag(R) is nonzero with probability one
    return q * (d / np.abs(d))


def haar_unitary(spec: RandomSpec) -> CMatrix:
    """Haar-distributed unitary via QR of a Ginibre matrix with the phases
    of diag(R) moved into Q."""
    if spec.kind is not MatrixKind.UNITARY:
        raise ConfigError(f'haar_unitary needs kind=unitary, got {spec.kind}')
    return CMatrix(_haar(spec.rng(), spec.dim))


def random_in_disk(spec: RandomSpec):
    """Random Hermitian or normal matrix U diag(lambda) U* with its exact
    spectral decomposition."""
    from .spectral import SpectralDecomposition

    rng = spec.rng()
    n, radius = spec.dim, spec.spectrum_radius
    if spec.kind is MatrixKind.HERMITIAN_IN_DISK:
        eigenvalues = rng.uniform(-radius, radius, n).astype(np.complex128)
    elif spec.kind is MatrixKind.NORMAL_IN_DISK:
        moduli = radius * np.sqrt(rng.uniform(0.0, 1.0, n))
        angles = rng.uniform(0.0, 2 * np.pi, n)
        eigenvalues = moduli * np.exp(1j * angles)
    else:
        raise ConfigError(
            f'random_in_disk needs an in-disk kind, got {spec.kind.value}'
        )

    u = _haar(rng, n)
    a = (u * eigenvalues) @ u.conj().T
    if spec.kind is MatrixKind.HERMITIAN_IN_DISK:
        a = (a + a.conj().T) / 2
    decomp = SpectralDecomposition(CMatrix(u), tuple(complex(v) for v in eigenvalues))
    return CMatrix(a), decomp


def random_general(spec: RandomSpec) -> CMatrix:
    """Ginibre matrix scaled by 1/sqrt(dim); operator norm stays O(1)."""
    return CMatrix(_ginibre(spec.rng(), spec.dim, spec.dim) / np.sqrt(spec.dim))


def random_matrix(spec: RandomSpec) -> CMatrix:
    if spec.kind is MatrixKind.UNITARY:
        return haar_unitary(spec)
    if spec.kind is MatrixKind.GENERAL_BOUNDED:
        return random_general(spec)
    return random_in_disk(spec)[0]


def classify(a: CMatrix, tol: float = 1e-10) -> MatrixClass:
    from .spectral import singular_values

    if not a.is_square:
        raise DimensionError(f'classify needs a square matrix, got {a.shape}')
    x = a.array
    xh = x.conj().T
    fro = np.linalg.norm(x)
    hermitian = np.linalg.norm(x - xh) <= tol * (1 + fro)
    normal = np.linalg.norm(xh @ x - x @ xh) <= tol * (1 + fro**2)
    unitary = np.linalg.norm(xh @ x - np.eye(a.rows)) <= tol * a.rows
    s_max = singular_values(a)[0] if a.rows else 0.0
    return MatrixClass(
        hermitian=bool(hermitian),
        normal=bool(normal),
        unitary=bool(unitary),
        contraction=bool(s_max <= 1 + tol),
    )
