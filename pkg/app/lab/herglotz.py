"""Analytic functions on the unit disk with positive real part and f(0) = 1.

Each function is stored through a finitely atomic Herglotz measure,
f(z) = sum_m w_m (e^{i a_m} + z) / (e^{i a_m} - z), with positive weights
summing to one. Matrix arguments go through a SpectralDecomposition, so f(A)
is only formed for matrices with a known unitary eigenbasis.
"""

import logging
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from app.environments import DEFAULT_ANGLE_COUNT, DEFAULT_CONTOUR_NODES
from app.exceptions import (
    DimensionError,
    LabError,
    ResolventError,
    SpectrumError,
)

from .matcore import CMatrix
from .spectral import SpectralDecomposition, eigvalsh_stack

logger = logging.getLogger(__name__)

TWO_PI = 2 * np.pi
COARSE_STEP = 8


@dataclass(frozen=True)
class HerglotzFunction:
    atoms: tuple[float, ...]
    weights: tuple[float, ...]

    def __post_init__(self):
        atoms = tuple(float(a) for a in self.atoms)
        weights = tuple(float(w) for w in self.weights)
        if not atoms or len(atoms) != len(weights):
            raise LabError('atoms and weights must be non-empty and aligned')
        if any(not 0 <= a < TWO_PI for a in atoms):
            raise LabError('atoms must lie in [0, 2*pi)')
        if any(w <= 0 for w in weights):
            raise LabError('weights must be positive')
        if abs(sum(weights) - 1) > 1e-12:
            raise LabError(f'weights must sum to 1, got {sum(weights)!r}')
        object.__setattr__(self, 'atoms', atoms)
        object.__setattr__(self, 'weights', weights)

    @classmethod
    def kernel(cls, angle: float = 0.0) -> 'HerglotzFunction':
        """Single atom: the rotated Moebius kernel (e^{ia}+z)/(e^{ia}-z)."""
        atom = float(angle) % TWO_PI
        # tiny negative angles round up to exactly 2 pi
        if atom >= TWO_PI:
            atom = 0.0
        return cls((atom,), (1.0,))

    def __call__(self, z):
        return _evaluate(self, np.asarray(z, dtype=np.complex128))


@dataclass(frozen=True)
class ContourSpec:
    radius: float
    nodes: int = DEFAULT_CONTOUR_NODES

    def __post_init__(self):
        if not 0 < self.radius < 1:
            raise SpectrumError(
                f'Contour radius must lie in (0, 1), got {self.radius}'
            )
        if self.nodes < 1:
            raise LabError(f'nodes must be positive, got {self.nodes}')

    @classmethod
    def around(
        cls, decomp: SpectralDecomposition, nodes: int = DEFAULT_CONTOUR_NODES
    ) -> 'ContourSpec':
        """Circle midway between the spectral radius and the unit circle."""
        return cls(radius=(decomp.spectral_radius + 1) / 2, nodes=nodes)


def _evaluate(f: HerglotzFunction, z: np.ndarray) -> np.ndarray:
    if np.any(np.abs(z) >= 1):
        raise SpectrumError('Herglotz functions are evaluated inside |z| < 1')
    points = np.exp(1j * np.array(f.atoms))
    weights = np.array(f.weights)
    zz = z[..., None]
    return np.sum(weights * (points + zz) / (points - zz), axis=-1)


def herglotz_eval(f: HerglotzFunction, z: complex) -> complex:
    return complex(_evaluate(f, np.asarray(z, dtype=np.complex128)))


def conj_eval(f: HerglotzFunction, z: complex) -> complex:
    """Value of the conjugate function, conj(f(z))."""
    return herglotz_eval(f, z).conjugate()


def _check_in_disk(decomp: SpectralDecomposition):
    if decomp.dim and decomp.spectral_radius >= 1:
        raise SpectrumError(
            f'Spectrum reaches radius {decomp.spectral_radius}, outside the unit disk'
        )


def apply_spectral(
    f: HerglotzFunction,
    decomp: SpectralDecomposition,
    conjugate: bool = False,
) -> CMatrix:
    """f(A) = U diag(f(lambda_j)) U*.

    With ``conjugate`` the conjugate function is applied, which for a normal
    matrix equals the adjoint (f(A))*; the adjoint of the plain result is
    returned so the identity holds exactly.
    """
    _check_in_disk(decomp)
    result = decomp.apply(_evaluate(f, decomp.values))
    return result.H if conjugate else result


def apply_contour(
    f: HerglotzFunction,
    a: CMatrix,
    spec: ContourSpec | None = None,
    decomp: SpectralDecomposition | None = None,
) -> CMatrix:
    """Trapezoidal Riesz-Dunford integral over the circle |z| = radius.

    With z_k = r e^{2 pi i k / N} and dz = i z d(theta) the integral
    (1 / 2 pi i) \\oint f(z) (z - A)^{-1} dz becomes the mean of
    f(z_k) z_k (z_k - A)^{-1}.
    """
    if not a.is_square:
        raise DimensionError(f'f(A) needs a square matrix, got {a.shape}')
    if spec is None:
        if decomp is None:
            raise SpectrumError('A default contour needs the spectrum of A')
        spec = ContourSpec.around(decomp)
    if decomp is not None and decomp.spectral_radius >= spec.radius:
        raise SpectrumError(
            f'Contour radius {spec.radius} does not enclose the spectrum '
            f'(spectral radius {decomp.spectral_radius})'
        )

    n = a.rows
    nodes = spec.radius * np.exp(1j * TWO_PI * np.arange(spec.nodes) / spec.nodes)
    shifted = nodes[:, None, None] * np.eye(n) - a.array
    try:
        resolvents = np.linalg.solve(
            shifted, np.broadcast_to(np.eye(n, dtype=np.complex128), shifted.shape)
        )
    except np.linalg.LinAlgError as e:
        raise ResolventError(f'Contour node hits the spectrum: {e}') from e

    weights = _evaluate(f, nodes) * nodes / spec.nodes
    return CMatrix(np.einsum('k,kij->ij', weights, resolvents))


def dist_boundary_spectrum(decomp: SpectralDecomposition) -> float:
    """d_A = dist(unit circle, sigma(A)) = 1 - max |lambda_j|."""
    _check_in_disk(decomp)
    return 1.0 - decomp.spectral_radius


def _support(stack: np.ndarray, theta: np.ndarray) -> np.ndarray:
    """lambda_max(Re(e^{i theta} A)) for each matrix of the stack (rows) and
    each angle (columns)."""
    batch, n, _ = stack.shape
    rotated = np.exp(1j * theta)[None, :, None, None] * stack[:, None]
    real_parts = (rotated + rotated.conj().swapaxes(-1, -2)) / 2
    values = eigvalsh_stack(real_parts.reshape(-1, n, n))[:, 0]
    return values.reshape(batch, len(theta))


def _grid_radii(stack: np.ndarray, angle_count: int) -> np.ndarray:
    theta = TWO_PI * np.arange(angle_count) / angle_count
    step = min(COARSE_STEP, angle_count)
    coarse = np.arange(0, angle_count, step)
    h_coarse = _support(stack, theta[coarse])
    best = h_coarse.max(axis=1)

    fine = np.setdiff1d(np.arange(angle_count), coarse)
    if fine.size == 0:
        return best

    # h(t) <= h(t_c) + |e^{it} - e^{it_c}| w(A) and, W(A) being convex,
    # w(A) <= max_c h(t_c) / cos(spacing / 2)
    bound = np.linalg.norm(stack, axis=(1, 2))
    spacing = TWO_PI * step / angle_count
    if spacing < np.pi:
        circumscribed = np.maximum(best, 0.0) / np.cos(spacing / 2)
        bound = np.minimum(bound, circumscribed)
    bound = bound * (1 + 1e-12) + 1e-14

    left = fine // step
    right = (left + 1) % len(coarse)
    right_angle = np.where(right == 0, TWO_PI, theta[coarse[right]])
    reach_left = 2 * np.sin((theta[fine] - theta[coarse[left]]) / 2)
    reach_right = 2 * np.sin((right_angle - theta[fine]) / 2)
    ceiling = np.minimum(
        h_coarse[:, left] + reach_left * bound[:, None],
        h_coarse[:, right] + reach_right * bound[:, None],
    )

    rows, cols = np.nonzero(ceiling >= best[:, None] - 1e-12 * (1 + bound[:, None]))
    if rows.size:
        angles = theta[fine[cols]]
        rotated = np.exp(1j * angles)[:, None, None] * stack[rows]
        real_parts = (rotated + rotated.conj().swapaxes(-1, -2)) / 2
        np.maximum.at(best, rows, eigvalsh_stack(real_parts)[:, 0])
    logger.debug(
        f'Numerical radius: {len(coarse)} coarse angles, '
        f'{rows.size} of {fine.size * len(stack)} fine angles solved'
    )
    return best


def numerical_radii(
    mats: Sequence[CMatrix], angle_count: int = DEFAULT_ANGLE_COUNT
) -> list[float]:
    """max over the grid 2 pi k / angle_count of lambda_max(Re(e^{i theta} A)),
    for each matrix.

    The grid value underestimates the numerical radius by a relative
    O(angle_count^-2) because W(A) is convex. Every eighth angle is solved
    first; the rest only where the Lipschitz bound on the support function
    leaves room above the coarse maximum, so the result is the full-grid
    maximum.
    """
    if angle_count < 1:
        raise LabError(f'angle_count must be positive, got {angle_count}')
    groups: dict[int, list[int]] = {}
    for i, a in enumerate(mats):
        if not a.is_square:
            raise DimensionError(f'W(A) needs a square matrix, got {a.shape}')
        groups.setdefault(a.rows, []).append(i)

    out = [0.0] * len(mats)
    for n, members in groups.items():
        if n == 0:
            continue
        stack = np.stack([mats[i].array for i in members])
        for i, w in zip(members, _grid_radii(stack, angle_count)):
            out[i] = float(w)
    return out


def numerical_radius(a: CMatrix, angle_count: int = DEFAULT_ANGLE_COUNT) -> float:
    return numerical_radii([a], angle_count)[0]


def numerical_range_distances(
    mats: Sequence[CMatrix], angle_count: int = DEFAULT_ANGLE_COUNT
) -> list[float]:
    """D_A = dist(unit circle, closure of W(A)) = 1 - w(A) for each matrix."""
    radii = numerical_radii(mats, angle_count)
    for w in radii:
        if w >= 1:
            raise SpectrumError(
                f'Closure of the numerical range leaves the unit disk (w(A)={w})'
            )
    return [1.0 - w for w in radii]


def numerical_range_distance(
    a: CMatrix, angle_count: int = DEFAULT_ANGLE_COUNT
) -> float:
    return numerical_range_distances([a], angle_count)[0]


def random_herglotz(atom_count: int, seed: int) -> HerglotzFunction:
    """Uniform atoms with flat-Dirichlet weights."""
    if atom_count < 1:
        raise LabError(f'atom_count must be positive, got {atom_count}')
    rng = np.random.default_rng(seed)
    atoms = rng.uniform(0.0, TWO_PI, atom_count)
    weights = rng.dirichlet(np.ones(atom_count))
    weights = weights / weights.sum()
    return HerglotzFunction(tuple(atoms), tuple(weights))
