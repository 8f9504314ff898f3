"""Seeded randomized suites over the checkers.

Trial t of suite s, variant v draws its instance from
SeedSequence([seed, crc32('s:v'), t]); every matrix, function and scalar of
the trial is spawned from that sequence and logged, so any trial can be
regenerated from the report alone and a worker pool returns exactly what a
sequential run does.
"""

import json
import logging
import math
import time
import zlib
from dataclasses import dataclass, field
from multiprocessing import Pool
from typing import Any, Callable

import numpy as np
import pandas as pd

from app.environments import (
    DEFAULT_ANGLE_COUNT,
    DEFAULT_ATOL,
    DEFAULT_CONTOUR_NODES,
    DEFAULT_DIMS,
    DEFAULT_RTOL,
    DEFAULT_SEED,
    DEFAULT_SPECTRUM_RADIUS,
    DEFAULT_TRIALS,
    DEFAULT_WORKERS,
)
from app.exceptions import ConfigError

from . import ineq, norms
from .herglotz import HerglotzFunction, random_herglotz
from .matcore import (
    CMatrix,
    MatrixKind,
    RandomSpec,
    haar_unitary,
    random_general,
    random_in_disk,
)
from .reports import IneqReport, Tolerance
from .spectral import SpectralDecomposition, singular_values_many

logger = logging.getLogger(__name__)

EQUALITY_SLACK = 1e-9
NEAR_UNITARY_DELTA = 1e-3
MAX_ATOMS = 4
REPORT_FORMATS = ('json', 'csv')
CSV_COLUMNS = [
    'name',
    'norm',
    'trials',
    'violations',
    'min_slack',
    'mean_slack',
    'mode',
]
SUMMARY_COLUMNS = [
    'suite',
    'evaluations',
    'theorem_violations',
    'recording_violations',
    'min_slack',
    'mean_slack',
]


@dataclass(frozen=True)
class SuiteConfig:
    trials: int = DEFAULT_TRIALS
    dims: tuple[int, ...] = tuple(DEFAULT_DIMS)
    seed: int = DEFAULT_SEED
    spectrum_radius: float = DEFAULT_SPECTRUM_RADIUS
    atol: float = DEFAULT_ATOL
    rtol: float = DEFAULT_RTOL
    suites: tuple[str, ...] = ('all',)
    contour_nodes: int = DEFAULT_CONTOUR_NODES
    angle_count: int = DEFAULT_ANGLE_COUNT
    report_format: str = 'json'
    output_path: str | None = None
    workers: int = DEFAULT_WORKERS
    timing: bool = False

    def __post_init__(self):
        suites = self.suites
        suites = (suites,) if isinstance(suites, str) else tuple(suites)
        object.__setattr__(self, 'suites', suites)
        object.__setattr__(self, 'dims', tuple(int(d) for d in self.dims))

        if self.trials < 1:
            raise ConfigError(f'trials must be at least 1, got {self.trials}')
        if not self.dims or min(self.dims) < 1:
            raise ConfigError(f'dims must be positive, got {self.dims}')
        if not 0 <= self.seed < 2**64:
            raise ConfigError('seed must be a 64-bit unsigned integer')
        if not 0 < self.spectrum_radius < 1:
            raise ConfigError(
                f'spectrum_radius must lie in (0, 1), got {self.spectrum_radius}'
            )
        if self.atol < 0 or self.rtol < 0:
            raise ConfigError('atol and rtol must be non-negative')
        if min(self.contour_nodes, self.angle_count, self.workers) < 1:
            raise ConfigError(
                'contour_nodes, angle_count and workers must be positive'
            )
        if self.report_format not in REPORT_FORMATS:
            raise ConfigError(
                f'report_format must be one of {REPORT_FORMATS}, '
                f'got {self.report_format!r}'
            )
        unknown = [s for s in suites if s != 'all' and s not in SUITES]
        if not suites or unknown:
            raise ConfigError(f'Unknown suites: {unknown or "none given"}')

    @property
    def tolerance(self) -> Tolerance:
        return Tolerance(self.atol, self.rtol)

    def selected_suites(self) -> list['Suite']:
        if 'all' in self.suites:
            return list(SUITES.values())
        return [SUITES[name] for name in dict.fromkeys(self.suites)]


class TrialDraws:
    """Random source for one trial.

    Each draw spawns its own child seed from the trial's SeedSequence and is
    recorded in ``log`` (kind, dim, seed), which is what a worst-instance
    record stores instead of matrices.
    """

    def __init__(self, seq: np.random.SeedSequence, spectrum_radius: float):
        self._seq = seq
        self.spectrum_radius = spectrum_radius
        self.log: list[dict[str, Any]] = []

    def _seed(self, draw: str, **extra) -> int:
        child = self._seq.spawn(1)[0]
        seed = int(child.generate_state(1, dtype=np.uint64)[0])
        self.log.append({'draw': draw, 'seed': seed, **extra})
        return seed

    def _in_disk(self, kind: MatrixKind, dim: int) -> SpectralDecomposition:
        spec = RandomSpec(
            dim,
            self._seed(kind.value, dim=dim),
            self.spectrum_radius,
            kind,
        )
        return random_in_disk(spec)[1]

    def hermitian(self, dim: int) -> SpectralDecomposition:
        return self._in_disk(MatrixKind.HERMITIAN_IN_DISK, dim)

    def normal(self, dim: int) -> SpectralDecomposition:
        return self._in_disk(MatrixKind.NORMAL_IN_DISK, dim)

    def general(self, dim: int) -> CMatrix:
        seed = self._seed(MatrixKind.GENERAL_BOUNDED.value, dim=dim)
        return random_general(RandomSpec(dim, seed))

    def unitary(self, dim: int) -> CMatrix:
        seed = self._seed(MatrixKind.UNITARY.value, dim=dim)
        return haar_unitary(RandomSpec(dim, seed, kind=MatrixKind.UNITARY))

    def near_unitary(self, dim: int, delta: float) -> SpectralDecomposition:
        """Normal matrix with every eigenvalue on the circle |z| = 1 - delta."""
        u = self.unitary(dim)
        angles = self.uniform(0.0, 2 * math.pi, size=dim)
        return SpectralDecomposition(u, tuple((1 - delta) * np.exp(1j * angles)))

    def positive(self, dim: int, m: float) -> CMatrix:
        """X = mI + GG*, so X >= mI."""
        g = self.general(dim).array
        gram = g @ g.conj().T
        return CMatrix(m * np.eye(dim) + (gram + gram.conj().T) / 2)

    def herglotz(self) -> HerglotzFunction:
        atoms = int(self.integer(1, MAX_ATOMS + 1))
        return random_herglotz(atoms, self._seed('herglotz', atoms=atoms))

    def uniform(self, low: float, high: float, size: int | None = None):
        rng = np.random.default_rng(self._seed('uniform', size=size))
        value = rng.uniform(low, high, size)
        return float(value) if size is None else value

    def integer(self, low: int, high: int) -> int:
        rng = np.random.default_rng(self._seed('integer'))
        return int(rng.integers(low, high))


TrialFn = Callable[[TrialDraws, int, str, SuiteConfig], list[IneqReport]]


@dataclass(frozen=True)
class Variant:
    name: str = ''
    recording: bool = False

    @property
    def mode(self) -> str:
        return 'recording' if self.recording else 'theorem'


@dataclass(frozen=True)
class Witness:
    """Fixed instance evaluated once per run."""

    name: str
    variant: str
    build: Callable[[Tolerance], list[IneqReport]]


@dataclass(frozen=True)
class Suite:
    name: str
    trial: TrialFn
    variants: tuple[Variant, ...] = (Variant(),)
    witnesses: tuple[Witness, ...] = ()
    description: str = ''

    def variant(self, name: str) -> Variant:
        for variant in self.variants:
            if variant.name == name:
                return variant
        raise ConfigError(f'Suite {self.name} has no variant {name!r}')

    def witness(self, name: str, variant: str | None = None) -> Witness:
        for witness in self.witnesses:
            if witness.name == name and variant in (None, witness.variant):
                return witness
        raise ConfigError(f'Suite {self.name} has no witness {name!r}')


def _signs(recording: bool = False) -> tuple[Variant, ...]:
    return tuple(Variant(sign.value, recording) for sign in ineq.SignVariant)


# Trials


def _submultiplicative(d, dim, variant, config):
    a, b, x = d.general(dim), d.general(dim), d.general(dim)
    return norms.check_submultiplicative_grid(a, b, x, tol=config.tolerance)


def _direct_sum_identities(d, dim, variant, config):
    a, b = d.general(dim), d.general(dim)
    return [norms.check_direct_sum_identities(a, b, config.tolerance)]


def _kyfan_dominance(d, dim, variant, config):
    # (Y + UYV)/2 is dominated by Y in every Ky Fan norm
    y = d.general(dim)
    u, v = d.unitary(dim), d.unitary(dim)
    x = (y + u @ y @ v) / 2
    return [norms.kyfan_dominance_check(x, y, config.tolerance)]


def _prior(d, dim, variant, config):
    which = variant.removeprefix('numrange.')
    distance = 'spectrum' if which == variant else 'numrange'
    a, b = d.normal(dim), d.normal(dim)
    x = d.general(dim)
    f, g = d.herglotz(), d.herglotz()
    return ineq.check_prior(
        a,
        b,
        x,
        f,
        g,
        which,
        tol=config.tolerance,
        distance=distance,
        angle_count=config.angle_count,
    )


def _thm21_first(d, dim, variant, config):
    a, b = d.hermitian(dim), d.hermitian(dim)
    x = d.general(dim)
    f, g = d.herglotz(), d.herglotz()
    return [
        ineq.check_thm21_first(a, b, x, f, g, variant, config.tolerance)
    ]


def _thm21_second(d, dim, variant, config):
    a, b = d.hermitian(dim), d.hermitian(dim)
    x = d.general(dim)
    f, g = d.herglotz(), d.herglotz()
    return [
        ineq.check_thm21_second(a, b, x, f, g, variant, config.tolerance)
    ]


def _cor22(d, dim, variant, config):
    which, sign = variant.split('.')
    a, b = d.hermitian(dim), d.hermitian(dim)
    f, g = d.herglotz(), d.herglotz()
    return [ineq.check_cor22(a, b, f, g, sign, which, config.tolerance)]


def _pair(d, dim, ratio: float = 1.0):
    """A, B with ||B|| = ratio * ||A||."""
    a, b = d.general(dim), d.general(dim)
    s_a, s_b = singular_values_many([a, b])
    return a, b * (ratio * float(s_a[0]) / float(s_b[0]))


def _lem23_sv(d, dim, variant, config):
    a, b = _pair(d, dim)
    x, y = d.general(dim), d.general(dim)
    return [ineq.check_lem23_sv(a, b, x, y, variant, config.tolerance)]


def _lem23_norm(d, dim, variant, config):
    a, b = _pair(d, dim)
    x, y = d.general(dim), d.general(dim)
    return ineq.check_lem23_norm(a, b, x, y, variant, tol=config.tolerance)


def _lem23_unbalanced(d, dim, variant, config):
    form, sign = variant.split('.')
    a, b = _pair(d, dim, d.uniform(0.01, 0.2))
    x, y = d.general(dim), d.general(dim)
    if form == 'sv':
        return [ineq.check_lem23_sv(a, b, x, y, sign, config.tolerance)]
    t = 2 ** d.uniform(-1.0, 1.0)
    return [ineq.check_lem23_scaled(a, b, x, y, sign, t, config.tolerance)]


def _thm24(d, dim, variant, config):
    form, sign = variant.split('.')
    a, b = d.normal(dim), d.normal(dim)
    x, y = d.general(dim), d.general(dim)
    f, g = d.herglotz(), d.herglotz()
    return ineq.check_thm24(
        a, b, x, y, f, g, sign, form, tol=config.tolerance
    )


def _thm25(d, dim, variant, config):
    a, b = d.normal(dim), d.normal(dim)
    x, f = d.general(dim), d.herglotz()
    return ineq.check_thm25(a, b, x, f, variant, tol=config.tolerance)


def _remark_conj(d, dim, variant, config):
    a, b = d.normal(dim), d.normal(dim)
    x, f = d.general(dim), d.herglotz()
    return ineq.check_remark_conj(a, b, x, f, variant, tol=config.tolerance)


def _dadar(d, dim, variant, config):
    a, b, x = d.general(dim), d.general(dim), d.general(dim)
    alpha, beta = d.uniform(0.0, 2 * math.pi), d.uniform(0.0, 2 * math.pi)
    return ineq.check_dadar(a, b, x, alpha, beta, tol=config.tolerance)


def _numrange(d, dim, variant, config):
    a, b = d.normal(dim), d.normal(dim)
    x, f = d.general(dim), d.herglotz()
    return ineq.check_numrange_variant(
        a,
        b,
        x,
        f,
        variant,
        tol=config.tolerance,
        angle_count=config.angle_count,
    )


def _cor_ref(d, dim, variant, config):
    a = d.normal(dim)
    b = d.normal(dim) if variant == 'pair' else None
    f = d.herglotz()
    return ineq.check_cor_ref(a, f, variant, b, tol=config.tolerance)


def _pos_multiplier(d, dim, variant, config):
    a, b = d.hermitian(dim).matrix(), d.hermitian(dim).matrix()
    m = d.uniform(0.1, 2.0)
    x = d.positive(dim, m)
    return ineq.check_pos_multiplier(
        a, b, x, m, variant, tol=config.tolerance
    )


def _prop_rediff(d, dim, variant, config):
    if variant == 'unitary-case':
        a = d.near_unitary(dim, NEAR_UNITARY_DELTA)
        b = d.near_unitary(dim, NEAR_UNITARY_DELTA)
    else:
        a, b = d.normal(dim), d.normal(dim)
    m = d.uniform(0.1, 2.0)
    x, f = d.positive(dim, m), d.herglotz()
    return ineq.check_prop_rediff(
        a, b, x, m, f, variant, tol=config.tolerance
    )


def _remark_block(d, dim, variant, config):
    a, b = d.normal(dim), d.normal(dim)
    x, y = d.general(dim), d.general(dim)
    f = d.herglotz()
    return ineq.check_remark_block(
        a, b, x, y, f, variant, tol=config.tolerance
    )


def _g1_identity(d, dim, variant, config):
    return [ineq.check_g1_resolvent(d.normal(dim), tol=config.tolerance)]


def _calculus_oracle(d, dim, variant, config):
    a, f = d.normal(dim), d.herglotz()
    return [
        ineq.check_calculus_oracle(
            a, f, config.contour_nodes, tol=config.tolerance
        )
    ]


# Witnesses


def scalar(value: complex) -> SpectralDecomposition:
    return SpectralDecomposition(CMatrix.identity(1), (value,))


def zero(dim: int) -> SpectralDecomposition:
    return SpectralDecomposition(CMatrix.identity(dim), (0,) * dim)


ONE = CMatrix.identity(1)
KERNEL = HerglotzFunction.kernel(0.0)
X2 = CMatrix(np.array([[1.0, 2.0j], [0.5, -1.0]]))
Y2 = CMatrix(np.array([[0.0, 1.0], [-1.0j, 0.5]]))


SUITES: dict[str, Suite] = {
    suite.name: suite
    for suite in (
        Suite(
            'submultiplicative',
            _submultiplicative,
            description='|||AXB||| <= ||A|| ||B|| |||X|||',
        ),
        Suite(
            'direct_sum_identities',
            _direct_sum_identities,
            description='direct sum and off-diagonal block identities',
        ),
        Suite(
            'kyfan_dominance',
            _kyfan_dominance,
            description='Ky Fan dominance over the Schatten family',
        ),
        Suite(
            'prior',
            _prior,
            (
                *(Variant(which) for which in ineq.PRIOR_FORMS),
                *(Variant(f'numrange.{which}') for which in ineq.PRIOR_FORMS),
            ),
            (
                Witness(
                    'scalar-1x1',
                    '1.2',
                    lambda tol: ineq.check_prior(
                        scalar(0.5), scalar(0), ONE, KERNEL, KERNEL, '1.2',
                        tol=tol,
                    ),
                ),
                Witness(
                    'scalar-1x1',
                    'numrange.1.2',
                    lambda tol: ineq.check_prior(
                        scalar(0.5), scalar(0), ONE, KERNEL, KERNEL, '1.2',
                        tol=tol, distance='numrange',
                    ),
                ),
            ),
            'G1 bounds with constant 2 sqrt2/(d_A d_B) or 2 sqrt2/(D_A D_B)',
        ),
        Suite(
            'thm21_first',
            _thm21_first,
            _signs(),
            (
                Witness(
                    'equality-1x1',
                    'plus',
                    lambda tol: [
                        ineq.check_thm21_first(
                            scalar(0.5), scalar(0), ONE, KERNEL, KERNEL,
                            'plus', tol,
                        )
                    ],
                ),
            ),
            'Hilbert-Schmidt bound for f(A)X + Xg(B) +- f(A)Xg(B)',
        ),
        Suite(
            'thm21_second',
            _thm21_second,
            _signs(),
            (
                Witness(
                    'scalar-1x1',
                    'minus',
                    lambda tol: [
                        ineq.check_thm21_second(
                            scalar(0.5), scalar(0), ONE, KERNEL, KERNEL,
                            'minus', tol,
                        )
                    ],
                ),
            ),
            'Hilbert-Schmidt bound for f(A)Xg(B) +- g(B)Xf(A)',
        ),
        Suite(
            'cor22',
            _cor22,
            tuple(
                Variant(f'{which}.{sign.value}')
                for which in ('first', 'second')
                for sign in ineq.SignVariant
            ),
            (
                Witness(
                    'zero-2x2',
                    'first.plus',
                    lambda tol: [
                        ineq.check_cor22(
                            zero(2), zero(2), KERNEL, KERNEL, 'plus',
                            'first', tol,
                        )
                    ],
                ),
            ),
            'Hilbert-Schmidt bounds with X = I',
        ),
        Suite(
            'lem23_sv',
            _lem23_sv,
            _signs(),
            (
                Witness(
                    'identity-1x1',
                    'plus',
                    lambda tol: [
                        ineq.check_lem23_sv(ONE, ONE, ONE, ONE, 'plus', tol)
                    ],
                ),
            ),
            's_j(AX +- YB) bound for balanced ||A|| = ||B||',
        ),
        Suite(
            'lem23_norm',
            _lem23_norm,
            _signs(),
            description='|||(AX +- YB) + 0||| bound for balanced pairs',
        ),
        Suite(
            'lem23_unbalanced',
            _lem23_unbalanced,
            (
                *(
                    Variant(f'sv.{sign.value}', recording=True)
                    for sign in ineq.SignVariant
                ),
                *(Variant(f'scaled.{sign.value}') for sign in ineq.SignVariant),
            ),
            (
                Witness(
                    'unbalanced-1x1',
                    'sv.plus',
                    lambda tol: [
                        ineq.check_lem23_sv(
                            ONE, 0.01 * ONE, ONE, CMatrix.zeros(1), 'plus',
                            tol,
                        )
                    ],
                ),
            ),
            'singular value bound on unbalanced pairs, and the rescaled form',
        ),
        Suite(
            'thm24',
            _thm24,
            tuple(
                Variant(f'{form}.{sign.value}')
                for form in ineq.THM24_FORMS
                for sign in ineq.SignVariant
            ),
            (
                Witness(
                    'zero-2x2',
                    'difference.plus',
                    lambda tol: ineq.check_thm24(
                        zero(2), zero(2), X2, Y2, KERNEL, KERNEL, 'plus',
                        'difference', tol=tol,
                    ),
                ),
            ),
            'difference and sum forms through the singular value lemma',
        ),
        Suite(
            'thm25',
            _thm25,
            _signs(),
            (
                Witness(
                    'equality-1x1',
                    'plus',
                    lambda tol: ineq.check_thm25(
                        scalar(0.5), scalar(0.5), ONE, KERNEL, 'plus', tol=tol
                    ),
                ),
                Witness(
                    'zero-2x2',
                    'plus',
                    lambda tol: ineq.check_thm25(
                        zero(2), zero(2), X2, KERNEL, 'plus', tol=tol
                    ),
                ),
                Witness(
                    'scalar-1x1',
                    'minus',
                    lambda tol: ineq.check_thm25(
                        scalar(0.5), scalar(-0.5), ONE, KERNEL, 'minus',
                        tol=tol,
                    ),
                ),
            ),
            'f(A)X +- X fbar(B) bounds',
        ),
        Suite(
            'remark_conj',
            _remark_conj,
            _signs(),
            (
                Witness(
                    'zero-2x2',
                    'plus',
                    lambda tol: ineq.check_remark_conj(
                        zero(2), zero(2), X2, KERNEL, 'plus', tol=tol
                    ),
                ),
            ),
            'fbar(A)X +- Xf(B) bounds',
        ),
        Suite(
            'dadar',
            _dadar,
            witnesses=(
                Witness(
                    'scalar-1x1',
                    '',
                    lambda tol: ineq.check_dadar(
                        ONE, ONE, ONE, 0.0, 0.0, tol=tol
                    ),
                ),
                Witness(
                    'cancel-1x1',
                    '',
                    lambda tol: ineq.check_dadar(
                        ONE, ONE, ONE, 0.0, math.pi, tol=tol
                    ),
                ),
            ),
            description='two-phase bound with constant sqrt2',
        ),
        Suite(
            'numrange',
            _numrange,
            _signs(),
            (
                Witness(
                    'zero-2x2',
                    'plus',
                    lambda tol: ineq.check_numrange_variant(
                        zero(2), zero(2), X2, KERNEL, 'plus', tol=tol
                    ),
                ),
            ),
            'f(A)X +- X fbar(B) bounds with numerical range distances',
        ),
        Suite(
            'cor_ref',
            _cor_ref,
            tuple(Variant(form) for form in ineq.COR_REF_FORMS),
            (
                Witness(
                    'imaginary-1x1',
                    're',
                    lambda tol: ineq.check_cor_ref(
                        scalar(0.5j), KERNEL, 're', tol=tol
                    ),
                ),
            ),
            '|||Re f(A)||| and |||f(A) + fbar(B)||| bounds',
        ),
        Suite(
            'pos_multiplier',
            _pos_multiplier,
            (
                Variant('proof-minus'),
                Variant('stated-plus', recording=True),
            ),
            tuple(
                Witness(
                    'counterexample-1x1',
                    variant,
                    lambda tol, variant=variant: ineq.check_pos_multiplier(
                        ONE, -ONE, ONE, 1.0, variant, tol=tol
                    ),
                )
                for variant in ineq.POS_VARIANTS
            ),
            'positive multiplier bound m|||A - B|||',
        ),
        Suite(
            'prop_rediff',
            _prop_rediff,
            tuple(
                Variant(variant, recording=True)
                for variant in ineq.PROP_VARIANTS
            ),
            (
                Witness(
                    'scalar-1x1',
                    'stated',
                    lambda tol: ineq.check_prop_rediff(
                        scalar(0.5), scalar(-0.5), ONE, 1.0, KERNEL,
                        'stated', tol=tol,
                    ),
                ),
            ),
            'Re f(A) - Re f(B) bounds',
        ),
        Suite(
            'remark_block',
            _remark_block,
            tuple(Variant(form) for form in ineq.REMARK_BLOCK_FORMS),
            (
                Witness(
                    'zero-2x2',
                    'general',
                    lambda tol: ineq.check_remark_block(
                        zero(2), zero(2), X2, CMatrix.zeros(2), KERNEL,
                        'general', tol=tol,
                    ),
                ),
            ),
            'block bounds with ||I - AB*||',
        ),
        Suite(
            'g1_identity',
            _g1_identity,
            description='resolvent norm of normal matrices on the unit circle',
        ),
        Suite(
            'calculus_oracle',
            _calculus_oracle,
            (Variant(recording=True),),
            description='spectral against contour functional calculus',
        ),
    )
}


def list_suites() -> list[dict[str, Any]]:
    return [
        {
            'name': suite.name,
            'description': suite.description,
            'variants': [
                {'name': v.name, 'mode': v.mode} for v in suite.variants
            ],
            'witnesses': [w.name for w in suite.witnesses],
        }
        for suite in SUITES.values()
    ]


# Running


@dataclass
class SuiteRow:
    """Aggregate of one suite variant under one norm kind."""

    suite: str
    variant: str
    mode: str
    check: str
    norm: str
    trials: int = 0
    violations: int = 0
    min_slack: float = math.inf
    slack_sum: float = 0.0
    equality_witnesses: int = 0
    worst: dict[str, Any] | None = None

    @property
    def name(self) -> str:
        return f'{self.suite}.{self.variant}' if self.variant else self.suite

    @property
    def mean_slack(self) -> float:
        return self.slack_sum / self.trials if self.trials else 0.0


@dataclass
class WitnessResult:
    suite: str
    witness: str
    variant: str
    mode: str
    report: IneqReport


@dataclass
class SuiteReport:
    config: SuiteConfig
    rows: list[SuiteRow] = field(default_factory=list)
    witnesses: list[WitnessResult] = field(default_factory=list)
    wall_time: float = 0.0

    @property
    def theorem_violations(self) -> int:
        rows = sum(r.violations for r in self.rows if r.mode == 'theorem')
        witnesses = sum(
            1
            for w in self.witnesses
            if w.mode == 'theorem' and not w.report.holds
        )
        return rows + witnesses

    @property
    def recording_violations(self) -> int:
        return sum(r.violations for r in self.rows if r.mode == 'recording')

    def worst_instances(self) -> list[dict[str, Any]]:
        return [row.worst for row in self.rows if row.worst is not None]


def _plain(value):
    """JSON-ready copy of report params (numpy scalars become floats)."""
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, np.generic):
        return value.item()
    return value


def norm_dict(report: IneqReport) -> dict[str, Any] | None:
    kind = report.norm_kind
    if kind is None:
        return None
    out: dict[str, Any] = {'tag': kind.tag}
    if kind.tag == 'schatten':
        out['p'] = kind.p
    if kind.tag == 'kyfan':
        out['k'] = kind.k
    return out


def _trial_seed(config: SuiteConfig, suite: str, variant: str, trial: int):
    key = zlib.crc32(f'{suite}:{variant}'.encode())
    return np.random.SeedSequence([config.seed, key, trial])


def _run_trial(config: SuiteConfig, suite: str, variant: str, trial: int):
    dim = config.dims[trial % len(config.dims)]
    draws = TrialDraws(
        _trial_seed(config, suite, variant, trial), config.spectrum_radius
    )
    reports = SUITES[suite].trial(draws, dim, variant, config)
    return dim, draws.log, reports


def _worst_record(config, row, trial, dim, log, report) -> dict[str, Any]:
    return {
        'suite': row.suite,
        'variant': row.variant,
        'trial': trial,
        'dim': dim,
        'seed': config.seed,
        'spectrum_radius': config.spectrum_radius,
        'contour_nodes': config.contour_nodes,
        'angle_count': config.angle_count,
        'atol': config.atol,
        'rtol': config.rtol,
        'check': report.name,
        'norm': norm_dict(report),
        'norm_label': report.norm_label,
        'lhs': report.lhs,
        'rhs': report.rhs,
        'slack': report.slack,
        'draws': _plain(log),
        'instance': _plain(report.params),
    }


def _aggregate(config, tasks, outcomes) -> list[SuiteRow]:
    rows: dict[tuple, SuiteRow] = {}
    for (suite, variant, trial), (dim, log, reports) in zip(tasks, outcomes):
        mode = SUITES[suite].variant(variant).mode
        for report in reports:
            key = (suite, variant, report.name, report.norm_label)
            row = rows.get(key)
            if row is None:
                row = rows[key] = SuiteRow(
                    suite, variant, mode, report.name, report.norm_label
                )
            row.trials += 1
            row.slack_sum += report.slack
            row.violations += 0 if report.holds else 1
            if abs(report.slack) <= EQUALITY_SLACK:
                row.equality_witnesses += 1
            if report.slack < row.min_slack:
                row.min_slack = report.slack
                row.worst = _worst_record(
                    config, row, trial, dim, log, report
                )
    return list(rows.values())


def _run_witnesses(config: SuiteConfig) -> list[WitnessResult]:
    results = []
    for suite in config.selected_suites():
        for witness in suite.witnesses:
            mode = suite.variant(witness.variant).mode
            for report in witness.build(config.tolerance):
                results.append(
                    WitnessResult(
                        suite.name, witness.name, witness.variant, mode, report
                    )
                )
                if not report.holds and mode == 'theorem':
                    logger.error(
                        f'Witness {suite.name}/{witness.name} violated: '
                        f'{report.norm_label} slack {report.slack!r}'
                    )
    return results


def run_suite(config: SuiteConfig) -> SuiteReport:
    started = time.perf_counter()
    tasks = [
        (suite.name, variant.name, trial)
        for suite in config.selected_suites()
        for variant in suite.variants
        for trial in range(config.trials)
    ]
    logger.info(
        f'Running {len(tasks)} trials over '
        f'{len(config.selected_suites())} suites (seed {config.seed}, '
        f'workers {config.workers})'
    )

    if config.workers > 1:
        args = [(config, *task) for task in tasks]
        chunksize = max(1, len(args) // (config.workers * 4))
        with Pool(config.workers) as pool:
            outcomes = pool.starmap(_run_trial, args, chunksize=chunksize)
    else:
        outcomes = [_run_trial(config, *task) for task in tasks]

    report = SuiteReport(
        config=config,
        rows=_aggregate(config, tasks, outcomes),
        witnesses=_run_witnesses(config),
    )
    report.wall_time = time.perf_counter() - started

    for row in report.rows:
        if row.violations and row.mode == 'recording':
            logger.warning(
                f'{row.name} [{row.norm}]: {row.violations}/{row.trials} '
                f'violations recorded, min slack {row.min_slack!r}'
            )
        elif row.violations:
            logger.error(
                f'{row.name} [{row.norm}]: {row.violations}/{row.trials} '
                f'violations, min slack {row.min_slack!r}'
            )
    logger.info(
        f'Finished in {report.wall_time:.2f}s: '
        f'{report.theorem_violations} theorem violations, '
        f'{report.recording_violations} recorded violations'
    )
    return report


# Reports


def report_frame(report: SuiteReport) -> pd.DataFrame:
    return pd.DataFrame(
        [
            {
                'name': row.name,
                'norm': row.norm,
                'trials': row.trials,
                'violations': row.violations,
                'min_slack': row.min_slack,
                'mean_slack': row.mean_slack,
                'mode': row.mode,
            }
            for row in report.rows
        ],
        columns=CSV_COLUMNS,
    )


def report_data(report: SuiteReport) -> dict[str, Any]:
    """JSON-ready report; wall time only when the run asked for timing."""
    from app.schemas import SuiteReportSchema

    data = SuiteReportSchema().dump(report)
    if not report.config.timing:
        data.pop('wall_time', None)
    return data


def render_report(report: SuiteReport, fmt: str = 'json') -> str:
    if fmt == 'csv':
        return report_frame(report).to_csv(index=False)
    if fmt != 'json':
        raise ConfigError(f'Unknown report format {fmt!r}')
    return json.dumps(report_data(report), indent=2, sort_keys=True) + '\n'


def emit_report(
    report: SuiteReport, fmt: str | None = None, path: str | None = None
) -> str:
    """Render the report and write it to ``path`` when given.

    OSError from the write propagates to the caller.
    """
    fmt = fmt or report.config.report_format
    path = path or report.config.output_path
    text = render_report(report, fmt)
    if path:
        with open(path, 'w', encoding='utf-8', newline='') as stream:
            stream.write(text)
        logger.info(f'Report written to {path} ({fmt})')
    return text


def _replay_config(params: dict[str, Any]) -> SuiteConfig:
    return SuiteConfig(
        trials=1,
        dims=(int(params['dim']),),
        seed=int(params['seed']),
        spectrum_radius=float(params['spectrum_radius']),
        atol=float(params.get('atol', DEFAULT_ATOL)),
        rtol=float(params.get('rtol', DEFAULT_RTOL)),
        suites=(params['suite'],),
        contour_nodes=int(params.get('contour_nodes', DEFAULT_CONTOUR_NODES)),
        angle_count=int(params.get('angle_count', DEFAULT_ANGLE_COUNT)),
    )


def _pick(reports, params) -> IneqReport:
    label = params.get('norm_label')
    check = params.get('check')
    for report in reports:
        if label is not None and report.norm_label != label:
            continue
        if check is not None and report.name != check:
            continue
        return report
    raise ConfigError(f'No report matches norm {label!r} / check {check!r}')


def replay(params: dict[str, Any]) -> IneqReport:
    """Re-evaluate a worst-instance or witness record.

    Worst instances are regenerated from (seed, suite, variant, trial, dim);
    witness records name the fixed instance instead.
    """
    if not isinstance(params, dict) or 'suite' not in params:
        raise ConfigError('Replay record needs at least a suite name')
    suite = SUITES.get(params['suite'])
    if suite is None:
        raise ConfigError(f'Unknown suite {params["suite"]!r}')

    if 'witness' in params:
        witness = suite.witness(params['witness'], params.get('variant'))
        tolerance = Tolerance(
            float(params.get('atol', DEFAULT_ATOL)),
            float(params.get('rtol', DEFAULT_RTOL)),
        )
        return _pick(witness.build(tolerance), params)

    try:
        config = _replay_config(params)
        variant = suite.variant(params.get('variant', '')).name
        trial = int(params['trial'])
    except (KeyError, TypeError, ValueError) as e:
        raise ConfigError(f'Malformed replay record: {e}') from e
    if trial < 0:
        raise ConfigError(f'trial must be non-negative, got {trial}')

    _, _, reports = _run_trial(config, suite.name, variant, trial)
    return _pick(reports, params)


def load_report(path: str) -> dict[str, Any]:
    with open(path, encoding='utf-8') as stream:
        return json.load(stream)


def summarize_report(path: str) -> pd.DataFrame:
    """Per-suite totals of a CSV or JSON report."""
    if path.endswith('.json'):
        frame = pd.DataFrame(load_report(path).get('rows', []))
        frame = frame.reindex(columns=CSV_COLUMNS)
    else:
        frame = pd.read_csv(path)
    if frame.empty:
        return pd.DataFrame(columns=SUMMARY_COLUMNS)

    frame['suite'] = frame['name'].str.split('.').str[0]
    recording = frame['mode'] == 'recording'
    frame['theorem_violations'] = frame['violations'].where(~recording, 0)
    frame['recording_violations'] = frame['violations'].where(recording, 0)
    frame['slack_total'] = frame['mean_slack'] * frame['trials']

    summary = (
        frame.groupby('suite', sort=False)
        .agg(
            evaluations=('trials', 'sum'),
            theorem_violations=('theorem_violations', 'sum'),
            recording_violations=('recording_violations', 'sum'),
            min_slack=('min_slack', 'min'),
            slack_total=('slack_total', 'sum'),
        )
        .reset_index()
    )
    summary['mean_slack'] = summary['slack_total'] / summary['evaluations']
    return summary[SUMMARY_COLUMNS]
