import math
import re
from dataclasses import dataclass, field
from typing import Any

from app.environments import DEFAULT_ATOL, DEFAULT_RTOL

LABEL_PATTERN = re.compile(r'(?P<tag>[a-z-]+)(?:\((?P<arg>[^)]+)\))?')


@dataclass(frozen=True)
class NormKind:
    """Which unitarily invariant norm to evaluate.

    ``operator`` is schatten(inf) and kyfan(1); ``hilbert-schmidt`` is
    schatten(2).
    """

    tag: str
    p: float | None = None
    k: int | None = None

    TAGS = ('operator', 'hilbert-schmidt', 'schatten', 'kyfan')

    def __post_init__(self):
        if self.tag not in self.TAGS:
            raise ValueError(f'Unknown norm tag {self.tag!r}')
        if self.tag == 'schatten':
            if self.p is None or not self.p >= 1:
                raise ValueError(f'schatten needs p >= 1, got {self.p}')
            object.__setattr__(self, 'p', float(self.p))
        if self.tag == 'kyfan':
            if self.k is None or int(self.k) != self.k or self.k < 1:
                raise ValueError(f'kyfan needs an integer k >= 1, got {self.k}')
            object.__setattr__(self, 'k', int(self.k))

    @classmethod
    def operator(cls) -> 'NormKind':
        return cls('operator')

    @classmethod
    def hilbert_schmidt(cls) -> 'NormKind':
        return cls('hilbert-schmidt')

    @classmethod
    def schatten(cls, p: float) -> 'NormKind':
        return cls('schatten', p=p)

    @classmethod
    def kyfan(cls, k: int) -> 'NormKind':
        return cls('kyfan', k=k)

    @classmethod
    def from_label(cls, label: str) -> 'NormKind':
        """Inverse of ``label``: 'operator', 'schatten(1.5)', 'kyfan(2)'."""
        match = LABEL_PATTERN.fullmatch(label.strip())
        if match is None:
            raise ValueError(f'Unrecognized norm label {label!r}')
        tag, arg = match.group('tag'), match.group('arg')
        if tag == 'schatten' and arg is not None:
            return cls.schatten(float(arg))
        if tag == 'kyfan' and arg is not None:
            return cls.kyfan(int(arg))
        if tag in ('operator', 'hilbert-schmidt') and arg is None:
            return cls(tag)
        raise ValueError(f'Unrecognized norm label {label!r}')

    @property
    def label(self) -> str:
        if self.tag == 'schatten':
            return f'schatten({self.p:g})'
        if self.tag == 'kyfan':
            return f'kyfan({self.k})'
        return self.tag


@dataclass(frozen=True)
class Tolerance:
    atol: float = DEFAULT_ATOL
    rtol: float = DEFAULT_RTOL

    def budget(self, lhs: float, rhs: float) -> float:
        return self.atol + self.rtol * max(abs(lhs), abs(rhs))

    def holds(self, lhs: float, rhs: float) -> bool:
        return rhs - lhs >= -self.budget(lhs, rhs)


DEFAULT_TOLERANCE = Tolerance()


@dataclass(frozen=True)
class IneqReport:
    """One evaluation of an inequality: slack = rhs - lhs."""

    name: str
    norm_kind: NormKind | None
    lhs: float
    rhs: float
    slack: float
    holds: bool
    params: dict[str, Any] = field(default_factory=dict)

    @property
    def norm_label(self) -> str:
        return self.norm_kind.label if self.norm_kind else 'singular-values'


def make_report(
    name: str,
    kind: NormKind | None,
    lhs: float,
    rhs: float,
    tol: Tolerance = DEFAULT_TOLERANCE,
    **params,
) -> IneqReport:
    lhs, rhs = float(lhs), float(rhs)
    if not (math.isfinite(lhs) and math.isfinite(rhs)):
        raise ValueError(f'{name}: non-finite sides lhs={lhs} rhs={rhs}')
    return IneqReport(
        name=name,
        norm_kind=kind,
        lhs=lhs,
        rhs=rhs,
        slack=rhs - lhs,
        holds=tol.holds(lhs, rhs),
        params=params,
    )
