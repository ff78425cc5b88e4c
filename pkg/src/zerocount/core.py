"""Shared value types and small numeric helpers."""

from __future__ import annotations

import math
from dataclasses import dataclass
from decimal import ROUND_CEILING, ROUND_FLOOR, Decimal

# Absorbs floating point rounding in every certified "<=" comparison.
SLACK = 1e-9


class DomainError(ValueError):
    """Argument outside the region where a formula or bound is valid."""


@dataclass(frozen=True)
class Params:
    """Kernel parameters ``(d, a1, a2, a3)``.

    Only the hard domain constraints are enforced here.  The necessary
    admissibility conditions ``a1 > a2`` and ``a1 + a2 >= 2`` are checked by
    :func:`zerocount.kernel.verify_lemma21`, which must be able to report on
    parameter sets that violate them.
    """

    d: float
    a1: float
    a2: float
    a3: float

    def __post_init__(self):
        if not self.d > 0.5:
            raise DomainError(f"d must exceed 1/2, got {self.d}")
        for name in ("a1", "a2", "a3"):
            if getattr(self, name) < 0:
                raise DomainError(f"{name} must be nonnegative")

    @property
    def da1(self) -> float:
        return self.d * self.a1

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.d, self.a1, self.a2, self.a3)

    @classmethod
    def parse(cls, text: str) -> "Params":
        """Parse ``"d,a1,a2,a3"``."""
        parts = [float(p) for p in text.split(",")]
        if len(parts) != 4:
            raise ValueError(f"expected four comma separated values, got {text!r}")
        return cls(*parts)


PUBLISHED_PARAMS = Params(d=0.722, a1=1.07, a2=0.93, a3=0.365)


@dataclass(frozen=True)
class FieldSignature:
    """Degree, real/complex places and log-discriminant of a number field."""

    n_K: int
    r1: int
    r2: int
    log_dK: float = 0.0

    def __post_init__(self):
        if self.r1 < 0 or self.r2 < 0:
            raise DomainError("r1 and r2 must be nonnegative")
        if self.n_K != self.r1 + 2 * self.r2:
            raise DomainError(f"n_K={self.n_K} != r1 + 2 r2 = {self.r1 + 2 * self.r2}")
        if self.log_dK < 0:
            raise DomainError("log_dK must be nonnegative")

    @classmethod
    def rationals(cls) -> "FieldSignature":
        return cls(n_K=1, r1=1, r2=0, log_dK=0.0)


@dataclass(frozen=True)
class EnvelopeTerm:
    """Upper and lower contributions of one factor.

    A single factor need not have upper >= lower: the +-(d a1/4) log(T/2 pi)
    terms change sign at T = 2 pi.  Only assembled totals are ordered.
    """

    upper: float
    lower: float

    def __add__(self, other: "EnvelopeTerm") -> "EnvelopeTerm":
        return EnvelopeTerm(self.upper + other.upper, self.lower + other.lower)

    def scaled(self, k: float) -> "EnvelopeTerm":
        if k < 0:
            raise ValueError("negative scale would swap the bounds")
        return EnvelopeTerm(k * self.upper, k * self.lower)


def round_up(x: float, places: int = 3) -> Decimal:
    """Smallest decimal with ``places`` digits that is >= x."""
    q = Decimal(1).scaleb(-places)
    return Decimal(repr(x)).quantize(q, rounding=ROUND_CEILING)


def round_down(x: float, places: int = 3) -> Decimal:
    q = Decimal(1).scaleb(-places)
    return Decimal(repr(x)).quantize(q, rounding=ROUND_FLOOR)


def check_finite(*values: float) -> None:
    for v in values:
        if not math.isfinite(v):
            raise DomainError(f"non-finite argument {v}")
