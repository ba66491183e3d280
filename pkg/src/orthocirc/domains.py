"""Variable domains: finite sets and the supported continuous supports."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

from .errors import InputError


@dataclass(frozen=True)
class Finite:
    """Finite domain {0, ..., size - 1}."""

    size: int

    def __post_init__(self):
        if self.size < 1:
            raise InputError(f"finite domain needs size >= 1, got {self.size}")


@dataclass(frozen=True)
class RealLine:
    """The whole real line."""


@dataclass(frozen=True)
class Interval:
    """Closed interval [lo, hi]."""

    lo: float
    hi: float

    def __post_init__(self):
        if not self.lo < self.hi:
            raise InputError(f"interval needs lo < hi, got [{self.lo}, {self.hi}]")


@dataclass(frozen=True)
class UnitPeriodic:
    """The unit period; values are interpreted modulo 1."""


Domain = Union[Finite, RealLine, Interval, UnitPeriodic]


def is_finite(domain: Domain) -> bool:
    return isinstance(domain, Finite)


def contains(domain: Domain, value) -> bool:
    """Membership test used to validate assignments before evaluation."""
    if isinstance(domain, Finite):
        if isinstance(value, bool):
            return False
        try:
            intval = int(value)
        except (TypeError, ValueError):
            return False
        return intval == value and 0 <= intval < domain.size
    try:
        x = float(value)
    except (TypeError, ValueError):
        return False
    if not math.isfinite(x):
        return False
    if isinstance(domain, Interval):
        return domain.lo <= x <= domain.hi
    # RealLine and UnitPeriodic accept any finite real (the latter wraps).
    return True
