"""
Regularity properties of positive sequences (LRP, URP, doubling) and growth fits
"""
import logging
from enum import Enum
from typing import Optional, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict

from core.exceptions import SpecValidationError

logger = logging.getLogger(__name__)

# Slack for comparisons such as 2*sqrt(m) <= sqrt(4m) that hold with equality
_RTOL = 1e-12


class RegularityKind(str, Enum):
    LRP = "LRP"
    URP = "URP"
    DOUBLING = "doubling"


class RegularityResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: RegularityKind
    b: int
    m_max: int
    passed: bool
    first_violation: Optional[int] = None


class GrowthFit(BaseModel):
    """Constants with Gamma_n / n^alpha <= C1 * Gamma_m / m^alpha for all n <= m"""

    model_config = ConfigDict(frozen=True)

    alpha: float
    c1: float


def _as_sequence(gamma: Sequence[float]) -> np.ndarray:
    values = np.asarray(gamma, dtype=float)
    if values.ndim != 1 or values.size == 0:
        raise SpecValidationError("a sequence must be a nonempty flat list")
    if not np.all(np.isfinite(values)) or np.any(values <= 0):
        raise SpecValidationError("sequence entries must be positive and finite")
    return values


def regularity_check(
    gamma: Sequence[float],
    kind,
    b: int,
    m_max: int,
    C: Optional[float] = None,
) -> RegularityResult:
    """
    Check a regularity property of (Gamma_m) for 1 <= m <= m_max

    LRP: 2 Gamma_m <= Gamma_{bm}; URP: 2 Gamma_{bm} <= b Gamma_m;
    doubling: Gamma_{2m} <= C Gamma_m. Entry m-1 of gamma holds Gamma_m.

    Args:
        gamma: Gamma_1, Gamma_2, ...
        kind: LRP, URP or doubling
        b: dilation factor (ignored for doubling, which always uses 2)
        m_max: largest m checked
        C: doubling constant, required for doubling

    Returns:
        RegularityResult with the first violating m, if any
    """
    kind = RegularityKind(kind)
    values = _as_sequence(gamma)
    if b < 1 or m_max < 1:
        raise SpecValidationError("b and m_max must be positive")
    factor = 2 if kind is RegularityKind.DOUBLING else b
    if values.size < factor * m_max:
        raise SpecValidationError(
            f"sequence of length {values.size} is too short: {kind.value} up to m={m_max} needs {factor * m_max} terms"
        )
    if kind is RegularityKind.DOUBLING and C is None:
        raise SpecValidationError("doubling check needs a constant C")

    m = np.arange(1, m_max + 1)
    small = values[m - 1]
    large = values[factor * m - 1]
    if kind is RegularityKind.LRP:
        lhs, rhs = 2 * small, large
    elif kind is RegularityKind.URP:
        lhs, rhs = 2 * large, b * small
    else:
        lhs, rhs = large, C * small

    bad = np.nonzero(lhs > rhs * (1 + _RTOL))[0]
    first = int(m[bad[0]]) if bad.size else None
    if first is not None:
        logger.debug(f"{kind.value} with b={b} fails first at m={first}")
    return RegularityResult(kind=kind, b=b, m_max=m_max, passed=first is None, first_violation=first)


def fit_growth(gamma: Sequence[float], points: Optional[Sequence[float]] = None) -> GrowthFit:
    """
    Fit the growth exponent of a sequence with the LRP

    alpha is the smallest log-slope between consecutive terms (so Gamma_n / n^alpha
    is nondecreasing on the range), clipped into (0, 1); C1 is the observed
    maximal ratio (Gamma_n / n^alpha) / (Gamma_m / m^alpha) over n <= m.

    Args:
        gamma: sequence values, Gamma_1, Gamma_2, ... unless points is given
        points: increasing positions n at which gamma was sampled
    """
    values = _as_sequence(gamma)
    if values.size < 2:
        raise SpecValidationError("growth fit needs at least two terms")
    if points is None:
        n = np.arange(1, values.size + 1, dtype=float)
    else:
        n = np.asarray(points, dtype=float)
        if n.shape != values.shape or np.any(np.diff(n) <= 0) or n[0] < 1:
            raise SpecValidationError("points must be increasing positions >= 1, one per value")
    slopes = np.diff(np.log(values)) / np.diff(np.log(n))
    alpha = float(np.min(slopes))
    if alpha <= 0:
        raise SpecValidationError("sequence does not grow polynomially on the range (nonpositive log-slope)")
    alpha = min(alpha, 1.0 - 1e-9)
    h = values / n**alpha
    c1 = float(np.max(np.maximum.accumulate(h) / h))
    return GrowthFit(alpha=alpha, c1=c1)
