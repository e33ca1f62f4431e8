"""
Ordered partitions of the integers into consecutive blocks and the
concave-function partition generator
"""
import bisect
import logging
import math
from functools import cached_property
from typing import Literal, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, PositiveInt, ValidationError, model_validator

from core.exceptions import SpecValidationError

logger = logging.getLogger(__name__)

# Floating slack for the generator inequalities
_TOL = 1e-9


class OrderedPartition(BaseModel):
    """
    Blocks sigma_n = [1 + M_{n-1}, M_n] of sizes N_n, n = 1..r_max
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    sizes: tuple[PositiveInt, ...] = Field(min_length=1)

    @cached_property
    def M(self) -> tuple[int, ...]:
        """Cumulative sums M_1..M_{r_max}"""
        out, total = [], 0
        for size in self.sizes:
            total += size
            out.append(total)
        return tuple(out)

    def cumulative(self, r: int) -> int:
        """M_r with the convention M_0 = 0"""
        return 0 if r == 0 else self.M[r - 1]

    @property
    def n_blocks(self) -> int:
        return len(self.sizes)

    @property
    def dim(self) -> int:
        return self.M[-1]

    @property
    def blocks(self) -> list[tuple[int, int]]:
        """Blocks as 1-based closed intervals (first, last)"""
        return [(self.cumulative(n) + 1, self.cumulative(n + 1)) for n in range(self.n_blocks)]

    @cached_property
    def starts(self) -> np.ndarray:
        """Zero-based first index of every block"""
        return np.asarray((0,) + self.M[:-1], dtype=np.int64)

    @cached_property
    def labels(self) -> np.ndarray:
        """Zero-based block number of every coordinate"""
        return np.repeat(np.arange(self.n_blocks), self.sizes)

    def right_inverse(self, m: int) -> int:
        """B_m = min{r : m <= M_r}, so that M_{B_m - 1} < m <= M_{B_m}"""
        if not 1 <= m <= self.dim:
            raise SpecValidationError(f"m={m} outside [1, {self.dim}]")
        return bisect.bisect_left(self.M, m) + 1

    def get_info(self) -> dict:
        return {"sizes": list(self.sizes), "M": list(self.M), "blocks": [list(b) for b in self.blocks]}


def partition_from_sizes(sizes: Sequence[int]) -> OrderedPartition:
    """Ordered partition with the given block sizes"""
    try:
        return OrderedPartition(sizes=tuple(sizes))
    except ValidationError as e:
        raise SpecValidationError(f"invalid block sizes {list(sizes)}: {e.errors()[0]['msg']}") from e


def right_inverse(sigma: OrderedPartition, m: int) -> int:
    return sigma.right_inverse(m)


class ConcaveSpec(BaseModel):
    """
    Concave increasing phi with phi(0) >= 1 from a closed-form family, its inverse
    psi and a base b

    affine: phi(t) = a + c t; power: phi(t) = 1 + t^alpha; logarithmic: phi(t) = 1 + log(1 + t)
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    family: Literal["affine", "power", "logarithmic"]
    b: float = Field(gt=1)
    a: float = Field(default=1.0, ge=1)
    c: float = Field(default=1.0, gt=0)
    alpha: float = Field(default=0.5, gt=0, le=1)

    @model_validator(mode="after")
    def _check(self):
        if self.psi(1.0) < 0:
            raise ValueError("psi(1) must be >= 0 so that M_1 >= 1")
        if not self.C > 2:
            raise ValueError(f"b^(psi(2)/2) = {self.C:.6g} must exceed 2")
        return self

    def phi(self, t):
        t = np.asarray(t, dtype=float)
        if self.family == "affine":
            return self.a + self.c * t
        if self.family == "power":
            return 1.0 + t**self.alpha
        return 1.0 + np.log1p(t)

    def psi(self, u):
        """Inverse of phi on [phi(0), inf)"""
        u = np.asarray(u, dtype=float)
        if self.family == "affine":
            return (u - self.a) / self.c
        if self.family == "power":
            return np.maximum(u - 1.0, 0.0) ** (1.0 / self.alpha)
        return np.expm1(u - 1.0)

    @property
    def C(self) -> float:
        return float(self.b ** (self.psi(2.0) / 2.0))

    def concavity_check(self, t_max: float = 1e3, points: int = 2001) -> bool:
        """phi increasing and concave on a grid of [0, t_max] (finite differences)"""
        grid = np.linspace(0.0, t_max, points)
        values = self.phi(grid)
        first = np.diff(values)
        second = np.diff(values, n=2)
        return bool(np.all(first > 0) and np.all(second <= _TOL * np.abs(values[1:-1])))


def partition_from_concave(spec: ConcaveSpec, r_max: int) -> OrderedPartition:
    """
    Partition with cumulative sums M_r = floor(b^psi(r)), r = 1..r_max

    The generated range is checked against (C-1) M_r <= M_{r+1} and
    M_r <= (M_{r+1} - M_r)/(C-2).
    """
    if r_max < 2:
        raise SpecValidationError("r_max must be at least 2")
    if not spec.concavity_check():
        raise SpecValidationError(f"phi of family {spec.family} is not concave increasing on the grid")

    M = [int(math.floor(spec.b ** float(spec.psi(r)))) for r in range(1, r_max + 1)]
    if M[0] < 1 or any(b <= a for a, b in zip(M, M[1:])):
        raise SpecValidationError(f"generated cumulative sums are not strictly increasing: {M[:8]}")
    C = spec.C
    for r in range(r_max - 1):
        if (C - 1) * M[r] > M[r + 1] * (1 + _TOL):
            raise SpecValidationError(f"(C-1) M_r <= M_(r+1) fails at r={r + 1}")
        if M[r] * (C - 2) > (M[r + 1] - M[r]) * (1 + _TOL):
            raise SpecValidationError(f"M_r <= (M_(r+1) - M_r)/(C-2) fails at r={r + 1}")

    sizes = [M[0]] + [b - a for a, b in zip(M, M[1:])]
    logger.debug(f"Generated partition from {spec.family} with b={spec.b}: M={M}")
    return OrderedPartition(sizes=tuple(sizes))


def rank_bound_check(spec: ConcaveSpec, m_max: int = 10**5) -> dict:
    """
    Verify -1 + B_m <= phi(log_b m) <= B_m for every 1 <= m <= m_max

    Returns:
        dict with passed, r_max used, and the first violating m (or None)
    """
    r_max = 2
    while math.floor(spec.b ** float(spec.psi(r_max))) < m_max:
        r_max += 1
    sigma = partition_from_concave(spec, r_max)

    m = np.arange(1, m_max + 1)
    B = np.searchsorted(np.asarray(sigma.M, dtype=float), m, side="left") + 1
    level = spec.phi(np.log(m) / math.log(spec.b))
    bad = np.nonzero((B - 1 > level + _TOL) | (level > B + _TOL))[0]
    first = int(m[bad[0]]) if bad.size else None
    if first is not None:
        logger.warning(f"Rank bound fails for {spec.family} b={spec.b} at m={first}")
    return {"passed": first is None, "r_max": r_max, "first_violation": first, "C": spec.C}
