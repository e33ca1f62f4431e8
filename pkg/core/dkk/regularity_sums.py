"""
Uniform bounds on the regularity sums over a partition

For Gamma with the LRP and block sizes with M_r <~ N_{r+1}, both
sum_{n<=r} (Gamma_{N_n}/Gamma_{N_r})^p and sum_{n>=r} (Gamma_{N_r}/Gamma_{N_n})^p
stay bounded in r. The explicit bound uses (alpha, C1) from the growth fit and
C2 with M_r <= C2 N_r and M_r <= C2 N_{r+1}, t = C2/(1 + C2).
"""
import logging
import math
from typing import Callable, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict

from core.exceptions import SpecValidationError
from core.spaces.regularity import GrowthFit, fit_growth

logger = logging.getLogger(__name__)


class RegularitySums(BaseModel):
    model_config = ConfigDict(frozen=True)

    p: float
    fit: GrowthFit
    c2: float
    t: float
    lower_sums: list[float]
    upper_sums: list[float]
    lower_bound: float
    upper_bound: float

    @property
    def passed(self) -> bool:
        return max(self.lower_sums) <= self.lower_bound and max(self.upper_sums) <= self.upper_bound


def _partition_constants(sizes: np.ndarray) -> float:
    M = np.cumsum(sizes)
    own = np.max(M / sizes)
    nxt = np.max(M[:-1] / sizes[1:]) if sizes.size > 1 else 0.0
    return float(max(own, nxt, 1.0 + 1e-12))


def regularity_sums(gamma: Callable[[np.ndarray], np.ndarray], sizes: Sequence[int], p: float) -> RegularitySums:
    """
    Both regularity sums for r = 1..len(sizes) and their explicit bounds

    The upper sum at r runs over r <= n <= len(sizes).

    Args:
        gamma: vectorised m -> Gamma_m
        sizes: block sizes N_1, N_2, ...
        p: exponent in (0, 1]
    """
    if not 0 < p <= 1:
        raise SpecValidationError(f"p must lie in (0, 1], got {p}")
    N = np.asarray(sizes, dtype=float)
    if N.size < 2 or np.any(N < 1):
        raise SpecValidationError("need at least two positive block sizes")
    M = np.cumsum(N)

    points = np.unique(np.concatenate([N, M]))
    fit = fit_growth(gamma(points), points=points)
    c2 = _partition_constants(N)
    t = c2 / (1.0 + c2)

    g = np.asarray(gamma(N), dtype=float) ** p
    lower = [float(np.sum(g[: r + 1] / g[r])) for r in range(N.size)]
    upper = [float(np.sum(g[r] / g[r:])) for r in range(N.size)]

    scale = fit.c1**p * c2**p
    lower_bound = scale / (1.0 - t ** (p * (1.0 - fit.alpha)))
    upper_bound = scale / (1.0 - t ** (p * fit.alpha))
    logger.debug(f"Regularity sums: alpha={fit.alpha:.4g}, C1={fit.c1:.4g}, C2={c2:.4g}, t={t:.4g}")
    return RegularitySums(
        p=p,
        fit=fit,
        c2=c2,
        t=t,
        lower_sums=lower,
        upper_sums=upper,
        lower_bound=lower_bound,
        upper_bound=upper_bound,
    )


def new_regular_sums(gamma: Callable[[np.ndarray], np.ndarray], sizes: Sequence[int], q: float) -> dict:
    """
    sum_{n>=r} (Gamma_{m_n} / Gamma_{N_n})^q for the adversarial choice m_n = M_r

    Bounded by b^q times the upper regularity bound, b the least integer with
    M_r <= b N_r.
    """
    base = regularity_sums(gamma, sizes, q)
    N = np.asarray(sizes, dtype=float)
    M = np.cumsum(N)
    b = math.ceil(float(np.max(M / N)) - 1e-12)
    num = np.asarray(gamma(M), dtype=float)
    den = np.asarray(gamma(N), dtype=float)
    sums = [float(np.sum((num[r] / den[r:]) ** q)) for r in range(N.size)]
    bound = b**q * base.upper_bound
    return {"q": q, "b": b, "sums": sums, "bound": bound, "passed": max(sums) <= bound}
