"""
Greedy sets and the thresholding greedy algorithm
"""
import itertools
import logging
import math
from enum import Enum
from typing import Iterator, Optional, Union

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict

from config import get_settings
from core.bases.index_sets import IndexSet
from core.bases.normers import as_normer, evaluate_rows
from core.exceptions import BudgetExceededError, SpecValidationError
from core.spaces.sequence_spaces import as_vector

logger = logging.getLogger(__name__)


class TieRule(str, Enum):
    LOWEST_INDEX = "lowest-index"
    HIGHEST_INDEX = "highest-index"
    ALL = "all-maximal-enumerated"


def _magnitudes(a) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    if a.ndim != 1:
        raise SpecValidationError("greedy sets are defined for a single coefficient vector")
    if not np.all(np.isfinite(a)):
        raise SpecValidationError("coefficients must be finite")
    return np.abs(a)


def greedy_order(a, tie=TieRule.LOWEST_INDEX) -> np.ndarray:
    """Zero-based indices by decreasing magnitude, ties resolved by the rule"""
    tie = TieRule(tie)
    mags = _magnitudes(a)
    if tie is TieRule.HIGHEST_INDEX:
        n = mags.size
        return n - 1 - np.argsort(-mags[::-1], kind="stable")
    return np.argsort(-mags, kind="stable")


def _tie_split(mags: np.ndarray, m: int) -> tuple[np.ndarray, np.ndarray, int]:
    """Indices forced into every greedy m-set, the tied candidates, and how many to pick"""
    threshold = np.sort(mags)[::-1][m - 1]
    forced = np.flatnonzero(mags > threshold)
    tied = np.flatnonzero(mags == threshold)
    return forced, tied, m - forced.size


def greedy_set(a, m: int, tie=TieRule.LOWEST_INDEX, budget: Optional[int] = None) -> Union[IndexSet, list[IndexSet]]:
    """
    Greedy set of size m: min over A of |a_j| >= max outside A of |a_k|

    Args:
        a: coefficients
        m: set size, 0 <= m <= len(a)
        tie: lowest-index, highest-index, or all-maximal-enumerated
        budget: cap on the number of sets enumerated under all-maximal-enumerated

    Returns:
        An IndexSet, or the list of every greedy m-set for all-maximal-enumerated
    """
    tie = TieRule(tie)
    mags = _magnitudes(a)
    if not 0 <= m <= mags.size:
        raise SpecValidationError(f"m={m} outside [0, {mags.size}]")
    if tie is not TieRule.ALL:
        return IndexSet.from_mask(_mask_of(greedy_order(mags, tie)[:m], mags.size))
    if m == 0:
        return [IndexSet()]

    forced, tied, need = _tie_split(mags, m)
    count = math.comb(tied.size, need)
    budget = budget or get_settings().BUDGET
    if count > budget:
        raise BudgetExceededError("greedy set enumeration", count, budget)
    out = []
    for chosen in itertools.combinations(tied.tolist(), need):
        out.append(IndexSet(indices=tuple(sorted(i + 1 for i in forced.tolist() + list(chosen)))))
    return sorted(out, key=lambda s: s.indices)


def _mask_of(indices, n: int) -> np.ndarray:
    mask = np.zeros(n, dtype=bool)
    mask[np.asarray(indices, dtype=np.intp)] = True
    return mask


def is_greedy_set(a, A) -> bool:
    """Independent check of the threshold inequality"""
    mags = _magnitudes(a)
    mask = A.mask(mags.size) if isinstance(A, IndexSet) else _mask_of(np.asarray(list(A), dtype=np.intp) - 1, mags.size)
    if mask.all() or not mask.any():
        return True
    return bool(mags[mask].min() >= mags[~mask].max())


def iter_greedy_masks(a, skip_zero: bool = True, budget: Optional[int] = None) -> Iterator[np.ndarray]:
    """
    Every greedy set of every size, as boolean masks

    Magnitude levels are visited in decreasing order; each nonempty subset of a
    level, joined with all higher levels, is a greedy set. With skip_zero, the
    zero level is left out (it does not change S_A f).
    """
    mags = _magnitudes(a)
    levels = np.unique(mags)[::-1]
    if skip_zero:
        levels = levels[levels > 0]
    groups = [np.flatnonzero(mags == level) for level in levels]
    count = 1 + sum(2 ** g.size - 1 for g in groups)
    budget = budget or get_settings().BUDGET
    if count > budget:
        raise BudgetExceededError("greedy set enumeration", count, budget)

    prefix = np.zeros(mags.size, dtype=bool)
    yield prefix.copy()
    for group in groups:
        for k in range(1, group.size + 1):
            for chosen in itertools.combinations(group.tolist(), k):
                mask = prefix.copy()
                mask[list(chosen)] = True
                yield mask
        prefix[group] = True


class GreedyRun(BaseModel):
    """TGA residuals ||f - S_{A_m} f|| for m = 0..m_max"""

    model_config = ConfigDict(frozen=True)

    normer: str
    tie: TieRule
    coefficients: list[float]
    sets: list[list[int]]
    residuals: list[float]

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            {
                "m": np.arange(len(self.residuals)),
                "size": [len(s) for s in self.sets],
                "residual": self.residuals,
            }
        )


def greedy_residual_curve(normer, a, m_max: int, tie=TieRule.LOWEST_INDEX) -> GreedyRun:
    """
    Residual norms of the thresholding greedy algorithm

    Under all-maximal-enumerated the worst residual over all greedy m-sets is
    reported together with the set realizing it.
    """
    tie = TieRule(tie)
    normer = as_normer(normer)
    mags = _magnitudes(a)
    if not 0 <= m_max <= mags.size:
        raise SpecValidationError(f"m_max={m_max} outside [0, {mags.size}]")
    coeffs = as_vector(a, normer.dim)

    sets, residuals = [], []
    if tie is TieRule.ALL:
        for m in range(m_max + 1):
            candidates = greedy_set(mags, m, tie)
            rows = np.repeat(coeffs[None, :], len(candidates), axis=0)
            for row, A in zip(rows, candidates):
                row[A.zero_based()] = 0.0
            values = evaluate_rows(normer, rows)
            worst = int(np.argmax(values))
            sets.append(list(candidates[worst].indices))
            residuals.append(float(values[worst]))
    else:
        order = greedy_order(mags, tie)
        rows = np.repeat(coeffs[None, :], m_max + 1, axis=0)
        for m in range(1, m_max + 1):
            rows[m:, order[m - 1]] = 0.0
        residuals = [float(x) for x in evaluate_rows(normer, rows)]
        sets = [sorted(int(i) + 1 for i in order[:m]) for m in range(m_max + 1)]

    logger.debug(f"TGA on {normer.name}: {m_max + 1} residuals, tie={tie.value}")
    return GreedyRun(
        normer=normer.name,
        tie=tie,
        coefficients=[float(x) for x in coeffs],
        sets=sets,
        residuals=residuals,
    )
