"""
Search plumbing shared by the parameter estimators: search modes, seeded
per-trial generators, the dyadic coefficient grid, the budget guard and the
deterministic parallel max-reduction
"""
import itertools
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import Annotated, Any, Callable, Iterator, Literal, Optional, Sequence, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, NonNegativeInt, PositiveInt
from tqdm import tqdm

from config import get_settings
from core.exceptions import BudgetExceededError

logger = logging.getLogger(__name__)

# Trials per work unit; fixed so that results do not depend on the worker count
CHUNK_SIZE = 256


class ExhaustiveMode(BaseModel):
    """Enumerate every subset and sign pattern (and grid coefficient) in range"""

    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: Literal["exhaustive"] = "exhaustive"
    m_exh: PositiveInt = 6
    n_exh: PositiveInt = 16
    depth: Optional[NonNegativeInt] = None


class SampledMode(BaseModel):
    """Seeded random search; values are certified lower bounds"""

    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: Literal["sampled"] = "sampled"
    trials: PositiveInt = 10_000
    seed: Optional[int] = None


SearchMode = Annotated[Union[ExhaustiveMode, SampledMode], Field(discriminator="kind")]


def resolve_seed(seed: Optional[int]) -> int:
    return get_settings().SEED if seed is None else int(seed)


def trial_rng(seed: int, index: int) -> np.random.Generator:
    """Generator of trial `index`; a pure function of (seed, index)"""
    return np.random.default_rng(np.random.SeedSequence([int(seed) & (2**64 - 1), int(index)]))


def check_budget(what: str, required: int, budget: Optional[int] = None) -> None:
    budget = get_settings().BUDGET if budget is None else budget
    if required > budget:
        logger.warning(f"Budget guard tripped for {what}: {required} > {budget}")
        raise BudgetExceededError(what, required, budget)


def dyadic_grid(depth: Optional[int] = None) -> np.ndarray:
    """{0} and +-2^-k for 0 <= k <= depth, sorted"""
    depth = get_settings().DYADIC_DEPTH if depth is None else depth
    mags = 2.0 ** -np.arange(depth + 1)
    return np.sort(np.concatenate([-mags, [0.0], mags]))


def reduced_grid_count(length: int, depth: Optional[int] = None) -> int:
    """Number of grid vectors with max |a_j| = 1 and first nonzero entry positive"""
    g = dyadic_grid(depth).size
    return (g**length - (g - 2) ** length) // 2


def reduced_grid(length: int, depth: Optional[int] = None) -> np.ndarray:
    """
    Dyadic-grid vectors normalized by homogeneity and a global sign

    Rows have max |a_j| = 1 and a positive first nonzero entry. Every nonzero grid
    vector whose entries span at most depth + 1 binary orders of magnitude is a
    signed power-of-two multiple of exactly one row.
    """
    grid = dyadic_grid(depth)
    check_budget(f"grid enumeration of length {length}", grid.size**length)
    idx = np.indices((grid.size,) * length).reshape(length, -1).T
    vecs = grid[idx]
    keep = np.abs(vecs).max(axis=1) == 1.0
    first = vecs[np.arange(vecs.shape[0]), np.argmax(vecs != 0, axis=1)]
    return vecs[keep & (first > 0)]


def all_masks(length: int) -> np.ndarray:
    """Every subset of [1, length] as boolean rows, in binary counting order"""
    codes = np.arange(2**length)[:, None]
    return ((codes >> np.arange(length)) & 1).astype(bool)


def sign_patterns(k: int) -> np.ndarray:
    """All sign patterns of length k with the first sign +1"""
    if k == 0:
        return np.ones((1, 0))
    tail = all_masks(k - 1)
    return np.hstack([np.ones((tail.shape[0], 1)), np.where(tail, -1.0, 1.0)])


def iter_signed_indicators(dim: int, k: int, batch: Optional[int] = None) -> Iterator[np.ndarray]:
    """Batches of rows sum_{n in A} eps_n e_n over |A| = k, eps_1 = +1"""
    batch = batch or get_settings().BATCH_SIZE
    signs = sign_patterns(k)
    per_set = signs.shape[0]
    sets_per_batch = max(1, batch // per_set)
    combos = itertools.combinations(range(dim), k)
    while True:
        chunk = list(itertools.islice(combos, sets_per_batch))
        if not chunk:
            return
        support = np.repeat(np.asarray(chunk, dtype=np.intp), per_set, axis=0)
        rows = np.zeros((support.shape[0], dim))
        rows[np.arange(support.shape[0])[:, None], support] = np.tile(signs, (len(chunk), 1))
        yield rows


def signed_indicator_count(dim: int, sizes: Sequence[int]) -> int:
    """sum over k of C(dim, k) 2^k"""
    return sum(math.comb(dim, k) * 2**k for k in sizes)


def parallel_max(
    chunk_fn: Callable[[range], tuple[np.ndarray, list[Any]]],
    n_items: int,
    jobs: Optional[int] = None,
    desc: Optional[str] = None,
) -> tuple[int, float, Any]:
    """
    Deterministic argmax over items evaluated in fixed-size chunks

    chunk_fn maps a range of item indices to (values, payloads) aligned with the
    range. Ties resolve to the lowest item index, so the result does not depend
    on the number of workers.

    Returns:
        (index, value, payload) of the maximizing item
    """
    settings = get_settings()
    jobs = jobs or settings.JOBS
    chunks = [range(s, min(s + CHUNK_SIZE, n_items)) for s in range(0, n_items, CHUNK_SIZE)]
    progress = dict(total=len(chunks), desc=desc, disable=not settings.PROGRESS, leave=False)
    if jobs <= 1:
        results = [chunk_fn(c) for c in tqdm(chunks, **progress)]
    else:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(tqdm(pool.map(chunk_fn, chunks), **progress))

    best = (-1, -math.inf, None)
    for chunk, (values, payloads) in zip(chunks, results):
        values = np.asarray(values, dtype=float)
        if values.size == 0:
            continue
        j = int(np.argmax(values))
        if values[j] > best[1]:
            best = (chunk.start + j, float(values[j]), payloads[j])
    return best
