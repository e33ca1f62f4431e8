"""
Greedy-approximation parameters of a basis, measured through its normer

Every value is tied to a stored witness. Exhaustive mode enumerates subsets,
sign patterns and dyadic-grid coefficients; sampled mode is a seeded random
search. Neither ever certifies an upper bound: suprema are reported as lower
bounds (or exact over the enumerated family) and infima as upper bounds.
"""
import itertools
import logging
import math
from typing import Callable, Literal, Optional

import numpy as np

from core.bases.normers import TruncatedNormer, as_normer, evaluate_rows
from core.exceptions import BudgetExceededError, SpecValidationError
from core.params.report import ParamReport, Witness
from core.params.search import (
    ExhaustiveMode,
    SampledMode,
    all_masks,
    check_budget,
    dyadic_grid,
    iter_signed_indicators,
    parallel_max,
    reduced_grid,
    reduced_grid_count,
    resolve_seed,
    signed_indicator_count,
    trial_rng,
)
from core.spaces.sequence_spaces import lp_norm
from core.tga.greedy import TieRule, greedy_set, iter_greedy_masks

logger = logging.getLogger(__name__)

# Relative improvement a coordinate-descent step must achieve to be accepted
DESCENT_RTOL = 1e-12

# Greedy sets tried per (f, m) when the tie level is too large to enumerate
MAX_TIED_SETS = 256

# Candidate supports enumerated exhaustively up to this many
MAX_SUPPORTS = 512


def _restrict(normer, dim: Optional[int]):
    normer = as_normer(normer)
    if dim is None or dim == normer.dim:
        return normer, normer.dim
    if not 1 <= dim <= normer.dim:
        raise SpecValidationError(f"dim={dim} outside [1, {normer.dim}]")
    return TruncatedNormer(normer, dim), dim


def _row(vec) -> list[float]:
    return [float(x) for x in np.asarray(vec, dtype=float).ravel()]


def _mask_set(mask) -> list[int]:
    return [int(i) + 1 for i in np.flatnonzero(mask)]


def structured_vectors(n: int) -> np.ndarray:
    """Closed-form candidates: constants, alternating signs, intervals, spikes, geometric decays"""
    rows = [np.ones(n), (-1.0) ** np.arange(n), 2.0 ** -np.arange(n), 2.0 ** -np.arange(n)[::-1]]
    for k in range(1, n + 1):
        interval = np.zeros(n)
        interval[:k] = 1.0
        spike = np.zeros(n)
        spike[k - 1] = 1.0
        rows.extend([interval, spike])
    return np.unique(np.asarray(rows), axis=0)


def random_vector(rng: np.random.Generator, n: int) -> np.ndarray:
    """One sample from a mixture of Gaussian, heavy-tailed, near-constant and sparse families"""
    family = int(rng.integers(0, 5))
    if family == 0:
        vec = rng.standard_normal(n)
    elif family == 1:
        vec = rng.standard_cauchy(n)
    elif family in (2, 3):
        eta = 10.0 ** rng.uniform(-3.0, -0.5)
        vec = 1.0 + eta * rng.standard_normal(n)
        if family == 3:
            vec *= (-1.0) ** np.arange(n)
    else:
        vec = rng.standard_normal(n) * (rng.random(n) < rng.uniform(0.1, 0.6))
    if not np.any(vec):
        vec[int(rng.integers(0, n))] = 1.0
    return vec


def _best_over_pairs(normer, numerators: np.ndarray, denominators: np.ndarray) -> tuple[int, float]:
    """Index and value of the largest ratio (first occurrence)"""
    top = evaluate_rows(normer, numerators)
    bottom = evaluate_rows(normer, denominators)
    ratios = np.where(bottom > 0, top / np.where(bottom > 0, bottom, 1.0), -np.inf)
    j = int(np.argmax(ratios))
    return j, float(ratios[j])


def _pair_search(normer, make_pairs: Callable, n_items: int, jobs: Optional[int], desc: str):
    """
    Seeded search over items, each contributing a few (numerator, denominator) pairs

    make_pairs(index) returns (numerators, denominators, metas) for item `index`.
    Returns (value, numerator, denominator, meta) of the best pair.
    """

    def chunk_fn(chunk: range):
        values, payloads = [], []
        for index in chunk:
            nums, dens, metas = make_pairs(index)
            j, value = _best_over_pairs(normer, np.atleast_2d(nums), np.atleast_2d(dens))
            values.append(value)
            payloads.append((np.atleast_2d(nums)[j], np.atleast_2d(dens)[j], metas[j]))
        return np.asarray(values), payloads

    _, value, payload = parallel_max(chunk_fn, n_items, jobs=jobs, desc=desc)
    numerator, denominator, meta = payload
    return value, numerator, denominator, meta


def _reference_curve(m_max: int, r: float) -> list[float]:
    return [float(m ** (1.0 / r)) for m in range(1, m_max + 1)]


def _reference_label(r: float) -> str:
    return f"psi_{r:g}"


# ---------------------------------------------------------------------------
# Democracy
# ---------------------------------------------------------------------------


def democracy_functions(
    normer,
    m_max: int,
    dim: Optional[int] = None,
    mode=None,
    reference_exponent: Optional[float] = None,
) -> ParamReport:
    """
    Upper and lower super-democracy functions

    phi_u(m) = max over |A| <= m and signs of ||1_{eps,A}||;
    phi_l(m) = min over m <= |A| <= dim and signs of ||1_{eps,A}||.

    Args:
        normer: basis normer
        m_max: largest m reported
        dim: restrict A to [1, dim] (default: the normer's dimension)
        mode: ExhaustiveMode (default) or SampledMode
        reference_exponent: r for the reference curve m^(1/r)
    """
    normer, dim = _restrict(normer, dim)
    if not 1 <= m_max <= dim:
        raise SpecValidationError(f"m_max={m_max} outside [1, {dim}]")
    mode = mode or ExhaustiveMode()
    best_max = np.full(dim + 1, -np.inf)
    best_min = np.full(dim + 1, np.inf)
    arg_max: dict[int, np.ndarray] = {}
    arg_min: dict[int, np.ndarray] = {}

    def absorb(k: int, rows: np.ndarray):
        values = evaluate_rows(normer, rows)
        hi, lo = int(np.argmax(values)), int(np.argmin(values))
        if values[hi] > best_max[k]:
            best_max[k], arg_max[k] = values[hi], rows[hi].copy()
        if values[lo] < best_min[k]:
            best_min[k], arg_min[k] = values[lo], rows[lo].copy()

    if isinstance(mode, ExhaustiveMode):
        if dim > mode.n_exh:
            raise SpecValidationError(f"dim={dim} exceeds the exhaustive range n_exh={mode.n_exh}")
        required = signed_indicator_count(dim, range(1, dim + 1)) // 2
        check_budget("democracy enumeration", required)
        logger.info(f"Enumerating {required} signed indicators in dimension {dim}")
        for k in range(1, dim + 1):
            for rows in iter_signed_indicators(dim, k):
                absorb(k, rows)
        kind_u, kind_l, label, seed = "exact", "exact", "exhaustive", None
    else:
        seed = resolve_seed(mode.seed)
        per_size = max(1, mode.trials // dim)
        for k in range(1, dim + 1):
            rng = trial_rng(seed, k)
            rows = np.zeros((per_size + 3, dim))
            rows[0, :k] = 1.0
            rows[1, :k] = (-1.0) ** np.arange(k)
            rows[2, dim - k :] = 1.0
            for row in rows[3:]:
                support = rng.choice(dim, size=k, replace=False)
                row[support] = rng.choice([-1.0, 1.0], size=k)
            absorb(k, rows)
        kind_u, kind_l, label = "lower_bound", "upper_bound", "sampled"

    report = ParamReport(name="democracy", normer=normer.name, mode=label, seed=seed)
    upper = np.maximum.accumulate(best_max[1:])
    lower = np.minimum.accumulate(best_min[1:][::-1])[::-1]
    for m in range(1, m_max + 1):
        k_u = int(np.argmax(best_max[1 : m + 1])) + 1
        k_l = int(np.argmin(best_min[m:])) + m
        report.add(
            "phi_u",
            m,
            upper[m - 1],
            kind_u,
            Witness(series="phi_u", m=m, value=float(upper[m - 1]), numerator=_row(arg_max[k_u]), index_set=_mask_set(arg_max[k_u])),
        )
        report.add(
            "phi_l",
            m,
            lower[m - 1],
            kind_l,
            Witness(series="phi_l", m=m, value=float(lower[m - 1]), numerator=_row(arg_min[k_l]), index_set=_mask_set(arg_min[k_l])),
        )
    report.extra["phi_l_truncated_at"] = dim
    if reference_exponent is not None:
        report.reference[_reference_label(reference_exponent)] = _reference_curve(m_max, reference_exponent)
    return report


# ---------------------------------------------------------------------------
# Unconditionality parameters
# ---------------------------------------------------------------------------


def analytic_ceiling(normer, m: int) -> Optional[float]:
    """
    sup ||x_n|| * sup ||x_n^*|| * m^(1/r) for an r-normed ambient, when both sups are known

    The functional bound comes from the basis in closed form; None when unknown.
    """
    normer = as_normer(normer)
    basis = getattr(normer, "basis", None) or getattr(getattr(normer, "parent", None), "basis", None)
    r = getattr(normer, "p_convexity", None)
    dual = getattr(basis, "coordinate_bound", None)
    if basis is None or r is None or dual is None:
        return None
    c = float(np.max(evaluate_rows(normer, np.eye(normer.dim))))
    return c * dual * m ** (1.0 / r)


def _grid_mask_sweep(normer, vectors: np.ndarray, masks: np.ndarray):
    """
    max over vectors of ||S_A a|| / ||a|| for every mask A

    Returns:
        (values, argmax vector index) per mask
    """
    denominators = evaluate_rows(normer, vectors)
    values = np.full(masks.shape[0], -np.inf)
    args = np.zeros(masks.shape[0], dtype=np.intp)
    for i, mask in enumerate(masks):
        ratios = evaluate_rows(normer, np.where(mask, vectors, 0.0)) / denominators
        j = int(np.argmax(ratios))
        values[i], args[i] = ratios[j], j
    return values, args


def _conditionality_sampled_items(length: int, dim: int, m: int, seed: int):
    """Item builder for the sampled k / k_tilde searches"""
    struct_vecs = structured_vectors(length)
    struct_masks = [mask for mask in _structured_masks(length) if mask.sum() <= m]

    def make_pairs(index: int):
        rng = trial_rng(seed, index)
        if index < struct_vecs.shape[0]:
            head = struct_vecs[index]
            masks = list(struct_masks)
        else:
            head = random_vector(rng, length)
            masks = list(struct_masks)
            for _ in range(8):
                size = int(rng.integers(1, min(m, length) + 1))
                mask = np.zeros(length, dtype=bool)
                mask[rng.choice(length, size=size, replace=False)] = True
                masks.append(mask)
        f = np.zeros(dim)
        f[:length] = head
        nums = np.zeros((len(masks), dim))
        for i, mask in enumerate(masks):
            nums[i, :length] = np.where(mask, head, 0.0)
        dens = np.repeat(f[None, :], len(masks), axis=0)
        metas = [{"index_set": _mask_set(mask)} for mask in masks]
        return nums, dens, metas

    return make_pairs, struct_vecs.shape[0]


def _structured_masks(n: int) -> list[np.ndarray]:
    idx = np.arange(n)
    out = [idx % 2 == 0, idx % 2 == 1]
    for j in range(n):
        out.append(idx == j)
        out.append(idx <= j)
        out.append(idx >= j)
    return [mask for mask in out if mask.any()]


def conditionality(
    normer,
    m: int,
    kind: Literal["k", "k_tilde"] = "k_tilde",
    mode=None,
    dim: Optional[int] = None,
    jobs: Optional[int] = None,
) -> ParamReport:
    """
    Unconditionality parameters k_j (|A| <= j, f anywhere) or k~_j (A and f in [1, j]), j = 1..m

    Args:
        normer: basis normer
        m: largest j reported
        kind: "k" or "k_tilde"
        mode: ExhaustiveMode (default) or SampledMode
        dim: coordinates available to f for k (default: the normer's dimension)
        jobs: worker threads for sampled mode
    """
    normer, dim = _restrict(normer, dim)
    if not 1 <= m <= dim:
        raise SpecValidationError(f"m={m} outside [1, {dim}]")
    if kind not in ("k", "k_tilde"):
        raise SpecValidationError(f"unknown conditionality parameter {kind!r}")
    mode = mode or ExhaustiveMode()
    exhaustive = isinstance(mode, ExhaustiveMode)
    seed = None if exhaustive else resolve_seed(mode.seed)
    report = ParamReport(name=kind, normer=normer.name, mode="exhaustive" if exhaustive else "sampled", seed=seed)

    def record(j: int, value: float, f: np.ndarray, mask: np.ndarray):
        numerator = np.where(mask, f, 0.0)
        report.add(
            kind,
            j,
            value,
            "lower_bound",
            Witness(series=kind, m=j, value=value, numerator=_row(numerator), denominator=_row(f), index_set=_mask_set(mask)),
        )

    if exhaustive:
        depth = mode.depth
        if kind == "k_tilde":
            required = sum(reduced_grid_count(j, depth) * (2**j - 1) for j in range(1, m + 1))
            check_budget(f"k_tilde enumeration up to m={m}", required)
            for j in range(1, m + 1):
                head = reduced_grid(j, depth)
                vectors = np.zeros((head.shape[0], dim))
                vectors[:, :j] = head
                masks = np.zeros((2**j - 1, dim), dtype=bool)
                masks[:, :j] = all_masks(j)[1:]
                values, args = _grid_mask_sweep(normer, vectors, masks)
                best = int(np.argmax(values))
                record(j, float(values[best]), vectors[args[best]], masks[best])
        else:
            if dim > mode.n_exh:
                raise SpecValidationError(f"dim={dim} exceeds the exhaustive range n_exh={mode.n_exh}")
            masks = all_masks(dim)[1:]
            masks = masks[masks.sum(axis=1) <= m]
            required = reduced_grid_count(dim, depth) * masks.shape[0]
            check_budget(f"k enumeration in dimension {dim}", required)
            vectors = reduced_grid(dim, depth)
            values, args = _grid_mask_sweep(normer, vectors, masks)
            sizes = masks.sum(axis=1)
            for j in range(1, m + 1):
                allowed = np.flatnonzero(sizes <= j)
                best = allowed[int(np.argmax(values[allowed]))]
                record(j, float(values[best]), vectors[args[best]], masks[best])
    else:
        for j in range(1, m + 1):
            length = j if kind == "k_tilde" else dim
            make_pairs, n_struct = _conditionality_sampled_items(length, dim, j, seed + j)
            if kind == "k":
                # k~_j candidates are k_j candidates too
                tilde_pairs, n_tilde = _conditionality_sampled_items(j, dim, j, seed + j)
                make_pairs = _concat_items(tilde_pairs, n_tilde + mode.trials, make_pairs)
                n_items = n_tilde + mode.trials + n_struct + mode.trials
            else:
                n_items = n_struct + mode.trials
            value, numerator, denominator, meta = _pair_search(normer, make_pairs, n_items, jobs, f"{kind}_{j}")
            report.add(
                kind,
                j,
                value,
                "lower_bound",
                Witness(
                    series=kind, m=j, value=value, numerator=_row(numerator), denominator=_row(denominator), index_set=meta["index_set"]
                ),
            )

    for j in range(1, m + 1):
        ceiling = analytic_ceiling(normer, j)
        if ceiling is not None:
            report.add("ceiling", j, ceiling, "upper_bound")
    r = getattr(normer, "p_convexity", None)
    if r is not None:
        report.reference[_reference_label(r)] = _reference_curve(m, r)
    return report


def _concat_items(first: Callable, first_count: int, second: Callable) -> Callable:
    def make_pairs(index: int):
        return first(index) if index < first_count else second(index - first_count)

    return make_pairs


# ---------------------------------------------------------------------------
# Embedding constants
# ---------------------------------------------------------------------------


def _closed_form_embedding(normer, r: int, q: float, kind: str) -> Optional[float]:
    basis = getattr(normer, "basis", None) or getattr(getattr(normer, "parent", None), "basis", None)
    space = getattr(basis, "space", None)
    if getattr(basis, "kind", None) != "unit_vectors" or getattr(space, "kind", None) != "lp":
        return None
    inv_p, inv_q = 1.0 / space.p, 1.0 / q
    if kind == "beta":
        return float(r ** max(inv_p - inv_q, 0.0))
    return float(r ** max(inv_q - inv_p, 0.0))


def embedding_constants(
    normer,
    r: int,
    exponent: float,
    kind: Literal["beta", "eta"] = "beta",
    mode=None,
    jobs: Optional[int] = None,
) -> ParamReport:
    """
    beta_j = sup ||sum a_n x_n|| / ||a||_q and eta_j = sup ||a||_q / ||sum a_n x_n||
    over coefficients supported in [1, j], for j = 1..r

    For unit vectors of l_p the closed forms j^max(1/p-1/q, 0) (beta) and
    j^max(1/q-1/p, 0) (eta) are added as an exact series.
    """
    normer = as_normer(normer)
    dim = normer.dim
    if not 1 <= r <= dim:
        raise SpecValidationError(f"r={r} outside [1, {dim}]")
    if kind not in ("beta", "eta"):
        raise SpecValidationError(f"unknown embedding constant {kind!r}")
    q = float(exponent) if not isinstance(exponent, str) else (math.inf if exponent.strip().lower() == "inf" else float(exponent))
    if not q > 0:
        raise SpecValidationError(f"exponent must be positive, got {exponent}")
    mode = mode or SampledMode(trials=2000)
    exhaustive = isinstance(mode, ExhaustiveMode)
    seed = None if exhaustive else resolve_seed(mode.seed)
    report = ParamReport(name=kind, normer=normer.name, mode="exhaustive" if exhaustive else "sampled", seed=seed)

    for j in range(1, r + 1):
        head = structured_vectors(j)
        if exhaustive:
            check_budget(f"{kind} enumeration at r={j}", reduced_grid_count(j, mode.depth))
            head = np.vstack([head, reduced_grid(j, mode.depth)])
        else:
            rng = trial_rng(seed, j)
            head = np.vstack([head] + [random_vector(rng, j) for _ in range(mode.trials)])
        rows = np.zeros((head.shape[0], dim))
        rows[:, :j] = head
        basis_norms = evaluate_rows(normer, rows)
        seq_norms = np.asarray(lp_norm(head, q))
        ratios = basis_norms / seq_norms if kind == "beta" else seq_norms / basis_norms
        best = int(np.argmax(ratios))
        numerator_norm, denominator_norm = ("basis", "sequence") if kind == "beta" else ("sequence", "basis")
        report.add(
            kind,
            j,
            float(ratios[best]),
            "lower_bound",
            Witness(
                series=kind,
                m=j,
                value=float(ratios[best]),
                numerator=_row(rows[best]),
                denominator=_row(rows[best]),
                numerator_norm=numerator_norm,
                denominator_norm=denominator_norm,
                exponent=q,
            ),
        )
        closed = _closed_form_embedding(normer, j, q, kind)
        if closed is not None:
            report.add("closed_form", j, closed, "exact")
    report.extra["exponent"] = "inf" if math.isinf(q) else q
    return report


# ---------------------------------------------------------------------------
# Quasi-greedy, suppression, basis constant
# ---------------------------------------------------------------------------


def _tied_interval_items(dim: int) -> list[tuple[np.ndarray, list[np.ndarray]]]:
    """Vectors with a single tie level on [1, k] and some of their greedy sets"""
    items = []
    for k in range(1, dim + 1):
        idx = np.arange(dim)
        for sign in (np.ones(dim), (-1.0) ** idx):
            f = np.where(idx < k, sign, 0.0)
            masks = [
                idx == 0,
                idx == k - 1,
                (idx < k) & (idx % 2 == 0),
                (idx < k) & (idx % 2 == 1),
                idx < (k + 1) // 2,
                (idx < k) & (idx >= k // 2),
            ]
            items.append((f, [mask for mask in masks if mask.any()]))
    return items


def quasi_greedy_constant(
    normer,
    dim: Optional[int] = None,
    trials: int = 10_000,
    seed: Optional[int] = None,
    jobs: Optional[int] = None,
) -> ParamReport:
    """
    max ||S_A f|| / ||f|| over sampled f and every greedy set A of f (all sizes, all tie choices)
    """
    normer, dim = _restrict(normer, dim)
    if trials < 1:
        raise SpecValidationError("trials must be at least 1")
    seed = resolve_seed(seed)
    tied = _tied_interval_items(dim)

    def make_pairs(index: int):
        if index < len(tied):
            f, masks = tied[index]
        else:
            f = random_vector(trial_rng(seed, index), dim)
            masks = [mask for mask in iter_greedy_masks(f, skip_zero=True) if mask.any()]
        nums = np.asarray([np.where(mask, f, 0.0) for mask in masks])
        dens = np.repeat(f[None, :], len(masks), axis=0)
        return nums, dens, [{"index_set": _mask_set(mask)} for mask in masks]

    logger.info(f"Quasi-greedy search on {normer.name}: {trials} samples in dimension {dim}")
    value, numerator, denominator, meta = _pair_search(normer, make_pairs, len(tied) + trials, jobs, "quasi-greedy")
    report = ParamReport(name="quasi_greedy", normer=normer.name, mode="sampled", seed=seed)
    report.add(
        "quasi_greedy",
        dim,
        value,
        "lower_bound",
        Witness(
            series="quasi_greedy",
            m=dim,
            value=value,
            numerator=_row(numerator),
            denominator=_row(denominator),
            index_set=meta["index_set"],
        ),
    )
    return report


def _admissible(mask: np.ndarray, b: int, d: int) -> bool:
    size = int(mask.sum())
    return size > d and size > 0 and b * size < int(np.flatnonzero(mask)[0]) + 1


def _largest_admissible_size(dim: int, b: int) -> int:
    """Largest |A| with b|A| < min A and A inside [1, dim]: (b + 1)|A| <= dim"""
    return dim // (b + 1)


def suppression_asymptotic(
    normer,
    dim: Optional[int] = None,
    mode=None,
    b: int = 1,
    d: int = 0,
    jobs: Optional[int] = None,
) -> ParamReport:
    """
    Asymptotic suppression constant: max ||S_A f|| / ||f|| over A with |A| > d and b|A| < min A

    b = 1, d = 0 is the plain condition |A| < min A.
    """
    normer, dim = _restrict(normer, dim)
    if dim < 2:
        raise SpecValidationError("asymptotic suppression needs dim >= 2")
    if b < 1 or d < 0:
        raise SpecValidationError("need b >= 1 and d >= 0")
    max_size = _largest_admissible_size(dim, b)
    if max_size <= d:
        raise SpecValidationError(f"no admissible sets in dimension {dim} for b={b}, d={d}")
    mode = mode or SampledMode()
    exhaustive = isinstance(mode, ExhaustiveMode)
    series = "suppression" if (b, d) == (1, 0) else f"suppression_b{b}_d{d}"

    if exhaustive:
        if dim > mode.n_exh:
            raise SpecValidationError(f"dim={dim} exceeds the exhaustive range n_exh={mode.n_exh}")
        masks = np.asarray([mask for mask in all_masks(dim) if mask.any() and _admissible(mask, b, d)])
        check_budget("suppression enumeration", reduced_grid_count(dim, mode.depth) * masks.shape[0])
        vectors = np.vstack([structured_vectors(dim), reduced_grid(dim, mode.depth)])
        values, args = _grid_mask_sweep(normer, vectors, masks)
        best = int(np.argmax(values))
        value, f, mask = float(values[best]), vectors[args[best]], masks[best]
        numerator, denominator, index_set = np.where(mask, f, 0.0), f, _mask_set(mask)
        seed, label = None, "exhaustive"
    else:
        seed, label = resolve_seed(mode.seed), "sampled"
        idx = np.arange(dim)
        struct = []
        for k in range(2, dim + 1):
            f = np.where(idx < k, 1.0, 0.0)
            masks = [idx == k - 1, (idx < k) & (idx >= k - 2) & (idx > 0), (idx < k) & ((k - 1 - idx) % 2 == 0)]
            struct.append((f, [mask for mask in masks if mask.any() and _admissible(mask, b, d)]))
        struct = [(f, masks) for f, masks in struct if masks]

        def make_pairs(index: int):
            if index < len(struct):
                f, masks = struct[index]
            else:
                rng = trial_rng(seed, index)
                f = random_vector(rng, dim)
                masks = []
                for _ in range(16):
                    size = int(rng.integers(d + 1, max_size + 1))
                    mask = np.zeros(dim, dtype=bool)
                    mask[rng.choice(np.arange(b * size, dim), size=size, replace=False)] = True
                    masks.append(mask)
            nums = np.asarray([np.where(mask, f, 0.0) for mask in masks])
            dens = np.repeat(f[None, :], len(masks), axis=0)
            return nums, dens, [{"index_set": _mask_set(mask)} for mask in masks]

        value, numerator, denominator, meta = _pair_search(normer, make_pairs, len(struct) + mode.trials, jobs, series)
        index_set = meta["index_set"]

    report = ParamReport(name="suppression", normer=normer.name, mode=label, seed=seed)
    report.extra.update({"b": b, "d": d})
    report.add(
        series,
        dim,
        value,
        "lower_bound",
        Witness(series=series, m=dim, value=value, numerator=_row(numerator), denominator=_row(denominator), index_set=index_set),
    )
    return report


def basis_constant(
    normer,
    dim: Optional[int] = None,
    trials: int = 2000,
    seed: Optional[int] = None,
    mode=None,
    jobs: Optional[int] = None,
) -> ParamReport:
    """Basis constant K = sup_m ||S_[1,m] f|| / ||f|| (partial-sum projections)"""
    normer, dim = _restrict(normer, dim)
    masks = np.tril(np.ones((dim, dim), dtype=bool))
    if isinstance(mode, ExhaustiveMode):
        check_budget("basis constant enumeration", reduced_grid_count(dim, mode.depth) * dim)
        vectors = np.vstack([structured_vectors(dim), reduced_grid(dim, mode.depth)])
        values, args = _grid_mask_sweep(normer, vectors, masks)
        best = int(np.argmax(values))
        f = vectors[args[best]]
        value, numerator, denominator = float(values[best]), np.where(masks[best], f, 0.0), f
        report = ParamReport(name="basis_constant", normer=normer.name, mode="exhaustive")
    else:
        seed = resolve_seed(seed if mode is None else mode.seed)
        trials = trials if mode is None else mode.trials
        struct = structured_vectors(dim)

        def make_pairs(index: int):
            f = struct[index] if index < struct.shape[0] else random_vector(trial_rng(seed, index), dim)
            nums = np.where(masks, f[None, :], 0.0)
            dens = np.repeat(f[None, :], dim, axis=0)
            return nums, dens, [{} for _ in range(dim)]

        value, numerator, denominator, _ = _pair_search(normer, make_pairs, struct.shape[0] + trials, jobs, "basis constant")
        report = ParamReport(name="basis_constant", normer=normer.name, mode="sampled", seed=seed)
    report.add(
        "basis_constant",
        dim,
        value,
        "lower_bound",
        Witness(series="basis_constant", m=dim, value=value, numerator=_row(numerator), denominator=_row(denominator)),
    )
    return report


# ---------------------------------------------------------------------------
# Democracy + truncation quasi-greediness
# ---------------------------------------------------------------------------


def dem_tqg_ratio(normer, f, g) -> float:
    """
    ||f|| / ||g|| for a pair with |supp f| <= #{n : max_s |f_s| <= |g_n|}

    Raises:
        SpecValidationError: the pair violates the cardinality hypothesis
    """
    normer = as_normer(normer)
    f = np.asarray(f, dtype=float)
    g = np.asarray(g, dtype=float)
    support = int(np.count_nonzero(f))
    level = float(np.max(np.abs(f))) if f.size else 0.0
    dominating = int(np.count_nonzero(np.abs(g) >= level)) if support else 0
    if support > dominating:
        raise SpecValidationError(f"|supp f| = {support} exceeds #{{n : |g_n| >= {level:g}}} = {dominating}")
    return float(normer(f)) / float(normer(g))


def dem_tqg_check(
    normer,
    dim: Optional[int] = None,
    trials: int = 10_000,
    seed: Optional[int] = None,
    jobs: Optional[int] = None,
) -> ParamReport:
    """max ||f|| / ||g|| over sampled pairs satisfying the cardinality hypothesis"""
    normer, dim = _restrict(normer, dim)
    seed = resolve_seed(seed)

    def make_pairs(index: int):
        rng = trial_rng(seed, index)
        s = int(rng.integers(1, dim + 1))
        f = np.zeros(dim)
        support = rng.choice(dim, size=s, replace=False)
        if index % 2 == 0:
            f[support] = rng.choice([-1.0, 1.0], size=s)
        else:
            f[support] = rng.standard_normal(s)
            f[support[0]] = np.sign(f[support[0]] or 1.0) * max(np.abs(f).max(), 1e-3)
        level = float(np.abs(f).max())
        pairs_f, pairs_g = [], []
        for extra in (0, int(rng.integers(0, dim - s + 1))):
            count = s + extra
            g = np.zeros(dim)
            big = rng.choice(dim, size=count, replace=False)
            g[big] = level * (1.0 + (rng.exponential(size=count) if index % 3 == 0 else 0.0)) * rng.choice([-1.0, 1.0], size=count)
            rest = np.setdiff1d(np.arange(dim), big)
            if rest.size and index % 5 == 0:
                g[rest] = level * rng.uniform(0.0, 0.999, size=rest.size)
            pairs_f.append(f)
            pairs_g.append(g)
        # numerator rows are f, denominator rows are g
        return np.asarray(pairs_f), np.asarray(pairs_g), [{} for _ in pairs_f]

    value, numerator, denominator, _ = _pair_search(normer, make_pairs, trials, jobs, "dem-tqg")
    report = ParamReport(name="dem_tqg", normer=normer.name, mode="sampled", seed=seed)
    report.add(
        "dem_tqg",
        dim,
        value,
        "lower_bound",
        Witness(series="dem_tqg", m=dim, value=value, numerator=_row(numerator), denominator=_row(denominator)),
    )
    return report


# ---------------------------------------------------------------------------
# Lebesgue parameters
# ---------------------------------------------------------------------------


def _greedy_masks_of_size(f: np.ndarray, m: int, rng: np.random.Generator) -> list[np.ndarray]:
    n = f.size
    try:
        sets = greedy_set(f, m, TieRule.ALL, budget=MAX_TIED_SETS)
        return [A.mask(n) for A in sets]
    except BudgetExceededError:
        out = [greedy_set(f, m, rule).mask(n) for rule in (TieRule.LOWEST_INDEX, TieRule.HIGHEST_INDEX)]
        mags = np.abs(f)
        threshold = np.sort(mags)[::-1][m - 1]
        forced = mags > threshold
        tied = np.flatnonzero(mags == threshold)
        need = m - int(forced.sum())
        for _ in range(MAX_TIED_SETS - 2):
            mask = forced.copy()
            mask[rng.choice(tied, size=need, replace=False)] = True
            out.append(mask)
        return out


def _candidate_supports(f: np.ndarray, m: int, greedy_masks, rng: np.random.Generator) -> list[np.ndarray]:
    n = f.size
    if math.comb(n, m) <= MAX_SUPPORTS:
        out = []
        for combo in itertools.combinations(range(n), m):
            mask = np.zeros(n, dtype=bool)
            mask[list(combo)] = True
            out.append(mask)
        return out
    out = list(greedy_masks)
    idx = np.arange(n)
    for start in range(0, n - m + 1):
        out.append((idx >= start) & (idx < start + m))
    for _ in range(32):
        mask = np.zeros(n, dtype=bool)
        mask[rng.choice(n, size=m, replace=False)] = True
        out.append(mask)
    return out


def _best_approximant(normer, f: np.ndarray, support: np.ndarray, scale: float, sweeps: int = 2):
    """Coordinate descent for min ||f - g|| over g supported in `support`"""
    grid = scale * dyadic_grid()
    g = np.where(support, f, 0.0)
    best = float(normer(f - g))
    for _ in range(sweeps):
        improved = False
        for j in np.flatnonzero(support):
            trial = np.repeat(g[None, :], grid.size + 1, axis=0)
            trial[:-1, j] = grid
            trial[-1, j] = f[j]
            values = evaluate_rows(normer, f[None, :] - trial)
            k = int(np.argmin(values))
            if values[k] < best * (1.0 - DESCENT_RTOL):
                best, g = float(values[k]), trial[k]
                improved = True
        if not improved:
            break
    return best, g


def lebesgue_lower(
    normer,
    m: int,
    basis_dim: Optional[int] = None,
    witness_budget: int = 64,
    seed: Optional[int] = None,
    jobs: Optional[int] = None,
) -> ParamReport:
    """
    Lower bound for the m-th Lebesgue parameter

    L_m >= ||f - S_A f|| / ||f - g|| over sampled f, every greedy m-set A of f
    and m-term approximants g found on candidate supports by a coefficient grid
    and coordinate descent.
    """
    normer, dim = _restrict(normer, basis_dim)
    if not 0 <= m < dim:
        raise SpecValidationError(f"m={m} outside [0, {dim - 1}]")
    seed = resolve_seed(seed)
    report = ParamReport(name="lebesgue", normer=normer.name, mode="sampled", seed=seed)
    if m == 0:
        e1 = np.zeros(dim)
        e1[0] = 1.0
        report.add("lebesgue", 0, 1.0, "exact", Witness(series="lebesgue", m=0, value=1.0, numerator=_row(e1), denominator=_row(e1), index_set=[]))
        return report

    struct = structured_vectors(dim)

    def make_pairs(index: int):
        rng = trial_rng(seed, index)
        f = struct[index] if index < struct.shape[0] else random_vector(rng, dim)
        greedy_masks = _greedy_masks_of_size(f, m, rng)
        supports = _candidate_supports(f, m, greedy_masks, rng)
        scale = float(np.max(np.abs(f)))
        best_den, best_g = math.inf, None
        for support in supports:
            den, g = _best_approximant(normer, f, support, scale)
            if den < best_den:
                best_den, best_g = den, g
        nums = np.asarray([np.where(mask, 0.0, f) for mask in greedy_masks])
        dens = np.repeat((f - best_g)[None, :], len(greedy_masks), axis=0)
        metas = [{"index_set": _mask_set(mask), "f": _row(f), "g": _row(best_g)} for mask in greedy_masks]
        return nums, dens, metas

    n_items = struct.shape[0] + witness_budget
    value, numerator, denominator, meta = _pair_search(normer, make_pairs, n_items, jobs, f"lebesgue_{m}")
    report.add(
        "lebesgue",
        m,
        value,
        "lower_bound",
        Witness(
            series="lebesgue",
            m=m,
            value=value,
            numerator=_row(numerator),
            denominator=_row(denominator),
            index_set=meta["index_set"],
            extra={"f": meta["f"], "g": meta["g"]},
        ),
    )
    return report
