"""
Cross-parameter checks: conditionality transfer from X to the DKK basis, the
concave-modulus bound k_m <= kappa (K k~_m + D), and the decomposition of a
greedy projection S_A = S_F + S_{A \\ F} - S_{F \\ A}
"""
import logging
from typing import Optional

import numpy as np
from pydantic import BaseModel, ConfigDict

from config import get_settings
from core.bases.index_sets import IndexSet
from core.bases.normers import as_normer, evaluate_rows
from core.dkk.diagnostics import concavity_modulus
from core.dkk.dkk_space import DkkSpace, v_vectors
from core.exceptions import SpecValidationError
from core.params.parameters import DESCENT_RTOL, basis_constant, conditionality, random_vector, suppression_asymptotic
from core.params.search import ExhaustiveMode, SampledMode, resolve_seed, trial_rng
from core.spaces.sequence_spaces import as_vector
from core.tga.greedy import iter_greedy_masks

logger = logging.getLogger(__name__)

# Coordinate steps (in units of the current scale) tried by the ratio ascent
ASCENT_STEPS = np.array([-1.0, -0.5, -0.25, -0.125, 0.125, 0.25, 0.5, 1.0])


class TransferRow(BaseModel):
    model_config = ConfigDict(frozen=True)

    r: int
    M_r: int
    k_tilde_x: float
    grid: float
    sampled: float
    lifted: float
    optimised: float
    k_tilde_y: float
    gap: float
    strict: bool
    passed: bool


class TransferCheck(BaseModel):
    rows: list[TransferRow]

    @property
    def passed(self) -> bool:
        return all(row.passed for row in self.rows)


def _ratios(normer, rows: np.ndarray, mask: np.ndarray) -> np.ndarray:
    bottom = evaluate_rows(normer, rows)
    top = evaluate_rows(normer, np.where(mask, rows, 0.0))
    return np.where(bottom > 0, top / np.where(bottom > 0, bottom, 1.0), -np.inf)


def ascend_ratio(normer, f, mask, length: int, sweeps: int = 12) -> tuple[float, np.ndarray]:
    """
    Coordinate ascent for ||S_A f|| / ||f|| with A fixed and f moving in [1, length]

    Each pass tries f_j + s * scale for the steps in ASCENT_STEPS and keeps the
    best strict improvement; scale halves after a pass without one.
    """
    normer = as_normer(normer)
    f = np.asarray(f, dtype=float).copy()
    mask = np.asarray(mask, dtype=bool)
    best = float(_ratios(normer, f[None, :], mask)[0])
    scale = float(np.max(np.abs(f[:length]))) or 1.0
    for _ in range(sweeps):
        improved = False
        for j in range(length):
            trial = np.repeat(f[None, :], ASCENT_STEPS.size, axis=0)
            trial[:, j] += scale * ASCENT_STEPS
            values = _ratios(normer, trial, mask)
            k = int(np.argmax(values))
            if values[k] > best * (1.0 + DESCENT_RTOL):
                best, f = float(values[k]), trial[k]
                improved = True
        if not improved:
            scale /= 2.0
    return best, f


def _witness_start(witness, dim: int) -> tuple[np.ndarray, np.ndarray]:
    f = as_vector(witness.denominator, dim)
    mask = np.zeros(dim, dtype=bool)
    mask[[i - 1 for i in witness.index_set]] = True
    return f, mask


def kl_transfer(
    space: DkkSpace,
    r_max: int,
    depth: Optional[int] = None,
    lift_depth: int = 1,
    trials: int = 500,
    seed: Optional[int] = None,
    jobs: Optional[int] = None,
) -> TransferCheck:
    """
    k~_r of X against k~_{M_r} of the DKK unit vectors, r = 1..r_max

    X is measured exhaustively. The DKK side is the largest of four searches:
    the coarse grid (depth `lift_depth`), a seeded sampled search, the X witness
    lifted through the blocks (f = sum_n a_n v_n and A' the union of the blocks
    in A keep the ratio), and coordinate ascent started from each of the three
    witnesses. A row passes when k~_Y >= k~_X; `gap` and `strict` record
    whether the DKK side is strictly larger.
    """
    sigma = space.sigma
    if not 1 <= r_max <= sigma.n_blocks:
        raise SpecValidationError(f"r_max={r_max} outside [1, {sigma.n_blocks}]")
    seed = resolve_seed(seed)
    x_normer = as_normer(space.X)
    y_normer = as_normer(space.as_basis())
    dim = space.dim
    tol = get_settings().REL_TOL

    M_max = sigma.cumulative(r_max)
    x_report = conditionality(x_normer, r_max, "k_tilde", ExhaustiveMode(depth=depth))
    grid_report = conditionality(y_normer, M_max, "k_tilde", ExhaustiveMode(depth=lift_depth))
    sampled_report = conditionality(y_normer, M_max, "k_tilde", SampledMode(trials=trials, seed=seed), jobs=jobs)
    V = v_vectors(space)
    x_witnesses = {w.m: w for w in x_report.witnesses}
    grid_witnesses = {w.m: w for w in grid_report.witnesses}
    sampled_witnesses = {w.m: w for w in sampled_report.witnesses}

    rows = []
    for r in range(1, r_max + 1):
        M_r = sigma.cumulative(r)
        w = x_witnesses[r]
        bottom = np.asarray(w.denominator[:r]) @ V[:r]
        lifted_mask = np.isin(sigma.labels, [i - 1 for i in w.index_set]) & (np.arange(dim) < M_r)
        lifted = float(_ratios(y_normer, bottom[None, :], lifted_mask)[0])

        starts = [(bottom, lifted_mask), _witness_start(grid_witnesses[M_r], dim), _witness_start(sampled_witnesses[M_r], dim)]
        optimised = max(ascend_ratio(y_normer, f, mask, M_r)[0] for f, mask in starts)

        x_value = x_report.value(r)
        grid, sampled = grid_report.value(M_r), sampled_report.value(M_r)
        y_value = max(grid, sampled, lifted, optimised)
        rows.append(
            TransferRow(
                r=r,
                M_r=M_r,
                k_tilde_x=x_value,
                grid=grid,
                sampled=sampled,
                lifted=lifted,
                optimised=optimised,
                k_tilde_y=y_value,
                gap=y_value - x_value,
                strict=y_value > x_value * (1.0 + tol),
                passed=y_value >= x_value * (1.0 - tol),
            )
        )
        logger.debug(f"Transfer r={r}: k~_X={x_value:.6g}, k~_Y(M_r={M_r})={y_value:.6g}, lifted={lifted:.6g}")
    return TransferCheck(rows=rows)


class ConcaveBoundRow(BaseModel):
    model_config = ConfigDict(frozen=True)

    m: int
    k: float
    k_tilde: float
    bound: float
    measured_bound: float
    passed: bool
    holds_measured: bool


class ConcaveBoundCheck(BaseModel):
    kappa: float
    measured_kappa: float
    suppression: float
    basis_constant: float
    rows: list[ConcaveBoundRow]

    @property
    def kappa_consistent(self) -> bool:
        """The observed modulus never exceeds the analytic one"""
        return self.measured_kappa <= self.kappa * (1.0 + get_settings().REL_TOL)

    @property
    def passed(self) -> bool:
        return self.kappa_consistent and all(row.passed for row in self.rows)


def ccau_check(normer, m_max: int, dim: int, depth: Optional[int] = None, seed: Optional[int] = None) -> ConcaveBoundCheck:
    """
    k_m <= kappa (K k~_m + D) on a common dyadic grid

    k_m, k~_m, the asymptotic suppression constant D and the basis constant K
    are all computed exhaustively on the same grid. The bound is asserted with
    the analytic kappa = 2^(1/p - 1) of a p-normed ambient and reported with the
    observed modulus as well; the observed modulus must not exceed the analytic one.
    """
    normer = as_normer(normer)
    p = getattr(normer, "p_convexity", None)
    if p is None:
        raise SpecValidationError(f"{normer.name} has no known p-convexity")
    mode = ExhaustiveMode(depth=depth)
    kappa = 2.0 ** (1.0 / p - 1.0) if p < 1 else 1.0
    k = conditionality(normer, m_max, "k", mode, dim=dim)
    k_tilde = conditionality(normer, m_max, "k_tilde", mode, dim=dim)
    D = suppression_asymptotic(normer, dim, mode).entries[0].value
    K = basis_constant(normer, dim, mode=mode).entries[0].value
    measured = concavity_modulus(normer, 2, trials=500, seed=resolve_seed(seed))
    tol = get_settings().REL_TOL

    rows = []
    for m in range(1, m_max + 1):
        inner = K * k_tilde.value(m) + D
        rows.append(
            ConcaveBoundRow(
                m=m,
                k=k.value(m),
                k_tilde=k_tilde.value(m),
                bound=kappa * inner,
                measured_bound=measured * inner,
                passed=k.value(m) <= kappa * inner * (1.0 + tol),
                holds_measured=k.value(m) <= measured * inner * (1.0 + tol),
            )
        )
    logger.info(f"Concave bound on {normer.name}: kappa={kappa:.6g} (observed {measured:.6g}), K={K:.6g}, D={D:.6g}")
    return ConcaveBoundCheck(kappa=kappa, measured_kappa=measured, suppression=D, basis_constant=K, rows=rows)


def decomposition_identity(a, A) -> bool:
    """
    Decomposition of a greedy projection with |A| = m

    S_A a == S_F a + S_E a - S_B a exactly, with F = [1, m], E = A \\ F and
    B = F \\ A; |E| == |B| and min |a_E| >= max |a_B|. The last condition
    fails when A is not a greedy set of a.
    """
    a = np.asarray(a, dtype=float)
    A = np.asarray(A, dtype=bool)
    F = IndexSet.interval(1, int(A.sum())).mask(a.size)
    E = A & ~F
    B = F & ~A
    left = np.where(A, a, 0.0)
    right = np.where(F, a, 0.0) + np.where(E, a, 0.0) - np.where(B, a, 0.0)
    if not np.array_equal(left, right) or E.sum() != B.sum():
        return False
    return not E.any() or bool(np.min(np.abs(a[E])) >= np.max(np.abs(a[B])))


def decomposition_check(dim: int, trials: int = 1000, seed: Optional[int] = None) -> dict:
    """Count violations of the decomposition over sampled f and all their greedy sets"""
    seed = resolve_seed(seed)
    checked = violations = 0
    for index in range(trials):
        a = random_vector(trial_rng(seed, index), dim)
        for mask in iter_greedy_masks(a, skip_zero=True):
            checked += 1
            violations += not decomposition_identity(a, mask)
    return {"checked": checked, "violations": violations}
