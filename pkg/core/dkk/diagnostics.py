"""
Measured constants of a DKK construction: projection bounds, block equivalence,
semi-normalization and the modulus of concavity
"""
import logging
from typing import Optional

import numpy as np

from config import get_settings
from core.bases.normers import as_normer, evaluate_rows
from core.bases.schauder import seminormalization
from core.dkk.dkk_space import DkkSpace, averaging_projection, dkk_norm
from core.dkk.partition import OrderedPartition

logger = logging.getLogger(__name__)

_MIX_WEIGHTS = tuple(2.0**k for k in range(-2, 4))


def _random_rows(rng: np.random.Generator, trials: int, dim: int) -> np.ndarray:
    """Mixture of Gaussian, heavy-tailed, sparse and signed-indicator rows"""
    kinds = rng.integers(0, 4, size=trials)
    rows = rng.standard_normal((trials, dim))
    heavy = kinds == 1
    rows[heavy] = rng.standard_cauchy((int(heavy.sum()), dim))
    sparse = kinds == 2
    rows[sparse] *= rng.random((int(sparse.sum()), dim)) < 0.2
    signed = kinds == 3
    rows[signed] = rng.choice([-1.0, 0.0, 1.0], size=(int(signed.sum()), dim))
    # keep every row nonzero
    empty = ~np.any(rows != 0, axis=1)
    rows[empty, 0] = 1.0
    return rows


def projection_bounds(sigma: OrderedPartition, S, trials: int = 10_000, seed: Optional[int] = None) -> dict:
    """
    Largest observed ||P f||_S / ||f||_S and ||Q f||_S / ||f||_S

    Returns:
        dict with max_P, max_Q and the number of samples
    """
    rng = np.random.default_rng(get_settings().SEED if seed is None else seed)
    rows = _random_rows(rng, trials, sigma.dim)
    P, Q = averaging_projection(sigma, rows)
    base = np.atleast_1d(S.norm(rows))
    max_P = float(np.max(np.atleast_1d(S.norm(P)) / base))
    max_Q = float(np.max(np.atleast_1d(S.norm(Q)) / base))
    logger.info(f"Projection bounds over {trials} samples: P={max_P:.6g}, Q={max_Q:.6g}")
    return {"max_P": max_P, "max_Q": max_Q, "trials": trials}


def block_equivalence(space: DkkSpace, trials: int = 1000, seed: Optional[int] = None) -> list[dict]:
    """
    Per-block band [c1, c2] of dkk_norm(f) / ||f||_S over vectors supported in one block

    Returns:
        one dict per block with n, c1, c2 and ratio c2/c1
    """
    rng = np.random.default_rng(get_settings().SEED if seed is None else seed)
    out = []
    for n, (first, last) in enumerate(space.sigma.blocks, start=1):
        rows = np.zeros((trials, space.dim))
        rows[:, first - 1 : last] = _random_rows(rng, trials, last - first + 1)
        # the constant and the alternating block are the extreme cases
        rows[0, first - 1 : last] = 1.0
        if trials > 1:
            rows[1, first - 1 : last] = (-1.0) ** np.arange(last - first + 1)
        size = last - first + 1
        if size > 1 and trials > 2 + len(_MIX_WEIGHTS):
            # zero-mean part plus a multiple of v_n: interpolates between the two extremes
            u = np.zeros(space.dim)
            u[first - 1], u[last - 1] = 1.0, -1.0
            u /= float(space.S.norm(u))
            lam = float(space.block_lambda[n - 1])
            rows[2, :] = u
            for j, tau in enumerate(_MIX_WEIGHTS, start=3):
                rows[j, :] = u
                rows[j, first - 1 : last] += tau / lam
        ratios = np.atleast_1d(dkk_norm(space, rows)) / np.atleast_1d(space.S.norm(rows))
        c1, c2 = float(ratios.min()), float(ratios.max())
        out.append({"n": n, "c1": c1, "c2": c2, "ratio": c2 / c1})
    return out


def unit_vector_seminormalization(space: DkkSpace) -> dict:
    """max_j ||e_j|| / min_j ||e_j|| for the unit vectors of the DKK space"""
    return seminormalization(space.as_basis())


def concavity_modulus(normer, b: int = 2, trials: int = 2000, seed: Optional[int] = None) -> float:
    """
    Observed modulus of concavity kappa_b: max ||f_1 + ... + f_b|| / (||f_1|| + ... + ||f_b||)

    Families with disjoint unit-vector supports are always included; they attain
    2^(1/p - 1) for b = 2 in l_p, p <= 1.
    """
    normer = as_normer(normer)
    dim = normer.dim
    rng = np.random.default_rng(get_settings().SEED if seed is None else seed)
    families = _random_rows(rng, trials * b, dim).reshape(trials, b, dim)

    structured = np.zeros((dim, b, dim))
    for j in range(dim):
        for k in range(b):
            structured[j, k, (j + k) % dim] = 1.0
    families = np.concatenate([structured, families])

    totals = evaluate_rows(normer, families.sum(axis=1))
    parts = evaluate_rows(normer, families.reshape(-1, dim)).reshape(-1, b).sum(axis=1)
    valid = parts > 0
    return float(np.max(totals[valid] / parts[valid]))
