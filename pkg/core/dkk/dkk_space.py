"""
The space Y[X, S, sigma]: averaging projection, the biorthogonal system
(v_n, v_n*), the map H and the quasi-norm ||Q f||_S + ||H f||_X
"""
import logging
from functools import cached_property
from typing import Annotated, Literal, Union

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, model_validator

from core.bases.schauder import BasisRep, ConcatenatedBasis, DifferenceBasis, InterleavedBasis, UnitVectorBasis, BaseBasis
from core.dkk.partition import OrderedPartition
from core.exceptions import SpecValidationError
from core.spaces.sequence_spaces import SpaceSpec, as_vector, lambda_pair

logger = logging.getLogger(__name__)


def averaging_projection(sigma: OrderedPartition, f) -> tuple[np.ndarray, np.ndarray]:
    """
    Averaging projection with respect to an ordered partition

    Args:
        sigma: the partition
        f: vector (or batch) of length <= M_{r_max}

    Returns:
        (P f, Q f) where P f replaces each block by its average and Q f = f - P f
    """
    f = as_vector(f, sigma.dim)
    sizes = np.asarray(sigma.sizes, dtype=float)
    means = np.add.reduceat(f, sigma.starts, axis=-1) / sizes
    P = np.repeat(means, sigma.sizes, axis=-1)
    return P, f - P


class DkkSpace(BaseModel):
    """
    Y[X, S, sigma] truncated to the first M_{r_max} coordinates

    Args:
        S: locally convex rearrangement-invariant space with S.dim == sigma.dim
        X: basis carrying the block averages, X.dim >= number of blocks
        sigma: ordered partition
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    S: SpaceSpec
    X: BasisRep
    sigma: OrderedPartition

    @model_validator(mode="after")
    def _check(self):
        if not self.S.rearrangement_invariant:
            raise ValueError(f"S of kind {self.S.kind!r} is not symmetric")
        if not self.S.locally_convex:
            raise ValueError(f"S of kind {self.S.kind!r} is not locally convex")
        if self.S.dim != self.sigma.dim:
            raise ValueError(f"S has dim {self.S.dim} but the partition covers {self.sigma.dim} coordinates")
        if self.X.dim < self.sigma.n_blocks:
            raise ValueError(f"X has dim {self.X.dim} < {self.sigma.n_blocks} blocks")
        return self

    @property
    def dim(self) -> int:
        return self.sigma.dim

    @cached_property
    def _lambdas(self) -> tuple[np.ndarray, np.ndarray]:
        pairs = {size: lambda_pair(self.S, size) for size in set(self.sigma.sizes)}
        lam = np.array([pairs[size][0] for size in self.sigma.sizes])
        dual = np.array([pairs[size][1] for size in self.sigma.sizes])
        return lam, dual

    @property
    def block_lambda(self) -> np.ndarray:
        """Lambda_{N_n} for every block"""
        return self._lambdas[0]

    @property
    def block_lambda_dual(self) -> np.ndarray:
        """Lambda*_{N_n} = N_n / Lambda_{N_n} for every block"""
        return self._lambdas[1]

    def as_basis(self) -> "DkkBasis":
        return DkkBasis(space=self)

    def get_info(self) -> dict:
        return {
            "dim": self.dim,
            "S": self.S.get_info(),
            "X": self.X.get_info(),
            "sigma": self.sigma.get_info(),
        }


def v_dual_coeffs(space: DkkSpace, f) -> np.ndarray:
    """v_n*(f) = (sum of f over sigma_n) / Lambda*_{N_n}, n = 1..r_max"""
    f = as_vector(f, space.dim)
    sums = np.add.reduceat(f, space.sigma.starts, axis=-1)
    return sums / space.block_lambda_dual


def v_vectors(space: DkkSpace) -> np.ndarray:
    """Rows v_n = 1_{sigma_n} / Lambda_{N_n}, normalized in S"""
    out = np.zeros((space.sigma.n_blocks, space.dim))
    out[space.sigma.labels, np.arange(space.dim)] = 1.0 / space.block_lambda[space.sigma.labels]
    return out


def h_coefficients(space: DkkSpace, f) -> np.ndarray:
    """Coefficients of H f in the basis X, padded to X.dim"""
    coeffs = v_dual_coeffs(space, f)
    pad = [(0, 0)] * (coeffs.ndim - 1) + [(0, space.X.dim - coeffs.shape[-1])]
    return np.pad(coeffs, pad)


def h_map(space: DkkSpace, f) -> np.ndarray:
    """H f = sum_n v_n*(f) x_n in the ambient coordinates of X"""
    return space.X.synthesize(h_coefficients(space, f))


def dkk_norm(space: DkkSpace, f):
    """
    ||Q_sigma f||_S + ||H f||_X

    This is the norm of sum_j f_j e_j for the unit vector system of the space.
    """
    f = as_vector(f, space.dim)
    _, Q = averaging_projection(space.sigma, f)
    return space.S.norm(Q) + space.X.basis_norm(h_coefficients(space, f))


def dump_table(space: DkkSpace) -> pd.DataFrame:
    """Per-block table: sigma_n, N_n, M_n, Lambda_{N_n}, Lambda*_{N_n}"""
    sigma = space.sigma
    return pd.DataFrame(
        {
            "n": np.arange(1, sigma.n_blocks + 1),
            "first": [first for first, _ in sigma.blocks],
            "last": [last for _, last in sigma.blocks],
            "N_n": list(sigma.sizes),
            "M_n": list(sigma.M),
            "Lambda_N": space.block_lambda,
            "Lambda_star_N": space.block_lambda_dual,
        }
    )


class DkkBasis(BaseBasis):
    """Unit vector system of Y[X, S, sigma]"""

    kind: Literal["dkk"] = "dkk"
    space: DkkSpace

    @property
    def dim(self) -> int:
        return self.space.dim

    @property
    def ambient_dim(self) -> int:
        return self.space.dim

    def _synthesize(self, a):
        return a

    def _analyze(self, f):
        return f

    def ambient_norm(self, f):
        return dkk_norm(self.space, f)

    @property
    def p_convexity(self):
        inner = self.space.X.p_convexity
        return None if inner is None else min(inner, 1.0)


AnyBasis = Annotated[
    Union[UnitVectorBasis, DifferenceBasis, InterleavedBasis, ConcatenatedBasis, DkkBasis],
    Field(discriminator="kind"),
]


def build_dkk_space(S, X, sigma: OrderedPartition) -> DkkSpace:
    """Validated constructor raising SpecValidationError on bad triples"""
    try:
        return DkkSpace(S=S, X=X, sigma=sigma)
    except ValueError as e:
        logger.error(f"Invalid DKK triple: {e}")
        raise SpecValidationError(str(e)) from e
