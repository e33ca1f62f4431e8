"""
Coefficient-space norm evaluators

A normer maps coefficient rows of shape (..., dim) to quasi-norms of the
corresponding basis expansions. The greedy algorithm and the parameter
searches only ever talk to normers.
"""
import logging
from typing import Optional, Protocol, runtime_checkable

import numpy as np

from config import get_settings
from core.exceptions import SpecValidationError
from core.spaces.sequence_spaces import as_vector

logger = logging.getLogger(__name__)


@runtime_checkable
class Normer(Protocol):
    name: str
    dim: int

    def __call__(self, a): ...


class BasisNormer:
    """Normer of a basis: a -> ||sum_n a_n x_n||"""

    def __init__(self, basis, name: Optional[str] = None):
        self.basis = basis
        self.dim = basis.dim
        self.name = name or basis.name

    def __call__(self, a):
        return self.basis.basis_norm(a)

    @property
    def p_convexity(self) -> Optional[float]:
        return self.basis.p_convexity

    def __repr__(self) -> str:
        return f"BasisNormer({self.name}, dim={self.dim})"


class TruncatedNormer:
    """Restriction of a normer to the span of its first `dim` basis vectors"""

    def __init__(self, parent, dim: int):
        if not 1 <= dim <= parent.dim:
            raise SpecValidationError(f"truncation dim={dim} outside [1, {parent.dim}]")
        self.parent = parent
        self.dim = dim
        self.name = f"{parent.name}[:{dim}]"

    def __call__(self, a):
        return self.parent(as_vector(a, self.dim))

    @property
    def p_convexity(self) -> Optional[float]:
        return getattr(self.parent, "p_convexity", None)


def as_normer(obj):
    """Wrap a basis or space as a normer; normers pass through unchanged"""
    from core.bases.schauder import UnitVectorBasis

    if isinstance(obj, (BasisNormer, TruncatedNormer)):
        return obj
    if hasattr(obj, "rearrangement_invariant") and hasattr(obj, "norm"):
        return BasisNormer(UnitVectorBasis(space=obj))
    if hasattr(obj, "as_basis"):
        return BasisNormer(obj.as_basis())
    if hasattr(obj, "basis_norm") and hasattr(obj, "dim"):
        return BasisNormer(obj)
    if callable(obj) and hasattr(obj, "dim") and hasattr(obj, "name"):
        return obj
    raise SpecValidationError(f"cannot evaluate norms with {type(obj).__name__}")


def evaluate_rows(normer, rows: np.ndarray, batch_size: Optional[int] = None) -> np.ndarray:
    """Norms of many coefficient rows, evaluated in batches"""
    rows = np.atleast_2d(np.asarray(rows, dtype=float))
    batch_size = batch_size or get_settings().BATCH_SIZE
    if rows.shape[0] == 0:
        return np.zeros(0)
    out = [np.atleast_1d(normer(rows[i : i + batch_size])) for i in range(0, rows.shape[0], batch_size)]
    return np.concatenate(out)
