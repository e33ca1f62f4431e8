"""
Finite index sets (1-based) and coordinate projections
"""
import logging
from typing import Iterable, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, model_serializer, model_validator

from core.exceptions import SpecValidationError

logger = logging.getLogger(__name__)


class IndexSet(BaseModel):
    """Strictly increasing set of positive integers, serialized as a sorted JSON array"""

    model_config = ConfigDict(frozen=True)

    indices: tuple[int, ...] = ()

    @model_validator(mode="before")
    @classmethod
    def _from_iterable(cls, data):
        if isinstance(data, dict):
            return data
        if isinstance(data, np.ndarray):
            data = data.tolist()
        return {"indices": tuple(int(i) for i in data)}

    @model_validator(mode="after")
    def _check(self):
        if any(i < 1 for i in self.indices):
            raise ValueError("indices are 1-based positive integers")
        if any(b <= a for a, b in zip(self.indices, self.indices[1:])):
            raise ValueError("indices must be strictly increasing")
        return self

    @model_serializer
    def _dump(self):
        return list(self.indices)

    @classmethod
    def from_mask(cls, mask) -> "IndexSet":
        return cls(indices=tuple(int(i) + 1 for i in np.flatnonzero(mask)))

    @classmethod
    def interval(cls, start: int, stop: int) -> "IndexSet":
        """[start, stop], empty when stop < start"""
        return cls(indices=tuple(range(start, stop + 1)))

    def __len__(self) -> int:
        return len(self.indices)

    def __iter__(self):
        return iter(self.indices)

    def __contains__(self, item) -> bool:
        return item in self.indices

    @property
    def min(self) -> int:
        if not self.indices:
            raise SpecValidationError("the empty set has no minimum")
        return self.indices[0]

    @property
    def max(self) -> int:
        if not self.indices:
            raise SpecValidationError("the empty set has no maximum")
        return self.indices[-1]

    def zero_based(self) -> np.ndarray:
        return np.asarray(self.indices, dtype=np.intp) - 1

    def mask(self, dim: int) -> np.ndarray:
        """Boolean indicator of the set within [1, dim]"""
        if self.indices and self.indices[-1] > dim:
            raise SpecValidationError(f"index {self.indices[-1]} outside [1, {dim}]")
        out = np.zeros(dim, dtype=bool)
        out[self.zero_based()] = True
        return out


def as_index_set(A: Union[IndexSet, Iterable[int]]) -> IndexSet:
    if isinstance(A, IndexSet):
        return A
    return IndexSet.model_validate(sorted(int(i) for i in A))


def coordinate_projection(a, A: Union[IndexSet, Iterable[int]]) -> np.ndarray:
    """
    Zero the coefficients of a outside A

    Args:
        a: coefficient vector (or batch along the last axis)
        A: index set within [1, len(a)]

    Returns:
        S_A applied to a
    """
    a = np.asarray(a, dtype=float)
    A = as_index_set(A)
    return np.where(A.mask(a.shape[-1]), a, 0.0)
