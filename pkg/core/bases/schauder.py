"""
Schauder bases as synthesis/analysis pairs over an ambient quasi-normed space
"""
import logging
from typing import Annotated, Literal, Optional, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, PositiveInt, TypeAdapter, model_validator

from core.exceptions import SpecValidationError
from core.spaces.sequence_spaces import Exponent, LpSpace, SpaceSpec, as_vector

logger = logging.getLogger(__name__)


class BaseBasis(BaseModel):
    """
    Common behaviour of the bases

    Subclasses provide `dim`, `ambient_dim`, `_synthesize`, `_analyze` and
    `ambient_norm`. Coefficients are always in the basis; ambient vectors are in
    the coordinates of the space the basis lives in.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    def synthesize(self, a) -> np.ndarray:
        """Ambient coordinates of sum_n a_n x_n"""
        return self._synthesize(as_vector(a, self.dim))

    def analyze(self, f) -> np.ndarray:
        """Basis coefficients (x_n^*(f))_n of an ambient vector f"""
        return self._analyze(as_vector(f, self.ambient_dim))

    def basis_norm(self, a):
        """Ambient quasi-norm of sum_n a_n x_n"""
        return self.ambient_norm(self.synthesize(a))

    def __call__(self, a):
        return self.basis_norm(a)

    @property
    def name(self) -> str:
        return getattr(self, "kind")

    @property
    def p_convexity(self) -> Optional[float]:
        return None

    @property
    def coordinate_bound(self) -> Optional[float]:
        """sup_n ||x_n^*|| when known in closed form"""
        return None

    def get_info(self) -> dict:
        """Get basis information"""
        return {"kind": self.name, "dim": self.dim, "p_convexity": self.p_convexity}


class UnitVectorBasis(BaseBasis):
    """Unit vector system of a sequence space"""

    kind: Literal["unit_vectors"] = "unit_vectors"
    space: SpaceSpec

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
        return self.space.norm(f)

    @property
    def p_convexity(self) -> Optional[float]:
        return self.space.p_convexity

    @property
    def coordinate_bound(self) -> Optional[float]:
        # |a_n| ||e_n|| <= ||a|| in a lattice; ||e_n|| = w_1 in the Lorentz spaces
        if self.space.kind in ("lorentz", "weak_lorentz"):
            return 1.0 / self.space.w.values[0]
        return 1.0


class DifferenceBasis(BaseBasis):
    """Difference system d_n = e_n - e_{n-1} of l_p"""

    kind: Literal["difference"] = "difference"
    p: Exponent
    dim: PositiveInt

    @property
    def ambient(self) -> LpSpace:
        return LpSpace(p=self.p, dim=self.dim)

    @property
    def ambient_dim(self) -> int:
        return self.dim

    def _synthesize(self, a):
        # c_n = a_n - a_{n+1}, a_{dim+1} = 0
        shifted = np.concatenate([a[..., 1:], np.zeros_like(a[..., :1])], axis=-1)
        return a - shifted

    def _analyze(self, f):
        return np.flip(np.cumsum(np.flip(f, axis=-1), axis=-1), axis=-1)

    def ambient_norm(self, f):
        return self.ambient.norm(f)

    @property
    def p_convexity(self) -> float:
        return min(self.p, 1.0)

    @property
    def coordinate_bound(self) -> Optional[float]:
        # x_n^*(f) = sum_{k>=n} f_k is bounded by ||f||_1 <= ||f||_p
        return 1.0 if self.p <= 1 else None


class InterleavedBasis(BaseBasis):
    """
    Direct sum built by alternating the elements of K bases of equal dimension

    Global index (n-1)K + k carries element n of component k; component k's
    ambient block sits after the blocks of components 1..k-1.
    """

    kind: Literal["interleaved"] = "interleaved"
    components: tuple["BasisRep", ...]
    ambient: SpaceSpec

    @model_validator(mode="after")
    def _check(self):
        if len(self.components) < 2:
            raise ValueError("an interleaved sum needs at least two components")
        dims = {c.dim for c in self.components}
        if len(dims) != 1:
            raise ValueError(f"interleaved components must share one dimension, got {sorted(dims)}")
        parts = [c.ambient_dim for c in self.components]
        if self.ambient.dim != sum(parts):
            raise ValueError("ambient dimension must equal the sum of the component ambient dimensions")
        if self.ambient.kind == "direct_sum_d":
            split = [self.ambient.p_part, self.ambient.dim - self.ambient.p_part]
            if parts != split:
                raise ValueError(f"a D_(p,q) ambient takes two components of ambient dims {split}, got {parts}")
        return self

    @property
    def dim(self) -> int:
        return sum(c.dim for c in self.components)

    @property
    def ambient_dim(self) -> int:
        return self.ambient.dim

    def _offsets(self) -> np.ndarray:
        return np.cumsum([c.ambient_dim for c in self.components])[:-1]

    def _synthesize(self, a):
        k = len(self.components)
        parts = [c._synthesize(a[..., j::k]) for j, c in enumerate(self.components)]
        return np.concatenate(parts, axis=-1)

    def _analyze(self, f):
        k = len(self.components)
        out = np.zeros(f.shape[:-1] + (self.dim,))
        for j, (c, part) in enumerate(zip(self.components, np.split(f, self._offsets(), axis=-1))):
            out[..., j::k] = c._analyze(part)
        return out

    def ambient_norm(self, f):
        return self.ambient.norm(f)

    @property
    def p_convexity(self) -> Optional[float]:
        return self.ambient.p_convexity


class ConcatenatedBasis(BaseBasis):
    """
    Direct sum of finite-dimensional bases placed one after the other

    Global index M_{k-1} + n carries element n of component k. The ambient
    quasi-norm is the outer lattice applied to the component ambient norms.
    """

    kind: Literal["concatenated"] = "concatenated"
    components: tuple["BasisRep", ...]
    outer: SpaceSpec

    @model_validator(mode="after")
    def _check(self):
        if not self.components:
            raise ValueError("a concatenated sum needs at least one component")
        if self.outer.dim != len(self.components):
            raise ValueError(f"outer lattice has dim {self.outer.dim} but there are {len(self.components)} components")
        starts = np.cumsum([0] + [c.dim for c in self.components])
        owners = np.concatenate([np.full(c.dim, j) for j, c in enumerate(self.components)])
        local = np.arange(self.dim) - starts[owners]
        if np.any(local < 0) or len(set(zip(owners.tolist(), local.tolist()))) != self.dim:
            raise ValueError("concatenation index map is not a bijection")
        return self

    @property
    def dim(self) -> int:
        return sum(c.dim for c in self.components)

    @property
    def ambient_dim(self) -> int:
        return sum(c.ambient_dim for c in self.components)

    def _coefficient_offsets(self) -> np.ndarray:
        return np.cumsum([c.dim for c in self.components])[:-1]

    def _ambient_offsets(self) -> np.ndarray:
        return np.cumsum([c.ambient_dim for c in self.components])[:-1]

    def _synthesize(self, a):
        parts = np.split(a, self._coefficient_offsets(), axis=-1)
        return np.concatenate([c._synthesize(part) for c, part in zip(self.components, parts)], axis=-1)

    def _analyze(self, f):
        parts = np.split(f, self._ambient_offsets(), axis=-1)
        return np.concatenate([c._analyze(part) for c, part in zip(self.components, parts)], axis=-1)

    def ambient_norm(self, f):
        f = as_vector(f, self.ambient_dim)
        parts = np.split(f, self._ambient_offsets(), axis=-1)
        inner = np.stack([np.asarray(c.ambient_norm(part)) for c, part in zip(self.components, parts)], axis=-1)
        return self.outer.norm(inner)

    @property
    def p_convexity(self) -> Optional[float]:
        exponents = [c.p_convexity for c in self.components] + [self.outer.p_convexity]
        return None if any(e is None for e in exponents) else min(exponents)


BasisRep = Annotated[
    Union[UnitVectorBasis, DifferenceBasis, InterleavedBasis, ConcatenatedBasis],
    Field(discriminator="kind"),
]

InterleavedBasis.model_rebuild()
ConcatenatedBasis.model_rebuild()

basis_adapter = TypeAdapter(BasisRep)


def parse_basis(data) -> BasisRep:
    """Build a BasisRep from a dict or a JSON string carrying a "kind" tag"""
    if isinstance(data, (str, bytes)):
        return basis_adapter.validate_json(data)
    return basis_adapter.validate_python(data)


def synthesize(basis, a) -> np.ndarray:
    return basis.synthesize(a)


def analyze(basis, f) -> np.ndarray:
    return basis.analyze(f)


def basis_norm(basis, a) -> float:
    return basis.basis_norm(a)


def seminormalization(basis) -> dict:
    """
    Norms of the basis vectors and the ratio sup/inf

    Returns:
        dict with min, max and ratio of ||x_n|| over n <= dim
    """
    norms = np.atleast_1d(basis.basis_norm(np.eye(basis.dim)))
    low, high = float(norms.min()), float(norms.max())
    if low <= 0:
        raise SpecValidationError(f"basis {basis.name} has a zero vector")
    return {"min": low, "max": high, "ratio": high / low}
