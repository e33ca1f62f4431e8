"""
Quasi-norms of finite truncations of the sequence spaces used by the construction:
l_p, Lorentz d_q(w), weak Lorentz d_inf(w), matrix spaces Z_{p,q}, mixed-norm
spaces B_{p,q} and direct sums D_{p,q}
"""
import logging
import math
from functools import cached_property
from typing import Annotated, ClassVar, Literal, Optional, Union

import numpy as np
from pydantic import (
    BaseModel,
    BeforeValidator,
    ConfigDict,
    Field,
    NonNegativeInt,
    PlainSerializer,
    PositiveInt,
    TypeAdapter,
    model_serializer,
    model_validator,
)

from config import get_settings
from core.exceptions import SpecValidationError

logger = logging.getLogger(__name__)


def _parse_exponent(value):
    if isinstance(value, str):
        text = value.strip().lower()
        if text in ("inf", "+inf", "infinity", "c0"):
            return math.inf
        try:
            value = float(text)
        except ValueError as e:
            raise ValueError(f"invalid exponent {value!r}") from e
    if value is None or isinstance(value, bool):
        raise ValueError(f"invalid exponent {value!r}")
    value = float(value)
    if not value > 0:
        raise ValueError(f"exponent must be positive, got {value}")
    return value


def _dump_exponent(value: float):
    return "inf" if math.isinf(value) else value


# Extended positive real; infinity encodes the c_0 convention
Exponent = Annotated[
    float,
    BeforeValidator(_parse_exponent),
    PlainSerializer(_dump_exponent, return_type=Union[float, str]),
]


def as_vector(f, dim: int) -> np.ndarray:
    """
    Coerce coefficients to a float array whose last axis has length dim

    Shorter vectors are zero-padded; longer ones are rejected. Leading axes are
    kept, so a batch of vectors can be passed as a 2-D array.
    """
    arr = np.asarray(f, dtype=float)
    if arr.ndim == 0:
        raise SpecValidationError("a vector must have at least one axis")
    length = arr.shape[-1]
    if length > dim:
        raise SpecValidationError(f"vector of length {length} does not fit dimension {dim}")
    if not np.all(np.isfinite(arr)):
        raise SpecValidationError("vector has non-finite coefficients")
    if length < dim:
        pad = [(0, 0)] * (arr.ndim - 1) + [(0, dim - length)]
        arr = np.pad(arr, pad)
    return arr


def lp_norm(a: np.ndarray, p: float) -> np.ndarray:
    """
    l_p quasi-norm along the last axis, 0 < p <= inf

    Coordinates are rescaled by the largest magnitude before the power is taken,
    so very small exponents do not underflow.
    """
    mag = np.abs(np.asarray(a, dtype=float))
    if math.isinf(p):
        return mag.max(axis=-1, initial=0.0)
    peak = mag.max(axis=-1, keepdims=True, initial=0.0)
    scale = np.where(peak > 0, peak, 1.0)
    total = np.sum((mag / scale) ** p, axis=-1)
    return np.squeeze(scale, axis=-1) * total ** (1.0 / p)


def _blockwise_norm(a: np.ndarray, sizes, p: float, q: float) -> np.ndarray:
    bounds = np.cumsum(sizes)[:-1]
    chunks = np.split(a, bounds, axis=-1)
    inner = np.stack([lp_norm(chunk, p) for chunk in chunks], axis=-1)
    return lp_norm(inner, q)


class Weight(BaseModel):
    """Non-negative weight (w_n) with w_1 > 0 and its primitive sums s_n"""

    model_config = ConfigDict(frozen=True)

    values: tuple[float, ...]

    @model_validator(mode="before")
    @classmethod
    def _from_list(cls, data):
        if isinstance(data, (list, tuple, np.ndarray)):
            return {"values": tuple(float(x) for x in data)}
        return data

    @model_validator(mode="after")
    def _check(self):
        w = np.asarray(self.values, dtype=float)
        if w.size == 0:
            raise ValueError("weight must be nonempty")
        if not np.all(np.isfinite(w)) or np.any(w < 0):
            raise ValueError("weight entries must be finite and non-negative")
        if not w[0] > 0:
            raise ValueError("weight must have w_1 > 0")
        return self

    @model_serializer
    def _dump(self):
        return list(self.values)

    @cached_property
    def primitive(self) -> np.ndarray:
        """Primitive sums s_n = w_1 + ... + w_n"""
        return np.cumsum(np.asarray(self.values, dtype=float))

    @property
    def nonincreasing(self) -> bool:
        return bool(np.all(np.diff(self.values) <= 0))

    def __len__(self) -> int:
        return len(self.values)


class _Space(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    rearrangement_invariant: ClassVar[bool] = False

    dim: PositiveInt

    def norm(self, f):
        """
        Quasi-norm of f in the finite truncation

        Args:
            f: coefficients, or a batch of coefficient rows

        Returns:
            A float for a single vector, an array for a batch
        """
        a = as_vector(f, self.dim)
        value = self._evaluate(a)
        return float(value) if np.ndim(value) == 0 else value

    def _evaluate(self, a: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    @property
    def locally_convex(self) -> bool:
        return False

    @property
    def p_convexity(self) -> Optional[float]:
        """Exponent r <= 1 such that the quasi-norm is an r-norm, when known"""
        return None

    def get_info(self) -> dict:
        """Get space information"""
        return {
            "kind": getattr(self, "kind"),
            "dim": self.dim,
            "rearrangement_invariant": self.rearrangement_invariant,
            "locally_convex": self.locally_convex,
            "p_convexity": self.p_convexity,
        }


class LpSpace(_Space):
    """l_p^N, with p = inf meaning c_0"""

    rearrangement_invariant: ClassVar[bool] = True

    kind: Literal["lp"] = "lp"
    p: Exponent

    def _evaluate(self, a):
        return lp_norm(a, self.p)

    @property
    def locally_convex(self) -> bool:
        return self.p >= 1

    @property
    def p_convexity(self) -> float:
        return min(self.p, 1.0)


def _check_weight_length(weight: Weight, dim: int):
    if len(weight) < dim:
        raise ValueError(f"weight has {len(weight)} entries but the space has dimension {dim}")


def _decreasing_rearrangement(a: np.ndarray) -> np.ndarray:
    return -np.sort(-np.abs(a), axis=-1)


class LorentzSpace(_Space):
    """Lorentz sequence space d_q(w); q = inf gives the weak space d_inf(w)"""

    rearrangement_invariant: ClassVar[bool] = True

    kind: Literal["lorentz"] = "lorentz"
    q: Exponent
    w: Weight

    @model_validator(mode="after")
    def _check(self):
        _check_weight_length(self.w, self.dim)
        return self

    def _evaluate(self, a):
        star = _decreasing_rearrangement(a)
        s = self.w.primitive[: self.dim]
        if math.isinf(self.q):
            return np.max(star * s, axis=-1, initial=0.0)
        w = np.asarray(self.w.values[: self.dim])
        terms = (s * star) ** self.q * (w / s)
        return np.sum(terms, axis=-1) ** (1.0 / self.q)

    @property
    def locally_convex(self) -> bool:
        # concave primitive <=> nonincreasing weight
        return self.q >= 1 and not math.isinf(self.q) and self.w.nonincreasing

    @property
    def p_convexity(self) -> Optional[float]:
        return 1.0 if self.locally_convex else None


class WeakLorentzSpace(_Space):
    """Weak Lorentz space d_inf(w), norm sup_n a*_n s_n"""

    rearrangement_invariant: ClassVar[bool] = True

    kind: Literal["weak_lorentz"] = "weak_lorentz"
    w: Weight

    @model_validator(mode="after")
    def _check(self):
        _check_weight_length(self.w, self.dim)
        return self

    def _evaluate(self, a):
        star = _decreasing_rearrangement(a)
        return np.max(star * self.w.primitive[: self.dim], axis=-1, initial=0.0)


class MixedZSpace(_Space):
    """Matrix space Z_{p,q} = l_q(l_p), truncated to rows of fixed inner length"""

    kind: Literal["mixed_z"] = "mixed_z"
    p: Exponent
    q: Exponent
    inner: PositiveInt

    @property
    def block_sizes(self) -> list[int]:
        full, rest = divmod(self.dim, self.inner)
        return [self.inner] * full + ([rest] if rest else [])

    def _evaluate(self, a):
        return _blockwise_norm(a, self.block_sizes, self.p, self.q)

    @property
    def locally_convex(self) -> bool:
        return self.p >= 1 and self.q >= 1

    @property
    def p_convexity(self) -> float:
        return min(self.p, self.q, 1.0)


class MixedBSpace(_Space):
    """Mixed-norm space B_{p,q} = (sum of l_p^{d_n})_q with d_n = 2^n unless given"""

    kind: Literal["mixed_b"] = "mixed_b"
    p: Exponent
    q: Exponent
    sizes: Optional[tuple[PositiveInt, ...]] = None

    @model_validator(mode="after")
    def _check(self):
        if self.sizes is not None:
            if any(b < a for a, b in zip(self.sizes, self.sizes[1:])):
                raise ValueError("block sizes must be nondecreasing")
            if sum(self.sizes) < self.dim:
                raise ValueError(f"block sizes cover {sum(self.sizes)} < dim={self.dim} coordinates")
        return self

    @property
    def block_sizes(self) -> list[int]:
        """Block sizes truncated so that they sum to dim"""
        out, covered, n = [], 0, 0
        while covered < self.dim:
            size = self.sizes[n] if self.sizes is not None else 2 ** (n + 1)
            size = min(size, self.dim - covered)
            out.append(size)
            covered += size
            n += 1
        return out

    def _evaluate(self, a):
        return _blockwise_norm(a, self.block_sizes, self.p, self.q)

    @property
    def locally_convex(self) -> bool:
        return self.p >= 1 and self.q >= 1

    @property
    def p_convexity(self) -> float:
        return min(self.p, self.q, 1.0)


class DirectSumDSpace(_Space):
    """
    Direct sum D_{p,q} = l_p + l_q, quasi-normed by ||f_1||_p + ||f_2||_q

    The first `split` coordinates carry the l_p part (default ceil(dim/2)).
    """

    kind: Literal["direct_sum_d"] = "direct_sum_d"
    p: Exponent
    q: Exponent
    split: Optional[NonNegativeInt] = None

    @model_validator(mode="after")
    def _check(self):
        if self.split is not None and self.split > self.dim:
            raise ValueError(f"split={self.split} exceeds dim={self.dim}")
        return self

    @property
    def p_part(self) -> int:
        return self.split if self.split is not None else (self.dim + 1) // 2

    def _evaluate(self, a):
        k = self.p_part
        return lp_norm(a[..., :k], self.p) + lp_norm(a[..., k:], self.q)

    @property
    def locally_convex(self) -> bool:
        return self.p >= 1 and self.q >= 1

    @property
    def p_convexity(self) -> float:
        return min(self.p, self.q, 1.0)


SpaceSpec = Annotated[
    Union[LpSpace, LorentzSpace, WeakLorentzSpace, MixedZSpace, MixedBSpace, DirectSumDSpace],
    Field(discriminator="kind"),
]

space_adapter = TypeAdapter(SpaceSpec)


def parse_space(data) -> SpaceSpec:
    """Build a SpaceSpec from a dict or a JSON string carrying a "kind" tag"""
    if isinstance(data, (str, bytes)):
        return space_adapter.validate_json(data)
    return space_adapter.validate_python(data)


def norm(space: SpaceSpec, f) -> float:
    """Quasi-norm of f in the finite truncation described by space"""
    return space.norm(f)


def lambda_pair(space: SpaceSpec, m: int, checks: int = 16, seed: Optional[int] = None) -> tuple[float, float]:
    """
    Fundamental function value and its dual, (Lambda_m, m / Lambda_m)

    The indicator of [1, m] is evaluated and compared against randomly placed,
    randomly signed m-sets; any disagreement means the space is not symmetric.

    Args:
        space: a rearrangement-invariant space (l_p, Lorentz, weak Lorentz)
        m: set size, 1 <= m <= dim
        checks: number of random m-sets compared against [1, m]
        seed: seed for the comparison sets

    Returns:
        (Lambda_m, Lambda*_m)
    """
    if not space.rearrangement_invariant:
        raise SpecValidationError(f"space of kind {space.kind!r} is not rearrangement invariant")
    if not 1 <= m <= space.dim:
        raise SpecValidationError(f"m={m} outside [1, {space.dim}]")

    indicator = np.zeros(space.dim)
    indicator[:m] = 1.0
    value = space.norm(indicator)

    settings = get_settings()
    rng = np.random.default_rng(settings.SEED if seed is None else seed)
    samples = np.zeros((checks, space.dim))
    for row in samples:
        support = rng.choice(space.dim, size=m, replace=False)
        row[support] = rng.choice([-1.0, 1.0], size=m)
    others = np.atleast_1d(space.norm(samples))
    if not np.allclose(others, value, rtol=settings.REL_TOL, atol=0.0):
        logger.error(f"Indicator norms disagree for m={m}: {value} vs {others.min()}..{others.max()}")
        raise SpecValidationError(f"indicator norms of {m}-sets are not constant in {space.kind!r}")
    return value, m / value


def fundamental_function(space: SpaceSpec, m_max: Optional[int] = None) -> np.ndarray:
    """Lambda_1 ... Lambda_{m_max} of a symmetric space (entry m-1 holds Lambda_m)"""
    m_max = space.dim if m_max is None else m_max
    if not space.rearrangement_invariant:
        raise SpecValidationError(f"space of kind {space.kind!r} is not rearrangement invariant")
    rows = np.tril(np.ones((m_max, space.dim)), k=0)[:, : space.dim]
    return np.atleast_1d(space.norm(rows))


def lorentz_inclusion_constant(
    w,
    p,
    q,
    dim: int,
    trials: int = 2000,
    seed: Optional[int] = None,
) -> float:
    """
    Measured constant C in ||f||_{d_q(w)} <= C ||f||_{d_p(w)}, 0 < p <= q <= inf

    Sampled over random vectors and signed indicators; the value is a lower
    bound for the optimal inclusion constant.
    """
    small = LorentzSpace(dim=dim, q=p, w=w)
    large = LorentzSpace(dim=dim, q=q, w=w)
    if small.q > large.q:
        raise SpecValidationError("inclusion d_p(w) -> d_q(w) needs p <= q")
    rng = np.random.default_rng(get_settings().SEED if seed is None else seed)
    samples = rng.standard_normal((trials, dim)) * rng.pareto(1.5, (trials, 1)) ** rng.uniform(0, 3, (trials, dim))
    indicators = np.tril(np.ones((dim, dim)))
    samples = np.vstack([samples, indicators])
    ratios = np.atleast_1d(large.norm(samples)) / np.atleast_1d(small.norm(samples))
    return float(np.max(ratios))
