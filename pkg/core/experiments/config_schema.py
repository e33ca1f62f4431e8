"""
Experiment descriptors read from JSON, and the manifest written after a run
"""
import hashlib
import json
from pathlib import Path
from typing import Annotated, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, NonNegativeInt, PositiveInt, TypeAdapter, model_validator

from core.bases.schauder import BasisRep
from core.dkk.dkk_space import AnyBasis
from core.dkk.partition import ConcaveSpec
from core.params.search import SampledMode, SearchMode
from core.spaces.sequence_spaces import Exponent, SpaceSpec
from core.tga.greedy import TieRule

ParamName = Literal[
    "democracy",
    "k",
    "k_tilde",
    "beta",
    "eta",
    "quasi_greedy",
    "suppression",
    "dem_tqg",
    "lebesgue",
    "basis_constant",
]


class _Experiment(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    seed: Optional[int] = None
    jobs: Optional[PositiveInt] = None


class NormExperiment(_Experiment):
    """Quasi-norm of one vector in a space, or of one coefficient vector in a basis"""

    op: Literal["norm"]
    space: Optional[SpaceSpec] = None
    basis: Optional[AnyBasis] = None
    f: list[float]

    @model_validator(mode="after")
    def _one_target(self):
        if (self.space is None) == (self.basis is None):
            raise ValueError("give exactly one of space or basis")
        return self


class ConcavePartitionExperiment(_Experiment):
    """Ordered partition with cumulative sums floor(b^psi(r))"""

    op: Literal["partition_from_concave"]
    concave: ConcaveSpec
    r_max: PositiveInt


class ConstructExperiment(_Experiment):
    """DKK space from S, X and a partition given by sizes or by a concave spec"""

    op: Literal["construct"]
    S: SpaceSpec
    X: BasisRep
    sizes: Optional[list[PositiveInt]] = None
    concave: Optional[ConcaveSpec] = None
    r_max: Optional[PositiveInt] = None

    @model_validator(mode="after")
    def _one_partition(self):
        if (self.sizes is None) == (self.concave is None):
            raise ValueError("give exactly one of sizes or concave")
        if self.concave is not None and self.r_max is None:
            raise ValueError("a concave partition needs r_max")
        return self


class TgaExperiment(_Experiment):
    """Residual curve of the thresholding greedy algorithm"""

    op: Literal["tga"]
    basis: AnyBasis
    a: list[float]
    m_max: Optional[NonNegativeInt] = None
    tie: TieRule = TieRule.LOWEST_INDEX


class ParamsExperiment(_Experiment):
    """One greedy-approximation parameter of a basis"""

    op: Literal["params"]
    param: ParamName
    basis: AnyBasis
    mode: SearchMode = SampledMode()
    m: Optional[NonNegativeInt] = None
    dim: Optional[PositiveInt] = None
    exponent: Optional[Exponent] = None
    reference_exponent: Optional[Exponent] = None
    b: PositiveInt = 1
    d: NonNegativeInt = 0

    @model_validator(mode="after")
    def _required(self):
        if self.param in ("beta", "eta") and self.exponent is None:
            raise ValueError(f"{self.param} needs an exponent")
        if self.param in ("democracy", "k", "k_tilde", "beta", "eta", "lebesgue") and self.m is None:
            raise ValueError(f"{self.param} needs m")
        return self


class VerifyExperiment(_Experiment):
    """Invariant suites"""

    op: Literal["verify"]
    suites: Optional[list[str]] = None


class ReproduceExperiment(_Experiment):
    """Acceptance suite"""

    op: Literal["reproduce"]
    suite: str


ExperimentConfig = Annotated[
    Union[
        NormExperiment,
        ConcavePartitionExperiment,
        ConstructExperiment,
        TgaExperiment,
        ParamsExperiment,
        VerifyExperiment,
        ReproduceExperiment,
    ],
    Field(discriminator="op"),
]

experiment_adapter = TypeAdapter(ExperimentConfig)


def load_config(path: Union[str, Path]) -> ExperimentConfig:
    """Read and validate an experiment config (raises pydantic.ValidationError)"""
    with open(path, "r", encoding="utf-8") as f:
        return experiment_adapter.validate_json(f.read())


def config_hash(config) -> str:
    """sha256 of the canonical JSON form of a validated config"""
    canonical = json.dumps(config.model_dump(mode="json"), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


class RunManifest(BaseModel):
    op: str
    config_hash: str
    seed: int
    version: str
    wall_time: float
    outputs: list[str] = Field(default_factory=list)
    stdout: list[str] = Field(default_factory=list)
    failures: list[str] = Field(default_factory=list)
