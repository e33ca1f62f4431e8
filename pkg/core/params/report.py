"""
Parameter reports: measured values with their witnesses, persisted as JSON/CSV
"""
import json
import logging
from pathlib import Path
from typing import Any, Literal, Optional, Union

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field

from config import get_settings
from core.bases.normers import as_normer
from core.exceptions import WitnessMismatchError
from core.spaces.sequence_spaces import Exponent, lp_norm

logger = logging.getLogger(__name__)

NormKind = Literal["basis", "sequence"]
ValueKind = Literal["exact", "lower_bound", "upper_bound"]


class Witness(BaseModel):
    """
    Vectors realizing a reported value

    The value is N(numerator) / D(denominator), where N and D are the basis
    quasi-norm or the l_q norm of the coefficients; a missing denominator means 1.
    """

    model_config = ConfigDict(frozen=True)

    series: str
    m: int
    value: float
    numerator: list[float]
    denominator: Optional[list[float]] = None
    numerator_norm: NormKind = "basis"
    denominator_norm: NormKind = "basis"
    exponent: Optional[Exponent] = None
    index_set: Optional[list[int]] = None
    extra: dict[str, list[float]] = Field(default_factory=dict)

    def _norm(self, normer, kind: NormKind, vector) -> float:
        if kind == "sequence":
            return float(lp_norm(np.asarray(vector, dtype=float), self.exponent))
        return float(normer(np.asarray(vector, dtype=float)))

    def evaluate(self, normer) -> float:
        """Recompute the witnessed value with the given normer"""
        top = self._norm(normer, self.numerator_norm, self.numerator)
        if self.denominator is None:
            return top
        return top / self._norm(normer, self.denominator_norm, self.denominator)


class ParamEntry(BaseModel):
    model_config = ConfigDict(frozen=True)

    series: str
    m: int
    value: float
    kind: ValueKind


class ParamReport(BaseModel):
    """Measured parameter curves with provenance"""

    name: str
    normer: str
    mode: Literal["exhaustive", "sampled", "closed_form"]
    seed: Optional[int] = None
    entries: list[ParamEntry] = Field(default_factory=list)
    witnesses: list[Witness] = Field(default_factory=list)
    reference: dict[str, list[float]] = Field(default_factory=dict)
    extra: dict[str, Any] = Field(default_factory=dict)

    def add(self, series: str, m: int, value: float, kind: ValueKind, witness: Optional[Witness] = None):
        self.entries.append(ParamEntry(series=series, m=m, value=float(value), kind=kind))
        if witness is not None:
            self.witnesses.append(witness)

    def series(self, name: Optional[str] = None, kind: Optional[ValueKind] = None) -> dict[int, float]:
        """m -> value for one series (default: the report name)"""
        name = name or self.name
        return {e.m: e.value for e in self.entries if e.series == name and (kind is None or e.kind == kind)}

    def value(self, m: int, series: Optional[str] = None) -> float:
        values = self.series(series)
        if m not in values:
            raise KeyError(f"no value for m={m} in series {series or self.name!r}")
        return values[m]

    def to_frame(self) -> pd.DataFrame:
        """Long table (series, m, value, kind, mode) with reference curves as extra columns"""
        frame = pd.DataFrame(
            [{"series": e.series, "m": e.m, "value": e.value, "kind": e.kind, "mode": self.mode} for e in self.entries],
            columns=["series", "m", "value", "kind", "mode"],
        )
        for label, curve in self.reference.items():
            frame[label] = [curve[m - 1] if 1 <= m <= len(curve) else np.nan for m in frame["m"]]
        return frame

    def to_csv(self, path: Union[str, Path]) -> Path:
        path = Path(path)
        digits = get_settings().CSV_DIGITS
        self.to_frame().to_csv(path, index=False, float_format=f"%.{digits}g", lineterminator="\n")
        return path

    def verify(self, normer, tol: Optional[float] = None) -> int:
        """
        Re-evaluate every witness

        Returns:
            number of witnesses checked

        Raises:
            WitnessMismatchError: a witness does not reproduce its value
        """
        normer = as_normer(normer)
        tol = get_settings().WITNESS_TOL if tol is None else tol
        for witness in self.witnesses:
            again = witness.evaluate(normer)
            if not np.isclose(again, witness.value, rtol=tol, atol=0.0):
                logger.error(f"Witness for {witness.series}(m={witness.m}) gives {again!r}, reported {witness.value!r}")
                raise WitnessMismatchError(
                    f"{self.name}: witness for {witness.series} at m={witness.m} gives {again:.17g}, "
                    f"reported {witness.value:.17g}"
                )
        return len(self.witnesses)

    def get_stats(self) -> dict:
        """Get report statistics"""
        return {
            "name": self.name,
            "mode": self.mode,
            "entries": len(self.entries),
            "witnesses": len(self.witnesses),
            "series": sorted({e.series for e in self.entries}),
        }


def save_to_file(report: ParamReport, path: Union[str, Path]) -> Path:
    """Write a report as JSON (creates the parent directory)"""
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        data = report.model_dump(mode="json")
        with open(path, "w", encoding="utf-8") as f:
            json.dump(data, f, indent=2, ensure_ascii=False)
        logger.info(f"Report {report.name} saved to {path}")
        return path
    except OSError as e:
        logger.error(f"Error saving report: {e}")
        raise


def load_from_file(path: Union[str, Path], normer=None) -> ParamReport:
    """
    Load a report; when a normer is given every witness is re-evaluated

    Raises:
        WitnessMismatchError: a stored witness no longer reproduces its value
    """
    path = Path(path)
    with open(path, "r", encoding="utf-8") as f:
        data = json.load(f)
    report = ParamReport.model_validate(data)
    if normer is not None:
        checked = report.verify(normer)
        logger.info(f"Report loaded from {path} ({checked} witnesses re-evaluated)")
    else:
        logger.info(f"Report loaded from {path}")
    return report
