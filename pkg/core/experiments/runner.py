"""
Execute one experiment config: dispatch on the op, write CSV/JSON outputs and
manifest.json into the output directory
"""
import json
import logging
import time
from pathlib import Path
from typing import Optional, Union

from pydantic import BaseModel, Field

from config import VERSION, get_settings
from core.bases.normers import as_normer
from core.dkk.dkk_space import build_dkk_space, dump_table
from core.dkk.partition import partition_from_concave, partition_from_sizes
from core.exceptions import AcceptanceError, SpecValidationError
from core.experiments.config_schema import (
    ConcavePartitionExperiment,
    ConstructExperiment,
    NormExperiment,
    ParamsExperiment,
    ReproduceExperiment,
    RunManifest,
    TgaExperiment,
    VerifyExperiment,
    config_hash,
)
from core.experiments.suites import REPRODUCE_SUITES, VERIFY_SUITES, SuiteContext, reproduce_names, run_suites
from core.params import parameters
from core.params.report import ParamReport, save_to_file
from core.params.search import ExhaustiveMode, SampledMode
from core.tga.greedy import greedy_residual_curve

logger = logging.getLogger(__name__)

# Lebesgue searches are far costlier per sample than the other parameters
LEBESGUE_DEFAULT_BUDGET = 64


class Outcome(BaseModel):
    outputs: list[str] = Field(default_factory=list)
    stdout: list[str] = Field(default_factory=list)
    failures: list[str] = Field(default_factory=list)


def _write_json(data, path: Path) -> str:
    with open(path, "w", encoding="utf-8") as f:
        json.dump(data, f, indent=2, ensure_ascii=False)
        f.write("\n")
    return path.name


def _fmt(value: float) -> str:
    return f"{value:.17g}"


def _norm(config: NormExperiment, out_dir: Path, seed: int, jobs: Optional[int]) -> Outcome:
    if config.space is not None:
        value = float(config.space.norm(config.f))
    else:
        value = float(config.basis.basis_norm(config.f))
    name = _write_json({"value": value}, out_dir / "norm.json")
    return Outcome(outputs=[name], stdout=[_fmt(value)])


def _partition(config: ConcavePartitionExperiment, out_dir: Path, seed: int, jobs: Optional[int]) -> Outcome:
    sigma = partition_from_concave(config.concave, config.r_max)
    info = sigma.get_info()
    name = _write_json(info, out_dir / "partition.json")
    return Outcome(outputs=[name], stdout=[json.dumps({"M": info["M"]})])


def _construct(config: ConstructExperiment, out_dir: Path, seed: int, jobs: Optional[int]) -> Outcome:
    if config.sizes is not None:
        sigma = partition_from_sizes(config.sizes)
    else:
        sigma = partition_from_concave(config.concave, config.r_max)
    space = build_dkk_space(config.S, config.X, sigma)
    table = dump_table(space)
    digits = get_settings().CSV_DIGITS
    table.to_csv(out_dir / "dkk_table.csv", index=False, float_format=f"%.{digits}g", lineterminator="\n")
    name = _write_json({"space": space.model_dump(mode="json"), "info": space.get_info()}, out_dir / "dkk_space.json")
    return Outcome(outputs=["dkk_table.csv", name], stdout=[table.to_string(index=False)])


def _tga(config: TgaExperiment, out_dir: Path, seed: int, jobs: Optional[int]) -> Outcome:
    normer = as_normer(config.basis)
    m_max = len(config.a) if config.m_max is None else config.m_max
    run = greedy_residual_curve(normer, config.a, m_max, config.tie)
    digits = get_settings().CSV_DIGITS
    run.to_frame().to_csv(out_dir / "tga.csv", index=False, float_format=f"%.{digits}g", lineterminator="\n")
    name = _write_json(run.model_dump(mode="json"), out_dir / "tga.json")
    return Outcome(outputs=["tga.csv", name], stdout=[_fmt(r) for r in run.residuals])


def resolve_run_seed(config, seed: Optional[int] = None) -> int:
    """--seed, then a sampled mode seed, then the config seed, then GREEDYLAB_SEED"""
    if seed is not None:
        return seed
    mode = getattr(config, "mode", None)
    if isinstance(mode, SampledMode) and mode.seed is not None:
        return mode.seed
    if config.seed is not None:
        return config.seed
    return get_settings().SEED


def _with_seed(mode, seed: int):
    if isinstance(mode, SampledMode):
        return mode.model_copy(update={"seed": seed})
    return mode


def measure(config: ParamsExperiment, seed: int, jobs: Optional[int] = None) -> ParamReport:
    """Run the parameter named by a params config"""
    normer = as_normer(config.basis)
    mode = _with_seed(config.mode, seed)
    sampled = isinstance(mode, SampledMode)
    trials = mode.trials if sampled else SampledMode().trials
    param = config.param
    if param == "democracy":
        return parameters.democracy_functions(normer, config.m, config.dim, mode, config.reference_exponent)
    if param in ("k", "k_tilde"):
        return parameters.conditionality(normer, config.m, param, mode, dim=config.dim, jobs=jobs)
    if param in ("beta", "eta"):
        return parameters.embedding_constants(normer, config.m, config.exponent, param, mode, jobs=jobs)
    if param == "quasi_greedy":
        return parameters.quasi_greedy_constant(normer, config.dim, trials, seed, jobs)
    if param == "suppression":
        return parameters.suppression_asymptotic(normer, config.dim, mode, config.b, config.d, jobs)
    if param == "dem_tqg":
        return parameters.dem_tqg_check(normer, config.dim, trials, seed, jobs)
    if param == "lebesgue":
        budget = mode.trials if sampled and "trials" in mode.model_fields_set else LEBESGUE_DEFAULT_BUDGET
        return parameters.lebesgue_lower(normer, config.m, config.dim, budget, seed, jobs)
    if param == "basis_constant":
        return parameters.basis_constant(
            normer, config.dim, trials, seed, mode if isinstance(mode, ExhaustiveMode) else None, jobs
        )
    raise SpecValidationError(f"unknown parameter {param!r}")


def _params(config: ParamsExperiment, out_dir: Path, seed: int, jobs: Optional[int]) -> Outcome:
    report = measure(config, seed, jobs)
    report.verify(as_normer(config.basis))
    logger.info(f"📊 Report stats: {report.get_stats()}")
    stem = f"params_{config.param}"
    save_to_file(report, out_dir / f"{stem}.json")
    report.to_csv(out_dir / f"{stem}.csv")
    lines = [f"{e.series}\t{e.m}\t{_fmt(e.value)}\t{e.kind}" for e in report.entries]
    return Outcome(outputs=[f"{stem}.json", f"{stem}.csv"], stdout=lines)


def _suites(names: list[str], table: dict, out_dir: Path, seed: int, jobs: Optional[int]) -> Outcome:
    ctx = SuiteContext(out_dir, seed, jobs)
    results = run_suites(names, table, ctx)
    lines = [f"{'PASS' if r.passed else 'FAIL'}\t{r.name}" for r in results]
    return Outcome(outputs=ctx.outputs, stdout=lines, failures=[r.name for r in results if not r.passed])


def _verify(config: VerifyExperiment, out_dir: Path, seed: int, jobs: Optional[int]) -> Outcome:
    return _suites(config.suites or list(VERIFY_SUITES), VERIFY_SUITES, out_dir, seed, jobs)


def _reproduce(config: ReproduceExperiment, out_dir: Path, seed: int, jobs: Optional[int]) -> Outcome:
    return _suites(reproduce_names(config.suite), REPRODUCE_SUITES, out_dir, seed, jobs)


HANDLERS = {
    "norm": _norm,
    "partition_from_concave": _partition,
    "construct": _construct,
    "tga": _tga,
    "params": _params,
    "verify": _verify,
    "reproduce": _reproduce,
}


def run(
    config,
    out_dir: Union[str, Path],
    seed: Optional[int] = None,
    jobs: Optional[int] = None,
    raise_on_failure: bool = True,
) -> RunManifest:
    """
    Execute a validated config

    Args:
        config: an ExperimentConfig
        out_dir: existing output directory
        seed: overrides a sampled-mode seed, the config seed and the settings default;
            the manifest records the seed actually used
        jobs: overrides the config worker count and the settings default

    Raises:
        SpecValidationError: missing output directory or invalid inputs
        BudgetExceededError: an enumeration exceeds the budget
        AcceptanceError: a verify/reproduce criterion failed and raise_on_failure is set
            (outputs and the manifest are written first)
    """
    out_dir = Path(out_dir)
    if not out_dir.is_dir():
        raise SpecValidationError(f"output directory {out_dir} does not exist")
    settings = get_settings()
    seed = resolve_run_seed(config, seed)
    jobs = jobs or config.jobs or settings.JOBS

    logger.info(f"🚀 Running {config.op} (seed={seed}, jobs={jobs})")
    start = time.perf_counter()
    outcome = HANDLERS[config.op](config, out_dir, seed, jobs)
    wall_time = time.perf_counter() - start

    manifest = RunManifest(
        op=config.op,
        config_hash=config_hash(config),
        seed=seed,
        version=VERSION,
        wall_time=wall_time,
        outputs=sorted(set(outcome.outputs)),
        stdout=outcome.stdout,
        failures=outcome.failures,
    )
    _write_json(manifest.model_dump(mode="json"), out_dir / "manifest.json")
    logger.info(f"✅ {config.op} finished in {wall_time:.2f}s, {len(manifest.outputs)} output file(s)")

    if outcome.failures and raise_on_failure:
        raise AcceptanceError(f"failed criteria: {', '.join(outcome.failures)}")
    return manifest
