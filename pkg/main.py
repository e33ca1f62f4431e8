"""
greedylab command-line entry point
"""
import json
import logging
import os
import sys
from typing import Optional

import click
from pydantic import ValidationError

# Add current directory to Python path
sys.path.append(os.path.dirname(os.path.abspath(__file__)))

from config import VERSION, get_settings
from core.exceptions import AcceptanceError, GreedyLabError, SpecValidationError
from core.experiments.config_schema import experiment_adapter, load_config
from core.experiments.runner import run

logger = logging.getLogger("greedylab")

EXIT_VALIDATION = SpecValidationError.exit_code
EXIT_ACCEPTANCE = AcceptanceError.exit_code


def _load(path: Optional[str], default_op: Optional[str] = None, **overrides):
    """Read a JSON config (if any), apply subcommand overrides and validate"""
    if path is not None and default_op is None and not any(v is not None for v in overrides.values()):
        return load_config(path)
    data = {}
    if path is not None:
        with open(path, "r", encoding="utf-8") as f:
            data = json.load(f)
        if not isinstance(data, dict):
            raise SpecValidationError(f"config {path} must hold a JSON object")
    if default_op is not None:
        data.setdefault("op", default_op)
    for key, value in overrides.items():
        if value is not None:
            data[key] = value
    return experiment_adapter.validate_python(data)


def _execute(path: Optional[str], out: str, seed: Optional[int], jobs: Optional[int], **overrides):
    """Validate, run and map errors onto exit codes"""
    try:
        config = _load(path, **overrides)
        manifest = run(config, out, seed=seed, jobs=jobs, raise_on_failure=False)
    except (ValidationError, json.JSONDecodeError) as e:
        logger.error(f"❌ Invalid config: {e}")
        sys.exit(EXIT_VALIDATION)
    except OSError as e:
        logger.error(f"❌ Cannot read config: {e}")
        sys.exit(EXIT_VALIDATION)
    except GreedyLabError as e:
        logger.error(f"❌ {type(e).__name__}: {e}")
        sys.exit(e.exit_code)

    for line in manifest.stdout:
        click.echo(line)
    if manifest.failures:
        logger.error(f"❌ Failed criteria: {', '.join(manifest.failures)}")
        sys.exit(EXIT_ACCEPTANCE)


def _common(f):
    f = click.option("--jobs", type=int, default=None, help="Worker threads for sampled searches")(f)
    f = click.option("--seed", type=int, default=None, help="Seed overriding the config and GREEDYLAB_SEED")(f)
    f = click.option("--out", default=".", show_default=True, help="Existing output directory")(f)
    return f


@click.group()
@click.version_option(VERSION, prog_name="greedylab")
def cli():
    """Greedy-approximation experiments on quasi-Banach sequence spaces"""
    settings = get_settings()
    logging.basicConfig(
        level=settings.LOG_LEVEL,
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        stream=sys.stderr,
    )


@cli.command("run")
@click.option("--config", "config_path", required=True, help="Experiment config (JSON)")
@_common
def run_command(config_path, out, seed, jobs):
    """Run any experiment config"""
    _execute(config_path, out, seed, jobs)


@cli.command()
@click.option("--config", "config_path", required=True, help="Norm config (JSON)")
@_common
def norm(config_path, out, seed, jobs):
    """Quasi-norm of a vector in a space or basis"""
    _execute(config_path, out, seed, jobs, op="norm")


@cli.command()
@click.option("--config", "config_path", required=True, help="Construct or partition config (JSON)")
@_common
def construct(config_path, out, seed, jobs):
    """Build a partition or a DKK space and dump its block table"""
    _execute(config_path, out, seed, jobs, default_op="construct")


@cli.command()
@click.option("--config", "config_path", required=True, help="TGA config (JSON)")
@_common
def tga(config_path, out, seed, jobs):
    """Residual curve of the thresholding greedy algorithm"""
    _execute(config_path, out, seed, jobs, op="tga")


@cli.command()
@click.argument("name")
@click.option("--config", "config_path", required=True, help="Parameter config (JSON)")
@_common
def params(name, config_path, out, seed, jobs):
    """Measure one greedy-approximation parameter"""
    _execute(config_path, out, seed, jobs, op="params", param=name)


@cli.command()
@click.option("--config", "config_path", default=None, help="Optional verify config (JSON)")
@_common
def verify(config_path, out, seed, jobs):
    """Run the invariant suites"""
    _execute(config_path, out, seed, jobs, op="verify")


@cli.command()
@click.argument("suite")
@click.option("--config", "config_path", default=None, help="Optional config (JSON)")
@_common
def reproduce(suite, config_path, out, seed, jobs):
    """Run an acceptance suite (or `all`)"""
    _execute(config_path, out, seed, jobs, op="reproduce", suite=suite)


if __name__ == "__main__":
    cli()
