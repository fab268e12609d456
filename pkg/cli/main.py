"""Command-line entry point: ``python -m cli.main <subcommand> [options]``.

Options given on the command line win over values from ``--config``;
anything left unset falls back to the run model's defaults.
"""

import sys
from pathlib import Path
from typing import Any, Callable, Dict, Optional

import click
import orjson
import yaml

from cli.commands import cmd_compare, cmd_metrics, cmd_phantom, cmd_recon, cmd_sample, cmd_simulate, cmd_train
from models.run_models import MODE_ALIASES
from utils import settings
from utils.errors import ConfigError, StorageError
from utils.logging import configure


def load_config_file(path: Optional[str]) -> Dict[str, Any]:
    if not path:
        return {}
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as e:
        raise StorageError(f"cannot read config {path}: {e}") from e
    try:
        if path.suffix.lower() in (".yaml", ".yml"):
            data = yaml.safe_load(raw) or {}
        else:
            data = orjson.loads(raw)
    except (yaml.YAMLError, orjson.JSONDecodeError) as e:
        raise ConfigError(f"cannot parse config {path}: {e}") from e
    if not isinstance(data, dict):
        raise ConfigError(f"config {path} must hold a mapping, got {type(data).__name__}")
    return data


def merged_options(config_path: Optional[str], flags: Dict[str, Any]) -> Dict[str, Any]:
    options = load_config_file(config_path)
    options.update({key: value for key, value in flags.items() if value is not None})
    if options.get("progress") is None:
        options["progress"] = settings.SHOW_PROGRESS
    if options.get("threads") is None:
        options["threads"] = settings.DEFAULT_THREADS
    return options


def run(command: Callable[[Dict[str, Any]], int], config_path: Optional[str], flags: Dict[str, Any]) -> None:
    try:
        options = merged_options(config_path, flags)
    except (ConfigError, StorageError) as e:
        click.echo(f"Error: {e}", err=True)
        sys.exit(e.exit_code)
    sys.exit(command(options))


def common_options(func):
    func = click.option("--config", "config_path", type=click.Path(), help="JSON or YAML file of defaults.")(func)
    func = click.option("--seed", type=int, help="Seed for every random stream.")(func)
    func = click.option("--threads", type=int, help="Worker threads (output is identical for any value).")(func)
    func = click.option("--progress/--no-progress", default=None, help="Progress bars on stderr.")(func)
    return func


@click.group()
@click.option(
    "--log-level",
    type=click.Choice(["DEBUG", "INFO", "WARNING", "ERROR"], case_sensitive=False),
    help="Overrides AID_LOG_LEVEL.",
)
@click.option("--log-file", default=None, help="Overrides AID_LOG_FILE.")
def cli(log_level, log_file):
    """Autoregressive image diffusion: phantoms, train, sample, simulate, reconstruct, score."""
    configure(log_level=log_level, log_file=log_file)


@cli.command()
@common_options
@click.option("--out", help="Checkpoint directory.")
@click.option("--data", help="Sequence container to train on.")
@click.option("--synthetic/--no-synthetic", default=None, help="Train on generated phantoms.")
@click.option("--volumes", type=int)
@click.option("--frames", type=int)
@click.option("--size", type=int)
@click.option("--steps", type=int)
@click.option("--batch-size", type=int)
@click.option("--lr", type=float)
@click.option("--T", "T", type=int)
@click.option("--beta-min", type=float)
@click.option("--beta-max", type=float)
@click.option("--embed-dim", type=int)
@click.option("--layers", type=int)
@click.option("--patch", type=int)
@click.option("--window", type=int)
@click.option("--unconditional/--conditional", default=None, help="Train the baseline without conditioning.")
@click.option("--smoothing", type=int)
def train(config_path, **flags):
    """Train a TSC network on the AID objective."""
    run(cmd_train, config_path, flags)


@cli.command()
@common_options
@click.option("--checkpoint")
@click.option("--out")
@click.option("--mode", help="retrospective | prospective-warm | prospective-cold | boosted (or retro/warm/cold).")
@click.option("--frames", type=int)
@click.option("--cond", help="Sequence container of initial frames.")
@click.option("--chain", type=click.Choice(["ddpm", "ddim"]))
@click.option("--window", type=int)
@click.option("--boost-steps", type=int)
def sample(config_path, **flags):
    """Generate a frame sequence from a trained checkpoint."""
    if flags.get("mode"):
        flags["mode"] = MODE_ALIASES.get(flags["mode"], flags["mode"])
    run(cmd_sample, config_path, flags)


@cli.command()
@common_options
@click.option("--out")
@click.option("--size", type=int)
@click.option("--frames", type=int)
@click.option("--ellipses", type=int)
def phantom(config_path, **flags):
    """Write a normalized synthetic phantom sequence."""
    run(cmd_phantom, config_path, flags)


@cli.command()
@common_options
@click.option("--input", "input")
@click.option("--out")
@click.option("--mask")
@click.option("--R", "R", type=float)
@click.option("--acs-width", type=int)
@click.option("--coils", type=int)
@click.option("--coil-width", type=float)
@click.option("--noise", type=float)
@click.option("--sigma-eta", type=float)
def simulate(config_path, **flags):
    """Simulate undersampled multi-coil k-space for frames 1..N of a sequence."""
    run(cmd_simulate, config_path, flags)


@cli.command()
@common_options
@click.option("--kspace")
@click.option("--out")
@click.option("--prior", type=click.Choice(["tsc", "gaussian"]))
@click.option("--checkpoint")
@click.option("--x0")
@click.option("--reference")
@click.option("--T", "T", type=int)
@click.option("--beta-min", type=float)
@click.option("--beta-max", type=float)
@click.option("--lambda", "lam", type=float)
@click.option("--K", "K", type=int)
@click.option("--S", "S", type=int)
@click.option("--noise-inject/--no-noise-inject", default=None)
@click.option("--noise-scale", type=click.Choice(["cumulative", "per_step"]))
@click.option("--window", type=int)
@click.option("--pad-with-x0/--no-pad-with-x0", default=None)
@click.option("--sigma-eta", type=float)
@click.option("--prior-mean", type=float)
@click.option("--prior-var", type=float)
@click.option("--rho", type=float)
@click.option("--confidence", type=float)
@click.option("--highlight-fraction", type=float)
def recon(config_path, **flags):
    """Posterior reconstruction with MMSE, variance and confidence maps."""
    run(cmd_recon, config_path, flags)


@cli.command()
@common_options
@click.option("--recon", "recon")
@click.option("--reference")
@click.option("--offset", type=int)
def metrics(config_path, **flags):
    """PSNR and NRMSE per frame, one JSON line each."""
    run(cmd_metrics, config_path, flags)


@cli.command()
@common_options
@click.option("--candidate", multiple=True, help="Metric lines of the conditioned prior, one file per seed.")
@click.option("--baseline", multiple=True, help="Metric lines of the unconditioned prior, same seed order.")
@click.option("--min-wins", type=int)
def compare(config_path, **flags):
    """Count seeds where the candidate's mean NRMSE is no larger than the baseline's."""
    for key in ("candidate", "baseline"):
        flags[key] = list(flags[key]) or None
    run(cmd_compare, config_path, flags)


if __name__ == "__main__":
    cli()
