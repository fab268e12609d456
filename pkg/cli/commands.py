"""Subcommand bodies. Each takes the merged option mapping and returns an exit code."""

import logging
import math
from pathlib import Path
from typing import Any, Dict, List

import click
import numpy as np
import orjson
from pydantic import ValidationError

from data.array_io import save_array, write_json, write_sidecar
from data.checkpoint import load_checkpoint, save_checkpoint
from data.kspace_io import load_kspace, load_sequence, save_kspace, save_sequence
from data.normalize import normalize_sequence
from data.phantom import make_phantom_sequence
from data.preview import export_pgm
from data.sequence import ImageSequence, sequence_windows
from denoiser.gaussian import GaussianMarkovOracle, GaussianOracle, GaussianPriorSpec
from denoiser.trainer import Trainer
from denoiser.tsc_net import TSCNet, TSCNetParams
from diffusion.schedule import NoiseSchedule, schedule_from_config
from models.data_models import PhantomSpec
from models.mri_models import CoilConfig, ForwardConfig, MaskConfig
from models.net_models import TSCConfig
from models.recon_models import ReconConfig
from models.schedule_models import ScheduleConfig
from models.run_models import (
    CompareRunConfig,
    MetricRecord,
    MetricsRunConfig,
    PhantomRunConfig,
    ReconRunConfig,
    SampleRunConfig,
    SimulateRunConfig,
    TrainRunConfig,
)
from mri.operator import build_forward_model, simulate_kspace, zero_filled
from numerics.rng import RngStream
from sampler.generation import SequenceGenerator
from sampler.metrics import nrmse, psnr
from sampler.reconstruction import PosteriorReconstructor
from sampler.uncertainty import highlight_mask, summarize
from utils.command_timing import timed_command
from utils.errors import ConfigError, DimensionError, StorageError

logger = logging.getLogger(__name__)


def emit(record: Dict[str, Any]) -> None:
    """One JSON object per line on stdout."""
    click.echo(orjson.dumps(record).decode("utf-8"))


def finite_or_none(value: float):
    return None if np.isinf(value) else value


def metric_line(frame: int, ref, est, zero_filled_est=None) -> Dict[str, Any]:
    record = {"frame": frame, "psnr_db": finite_or_none(psnr(ref, est)), "nrmse": nrmse(ref, est)}
    if zero_filled_est is not None:
        record["zero_filled_psnr_db"] = finite_or_none(psnr(ref, zero_filled_est))
        record["zero_filled_nrmse"] = nrmse(ref, zero_filled_est)
    return MetricRecord(**record).model_dump(exclude_unset=True)


def schedule_from_meta(meta: Dict[str, Any]) -> NoiseSchedule:
    try:
        return schedule_from_config(ScheduleConfig(**meta["schedule"]))
    except (KeyError, TypeError, ValidationError) as e:
        raise ConfigError(f"checkpoint metadata lacks a valid schedule: {e}") from e


def training_volumes(config: TrainRunConfig, stream: RngStream) -> List[ImageSequence]:
    if config.synthetic:
        spec = PhantomSpec(n=config.size, N=config.frames, motion=config.motion)
        phantom_stream = stream.named("phantom")
        return [
            normalize_sequence(make_phantom_sequence(spec, phantom_stream.spawn(v).generator()))
            for v in range(config.volumes)
        ]
    return [normalize_sequence(load_sequence(config.data))]


@timed_command("train")
def cmd_train(options: Dict[str, Any]) -> int:
    config = TrainRunConfig(**options)
    stream = RngStream(config.seed)
    schedule = ScheduleConfig(T=config.T, beta_min=config.beta_min, beta_max=config.beta_max)
    sched = schedule_from_config(schedule)
    volumes = training_volumes(config, stream)
    windows = [w for volume in volumes for w in sequence_windows(volume, config.window)]
    n = volumes[0].shape[0]
    net = TSCConfig(
        image_size=n,
        patch=config.patch,
        embed_dim=config.embed_dim,
        layers=config.layers,
        window=config.window,
        T=config.T,
        conditional=not config.unconditional,
    )
    params = TSCNetParams.init(net, stream.named("init").generator())
    trainer = Trainer(
        params, sched, threads=config.threads, smoothing=config.smoothing, show_progress=config.progress
    )
    result = trainer.fit(windows, config.steps, config.batch_size, stream.named("train"), lr=config.lr)

    out = Path(config.out)
    save_checkpoint(out, result.params, meta={
        "schedule": schedule.model_dump(),
        "seed": config.seed,
        "steps": config.steps,
        "batch_size": config.batch_size,
        "lr": config.lr,
        "windows": len(windows),
    })
    write_json(out / "loss_curve.json", {
        "loss": result.losses,
        "smoothed": result.smoothed,
        "grad_norm": result.grad_norms,
        "smoothing": config.smoothing,
    })
    emit({
        "steps": config.steps,
        "final_loss": result.losses[-1] if result.losses else None,
        "final_smoothed": result.smoothed[-1] if result.smoothed else None,
        "params": result.params.n_params(),
    })
    return 0


def preview_path(out: Path, label: str, index: int) -> Path:
    return out.with_name(f"{out.stem}_{label}{index:03d}.pgm")


@timed_command("sample")
def cmd_sample(options: Dict[str, Any]) -> int:
    config = SampleRunConfig(**options)
    params, meta = load_checkpoint(config.checkpoint)
    sched = schedule_from_meta(meta)
    init = load_sequence(config.cond).frames if config.cond else None
    n = params.config.image_size
    generator = SequenceGenerator(
        TSCNet(params),
        sched,
        window=config.window or params.config.window,
        chain=config.chain,
        boost_steps=config.boost_steps,
        show_progress=config.progress,
    )
    rng = RngStream(config.seed).named("sample").generator()
    frames = generator.generate(init, config.frames, config.mode, rng, shape=(n, n))

    out = save_array(config.out, frames)
    write_sidecar(out, {"mode": config.mode, "chain": config.chain, "seed": config.seed, "frames": config.frames})
    for i, frame in enumerate(frames, start=1):
        export_pgm(preview_path(out, "frame", i), frame)
    emit({"frames": int(frames.shape[0]), "out": str(out)})
    return 0


@timed_command("phantom")
def cmd_phantom(options: Dict[str, Any]) -> int:
    config = PhantomRunConfig(**options)
    spec = PhantomSpec(n=config.size, N=config.frames, n_ellipses=config.ellipses, motion=config.motion)
    seq = normalize_sequence(make_phantom_sequence(spec, RngStream(config.seed).named("phantom").generator()))
    out = save_sequence(config.out, seq, meta={"seed": config.seed, "phantom": spec.model_dump()})
    emit({"frames": len(seq), "size": config.size, "out": str(out)})
    return 0


@timed_command("simulate")
def cmd_simulate(options: Dict[str, Any]) -> int:
    config = SimulateRunConfig(**options)
    seq = load_sequence(config.input)
    rows, cols = seq.shape
    if rows != cols:
        raise DimensionError(f"simulation needs square images, got {rows}x{cols}")
    if len(seq) < 2:
        raise ConfigError("simulation needs x_0 and at least one frame to measure")
    forward = ForwardConfig(
        mask=MaskConfig(kind=config.mask, R=config.R, acs_width=config.acs_width),
        coils=CoilConfig(n_coils=config.coils, width=config.coil_width),
        sigma_eta=config.sigma_eta,
        noise_std=config.noise,
    )
    stream = RngStream(config.seed)
    model = build_forward_model(forward, rows, stream.named("forward"))
    noise_rng = stream.named("noise").generator()
    frames = [simulate_kspace(model, seq[i], config.noise, noise_rng) for i in range(1, len(seq))]
    out = save_kspace(config.out, frames, meta={"first_frame": 1, "noise": config.noise, "seed": config.seed})
    emit({
        "frames": len(frames),
        "coils": model.coils.n_coils,
        "kept_fraction": model.mask.kept_fraction(),
        "out": str(out),
    })
    return 0


def recon_prior(config: ReconRunConfig, n: int):
    """Denoiser and schedule for the chosen prior."""
    if config.prior == "gaussian":
        sched = schedule_from_config(
            ScheduleConfig(T=config.T or 1000, beta_min=config.beta_min, beta_max=config.beta_max)
        )
        prior = GaussianPriorSpec(
            np.full((n, n), config.prior_mean, dtype=np.complex128), np.full((n, n), config.prior_var)
        )
        if config.rho != 0.0:
            return GaussianMarkovOracle(prior, config.rho, sched), sched
        return GaussianOracle(prior, sched), sched
    params, meta = load_checkpoint(config.checkpoint)
    sched = schedule_from_meta(meta)
    if config.T is not None and config.T != sched.T:
        raise ConfigError(f"checkpoint was trained with T={sched.T}, got --T {config.T}")
    if params.config.image_size != n:
        raise DimensionError(f"checkpoint expects {params.config.image_size}x{params.config.image_size} images, got {n}x{n}")
    return TSCNet(params), sched


@timed_command("recon")
def cmd_recon(options: Dict[str, Any]) -> int:
    config = ReconRunConfig(**options)
    frames = load_kspace(config.kspace, sigma_eta=config.sigma_eta)
    reference = load_sequence(config.reference) if config.reference else None
    x0 = load_sequence(config.x0)[0] if config.x0 else reference[0]
    if reference is not None and len(reference) < len(frames) + 1:
        raise DimensionError(f"reference holds {len(reference)} frames, need {len(frames) + 1}")
    model, sched = recon_prior(config, x0.shape[0])
    recon = ReconConfig(
        T=sched.T,
        lam=config.lam,
        K=config.K,
        S=config.S,
        noise_inject=config.noise_inject,
        noise_scale=config.noise_scale,
        window=config.window,
        pad_with_x0=config.pad_with_x0,
    )
    reconstructor = PosteriorReconstructor(model, recon, sched, threads=config.threads, show_progress=config.progress)
    samples = reconstructor.run(frames, x0, RngStream(config.seed).named("recon"))

    out = Path(config.out)
    maps = [summarize(samples.frame(i), config.confidence) for i in range(samples.n_frames)]
    highlights = np.stack([highlight_mask(um, config.highlight_fraction) for um in maps])
    save_array(out / "samples.aida", samples.samples)
    save_array(out / "mean.aida", np.stack([um.mean for um in maps]))
    save_array(out / "variance.aida", np.stack([um.variance for um in maps]))
    save_array(out / "ci.aida", np.stack([um.ci_halfwidth for um in maps]))
    save_array(out / "highlight.aida", highlights)
    write_json(out / "recon.json", {"config": config.model_dump(), "schedule_T": sched.T})
    for i, um in enumerate(maps, start=1):
        export_pgm(out / f"mean_{i:03d}.pgm", um.mean)
        export_pgm(out / f"ci_{i:03d}.pgm", um.ci_halfwidth)
        export_pgm(out / f"highlight_{i:03d}.pgm", highlights[i - 1])

    if reference is not None:
        for i, (um, y) in enumerate(zip(maps, frames), start=1):
            emit(metric_line(i, reference[i], um.mean, zero_filled(y.model, y)))
    return 0


@timed_command("metrics")
def cmd_metrics(options: Dict[str, Any]) -> int:
    config = MetricsRunConfig(**options)
    recon = load_sequence(config.recon)
    reference = load_sequence(config.reference)
    if recon.shape != reference.shape:
        raise DimensionError(f"reconstruction frames {recon.shape} do not match reference frames {reference.shape}")
    if len(reference) < len(recon) + config.offset:
        raise DimensionError(
            f"reference holds {len(reference)} frames, need {len(recon) + config.offset} for offset {config.offset}"
        )
    for i in range(len(recon)):
        frame = i + config.offset
        emit(metric_line(frame, reference[frame], recon[i]))
    return 0


def read_metric_lines(path: str) -> List[MetricRecord]:
    try:
        raw = Path(path).read_bytes()
    except OSError as e:
        raise StorageError(f"cannot read metrics {path}: {e}") from e
    try:
        records = [MetricRecord(**orjson.loads(line)) for line in raw.splitlines() if line.strip()]
    except (orjson.JSONDecodeError, TypeError, ValidationError) as e:
        raise ConfigError(f"malformed metric line in {path}: {e}") from e
    if not records:
        raise ConfigError(f"no metric lines in {path}")
    return records


def mean_nrmse(records: List[MetricRecord]) -> float:
    return math.fsum(r.nrmse for r in records) / len(records)


@timed_command("compare")
def cmd_compare(options: Dict[str, Any]) -> int:
    config = CompareRunConfig(**options)
    candidate = [mean_nrmse(read_metric_lines(path)) for path in config.candidate]
    baseline = [mean_nrmse(read_metric_lines(path)) for path in config.baseline]
    wins = sum(c <= b for c, b in zip(candidate, baseline))
    logger.info(f"candidate wins {wins} of {len(candidate)} pair(s), {config.min_wins} needed")
    emit({
        "trials": len(candidate),
        "wins": wins,
        "min_wins": config.min_wins,
        "passed": wins >= config.min_wins,
        "candidate_nrmse": candidate,
        "baseline_nrmse": baseline,
    })
    return 0
