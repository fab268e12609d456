import orjson
import pytest
from click.testing import CliRunner

from cli.main import cli, load_config_file, merged_options
from data.array_io import load_array, read_json
from data.kspace_io import load_sequence, save_sequence
from data.normalize import normalize_sequence
from data.phantom import make_phantom_sequence
from models.data_models import PhantomSpec
from numerics.rng import RngStream
from utils.errors import ConfigError
from utils.logging import configure, get_run_stats

TRAIN_ARGS = [
    "--synthetic", "--volumes", "2", "--frames", "4", "--size", "8", "--steps", "3",
    "--batch-size", "2", "--T", "10", "--embed-dim", "4", "--layers", "1", "--window", "2",
]


@pytest.fixture(autouse=True)
def reset_logging():
    yield
    configure(log_level="WARNING")


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def invoke(runner):
    def run(*args):
        return runner.invoke(cli, ["--log-level", "WARNING", *map(str, args)])
    return run


@pytest.fixture
def sequence_file(tmp_path):
    seq = normalize_sequence(make_phantom_sequence(PhantomSpec(n=8, N=4, n_ellipses=2), RngStream(11).generator()))
    return save_sequence(tmp_path / "seq.aida", seq)


@pytest.fixture
def checkpoint(invoke, tmp_path):
    out = tmp_path / "ckpt"
    result = invoke("train", *TRAIN_ARGS, "--out", out, "--seed", 7)
    assert result.exit_code == 0, result.output
    return out


@pytest.fixture
def kspace_file(invoke, sequence_file, tmp_path):
    out = tmp_path / "k.aida"
    result = invoke("simulate", "--input", sequence_file, "--out", out, "--mask", "odd-lines", "--coils", 1)
    assert result.exit_code == 0, result.output
    return out


def json_lines(result):
    return [orjson.loads(line) for line in result.stdout.splitlines() if line.strip()]


class TestOptions:
    def test_flags_override_file(self, tmp_path):
        path = tmp_path / "c.json"
        path.write_bytes(orjson.dumps({"steps": 10, "lr": 0.1}))
        options = merged_options(str(path), {"steps": 3, "lr": None})
        assert options["steps"] == 3
        assert options["lr"] == 0.1
        assert options["threads"] >= 1

    def test_yaml_file(self, tmp_path):
        path = tmp_path / "c.yaml"
        path.write_text("steps: 4\nsynthetic: true\n")
        assert load_config_file(str(path)) == {"steps": 4, "synthetic": True}

    def test_non_mapping_rejected(self, tmp_path):
        path = tmp_path / "c.json"
        path.write_text("[1, 2]")
        with pytest.raises(ConfigError):
            load_config_file(str(path))

    def test_unknown_key_exit_two(self, invoke, tmp_path):
        path = tmp_path / "c.json"
        path.write_bytes(orjson.dumps({"synthetic": True, "bogus": 1}))
        assert invoke("train", "--config", path, "--out", tmp_path / "ck").exit_code == 2

    def test_missing_config_file_exit_four(self, invoke, tmp_path):
        assert invoke("train", "--config", tmp_path / "absent.json", "--out", tmp_path / "ck").exit_code == 4


class TestTrain:
    def test_writes_checkpoint_and_curve(self, checkpoint):
        header = read_json(checkpoint / "header.json")
        assert header["meta"]["schedule"]["T"] == 10
        curve = read_json(checkpoint / "loss_curve.json")
        assert len(curve["loss"]) == 3
        assert len(curve["smoothed"]) == 3
        assert len(curve["grad_norm"]) == 3

    def test_summary_line(self, invoke, tmp_path):
        result = invoke("train", *TRAIN_ARGS, "--out", tmp_path / "ck")
        summary = json_lines(result)[-1]
        assert summary["steps"] == 3
        assert summary["params"] > 0

    def test_needs_a_source(self, invoke, tmp_path):
        assert invoke("train", "--out", tmp_path / "ck").exit_code == 2

    def test_needs_an_output_directory(self, invoke):
        assert invoke("train", "--synthetic").exit_code == 2

    def test_same_seed_same_checkpoint(self, invoke, tmp_path):
        for name, threads in (("a", 1), ("b", 2)):
            result = invoke("train", *TRAIN_ARGS, "--out", tmp_path / name, "--seed", 3, "--threads", threads)
            assert result.exit_code == 0, result.output
        for path in sorted((tmp_path / "a").iterdir()):
            assert path.read_bytes() == (tmp_path / "b" / path.name).read_bytes()

    def test_divergence_exit_three(self, invoke, tmp_path):
        result = invoke("train", *TRAIN_ARGS, "--out", tmp_path / "ck", "--lr", "1e100")
        assert result.exit_code == 3

    def test_run_stats_follow_the_command(self, invoke, tmp_path):
        assert invoke("train", *TRAIN_ARGS, "--out", tmp_path / "ck").exit_code == 0
        stats = get_run_stats()
        assert stats["commands"] == 1
        assert stats["failures"] == 0
        assert stats["train_steps"] == 3


class TestSample:
    def test_cold_frames(self, invoke, checkpoint, tmp_path):
        out = tmp_path / "gen.aida"
        result = invoke("sample", "--checkpoint", checkpoint, "--out", out, "--mode", "cold", "--frames", 3)
        assert result.exit_code == 0, result.output
        assert load_array(out).shape == (3, 8, 8)
        assert (tmp_path / "gen_frame003.pgm").exists()
        assert read_json(tmp_path / "gen.aida.json")["mode"] == "prospective-cold"

    def test_retrospective_needs_cond(self, invoke, checkpoint, tmp_path):
        result = invoke("sample", "--checkpoint", checkpoint, "--out", tmp_path / "g.aida", "--mode", "retrospective")
        assert result.exit_code == 2

    def test_warm_from_sequence(self, invoke, checkpoint, sequence_file, tmp_path):
        out = tmp_path / "warm.aida"
        result = invoke(
            "sample", "--checkpoint", checkpoint, "--out", out, "--mode", "warm", "--frames", 2, "--cond", sequence_file
        )
        assert result.exit_code == 0, result.output
        assert load_array(out).shape == (2, 8, 8)

    def test_fixed_seed_identical_bytes(self, invoke, checkpoint, tmp_path):
        for name in ("a.aida", "b.aida"):
            invoke("sample", "--checkpoint", checkpoint, "--out", tmp_path / name, "--frames", 2, "--seed", 5)
        assert (tmp_path / "a.aida").read_bytes() == (tmp_path / "b.aida").read_bytes()

    def test_missing_checkpoint_exit_four(self, invoke, tmp_path):
        result = invoke("sample", "--checkpoint", tmp_path / "none", "--out", tmp_path / "g.aida")
        assert result.exit_code == 4


class TestPhantom:
    def test_writes_normalized_sequence(self, invoke, tmp_path):
        out = tmp_path / "p.aida"
        result = invoke("phantom", "--out", out, "--size", 16, "--frames", 3, "--seed", 2)
        assert result.exit_code == 0, result.output
        seq = load_sequence(out)
        assert seq.frames.shape == (3, 16, 16)
        assert seq.max_magnitude() == pytest.approx(1.0, abs=1e-12)
        assert read_json(tmp_path / "p.aida.json")["seed"] == 2

    def test_fixed_seed_identical_bytes(self, invoke, tmp_path):
        for name in ("a.aida", "b.aida"):
            invoke("phantom", "--out", tmp_path / name, "--size", 8, "--seed", 4)
        assert (tmp_path / "a.aida").read_bytes() == (tmp_path / "b.aida").read_bytes()

    def test_size_must_be_power_of_two(self, invoke, tmp_path):
        assert invoke("phantom", "--out", tmp_path / "p.aida", "--size", 12).exit_code == 2


class TestSimulate:
    def test_odd_lines_single_coil(self, invoke, sequence_file, tmp_path):
        result = invoke("simulate", "--input", sequence_file, "--out", tmp_path / "k.aida", "--mask", "odd-lines")
        assert result.exit_code == 0, result.output
        summary = json_lines(result)[0]
        assert summary == {**summary, "frames": 3, "coils": 1, "kept_fraction": 0.5}
        assert load_array(tmp_path / "k.aida").shape == (3, 1, 8, 8)
        assert load_array(tmp_path / "k.mask.aida").shape == (8, 8)

    def test_bad_mask_exit_two(self, invoke, sequence_file, tmp_path):
        result = invoke("simulate", "--input", sequence_file, "--out", tmp_path / "k.aida", "--mask", "spiral")
        assert result.exit_code == 2

    def test_acceleration_beyond_lines_exit_two(self, invoke, sequence_file, tmp_path):
        result = invoke(
            "simulate", "--input", sequence_file, "--out", tmp_path / "k.aida", "--mask", "equispaced-acs", "--R", 12
        )
        assert result.exit_code == 2


class TestRecon:
    def test_gaussian_prior_with_reference(self, invoke, kspace_file, sequence_file, tmp_path):
        out = tmp_path / "recon"
        result = invoke(
            "recon", "--kspace", kspace_file, "--out", out, "--prior", "gaussian",
            "--T", 10, "--S", 2, "--K", 1, "--reference", sequence_file,
        )
        assert result.exit_code == 0, result.output
        lines = json_lines(result)
        assert [line["frame"] for line in lines] == [1, 2, 3]
        assert set(lines[0]) == {"frame", "psnr_db", "nrmse", "zero_filled_psnr_db", "zero_filled_nrmse"}
        assert load_array(out / "samples.aida").shape == (3, 2, 8, 8)
        assert load_array(out / "ci.aida").shape == (3, 8, 8)
        assert (out / "highlight_003.pgm").exists()

    def test_network_prior(self, invoke, checkpoint, kspace_file, sequence_file, tmp_path):
        result = invoke(
            "recon", "--kspace", kspace_file, "--out", tmp_path / "r", "--checkpoint", checkpoint,
            "--S", 2, "--K", 1, "--x0", sequence_file,
        )
        assert result.exit_code == 0, result.output
        assert load_array(tmp_path / "r" / "mean.aida").shape == (3, 8, 8)

    def test_single_sample_exit_two(self, invoke, kspace_file, sequence_file, tmp_path):
        result = invoke(
            "recon", "--kspace", kspace_file, "--out", tmp_path / "r", "--prior", "gaussian", "--S", 1,
            "--reference", sequence_file,
        )
        assert result.exit_code == 2

    def test_divergence_exit_three(self, invoke, kspace_file, sequence_file, tmp_path):
        result = invoke(
            "recon", "--kspace", kspace_file, "--out", tmp_path / "r", "--prior", "gaussian", "--T", 5,
            "--S", 2, "--lambda", "1e308", "--reference", sequence_file,
        )
        assert result.exit_code == 3

    def test_missing_kspace_exit_four(self, invoke, sequence_file, tmp_path):
        result = invoke(
            "recon", "--kspace", tmp_path / "none.aida", "--out", tmp_path / "r", "--prior", "gaussian",
            "--reference", sequence_file,
        )
        assert result.exit_code == 4

    def test_identical_across_threads(self, invoke, kspace_file, sequence_file, tmp_path):
        for name, threads in (("one", 1), ("three", 3)):
            result = invoke(
                "recon", "--kspace", kspace_file, "--out", tmp_path / name, "--prior", "gaussian", "--T", 10,
                "--S", 3, "--K", 1, "--noise-inject", "--reference", sequence_file, "--seed", 9,
                "--threads", threads,
            )
            assert result.exit_code == 0, result.output
        for path in sorted((tmp_path / "one").iterdir()):
            if path.name == "recon.json":
                continue
            assert path.read_bytes() == (tmp_path / "three" / path.name).read_bytes(), path.name


class TestMetrics:
    def test_lines_per_frame(self, invoke, sequence_file, tmp_path):
        seq = load_sequence(sequence_file)
        recon = save_sequence(tmp_path / "r.aida", type(seq)(seq.frames[1:]))
        result = invoke("metrics", "--recon", recon, "--reference", sequence_file, "--offset", 1)
        assert result.exit_code == 0, result.output
        lines = json_lines(result)
        assert [line["frame"] for line in lines] == [1, 2, 3]
        assert all(line["psnr_db"] is None and line["nrmse"] == 0.0 for line in lines)

    def test_offset_too_large_exit_two(self, invoke, sequence_file):
        assert invoke("metrics", "--recon", sequence_file, "--reference", sequence_file, "--offset", 1).exit_code == 2


class TestCompare:
    def write_metrics(self, path, values):
        lines = [orjson.dumps({"frame": i + 1, "psnr_db": 30.0, "nrmse": v}) for i, v in enumerate(values)]
        path.write_bytes(b"\n".join(lines) + b"\n")
        return path

    def test_counts_wins_by_mean_nrmse(self, invoke, tmp_path):
        pairs = [([0.1, 0.3], [0.2, 0.2]), ([0.2, 0.2], [0.1, 0.1]), ([0.05], [0.3])]
        args = []
        for i, (cand, base) in enumerate(pairs):
            args += ["--candidate", self.write_metrics(tmp_path / f"c{i}.jsonl", cand)]
            args += ["--baseline", self.write_metrics(tmp_path / f"b{i}.jsonl", base)]
        result = invoke("compare", *args, "--min-wins", 2)
        assert result.exit_code == 0, result.output
        summary = json_lines(result)[0]
        assert summary["trials"] == 3
        assert summary["wins"] == 2
        assert summary["passed"] is True

    def test_unpaired_files_exit_two(self, invoke, tmp_path):
        path = self.write_metrics(tmp_path / "c.jsonl", [0.1])
        assert invoke("compare", "--candidate", path, "--candidate", path, "--baseline", path).exit_code == 2

    def test_missing_file_exit_four(self, invoke, tmp_path):
        path = self.write_metrics(tmp_path / "c.jsonl", [0.1])
        result = invoke("compare", "--candidate", path, "--baseline", tmp_path / "none.jsonl", "--min-wins", 1)
        assert result.exit_code == 4
