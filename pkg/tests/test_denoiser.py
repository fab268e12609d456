import math

import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from data.checkpoint import load_checkpoint, save_checkpoint, tensor_file
from data.array_io import read_json, save_array, write_json
from data.sequence import ImageSequence, sequence_windows
from denoiser import autodiff as ad
from denoiser.base import DenoiserContext
from denoiser.gaussian import (
    GaussianMarkovOracle,
    GaussianOracle,
    GaussianPriorSpec,
    gaussian_eps,
    posterior_mean_x0,
)
from denoiser.optim import AdamState, first_step_update, global_grad_norm, train_step
from denoiser.trainer import Trainer, grad_params, moving_average, sequence_grad
from denoiser.tsc_net import TSCNet, TSCNetParams, pool_frames, tensor_shapes, tsc_forward
from diffusion.loss import aid_loss_with_draws, draw_noise
from diffusion.process import q_sample
from diffusion.schedule import NoiseSchedule
from models.net_models import TSCConfig
from numerics.arrays import complex_normal, to_channels
from numerics.rng import RngStream
from utils.errors import ArrayFormatError, ConfigError, DimensionError, NumericError


def numeric_grad(fn, x, h=1e-6):
    grad = np.zeros_like(x)
    for idx in np.ndindex(x.shape):
        up, down = x.copy(), x.copy()
        up[idx] += h
        down[idx] -= h
        grad[idx] = (fn(up) - fn(down)) / (2 * h)
    return grad


def check_grad(a, f):
    return abs(a - f) <= 1e-5 * max(abs(a), abs(f)) + 1e-8


def markov_sequence(length, seed, n=4):
    axis = np.linspace(-1.0, 1.0, n)
    prior = GaussianPriorSpec(np.outer(axis, axis) * (1 + 0.5j), np.full((n, n), 0.25))
    oracle = GaussianMarkovOracle(prior, 0.9, NoiseSchedule.from_betas([0.1]))
    return ImageSequence(oracle.sample_sequence(np.random.default_rng(seed), length))


class TestGaussianOracle:
    def test_scalar_half_alpha_bar(self):
        sched = NoiseSchedule.from_betas([0.5])
        prior = GaussianPriorSpec(np.zeros((1, 1), dtype=complex), 1.0)
        xt = np.array([[0.8 - 0.4j]])
        assert_allclose(gaussian_eps(prior, xt, 1, sched), math.sqrt(0.5) * xt, rtol=1e-15)
        assert_allclose(posterior_mean_x0(prior, xt, 1, sched), math.sqrt(0.5) * xt, rtol=1e-15)

    def test_zero_variance_recovers_exact_noise(self, sched, gaussian_prior, random_image):
        point = GaussianPriorSpec(gaussian_prior.mean, 0.0)
        eps = random_image(8)
        xt = q_sample(point.mean, 9, eps, sched)
        assert_allclose(gaussian_eps(point, xt, 9, sched), eps, atol=1e-12)

    def test_matches_monte_carlo_regression(self):
        sched = NoiseSchedule.from_betas([0.3, 0.6])
        a = sched.alpha_bar_at(2)
        var = 2.0
        rng = np.random.default_rng(11)
        x0 = math.sqrt(var) * rng.standard_normal(10 ** 6)
        eps = rng.standard_normal(10 ** 6)
        xt = math.sqrt(a) * x0 + math.sqrt(1 - a) * eps
        slope = np.mean(eps * xt) / np.mean(xt * xt)
        prior = GaussianPriorSpec(np.zeros((1, 1), dtype=complex), var)
        expected = gaussian_eps(prior, np.ones((1, 1), dtype=complex), 2, sched)[0, 0].real
        assert abs(slope - expected) < 0.01

    def test_rejects_negative_variance(self):
        with pytest.raises(ConfigError):
            GaussianPriorSpec(np.zeros((2, 2), dtype=complex), -1.0)

    def test_markov_without_correlation_is_independent_oracle(self, sched, gaussian_prior, random_image):
        ctx = DenoiserContext(random_image(8)[None], 1)
        xt = random_image(8)
        assert_allclose(
            GaussianMarkovOracle(gaussian_prior, 0.0, sched).predict_eps(xt, 5, ctx),
            GaussianOracle(gaussian_prior, sched).predict_eps(xt, 5, ctx),
            rtol=1e-15,
        )

    def test_markov_uses_latest_frame_only(self, sched, gaussian_prior, random_image):
        oracle = GaussianMarkovOracle(gaussian_prior, 0.7, sched)
        latest, xt = random_image(8), random_image(8)
        a = oracle.predict_eps(xt, 4, DenoiserContext(np.stack([random_image(8), latest]), 2))
        b = oracle.predict_eps(xt, 4, DenoiserContext(np.stack([random_image(8), latest]), 2))
        assert_array_equal(a, b)

    def test_markov_rejects_unit_correlation(self, sched, gaussian_prior):
        with pytest.raises(ConfigError):
            GaussianMarkovOracle(gaussian_prior, 1.0, sched)

    def test_shape_mismatch(self, sched, gaussian_prior, random_image):
        ctx = DenoiserContext(random_image(8)[None], 1)
        with pytest.raises(DimensionError):
            GaussianOracle(gaussian_prior, sched).predict_eps(random_image(4), 3, ctx)

    def test_context_rejects_position_zero(self, random_image):
        with pytest.raises(ConfigError):
            DenoiserContext(random_image(4)[None], 0)

    def test_lowest_loss_on_own_prior(self, sched):
        prior = GaussianPriorSpec(np.zeros((8, 8), dtype=complex), 1.0)
        truth = GaussianMarkovOracle(prior, 0.9, sched)
        rivals = [GaussianOracle(prior, sched), GaussianMarkovOracle(prior, 0.5, sched)]
        rng = np.random.default_rng(21)
        gaps = [[] for _ in rivals]
        for _ in range(60):
            seq = ImageSequence(truth.sample_sequence(rng, 4))
            draws = draw_noise(seq, sched, rng)
            best = aid_loss_with_draws(truth, seq, draws, sched).total
            for gap, rival in zip(gaps, rivals):
                gap.append(aid_loss_with_draws(rival, seq, draws, sched).total - best)
        for gap in gaps:
            assert np.mean(gap) > 3 * np.std(gap, ddof=1) / math.sqrt(len(gap))


class TestAutodiff:
    @pytest.mark.parametrize("op", ["matmul", "tanh", "layer_norm", "causal_softmax", "attention", "take_rows"])
    def test_vjp_matches_finite_differences(self, op, rng):
        x = rng.standard_normal((4, 3))
        w = rng.standard_normal((3, 3))
        seed = rng.standard_normal((4, 3))

        def build(value):
            t = ad.Tensor(value)
            if op == "matmul":
                return t, ad.matmul(t, w)
            if op == "tanh":
                return t, ad.tanh(t)
            if op == "layer_norm":
                return t, ad.layer_norm(t)
            if op == "causal_softmax":
                return t, ad.causal_softmax(ad.matmul(t, w))
            if op == "take_rows":
                return t, ad.take_rows(t, np.array([0, 2, 2, 3]))
            return t, ad.causal_attention(t, ad.matmul(t, w), t)

        leaf, out = build(x)
        out.backward(seed)
        fd = numeric_grad(lambda v: float(np.sum(build(v)[1].value * seed)), x)
        assert_allclose(leaf.grad, fd, rtol=1e-6, atol=1e-8)

    def test_causal_softmax_masks_future(self, rng):
        weights = ad.causal_softmax(rng.standard_normal((5, 5))).value
        assert np.all(np.triu(weights, k=1) == 0.0)
        assert_allclose(weights.sum(axis=1), np.ones(5), rtol=1e-15)
        assert weights[0, 0] == 1.0

    def test_gradients_accumulate_over_shared_leaf(self):
        x = ad.Tensor(np.array([[2.0]]))
        (x * x + x).backward()
        assert x.grad[0, 0] == pytest.approx(5.0)

    def test_non_finite_reports_scope_path(self):
        with pytest.raises(NumericError) as excinfo:
            with ad.scope("layers.0"):
                with ad.scope("ffn"):
                    ad.scale(ad.Tensor(np.array([1e308])), 10.0)
        assert excinfo.value.where == "layers.0.ffn.scale"
        assert "layers.0.ffn.scale" in str(excinfo.value)

    def test_non_finite_gradient_names_leaf(self):
        x = ad.Tensor(np.array([[1e10]]), name="x")
        w = ad.Tensor(np.array([[1.0]]), name="out.w")
        with pytest.raises(NumericError) as excinfo:
            ad.matmul(x, w).backward(np.array([[1e300]]))
        assert excinfo.value.where == "out.w"

    def test_uniform_attention_averages_prefix(self, rng):
        v = rng.standard_normal((5, 3))
        flat = np.zeros((5, 3))
        out = ad.causal_attention(flat, flat, v).value
        for i in range(5):
            assert_allclose(out[i], v[:i + 1].mean(axis=0), rtol=1e-14, atol=1e-14)

    def test_single_token_attention_returns_v(self, rng):
        q, k, v = rng.standard_normal((3, 1, 4))
        assert_array_equal(ad.causal_attention(q, k, v).value, v)

    def test_matmul_rows_independent_of_height(self, rng):
        a, w = rng.standard_normal((7, 33)), rng.standard_normal((33, 5))
        full = ad.matmul(a, w).value
        assert_allclose(full, a @ w, rtol=1e-12)
        for rows in range(1, 7):
            assert_array_equal(ad.matmul(a[:rows], w).value, full[:rows])

    def test_attention_rejects_zero_width(self):
        empty = np.zeros((3, 0))
        with pytest.raises(ConfigError):
            ad.causal_attention(empty, empty, empty)


class TestTSCNet:
    def test_parameter_tree(self, tiny_config, tiny_params):
        assert tiny_params.names() == list(tensor_shapes(tiny_config))
        assert tiny_params.n_params() < 2000
        assert_array_equal(tiny_params.tensors["out.skip"], 0.0)

    def test_unconditional_tree_has_no_attention(self, tiny_config):
        shapes = tensor_shapes(tiny_config.model_copy(update={"conditional": False}))
        assert not any(name.startswith(("layers.", "embed.cond")) for name in shapes)

    def test_pool_frames_averages_patches(self):
        frame = np.arange(16, dtype=float).reshape(4, 4) * (1 + 1j)
        pooled = pool_frames(frame[None], 2)
        assert_allclose(pooled[0, :4], [2.5, 4.5, 10.5, 12.5])
        assert_allclose(pooled[0, 4:], [2.5, 4.5, 10.5, 12.5])

    def test_zero_output_predicts_zero(self, tiny_params, rng):
        net = TSCNet(tiny_params.zero_output())
        frames = complex_normal(rng, (3, 4, 4))
        out = net.predict_parallel(frames, complex_normal(rng, (3, 4, 4)), np.array([1, 5, 20]))
        assert np.all(out == 0)

    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    def test_row_ignores_later_frames_and_other_rows(self, tiny_params, rng, n):
        net = TSCNet(tiny_params)
        cond = complex_normal(rng, (4, 4, 4))
        noisy = complex_normal(rng, (4, 4, 4))
        ts = np.array([3, 7, 11, 19])
        base = net.predict_parallel(cond, noisy, ts)[n - 1]

        cond2, noisy2, ts2 = cond.copy(), noisy.copy(), ts.copy()
        cond2[n:] += 10.0 * complex_normal(rng, cond2[n:].shape)
        others = [i for i in range(4) if i != n - 1]
        noisy2[others] = complex_normal(rng, (3, 4, 4))
        ts2[others] = [1, 2, 3]
        assert_array_equal(net.predict_parallel(cond2, noisy2, ts2)[n - 1], base)

    def test_single_prediction_matches_parallel_row(self, tiny_params, rng):
        net = TSCNet(tiny_params)
        cond, noisy = complex_normal(rng, (3, 4, 4)), complex_normal(rng, (3, 4, 4))
        ts = np.array([4, 9, 13])
        parallel = net.predict_parallel(cond, noisy, ts)
        single = net.predict_eps(noisy[2], 13, DenoiserContext(cond, 3))
        assert_array_equal(single, parallel[2])

    def test_functional_form_matches_network(self, tiny_params, rng):
        cond, xt = complex_normal(rng, (2, 4, 4)), complex_normal(rng, (4, 4))
        ctx = DenoiserContext(cond, 2)
        assert_array_equal(tsc_forward(tiny_params, xt, 5, ctx), TSCNet(tiny_params).predict_eps(xt, 5, ctx))

    def test_bounded_inputs_stay_finite(self, tiny_params, rng):
        def scaled(shape):
            z = complex_normal(rng, shape)
            return 10.0 * z / np.max(np.abs(z))

        ctx = DenoiserContext(scaled((3, 4, 4)), 3)
        for t in (1, 10, 20):
            eps = tsc_forward(tiny_params, scaled((4, 4)), t, ctx)
            assert np.all(np.isfinite(eps))
            assert np.max(np.abs(eps)) < 1e6

    def test_non_finite_parameter_is_numeric_error(self, tiny_params):
        tensors = tiny_params.copy().tensors
        tensors["head.b1"][0, 0] = np.inf
        with pytest.raises(NumericError) as excinfo:
            TSCNetParams(tiny_params.config, tensors)
        assert excinfo.value.where == "head.b1"

    def test_unconditional_ignores_history(self, tiny_config, stream, rng):
        config = tiny_config.model_copy(update={"conditional": False})
        net = TSCNet(TSCNetParams.init(config, stream.generator()))
        xt = complex_normal(rng, (4, 4))
        a = net.predict_eps(xt, 6, DenoiserContext(complex_normal(rng, (2, 4, 4)), 2))
        b = net.predict_eps(xt, 6, DenoiserContext(complex_normal(rng, (2, 4, 4)), 2))
        assert_array_equal(a, b)

    def test_rejects_wrong_frame_size(self, tiny_params, rng):
        with pytest.raises(DimensionError):
            TSCNet(tiny_params).predict_parallel(
                complex_normal(rng, (2, 8, 8)), complex_normal(rng, (2, 8, 8)), np.array([1, 2])
            )

    def test_rejects_step_outside_table(self, tiny_params, rng):
        frames = complex_normal(rng, (1, 4, 4))
        with pytest.raises(ConfigError):
            TSCNet(tiny_params).predict_parallel(frames, frames, np.array([21]))

    def test_vector_round_trip(self, tiny_params):
        rebuilt = tiny_params.from_vector(tiny_params.to_vector())
        for name in tiny_params.names():
            assert_array_equal(rebuilt.tensors[name], tiny_params.tensors[name])

    def test_patch_must_divide_size(self):
        with pytest.raises(ValueError):
            TSCConfig(image_size=6, patch=4)


class TestGradients:
    def fd_check(self, params, seq, draws, sched, indices):
        _, grads = sequence_grad(params, seq, draws, sched)
        g = grads.to_vector()
        v = params.to_vector()
        h = 1e-5
        for i in indices:
            up, down = v.copy(), v.copy()
            up[i] += h
            down[i] -= h
            f_up, _ = sequence_grad(params.from_vector(up), seq, draws, sched)
            f_down, _ = sequence_grad(params.from_vector(down), seq, draws, sched)
            fd = (f_up - f_down) / (2 * h)
            assert check_grad(g[i], fd), (params.names(), i, g[i], fd)

    def test_loss_matches_forward_terms(self, tiny_params, sched):
        seq = markov_sequence(4, 1)
        draws = draw_noise(seq, sched, np.random.default_rng(2))
        loss, _ = sequence_grad(tiny_params, seq, draws, sched)
        pred = TSCNet(tiny_params).predict_parallel(seq.frames[:-1], q_noisy(seq, draws, sched), draws.ts)
        assert loss == pytest.approx(float(np.sum(np.abs(pred - draws.eps) ** 2)), rel=1e-12)

    def test_finite_differences_quick(self, tiny_params, sched):
        seq = markov_sequence(4, 3)
        draws = draw_noise(seq, sched, np.random.default_rng(4))
        _, grads = sequence_grad(tiny_params, seq, draws, sched)
        active = np.flatnonzero(np.abs(grads.to_vector()) > 0.1)
        picks = np.random.default_rng(5).choice(active, size=3, replace=False)
        self.fd_check(tiny_params, seq, draws, sched, picks)

    def test_finite_differences_unconditional(self, tiny_config, sched, stream):
        params = TSCNetParams.init(tiny_config.model_copy(update={"conditional": False}), stream.generator())
        seq = markov_sequence(3, 6)
        draws = draw_noise(seq, sched, np.random.default_rng(7))
        _, grads = sequence_grad(params, seq, draws, sched)
        self.fd_check(params, seq, draws, sched, np.argsort(-np.abs(grads.to_vector()))[:3])

    @pytest.mark.slow
    def test_finite_differences_hundred_points(self, tiny_params, sched):
        seq = markov_sequence(5, 8)
        draws = draw_noise(seq, sched, np.random.default_rng(9))
        picks = np.random.default_rng(10).choice(tiny_params.n_params(), size=100, replace=False)
        self.fd_check(tiny_params, seq, draws, sched, picks)

    def test_batch_gradient_independent_of_threads(self, tiny_params, sched):
        batch = [markov_sequence(4, s) for s in range(5)]
        loss1, g1 = grad_params(tiny_params, batch, sched, np.random.default_rng(0), threads=1)
        loss3, g3 = grad_params(tiny_params, batch, sched, np.random.default_rng(0), threads=3)
        assert loss1 == loss3
        assert_array_equal(g1.to_vector(), g3.to_vector())

    def test_batch_gradient_is_sum_of_sequences(self, tiny_params, sched):
        batch = [markov_sequence(3, 1), markov_sequence(3, 2)]
        rng = np.random.default_rng(12)
        draws = [draw_noise(seq, sched, rng) for seq in batch]
        parts = [sequence_grad(tiny_params, seq, d, sched) for seq, d in zip(batch, draws)]
        loss, grads = grad_params(tiny_params, batch, sched, np.random.default_rng(12))
        assert loss == pytest.approx(parts[0][0] + parts[1][0], rel=1e-15)
        assert_allclose(grads.to_vector(), parts[0][1].to_vector() + parts[1][1].to_vector(), rtol=1e-14)

    def test_empty_batch_rejected(self, tiny_params, sched, rng):
        with pytest.raises(ConfigError):
            grad_params(tiny_params, [], sched, rng)

    def test_zero_parameters_quadratic_case(self, tiny_config, sched):
        # Zero weights leave only the skip path: out = skip[t]·x_t
        params = TSCNetParams.zeros(tiny_config)
        seq = markov_sequence(4, 3)
        draws = draw_noise(seq, sched, np.random.default_rng(8))
        loss, grads = sequence_grad(params, seq, draws, sched)
        assert loss == pytest.approx(float(np.sum(np.abs(draws.eps) ** 2)), rel=1e-12)
        noisy = q_noisy(seq, draws, sched)
        expected = np.zeros((tiny_config.T, 1))
        for i, t in enumerate(draws.ts):
            expected[int(t) - 1, 0] -= 2.0 * np.sum(to_channels(draws.eps[i]) * to_channels(noisy[i]))
        assert_allclose(grads.tensors["out.skip"], expected, rtol=0, atol=1e-10)
        for name in grads.names():
            if name != "out.skip":
                assert_array_equal(grads.tensors[name], 0.0)

    def test_duplicated_sequence_doubles_gradient(self, tiny_params, sched, monkeypatch):
        seq = markov_sequence(4, 5)
        draws = draw_noise(seq, sched, np.random.default_rng(6))
        monkeypatch.setattr("denoiser.trainer.draw_noise", lambda seq, sched, rng: draws)
        loss1, g1 = grad_params(tiny_params, [seq], sched, np.random.default_rng(0))
        loss2, g2 = grad_params(tiny_params, [seq, seq], sched, np.random.default_rng(0), threads=2)
        assert loss2 == 2.0 * loss1
        assert_array_equal(g2.to_vector(), 2.0 * g1.to_vector())

    def test_overflowing_output_is_numeric_error(self, tiny_params, sched):
        tensors = tiny_params.copy().tensors
        tensors["out.w"][:] = 1e200
        seq = markov_sequence(3, 1)
        draws = draw_noise(seq, sched, np.random.default_rng(0))
        with pytest.raises(NumericError) as excinfo:
            sequence_grad(TSCNetParams(tiny_params.config, tensors), seq, draws, sched)
        assert isinstance(excinfo.value.where, str)
        assert excinfo.value.exit_code == 3


def q_noisy(seq, draws, sched):
    return np.stack([q_sample(seq[i + 1], int(draws.ts[i]), draws.eps[i], sched) for i in range(len(draws))])


class TestAdam:
    def test_first_step_closed_form(self, tiny_params, sched):
        seq = markov_sequence(3, 1)
        _, grads = sequence_grad(tiny_params, seq, draw_noise(seq, sched, np.random.default_rng(0)), sched)
        updated, state = train_step(tiny_params, grads, AdamState.init(tiny_params), lr=1e-3)
        assert state.step == 1
        expected = first_step_update(grads.to_vector(), 1e-3)
        assert_allclose(updated.to_vector() - tiny_params.to_vector(), expected, rtol=1e-9, atol=1e-15)

    def test_inputs_untouched(self, tiny_params):
        before = tiny_params.to_vector().copy()
        grads = tiny_params.from_vector(np.ones(tiny_params.n_params()))
        train_step(tiny_params, grads, AdamState.init(tiny_params), lr=0.1)
        assert_array_equal(tiny_params.to_vector(), before)

    @pytest.mark.parametrize("lr", [0.0, -1e-3])
    def test_rejects_nonpositive_lr(self, tiny_params, lr):
        with pytest.raises(ConfigError):
            train_step(tiny_params, tiny_params.zeros_like(), AdamState.init(tiny_params), lr=lr)

    def test_zero_gradient(self, tiny_params):
        zero = tiny_params.zeros_like()
        updated, _ = train_step(tiny_params, zero, AdamState.init(tiny_params), lr=0.1)
        assert_array_equal(updated.to_vector(), tiny_params.to_vector())
        ones = tiny_params.from_vector(np.ones(tiny_params.n_params()))
        _, decayed = train_step(tiny_params, zero, AdamState(m=ones, v=ones, step=3), lr=0.1)
        assert_allclose(decayed.m.to_vector(), 0.9, rtol=1e-15)
        assert_allclose(decayed.v.to_vector(), 0.999, rtol=1e-15)
        assert decayed.step == 4

    def test_global_norm(self, tiny_params):
        ones = tiny_params.from_vector(np.ones(tiny_params.n_params()))
        assert global_grad_norm(ones) == pytest.approx(math.sqrt(tiny_params.n_params()))


class TestTrainer:
    def windows(self):
        return [w for s in range(4) for w in sequence_windows(markov_sequence(6, 20 + s), 3)]

    def test_moving_average(self):
        assert moving_average([1.0, 3.0, 5.0, 7.0], 2) == [1.0, 2.0, 4.0, 6.0]
        with pytest.raises(ConfigError):
            moving_average([1.0], 0)

    def test_loss_decreases(self, tiny_params, sched):
        trainer = Trainer(tiny_params, sched, smoothing=5)
        result = trainer.fit(self.windows(), steps=60, batch_size=4, stream=RngStream(1), lr=0.05)
        assert len(result.losses) == 60
        assert len(result.smoothed) == 60
        assert np.mean(result.losses[-15:]) < 0.8 * np.mean(result.losses[:5])

    def test_deterministic_across_threads(self, tiny_params, sched):
        a = Trainer(tiny_params, sched, threads=1).fit(self.windows(), 3, 3, RngStream(2), lr=1e-2)
        b = Trainer(tiny_params, sched, threads=4).fit(self.windows(), 3, 3, RngStream(2), lr=1e-2)
        assert a.losses == b.losses
        assert_array_equal(a.params.to_vector(), b.params.to_vector())

    def test_zero_steps_keeps_params(self, tiny_params, sched):
        result = Trainer(tiny_params, sched).fit(self.windows(), 0, 2, RngStream(3))
        assert result.losses == []
        assert_array_equal(result.params.to_vector(), tiny_params.to_vector())

    def test_short_time_table_rejected(self, tiny_config, sched, stream):
        params = TSCNetParams.init(tiny_config.model_copy(update={"T": 5}), stream.generator())
        with pytest.raises(ConfigError):
            grad_params(params, [markov_sequence(3, 0)], sched, np.random.default_rng(0))


class TestCheckpoint:
    def test_round_trip(self, tiny_params, tmp_path):
        save_checkpoint(tmp_path / "ckpt", tiny_params, meta={"schedule": {"T": 20}})
        loaded, meta = load_checkpoint(tmp_path / "ckpt")
        assert loaded.config == tiny_params.config
        assert meta == {"schedule": {"T": 20}}
        for name in tiny_params.names():
            assert_array_equal(loaded.tensors[name], tiny_params.tensors[name])

    def test_header_lists_every_tensor(self, tiny_params, tmp_path):
        save_checkpoint(tmp_path, tiny_params)
        header = read_json(tmp_path / "header.json")
        assert [entry["name"] for entry in header["tensors"]] == tiny_params.names()
        assert header["tensors"][0]["file"] == tensor_file(tiny_params.names()[0])

    def test_wrong_tensor_shape(self, tiny_params, tmp_path):
        save_checkpoint(tmp_path, tiny_params)
        save_array(tmp_path / tensor_file("out.w"), np.zeros((2, 2)))
        with pytest.raises(ArrayFormatError):
            load_checkpoint(tmp_path)

    def test_wrong_format_tag(self, tiny_params, tmp_path):
        save_checkpoint(tmp_path, tiny_params)
        header = read_json(tmp_path / "header.json")
        header["format"] = "something-else"
        write_json(tmp_path / "header.json", header)
        with pytest.raises(ArrayFormatError):
            load_checkpoint(tmp_path)

    def test_invalid_config(self, tiny_params, tmp_path):
        save_checkpoint(tmp_path, tiny_params)
        header = read_json(tmp_path / "header.json")
        header["config"]["patch"] = 3
        write_json(tmp_path / "header.json", header)
        with pytest.raises(ConfigError):
            load_checkpoint(tmp_path)
