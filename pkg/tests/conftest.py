import numpy as np
import pytest

from data.normalize import normalize_sequence
from data.phantom import make_phantom_sequence
from denoiser.gaussian import GaussianPriorSpec
from denoiser.tsc_net import TSCNetParams
from diffusion.schedule import make_schedule
from models.data_models import PhantomSpec
from models.net_models import TSCConfig
from numerics.arrays import complex_normal
from numerics.rng import RngStream


@pytest.fixture
def stream():
    return RngStream(seed=1234)


@pytest.fixture
def rng(stream):
    return stream.generator()


@pytest.fixture
def sched():
    return make_schedule(20)


@pytest.fixture
def random_image(rng):
    def make(n=8, m=None):
        return complex_normal(rng, (n, m or n))
    return make


@pytest.fixture
def tiny_config():
    """A TSC net with a few hundred parameters."""
    return TSCConfig(image_size=4, patch=2, embed_dim=4, layers=1, ffn_mult=2, window=3, T=20, init_scale=0.3)


@pytest.fixture
def tiny_params(tiny_config, stream):
    return TSCNetParams.init(tiny_config, stream.named("init").generator())


@pytest.fixture
def gaussian_prior():
    n = 8
    axis = np.linspace(-1.0, 1.0, n)
    mean = np.outer(axis, axis) * (1.0 + 0.5j)
    var = np.full((n, n), 0.25)
    return GaussianPriorSpec(mean, var)


@pytest.fixture
def phantom():
    spec = PhantomSpec(n=16, N=5, n_ellipses=4)
    return normalize_sequence(make_phantom_sequence(spec, RngStream(7).generator()))
