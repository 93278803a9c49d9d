import numpy as np
import pytest
from hypothesis import settings

from plapspec.graph import Multigraph
from plapspec.models import sample_er

settings.register_profile("default", deadline=None, max_examples=40)
settings.load_profile("default")


def random_connected_graph(m, rho, seed):
    """ER sample conditioned on connectivity by rejection; falls back to adding a path."""
    rng = np.random.default_rng(seed)
    for _ in range(50):
        G = sample_er(m, rho, rng)
        if G.is_connected():
            return G
    path = np.column_stack([np.arange(m - 1), np.arange(1, m)])
    return G.union(Multigraph(m, path))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
