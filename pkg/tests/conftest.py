import numpy as np
import pytest

import p2pkinetics as pk

FOCUS = pk.FastTrackParams(1.0, 0.1, 0.5)   # beta*lambda = 0.1 < 4*mu^2 = 1
NODE = pk.FastTrackParams(4.0, 1.0, 0.5)    # beta*lambda = 4 > 4*mu^2 = 1


@pytest.fixture
def ft_focus():
    return pk.fasttrack(FOCUS)


@pytest.fixture
def ft_node():
    return pk.fasttrack(NODE)


@pytest.fixture
def bt_closed():
    return pk.bittorrent_closed(0.5)


@pytest.fixture
def influx_only():
    """Single constant-rate source reaction; drift is constant, Jacobian zero."""
    arrive = pk.reaction_from_counts(
        ["x"], {}, {"x": 1}, pk.RateLaw("lambda"), label="arrive"
    )
    return pk.validated(
        pk.make_scheme(["x"], [arrive], parameters={"lambda": 1.0})
    )


@pytest.fixture
def chunk_params_m4():
    return pk.ChunkModelParams(
        m=4,
        lambda_=1.2,
        mu=0.4,
        beta=0.3,
        beta_i=(0.11, 0.12, 0.13),
        delta_i=(0.21, 0.22, 0.99),
        gamma_i=(0.31, 0.32),
        gamma_last_peer=0.41,
        gamma_last_seed=0.43,
    )


def random_positive_states(n_species, count, seed, low=0.1, high=10.0):
    rng = np.random.default_rng(seed)
    return rng.uniform(low, high, size=(count, n_species))
