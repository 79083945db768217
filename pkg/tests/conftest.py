import numpy as np
import pytest

from mimosel import ChannelStats, SystemConfig, generate_stats

DESK_KEYS = {
    "n_antennas": 32,
    "n_chains": 8,
    "n_users": 4,
    "ut_antennas": 2,
    "noise_dbm": -120.0,
    "power_dbm": 10.0,
    "path_gain_db": -120.0,
    "rng_seed": 1000,
}


def make_config(**overrides) -> SystemConfig:
    return SystemConfig.from_dict({**DESK_KEYS, **overrides})


def scalar_stats(noise_power=1.0, power=1.0) -> ChannelStats:
    """Single-antenna single-user system with unit coupling."""
    config = SystemConfig(
        n_antennas=1,
        n_chains=1,
        n_users=1,
        ut_antennas=[1],
        noise_power=noise_power,
        power_budgets=[power],
        path_gains=[1.0],
    )
    return ChannelStats(
        config=config,
        rx_bases=[np.eye(1, dtype=np.complex128)],
        tx_bases=[np.eye(1, dtype=np.complex128)],
        coupling_amps=[np.ones((1, 1))],
    )


@pytest.fixture(scope="session")
def desk_stats():
    return generate_stats(make_config())


@pytest.fixture(scope="session")
def small_stats():
    return generate_stats(
        make_config(n_antennas=8, n_chains=3, n_users=2, rng_seed=7)
    )
