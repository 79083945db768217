"""Timing comparison of the compiled and numpy rate-kernel backends.

Run as a script:

    python benchmarks/bench_kernels.py [--samples N] [--repeats R]

Draws a desk-scale and a larger scenario, evaluates the same Monte-Carlo
batch through both backends, verifies they agree, and reports wall times.
"""

import argparse
import time

import numpy as np

from mimosel import SystemConfig, generate_stats
from mimosel._kernels import BACKEND, rate_samples_numpy
from mimosel.channel import draw_iid_factors
from mimosel.optindep import uniform_covariances
from mimosel.optjoint import random_selection
from mimosel.rates import _kernel_inputs
from mimosel.rng import DOMAIN_BASELINE, stream

try:
    from mimosel._kernels import _core

    backends = [("cython", _core.rate_samples), ("numpy", rate_samples_numpy)]
except ImportError:
    backends = [("numpy", rate_samples_numpy)]


def scenario(n_antennas, n_chains, n_users, ut_antennas, seed):
    cfg = SystemConfig.from_dict(
        {
            "n_antennas": n_antennas,
            "n_chains": n_chains,
            "n_users": n_users,
            "ut_antennas": ut_antennas,
            "noise_dbm": -120.0,
            "power_dbm": 10.0,
            "path_gain_db": -120.0,
            "rng_seed": seed,
        }
    )
    stats = generate_stats(cfg)
    selection = random_selection(cfg.n_antennas, cfg.n_chains, stream(seed, DOMAIN_BASELINE, 0))
    covs = uniform_covariances(cfg)
    rx_rows, cov_factors = _kernel_inputs(stats, covs, selection, cfg.noise_power)
    return stats, rx_rows, cov_factors


def bench(label, stats, rx_rows, cov_factors, n_samples, repeats, leave_one_out):
    iid = draw_iid_factors(stats, stats.config.rng_seed, 0, n_samples)
    results = {}
    for name, kernel in backends:
        best = np.inf
        for _ in range(repeats):
            start = time.perf_counter()
            rates, rates_without = kernel(
                rx_rows, stats.coupling_amps, cov_factors, iid, leave_one_out
            )
            best = min(best, time.perf_counter() - start)
        results[name] = (best, rates, rates_without)
    baseline = results["numpy"]
    for name, (elapsed, rates, rates_without) in results.items():
        assert np.allclose(rates, baseline[1], rtol=1e-10, atol=1e-12)
        if leave_one_out:
            assert np.allclose(rates_without, baseline[2], rtol=1e-10, atol=1e-12)
        speedup = baseline[0] / elapsed
        print(
            f"{label:28s} {name:7s} {elapsed * 1e3:9.2f} ms "
            f"({n_samples / elapsed:9.0f} samples/s, x{speedup:.2f} vs numpy)"
        )


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--samples", type=int, default=2000)
    parser.add_argument("--repeats", type=int, default=3)
    args = parser.parse_args()

    print(f"active package backend: {BACKEND}")
    desk = scenario(32, 8, 4, 2, seed=1)
    big = scenario(128, 16, 8, 4, seed=2)
    for label, payload, loo in (
        ("desk joint (N=32,L=8)", desk, False),
        ("desk leave-one-out", desk, True),
        ("paper-scale joint (N=128)", big, False),
        ("paper-scale leave-one-out", big, True),
    ):
        stats, rx_rows, cov_factors = payload
        bench(label, stats, rx_rows, cov_factors, args.samples, args.repeats, loo)


if __name__ == "__main__":
    main()
