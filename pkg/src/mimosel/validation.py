"""Cross-check suites pairing the optimized code paths with their oracles.

Two suites: "kernels" exercises the numerical building blocks against
closed-form and brute-force references; "de-accuracy" compares the rate
approximations with Monte-Carlo averages on desk-scale instances. Every
check produces one report row; a suite passes when all its rows pass.
"""

from dataclasses import dataclass

import numpy as np

from .channel import generate_stats, sample_channel
from .config import SystemConfig
from .detequiv import de_rate_indep, de_rate_joint, solve_fp_indep, solve_fp_joint
from .optindep import mm_linearize, solve_relaxed, uniform_covariances
from .optjoint import greedy_select, rank1_update, random_selection, uniform_powers, waterfill
from .oracles import (
    exact_siso_rate,
    exhaustive_select,
    pg_solve_relaxed,
    rate_joint_fullsize,
    scalar_fp_reference,
    scalar_rate,
)
from .rates import instant_rate_joint, mc_sum_rate
from .rng import DOMAIN_BASELINE, stream
from .structures import Selection

SUITES = ("kernels", "de-accuracy", "all")

_DESK = {
    "n_antennas": 32,
    "n_chains": 8,
    "n_users": 4,
    "ut_antennas": 2,
    "noise_dbm": -120.0,
    "power_dbm": 10.0,
    "path_gain_db": -120.0,
    "rng_seed": 0,
}


@dataclass(frozen=True)
class OracleReport:
    """One oracle-vs-candidate comparison."""

    name: str
    instance: str
    reference: float
    candidate: float
    tolerance: float

    @property
    def abs_error(self) -> float:
        return abs(self.candidate - self.reference)

    @property
    def rel_error(self) -> float:
        if self.reference == 0.0:
            return self.abs_error
        return self.abs_error / abs(self.reference)

    @property
    def passed(self) -> bool:
        return self.abs_error <= self.tolerance or self.rel_error <= self.tolerance


def _report(name, instance, reference, candidate, tolerance) -> OracleReport:
    return OracleReport(name, instance, float(reference), float(candidate), tolerance)


def run_kernels_suite() -> list:
    """Numerical building blocks against closed-form/brute-force references."""
    reports = []

    gain, eff = scalar_fp_reference(1.0, 1.0, 1.0)
    golden = (np.sqrt(5.0) - 1.0) / 2.0
    reports.append(_report("scalar-fp-gain", "noise=coupling=power=1", golden, gain, 1e-10))
    reports.append(_report("scalar-fp-eff", "noise=coupling=power=1", golden, eff, 1e-10))
    reports.append(
        _report("scalar-de-rate", "noise=coupling=power=1",
                2.0 * np.log(1.0 + golden) - golden * golden,
                scalar_rate(1.0, 1.0, 1.0), 1e-10)
    )
    reports.append(
        _report("siso-exact-rate", "snr=1", 0.5963473623231941, exact_siso_rate(1.0, 1.0, 1.0), 1e-10)
    )

    result = waterfill(np.array([4.0, 1.0]), 1.0)
    reports.append(_report("waterfill-strong", "gains=[4,1] budget=1", 0.875, result.powers[0], 1e-9))
    reports.append(_report("waterfill-weak", "gains=[4,1] budget=1", 0.125, result.powers[1], 1e-9))

    rng = np.random.default_rng(11)
    worst = 0.0
    for _ in range(20):
        dim = int(rng.integers(2, 9))
        raw = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
        psd = raw @ raw.conj().T + np.eye(dim)
        vec = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
        direct = np.linalg.inv(np.linalg.inv(psd) + np.outer(vec, vec.conj()))
        worst = max(worst, float(np.linalg.norm(rank1_update(psd, vec) - direct)))
    reports.append(_report("rank-one-update", "20 random PSD instances", 0.0, worst, 1e-10))

    worst_ratio = 1.0
    for trial in range(10):
        trial_rng = np.random.default_rng(500 + trial)
        raw = trial_rng.standard_normal((10, 10)) + 1j * trial_rng.standard_normal((10, 10))
        gram = raw @ raw.conj().T / 10.0

        def objective(indices):
            rows = list(indices)
            sub = gram[np.ix_(rows, rows)]
            sign, logdet = np.linalg.slogdet(np.eye(len(rows)) + sub)
            return float(logdet)

        _, best = exhaustive_select(objective, 10, 3)
        achieved = objective(greedy_select(gram, 3).selection.indices)
        worst_ratio = min(worst_ratio, achieved / best)
    reports.append(_report("greedy-vs-exhaustive", "10 trials N=10 L=3", 1.0, worst_ratio, 0.05))

    cfg = SystemConfig.from_dict({**_DESK, "n_antennas": 6, "n_chains": 3, "rng_seed": 3})
    stats = generate_stats(cfg)
    sel = Selection((0, 2, 5), 6)
    covs = uniform_covariances(cfg)
    worst = 0.0
    for draw in range(20):
        sample = sample_channel(stats, 900 + draw)
        fast = instant_rate_joint(sample, covs, sel, cfg.noise_power)
        full = rate_joint_fullsize(sample, covs, sel, cfg.noise_power)
        worst = max(worst, abs(fast - full))
    reports.append(_report("rate-form-consistency", "20 desk draws", 0.0, worst, 1e-10))

    worst = 0.0
    for trial in range(5):
        trial_rng = np.random.default_rng(700 + trial)
        raw = trial_rng.standard_normal((4, 4)) + 1j * trial_rng.standard_normal((4, 4))
        gain = raw @ raw.conj().T / 4.0
        raw = trial_rng.standard_normal((4, 4)) + 1j * trial_rng.standard_normal((4, 4))
        ref = raw @ raw.conj().T / 8.0
        penalty = mm_linearize(ref, [gain * 0.5])
        budget = 2.0
        fast = solve_relaxed(gain, penalty, budget, 3)
        slow, _ = pg_solve_relaxed(gain, penalty, budget, 3)

        def objective(q):
            sign, logdet = np.linalg.slogdet(np.eye(4) + gain @ q)
            return 3.0 * float(logdet) - float(np.real(np.trace(penalty @ q)))

        worst = max(worst, abs(objective(fast) - objective(slow)))
    reports.append(_report("relaxed-solver-vs-pg", "5 random 4x4 instances", 0.0, worst, 1e-5))
    return reports


def run_de_accuracy_suite(n_instances: int = 5, n_samples: int = 2000) -> list:
    """Rate approximations against Monte-Carlo on seeded desk instances."""
    reports = []
    for inst in range(n_instances):
        cfg = SystemConfig.from_dict({**_DESK, "rng_seed": 1000 + inst})
        stats = generate_stats(cfg)
        selection = random_selection(
            cfg.n_antennas, cfg.n_chains, stream(cfg.rng_seed, DOMAIN_BASELINE, 0)
        )
        covs = uniform_covariances(cfg)
        powers = uniform_powers(cfg)

        fp = solve_fp_joint(stats, powers, selection, cfg.noise_power)
        de = de_rate_joint(stats, powers, selection, cfg.noise_power, fp)
        mc = mc_sum_rate(stats, covs, selection, cfg.noise_power,
                         mode="joint", n_samples=n_samples, seed=cfg.rng_seed)
        reports.append(
            _report("de-accuracy-joint", f"desk seed {cfg.rng_seed}", mc.mean_nats, de, 0.03)
        )

        fpi = solve_fp_indep(stats, covs, selection, cfg.noise_power)
        dei = de_rate_indep(stats, covs, selection, cfg.noise_power, fpi)
        mci = mc_sum_rate(stats, covs, selection, cfg.noise_power,
                          mode="independent", n_samples=n_samples, seed=cfg.rng_seed)
        reports.append(
            _report("de-accuracy-indep", f"desk seed {cfg.rng_seed}", mci.mean_nats, dei, 0.03)
        )
    return reports


def run_suite(name: str) -> list:
    if name == "kernels":
        return run_kernels_suite()
    if name == "de-accuracy":
        return run_de_accuracy_suite()
    if name == "all":
        return run_kernels_suite() + run_de_accuracy_suite()
    raise ValueError(f"unknown validation suite: {name!r}")
