"""Instantaneous and Monte-Carlo ergodic sum-rates.

Rates are computed on the selected-antenna subsystem: with selection operator
S, user channels H_k and transmit covariances Q_k, the joint-decoding rate of
one realization is

    log det(I + (1/noise) * sum_k S H_k Q_k H_k^H S^H)

in nats. Independent decoding charges each user the rate loss its removal
would cause, summed over users; both are estimated by averaging over seeded
channel realizations.
"""

import numpy as np

from . import _kernels
from .channel import ChannelSample, ChannelStats, draw_iid_factors
from .linalg import logdet_hermitian, psd_factor
from .structures import RateEstimate, Selection, check_covariances

MODES = ("joint", "independent")


def _selected_gram(channels, covs, selection, noise_power):
    rows = list(selection.indices)
    n_sel = len(rows)
    gram = np.eye(n_sel, dtype=np.complex128)
    terms = []
    for chan, cov in zip(channels, covs):
        sub = chan[rows, :]
        term = sub @ np.asarray(cov, dtype=np.complex128) @ sub.conj().T / noise_power
        terms.append(term)
        gram += term
    return gram, terms


def _check_inputs(sample, covs, selection, noise_power):
    if noise_power <= 0:
        raise ValueError("noise power must be strictly positive")
    ut_antennas = [chan.shape[1] for chan in sample.channels]
    check_covariances(covs, ut_antennas)
    n = sample.channels[0].shape[0]
    if selection.n_antennas != n:
        raise ValueError("selection dimension does not match the channels")


def instant_rate_joint(sample: ChannelSample, covs, selection: Selection, noise_power: float) -> float:
    """Joint-decoding sum-rate of one realization, in nats."""
    _check_inputs(sample, covs, selection, noise_power)
    gram, _ = _selected_gram(sample.channels, covs, selection, noise_power)
    return logdet_hermitian(gram)


def instant_rate_without_k(
    sample: ChannelSample, covs, selection: Selection, noise_power: float, user: int
) -> float:
    """Joint-decoding sum-rate of the same realization with one user removed."""
    _check_inputs(sample, covs, selection, noise_power)
    if not 0 <= user < len(sample.channels):
        raise ValueError(f"user index out of range: {user}")
    gram, terms = _selected_gram(sample.channels, covs, selection, noise_power)
    return logdet_hermitian(gram - terms[user])


def instant_rate_indep(
    sample: ChannelSample, covs, selection: Selection, noise_power: float
) -> float:
    """Independent-decoding sum-rate of one realization, in nats."""
    _check_inputs(sample, covs, selection, noise_power)
    gram, terms = _selected_gram(sample.channels, covs, selection, noise_power)
    total = logdet_hermitian(gram)
    value = 0.0
    for term in terms:
        value += total - logdet_hermitian(gram - term)
    return value


def _kernel_inputs(stats: ChannelStats, covs, selection: Selection, noise_power: float):
    rows = list(selection.indices)
    rx_rows, cov_factors = [], []
    scale = 1.0 / np.sqrt(noise_power)
    for k in range(stats.config.n_users):
        rx_rows.append(np.ascontiguousarray(stats.rx_bases[k][rows, :]))
        basis = stats.tx_bases[k]
        projected = basis.conj().T @ np.asarray(covs[k], dtype=np.complex128) @ basis
        projected = 0.5 * (projected + projected.conj().T)
        cov_factors.append(np.ascontiguousarray(psd_factor(projected) * scale))
    return rx_rows, cov_factors


def sample_rates(
    stats: ChannelStats,
    covs,
    selection: Selection,
    noise_power: float,
    seed: int,
    start: int,
    count: int,
    leave_one_out: bool,
):
    """Per-sample rates for Monte-Carlo samples [start, start+count)."""
    rx_rows, cov_factors = _kernel_inputs(stats, covs, selection, noise_power)
    iid = draw_iid_factors(stats, seed, start, count)
    return _kernels.rate_samples(
        rx_rows, stats.coupling_amps, cov_factors, iid, leave_one_out
    )


def mc_sum_rate(
    stats: ChannelStats,
    covs,
    selection: Selection,
    noise_power: float,
    mode: str = "joint",
    n_samples: int = 1000,
    seed: int = 0,
    batch: int = 256,
) -> RateEstimate:
    """Monte-Carlo ergodic sum-rate estimate.

    Sample i is drawn from the stream addressed by (seed, i), so the estimate
    is independent of batching and evaluation order. The standard error is
    the sample standard deviation over realizations divided by sqrt(n); a
    single-sample estimate reports stderr 0 and is flagged low-confidence.
    """
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    if n_samples < 1:
        raise ValueError("n_samples must be at least 1")
    if noise_power <= 0:
        raise ValueError("noise power must be strictly positive")
    check_covariances(covs, stats.config.ut_antennas)
    if selection.n_antennas != stats.config.n_antennas:
        raise ValueError("selection dimension does not match the statistics")

    leave_one_out = mode == "independent"
    values = np.empty(n_samples)
    done = 0
    while done < n_samples:
        count = min(batch, n_samples - done)
        rates, rates_without = sample_rates(
            stats, covs, selection, noise_power, seed, done, count, leave_one_out
        )
        if leave_one_out:
            n_users = stats.config.n_users
            values[done : done + count] = n_users * rates - rates_without.sum(axis=0)
        else:
            values[done : done + count] = rates
        done += count

    mean = float(np.mean(values))
    stderr = 0.0 if n_samples == 1 else float(np.std(values, ddof=1) / np.sqrt(n_samples))
    return RateEstimate(mean, stderr, n_samples)
