"""Batched numpy implementation of the per-sample rate kernel."""

import numpy as np


def rate_samples(rx_rows, coupling_amps, cov_factors, iid_factors, leave_one_out):
    """Instantaneous achievable rates for a batch of channel realizations.

    Parameters
    ----------
    rx_rows : list of (n_sel, n_antennas) complex arrays
        Selected rows of each user's receive basis.
    coupling_amps : list of (n_antennas, m_k) real arrays
        Amplitude couplings.
    cov_factors : list of (m_k, r_k) complex arrays
        Factor of each user's transmit covariance expressed in its transmit
        basis, prescaled by the reciprocal noise standard deviation: the
        user's contribution to the whitened receive Gram is G @ G^H with
        G = rx_rows @ (coupling_amps * iid) @ cov_factor.
    iid_factors : list of (n_samples, n_antennas, m_k) complex arrays
        Pre-drawn i.i.d. beam factors.
    leave_one_out : bool
        Also return, for each user, the rate of the system with that user
        removed.

    Returns
    -------
    (rates, rates_without) with rates of shape (n_samples,) in nats and
    rates_without of shape (n_users, n_samples), or None when not requested.
    """
    n_users = len(rx_rows)
    n_samples = iid_factors[0].shape[0]
    n_sel = rx_rows[0].shape[0]
    eye = np.eye(n_sel, dtype=np.complex128)
    gram = np.broadcast_to(eye, (n_samples, n_sel, n_sel)).copy()
    terms = [] if leave_one_out else None
    for k in range(n_users):
        coupled = coupling_amps[k][None, :, :] * iid_factors[k]
        shaped = np.matmul(coupled, cov_factors[k])
        projected = np.matmul(rx_rows[k], shaped)
        term = np.matmul(projected, projected.conj().swapaxes(-2, -1))
        gram += term
        if leave_one_out:
            terms.append(term)

    rates = _logdet_stack(gram)
    rates_without = None
    if leave_one_out:
        rates_without = np.empty((n_users, n_samples))
        for k in range(n_users):
            rates_without[k] = _logdet_stack(gram - terms[k])
    return rates, rates_without


def _logdet_stack(mats):
    factors = np.linalg.cholesky(mats)
    diags = np.real(np.diagonal(factors, axis1=-2, axis2=-1))
    return 2.0 * np.sum(np.log(diags), axis=-1)
