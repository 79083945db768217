"""Shared value types and their validation."""

import numpy as np
import pytest

from mimosel import Selection
from mimosel.structures import check_covariances, covariances_from_powers

from conftest import make_config, scalar_stats


def test_selection_sorts_indices():
    sel = Selection((5, 1, 3), 8)
    assert sel.indices == (1, 3, 5)
    assert len(sel) == 3


def test_selection_rejects_duplicates():
    with pytest.raises(ValueError, match="distinct"):
        Selection((1, 1, 2), 8)


def test_selection_rejects_out_of_range():
    with pytest.raises(ValueError):
        Selection((0, 8), 8)
    with pytest.raises(ValueError):
        Selection((-1, 2), 8)


def test_selection_rejects_empty():
    with pytest.raises(ValueError):
        Selection((), 8)


def test_covariances_from_powers_reconstruction():
    from mimosel import generate_stats

    stats = generate_stats(make_config(n_antennas=6, n_chains=2, n_users=2, rng_seed=9))
    powers = [np.array([0.7, 0.3]) * stats.config.power_budgets[k] for k in range(2)]
    covs = covariances_from_powers(stats, powers)
    for k, cov in enumerate(covs):
        basis = stats.tx_bases[k]
        expected = (basis * powers[k]) @ basis.conj().T
        np.testing.assert_allclose(cov, expected, atol=1e-12)
        assert np.real(np.trace(cov)) == pytest.approx(np.sum(powers[k]), rel=1e-12)


def test_check_covariances_accepts_valid():
    stats = scalar_stats()
    check_covariances([np.eye(1)], stats.config.ut_antennas)


def test_check_covariances_rejects_wrong_shape():
    with pytest.raises(Exception, match="shape"):
        check_covariances([np.eye(3)], [2])


def test_check_covariances_rejects_non_hermitian():
    mat = np.array([[1.0, 1.0], [0.0, 1.0]], dtype=np.complex128)
    with pytest.raises(Exception, match="Hermitian"):
        check_covariances([mat], [2])


def test_check_covariances_enforces_budget():
    with pytest.raises(Exception, match="budget"):
        check_covariances([np.eye(2)], [2], budgets=[1.0])
    check_covariances([np.eye(2) * 0.5], [2], budgets=[1.0])
