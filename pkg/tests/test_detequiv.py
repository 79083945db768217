"""Deterministic-equivalent rate approximations and their coupled systems."""

import dataclasses

import numpy as np
import pytest

from mimosel import (
    ConfigError,
    ConvergenceError,
    Selection,
    de_rate_indep,
    de_rate_joint,
    generate_stats,
    solve_fp_indep,
    solve_fp_joint,
)
from mimosel.structures import covariances_from_powers

from conftest import make_config, scalar_stats

GOLDEN = 0.6180339887498949  # positive root of x * (1 + x) = 1
SCALAR_RATE = 0.580457638869  # 2 ln(1 + g) - g^2 at g = GOLDEN


def _chain_selection(stats):
    return Selection(tuple(range(stats.config.n_chains)), stats.config.n_antennas)


def _uniform_powers(stats):
    cfg = stats.config
    return [
        np.full(m, cfg.power_budgets[k] / m)
        for k, m in enumerate(cfg.ut_antennas)
    ]


def test_scalar_fixed_point_hits_golden_ratio():
    stats = scalar_stats()
    sel = Selection((0,), 1)
    state = solve_fp_joint(stats, [np.array([1.0])], sel, 1.0)
    assert state.converged
    assert state.rx_gains[0][0] == pytest.approx(GOLDEN, abs=1e-10)
    assert state.eff_powers[0][0] == pytest.approx(GOLDEN, abs=1e-10)
    rate = de_rate_joint(stats, [np.array([1.0])], sel, 1.0, state)
    assert rate == pytest.approx(SCALAR_RATE, abs=1e-6)


def test_zero_power_closed_form(small_stats):
    # silent transmitters: rate 0, gains reduce to selected-column energies
    sel = _chain_selection(small_stats)
    cfg = small_stats.config
    powers = [np.zeros(m) for m in cfg.ut_antennas]
    state = solve_fp_joint(small_stats, powers, sel, cfg.noise_power)
    assert state.converged
    assert de_rate_joint(small_stats, powers, sel, cfg.noise_power, state) == pytest.approx(
        0.0, abs=1e-12
    )
    rows = list(sel.indices)
    for k in range(cfg.n_users):
        np.testing.assert_allclose(state.eff_powers[k], 0.0, atol=1e-15)
        expected = np.sum(np.abs(small_stats.rx_bases[k][rows, :]) ** 2, axis=0)
        np.testing.assert_allclose(
            state.rx_gains[k], expected / cfg.noise_power, atol=1e-12
        )


def test_auxiliaries_respect_bounds(desk_stats):
    sel = _chain_selection(desk_stats)
    cfg = desk_stats.config
    powers = _uniform_powers(desk_stats)
    state = solve_fp_joint(desk_stats, powers, sel, cfg.noise_power)
    assert state.converged
    assert state.residual <= cfg.fp_tol
    rows = list(sel.indices)
    for k in range(cfg.n_users):
        gains = np.asarray(state.rx_gains[k])
        cap = np.sum(np.abs(desk_stats.rx_bases[k][rows, :]) ** 2, axis=0) / cfg.noise_power
        assert np.all(gains >= 0.0)
        assert np.all(gains <= cap + 1e-9 * np.max(cap))
        eff = np.asarray(state.eff_powers[k])
        assert np.all(eff >= 0.0)
        assert np.all(eff <= np.asarray(powers[k]) + 1e-12)


def test_rate_rejects_unconverged_state(small_stats):
    sel = _chain_selection(small_stats)
    cfg = small_stats.config
    powers = _uniform_powers(small_stats)
    state = solve_fp_joint(small_stats, powers, sel, cfg.noise_power)
    broken = dataclasses.replace(state, converged=False)
    with pytest.raises(ConvergenceError):
        de_rate_joint(small_stats, powers, sel, cfg.noise_power, broken)


def test_rate_matches_recorded_value(small_stats):
    sel = _chain_selection(small_stats)
    cfg = small_stats.config
    powers = _uniform_powers(small_stats)
    state = solve_fp_joint(small_stats, powers, sel, cfg.noise_power)
    rate = de_rate_joint(small_stats, powers, sel, cfg.noise_power, state)
    assert rate == state.value


def test_solver_is_deterministic(small_stats):
    sel = _chain_selection(small_stats)
    cfg = small_stats.config
    powers = _uniform_powers(small_stats)
    a = solve_fp_joint(small_stats, powers, sel, cfg.noise_power)
    b = solve_fp_joint(small_stats, powers, sel, cfg.noise_power)
    assert a.value == b.value
    assert a.iterations == b.iterations
    for ga, gb in zip(a.rx_gains, b.rx_gains):
        np.testing.assert_array_equal(ga, gb)


def test_single_user_modes_agree():
    stats = generate_stats(make_config(n_antennas=8, n_chains=3, n_users=1, rng_seed=7))
    sel = _chain_selection(stats)
    cfg = stats.config
    powers = _uniform_powers(stats)
    joint_state = solve_fp_joint(stats, powers, sel, cfg.noise_power)
    joint = de_rate_joint(stats, powers, sel, cfg.noise_power, joint_state)
    covs = covariances_from_powers(stats, powers)
    indep_state = solve_fp_indep(stats, covs, sel, cfg.noise_power)
    indep = de_rate_indep(stats, covs, sel, cfg.noise_power, indep_state)
    assert indep == pytest.approx(joint, rel=1e-6)


def test_independent_rate_zero_covariances(small_stats):
    sel = _chain_selection(small_stats)
    cfg = small_stats.config
    covs = [np.zeros((m, m)) for m in cfg.ut_antennas]
    state = solve_fp_indep(small_stats, covs, sel, cfg.noise_power)
    assert state.converged
    assert de_rate_indep(small_stats, covs, sel, cfg.noise_power, state) == pytest.approx(
        0.0, abs=1e-12
    )


def test_independent_state_tracks_leave_one_out(small_stats):
    sel = _chain_selection(small_stats)
    cfg = small_stats.config
    covs = covariances_from_powers(small_stats, _uniform_powers(small_stats))
    state = solve_fp_indep(small_stats, covs, sel, cfg.noise_power)
    assert state.converged
    assert len(state.minus) == cfg.n_users
    for k, sub in enumerate(state.minus):
        assert k not in sub.users
        assert len(sub.users) == cfg.n_users - 1
    # aggregate convergence metadata covers every subsystem
    assert state.iterations >= state.full.iterations
    assert state.residual >= state.full.residual


def test_independent_rate_below_joint(desk_stats):
    sel = _chain_selection(desk_stats)
    cfg = desk_stats.config
    powers = _uniform_powers(desk_stats)
    joint_state = solve_fp_joint(desk_stats, powers, sel, cfg.noise_power)
    joint = de_rate_joint(desk_stats, powers, sel, cfg.noise_power, joint_state)
    covs = covariances_from_powers(desk_stats, powers)
    indep_state = solve_fp_indep(desk_stats, covs, sel, cfg.noise_power)
    indep = de_rate_indep(desk_stats, covs, sel, cfg.noise_power, indep_state)
    assert indep <= joint + 1e-9


def test_rejects_nonpositive_noise(small_stats):
    sel = _chain_selection(small_stats)
    powers = _uniform_powers(small_stats)
    with pytest.raises(ValueError, match="noise"):
        solve_fp_joint(small_stats, powers, sel, 0.0)


def test_rejects_negative_powers(small_stats):
    sel = _chain_selection(small_stats)
    powers = _uniform_powers(small_stats)
    powers[0] = powers[0].copy()
    powers[0][0] = -1.0
    with pytest.raises(ConfigError, match="negative"):
        solve_fp_joint(small_stats, powers, sel, small_stats.config.noise_power)
