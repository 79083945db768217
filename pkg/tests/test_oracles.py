"""Closed-form and brute-force reference implementations."""

import math

import numpy as np
import pytest
import scipy.special

from mimosel import Selection
from mimosel.optjoint import selection_objective
from mimosel.oracles import (
    exact_siso_rate,
    exhaustive_select,
    exp_integral_e1,
    pg_solve_relaxed,
    scalar_fp_reference,
    scalar_rate,
)

GOLDEN = 0.6180339887498949


def test_exhaustive_diagonal_example():
    gram = np.diag([4.0, 1.0, 0.0]).astype(np.complex128)

    def objective(subset):
        return selection_objective(gram, Selection(subset, 3))

    subset, value = exhaustive_select(objective, 3, 2)
    assert subset == (0, 1)
    assert value == pytest.approx(np.log(10.0), abs=1e-12)


def test_exhaustive_full_pick():
    subset, value = exhaustive_select(lambda s: float(len(s)), 4, 4)
    assert subset == (0, 1, 2, 3)
    assert value == 4.0


def test_exhaustive_constant_objective_takes_first_subset():
    subset, value = exhaustive_select(lambda s: 1.0, 5, 2)
    assert subset == (0, 1)
    assert value == 1.0


def test_exhaustive_rejects_bad_sizes():
    with pytest.raises(ValueError):
        exhaustive_select(lambda s: 0.0, 3, 4)
    with pytest.raises(ValueError):
        exhaustive_select(lambda s: 0.0, 3, 0)


def test_scalar_reference_golden_ratio():
    gain, eff = scalar_fp_reference(1.0, 1.0, 1.0)
    assert gain == pytest.approx(GOLDEN, abs=1e-10)
    assert eff == pytest.approx(GOLDEN, abs=1e-10)


def test_scalar_reference_zero_power():
    gain, eff = scalar_fp_reference(2.0, 1.5, 0.0)
    assert gain == pytest.approx(0.5, abs=1e-15)
    assert eff == 0.0


def test_scalar_reference_zero_coupling():
    gain, eff = scalar_fp_reference(4.0, 0.0, 3.0)
    assert gain == pytest.approx(0.25, abs=1e-15)
    assert eff == 3.0


def test_scalar_reference_noise_dominated_limits():
    gain, eff = scalar_fp_reference(1e6, 1.0, 1.0)
    assert 0.0 <= gain <= 1e-5
    assert abs(eff - 1.0) <= 1e-5


def test_scalar_reference_satisfies_both_equations():
    rng = np.random.default_rng(0)
    for _ in range(200):
        noise = float(rng.uniform(0.1, 10.0))
        coupling = float(rng.uniform(0.0, 5.0))
        power = float(rng.uniform(0.0, 5.0))
        gain, eff = scalar_fp_reference(noise, coupling, power)
        assert gain == pytest.approx(1.0 / (noise + coupling * eff), rel=1e-12)
        if coupling > 0 and power > 0:
            assert eff == pytest.approx(power / (1.0 + power * coupling * gain), rel=1e-12)


def test_scalar_reference_input_validation():
    with pytest.raises(ValueError):
        scalar_fp_reference(0.0, 1.0, 1.0)
    with pytest.raises(ValueError):
        scalar_fp_reference(1.0, -1.0, 1.0)
    with pytest.raises(ValueError):
        scalar_fp_reference(1.0, 1.0, -1.0)


def test_scalar_rate_golden_value():
    assert scalar_rate(1.0, 1.0, 1.0) == pytest.approx(0.580457638869, abs=1e-6)


def test_exp_integral_matches_scipy():
    for x in np.logspace(-6, 2, 60):
        assert exp_integral_e1(float(x)) == pytest.approx(
            float(scipy.special.exp1(x)), rel=1e-10
        )


def test_exp_integral_rejects_nonpositive():
    with pytest.raises(ValueError):
        exp_integral_e1(0.0)
    with pytest.raises(ValueError):
        exp_integral_e1(-1.0)


def test_siso_rate_unit_snr():
    assert exact_siso_rate(1.0, 1.0, 1.0) == pytest.approx(
        0.5963473623231941, abs=1e-12
    )


def test_siso_rate_ten_db():
    assert exact_siso_rate(10.0, 1.0, 1.0) == pytest.approx(
        2.0146425447084515, abs=1e-10
    )


def test_siso_rate_vanishes_with_power():
    assert exact_siso_rate(0.0, 1.0, 1.0) == 0.0
    # low-snr slope: E[log(1 + snr h)] ~ snr
    snr = 1e-5
    assert exact_siso_rate(snr, 1.0, 1.0) / snr == pytest.approx(1.0, abs=1e-3)


def test_siso_rate_continuous_across_series_switch():
    # the evaluation changes method near 1/snr = 700
    below = exact_siso_rate(1.0 / 699.0, 1.0, 1.0)
    above = exact_siso_rate(1.0 / 701.0, 1.0, 1.0)
    assert below == pytest.approx(above, rel=5e-3)
    assert above < below


def test_siso_rate_input_validation():
    with pytest.raises(ValueError):
        exact_siso_rate(1.0, 1.0, 0.0)
    with pytest.raises(ValueError):
        exact_siso_rate(-1.0, 1.0, 1.0)
    with pytest.raises(ValueError):
        exact_siso_rate(1.0, 0.0, 1.0)


def test_pg_zero_gain_stays_silent():
    q, value = pg_solve_relaxed(np.zeros((2, 2)), np.eye(2), 1.0, 2)
    np.testing.assert_allclose(q, np.zeros((2, 2)), atol=1e-12)
    assert value == pytest.approx(0.0, abs=1e-12)


def test_pg_scalar_without_penalty_takes_budget():
    q, value = pg_solve_relaxed(np.array([[2.0]]), np.zeros((1, 1)), 3.0, 2)
    assert q[0, 0].real == pytest.approx(3.0, abs=1e-6)
    assert value == pytest.approx(2.0 * math.log(7.0), abs=1e-6)


def test_pg_output_is_feasible():
    rng = np.random.default_rng(1)
    for _ in range(5):
        a = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
        gain = a @ a.conj().T / 3.0
        pen = np.eye(3) * rng.uniform(0.1, 1.0)
        q, _ = pg_solve_relaxed(gain, pen, 2.0, 3)
        assert float(np.real(np.trace(q))) <= 2.0 + 1e-8
        assert float(np.linalg.eigvalsh(0.5 * (q + q.conj().T))[0]) >= -1e-10
