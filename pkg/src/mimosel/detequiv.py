"""Closed-form ergodic sum-rate approximations from channel statistics.

The channel average is replaced by the solution of a small coupled fixed
point in two nonnegative families: per-user receive gains (one entry per
receive beam, measuring how much whitened receive space the beam still sees)
and effective transmit powers (one entry per transmit stream, the allocated
power discounted by the load the stream itself creates).

Both decoding models use the same engine. The joint value needs one system
over all users; the independent value additionally solves one
leave-one-user-out system per user and charges each user the difference.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import solve_triangular

from .channel import ChannelStats
from .errors import ConvergenceError
from .linalg import hermitian_sqrt, logdet_hermitian
from .structures import Selection, check_covariances, check_powers

_REL_FLOOR = 1e-12
_DAMP_AFTER = 5


@dataclass
class FixedPoint:
    """Converged (or best-effort) state of one coupled system.

    rx_gains, eff_powers, and stream_gains are lists aligned with `users`.
    rx_cov is the aggregate whitened receive covariance on the full antenna
    set (zero outside the selected rows and columns); `value` is the rate
    approximation of this system in nats.
    """

    users: tuple
    rx_gains: list
    eff_powers: list
    stream_gains: list
    rx_cov: np.ndarray
    value: float
    iterations: int
    residual: float
    converged: bool
    residual_trace: list = field(default_factory=list)


@dataclass
class IndepFixedPoint:
    """Full system plus one leave-one-out system per user."""

    full: FixedPoint
    minus: list

    @property
    def converged(self) -> bool:
        return self.full.converged and all(m.converged for m in self.minus)

    @property
    def iterations(self) -> int:
        return max([self.full.iterations] + [m.iterations for m in self.minus])

    @property
    def residual(self) -> float:
        return max([self.full.residual] + [m.residual for m in self.minus])


def _relative_change(new, old):
    worst = 0.0
    for a, b in zip(new, old):
        if a.size == 0:
            continue
        delta = np.abs(a - b) / np.maximum(np.abs(b), _REL_FLOOR)
        worst = max(worst, float(delta.max()))
    return worst


def _receive_gram(rx_rows, couplings, eff, noise, n_sel):
    gram = np.eye(n_sel, dtype=np.complex128)
    for rows, coup, e in zip(rx_rows, couplings, eff):
        load = coup @ e
        gram += (rows * load) @ rows.conj().T / noise
    return 0.5 * (gram + gram.conj().T)


def _system_value(rx_rows, couplings, cov_sqrts, noise, rx_gains, eff, stream_gains, n_sel):
    value = logdet_hermitian(_receive_gram(rx_rows, couplings, eff, noise, n_sel))
    for ch, sg in zip(cov_sqrts, stream_gains):
        root = np.sqrt(np.clip(sg, 0.0, None))
        inner = np.eye(ch.shape[0]) + (root[:, None] * (ch @ ch)) * root[None, :]
        value += logdet_hermitian(0.5 * (inner + inner.conj().T))
    for coup, g, e in zip(couplings, rx_gains, eff):
        value -= float(g @ (coup @ e))
    return float(value)


def _solve_system(users, rx_rows, couplings, cov_sqrts, noise, tol, max_iter, n_antennas, sel_indices):
    """Iterate the coupled maps for one set of participating users.

    One sweep recomputes every receive gain from the current effective
    powers, then every effective power from the fresh gains. The residual is
    the worst relative entry change; five consecutive non-decreasing sweeps
    switch the iteration to averaged updates.
    """
    rx_cov = np.zeros((n_antennas, n_antennas), dtype=np.complex128)
    if not users:
        return FixedPoint((), [], [], [], rx_cov, 0.0, 0, 0.0, True)

    n_sel = rx_rows[0].shape[0]
    covs_basis = [ch @ ch for ch in cov_sqrts]
    eff = [np.clip(np.real(np.diagonal(c)), 0.0, None) for c in covs_basis]
    rx_gains = None
    stream_gains = [coup.T @ np.zeros(coup.shape[0]) for coup in couplings]
    residual_trace = []
    damping = False
    rises = 0
    iterations = 0
    residual = np.inf

    for sweep in range(1, max_iter + 1):
        gram = _receive_gram(rx_rows, couplings, eff, noise, n_sel)
        chol = np.linalg.cholesky(gram)

        new_rx = []
        for rows in rx_rows:
            whitened = solve_triangular(chol, rows, lower=True, check_finite=False)
            new_rx.append(np.real(np.sum(whitened * whitened.conj(), axis=0)) / noise)
        if damping and rx_gains is not None:
            new_rx = [0.5 * (a + b) for a, b in zip(new_rx, rx_gains)]

        new_stream = [coup.T @ g for coup, g in zip(couplings, new_rx)]
        new_eff = []
        for ch, sg in zip(cov_sqrts, new_stream):
            inner = np.eye(ch.shape[0]) + (ch * sg) @ ch
            resolvent = ch @ np.linalg.inv(inner) @ ch
            new_eff.append(np.clip(np.real(np.diagonal(resolvent)), 0.0, None))
        if damping:
            new_eff = [0.5 * (a + b) for a, b in zip(new_eff, eff)]

        residual = _relative_change(new_eff, eff)
        if rx_gains is not None:
            residual = max(residual, _relative_change(new_rx, rx_gains))
        residual_trace.append(residual)

        rx_gains, stream_gains, eff = new_rx, new_stream, new_eff
        iterations = sweep
        if residual <= tol:
            break
        if len(residual_trace) >= 2 and residual >= residual_trace[-2]:
            rises += 1
            if rises >= _DAMP_AFTER:
                damping = True
        else:
            rises = 0

    value = _system_value(rx_rows, couplings, cov_sqrts, noise, rx_gains, eff, stream_gains, n_sel)
    gram = _receive_gram(rx_rows, couplings, eff, noise, n_sel)
    rx_cov[np.ix_(sel_indices, sel_indices)] = gram - np.eye(n_sel)
    return FixedPoint(
        users=tuple(users),
        rx_gains=rx_gains,
        eff_powers=eff,
        stream_gains=stream_gains,
        rx_cov=rx_cov,
        value=value,
        iterations=iterations,
        residual=float(residual),
        converged=residual <= tol,
        residual_trace=residual_trace,
    )


def _system_inputs(stats: ChannelStats, selection: Selection, users, cov_sqrts_by_user):
    rows = list(selection.indices)
    rx_rows = [np.ascontiguousarray(stats.rx_bases[k][rows, :]) for k in users]
    couplings = [stats.coupling[k] for k in users]
    cov_sqrts = [cov_sqrts_by_user[k] for k in users]
    return rx_rows, couplings, cov_sqrts


def _check_selection(stats: ChannelStats, selection: Selection):
    cfg = stats.config
    if selection.n_antennas != cfg.n_antennas:
        raise ValueError("selection dimension does not match the statistics")
    if len(selection) != cfg.n_chains:
        raise ValueError(
            f"selection must keep exactly {cfg.n_chains} antennas, got {len(selection)}"
        )


def solve_fp_joint(
    stats: ChannelStats,
    powers,
    selection: Selection,
    noise_power: float,
    tol: float = None,
    max_iter: int = None,
) -> FixedPoint:
    """Solve the joint-decoding system for eigen-power allocations.

    `powers` lists one nonnegative eigen-power vector per user; the implied
    transmit covariances share the statistics' transmit bases, which makes
    every per-user covariance diagonal in its own beam coordinates.
    """
    cfg = stats.config
    _check_selection(stats, selection)
    check_powers(powers, cfg.ut_antennas)
    if noise_power <= 0:
        raise ValueError("noise power must be strictly positive")
    tol = cfg.fp_tol if tol is None else tol
    max_iter = cfg.fp_max_iter if max_iter is None else max_iter
    users = tuple(range(cfg.n_users))
    cov_sqrts = {
        k: np.diag(np.sqrt(np.clip(np.asarray(powers[k], dtype=float), 0.0, None))).astype(
            np.complex128
        )
        for k in users
    }
    rx_rows, couplings, sqrts = _system_inputs(stats, selection, users, cov_sqrts)
    return _solve_system(
        users, rx_rows, couplings, sqrts, noise_power, tol, max_iter,
        cfg.n_antennas, list(selection.indices),
    )


def _require_converged(state) -> None:
    if not state.converged:
        raise ConvergenceError(
            f"fixed point did not converge (residual {state.residual:.3e})"
        )


def de_rate_joint(
    stats: ChannelStats,
    powers,
    selection: Selection,
    noise_power: float,
    state: FixedPoint,
) -> float:
    """Joint-decoding rate approximation in nats.

    Evaluates the closed-form expression at the converged auxiliaries of
    `state` for the given design; raises if the system did not converge.
    """
    _require_converged(state)
    cov_sqrts = {
        k: np.diag(np.sqrt(np.clip(np.asarray(powers[k], dtype=float), 0.0, None))).astype(
            np.complex128
        )
        for k in state.users
    }
    rx_rows, couplings, sqrts = _system_inputs(stats, selection, state.users, cov_sqrts)
    return _system_value(
        rx_rows, couplings, sqrts, noise_power,
        state.rx_gains, state.eff_powers, state.stream_gains, len(selection),
    )


def solve_fp_indep(
    stats: ChannelStats,
    covs,
    selection: Selection,
    noise_power: float,
    tol: float = None,
    max_iter: int = None,
) -> IndepFixedPoint:
    """Solve the systems behind the independent-decoding approximation.

    Accepts arbitrary Hermitian PSD transmit covariances. Solves the full
    system over all users plus, for each user, the system with that user
    removed; all systems share the selection and noise level.
    """
    cfg = stats.config
    _check_selection(stats, selection)
    check_covariances(covs, cfg.ut_antennas)
    if noise_power <= 0:
        raise ValueError("noise power must be strictly positive")
    tol = cfg.fp_tol if tol is None else tol
    max_iter = cfg.fp_max_iter if max_iter is None else max_iter

    cov_sqrts = {}
    for k in range(cfg.n_users):
        basis = stats.tx_bases[k]
        projected = basis.conj().T @ np.asarray(covs[k], dtype=np.complex128) @ basis
        cov_sqrts[k] = hermitian_sqrt(0.5 * (projected + projected.conj().T))

    def solve_for(users):
        rx_rows, couplings, sqrts = _system_inputs(stats, selection, users, cov_sqrts)
        return _solve_system(
            users, rx_rows, couplings, sqrts, noise_power, tol, max_iter,
            cfg.n_antennas, list(selection.indices),
        )

    all_users = tuple(range(cfg.n_users))
    full = solve_for(all_users)
    minus = [solve_for(tuple(u for u in all_users if u != k)) for k in all_users]
    return IndepFixedPoint(full=full, minus=minus)


def de_rate_indep(
    stats: ChannelStats,
    covs,
    selection: Selection,
    noise_power: float,
    state: IndepFixedPoint,
) -> float:
    """Independent-decoding rate approximation in nats.

    Each user contributes the difference between the full-system value and
    the value of the system without that user, every value evaluated at its
    own converged auxiliaries. May be negative only through round-off; the
    exact quantity it approximates is nonnegative.
    """
    _require_converged(state)
    cov_sqrts = {}
    for k in state.full.users:
        basis = stats.tx_bases[k]
        projected = basis.conj().T @ np.asarray(covs[k], dtype=np.complex128) @ basis
        cov_sqrts[k] = hermitian_sqrt(0.5 * (projected + projected.conj().T))

    def value_of(system: FixedPoint) -> float:
        rx_rows, couplings, sqrts = _system_inputs(stats, selection, system.users, cov_sqrts)
        return _system_value(
            rx_rows, couplings, sqrts, noise_power,
            system.rx_gains, system.eff_powers, system.stream_gains, len(selection),
        )

    n_users = len(state.full.users)
    return float(
        n_users * value_of(state.full) - sum(value_of(m) for m in state.minus)
    )
