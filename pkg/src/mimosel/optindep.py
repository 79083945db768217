"""Independent-decoding design: per-user covariance ascent and antenna
selection under interference, plus the alternating driver.

The covariance subproblem for one user maximizes a difference of concave
log-det terms: the full-system term (weighted by the number of users) minus
one term per leave-one-out system the user participates in. It is solved by
repeatedly linearizing the subtracted terms at the current iterate and
maximizing the resulting concave surrogate in closed form; every involved
gain matrix shares the user's transmit basis, so the surrogate separates
across that basis's directions.
"""

from dataclasses import dataclass

import numpy as np

from .channel import ChannelStats
from .config import SystemConfig
from .detequiv import IndepFixedPoint, de_rate_indep, solve_fp_indep
from .linalg import hermitian_sqrt, logdet_hermitian
from .optjoint import (
    _relative_step,
    rank1_update,
    random_selection,
    selection_gram,
)
from .rng import DOMAIN_INIT, stream
from .structures import DesignResult, Selection

_BISECT_STEPS = 200


def mm_objective(cov, gain_total, gain_others, n_users: int) -> float:
    """Difference-of-concave covariance objective for one user, in nats.

    n_users * log det(I + gain_total @ cov) minus the same log-det against
    each interference gain matrix. All gain matrices are Hermitian PSD.
    """
    value = n_users * _logdet_gain(gain_total, cov)
    for gain in gain_others:
        value -= _logdet_gain(gain, cov)
    return float(value)


def _logdet_gain(gain, cov):
    root = hermitian_sqrt(np.asarray(gain, dtype=np.complex128))
    inner = root @ np.asarray(cov, dtype=np.complex128) @ root
    m = gain.shape[0]
    return logdet_hermitian(np.eye(m) + 0.5 * (inner + inner.conj().T))


def mm_linearize(cov_ref, gain_others) -> np.ndarray:
    """Gradient of the subtracted terms at the reference covariance.

    Summing root @ inv(I + root @ cov_ref @ root) @ root over the
    interference gain matrices gives the exact tangent slope, so subtracting
    its inner product with the covariance majorizes the subtracted terms:
    concavity puts each term below its tangent plane, with equality at the
    reference point.
    """
    m = np.asarray(cov_ref).shape[0]
    penalty = np.zeros((m, m), dtype=np.complex128)
    for gain in gain_others:
        root = hermitian_sqrt(np.asarray(gain, dtype=np.complex128))
        inner = np.eye(m) + root @ np.asarray(cov_ref, dtype=np.complex128) @ root
        inner = 0.5 * (inner + inner.conj().T)
        penalty += root @ np.linalg.inv(inner) @ root
    return 0.5 * (penalty + penalty.conj().T)


def separable_powers(gains, penalties, budget: float, n_users: int):
    """Maximize sum_m [n_users*log(1+gains[m]*q[m]) - penalties[m]*q[m]]
    over q >= 0, sum(q) <= budget.

    Closed form per direction given the budget dual: q[m] =
    max(n_users/(dual + penalties[m]) - 1/gains[m], 0); the dual is found by
    bisection when the unconstrained solution overshoots the budget.

    Returns (q, dual).
    """
    gains = np.clip(np.asarray(gains, dtype=float), 0.0, None)
    penalties = np.clip(np.asarray(penalties, dtype=float), 0.0, None)
    if budget < 0:
        raise ValueError("budget must be nonnegative")
    active = gains > 0
    powers = np.zeros_like(gains)
    if budget == 0 or not active.any():
        return powers, 0.0

    inv_gains = np.zeros_like(gains)
    inv_gains[active] = 1.0 / gains[active]

    def allocation(dual):
        with np.errstate(divide="ignore"):
            raw = n_users / (dual + penalties) - inv_gains
        return np.where(active, np.clip(raw, 0.0, None), 0.0)

    free = allocation(0.0)
    if np.all(np.isfinite(free)) and free.sum() <= budget:
        return free, 0.0

    lo = 0.0
    hi = float(np.max(n_users * gains - penalties))
    if hi <= 0:
        return powers, 0.0
    for _ in range(_BISECT_STEPS):
        mid = 0.5 * (lo + hi)
        if allocation(mid).sum() > budget:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-18 * max(hi, 1.0):
            break
    dual = 0.5 * (lo + hi)
    return allocation(dual), float(dual)


def surrogate_kkt_residual(gains, penalties, powers, dual, budget, n_users) -> float:
    """Worst stationarity/feasibility violation of a surrogate solution."""
    gains = np.asarray(gains, dtype=float)
    penalties = np.asarray(penalties, dtype=float)
    powers = np.asarray(powers, dtype=float)
    slope = n_users * gains / (1.0 + gains * powers) - penalties
    scale = max(1.0, float(np.max(np.abs(slope))), dual)
    worst = 0.0
    for m in range(gains.size):
        if powers[m] > 0:
            worst = max(worst, abs(slope[m] - dual) / scale)
        else:
            worst = max(worst, max(slope[m] - dual, 0.0) / scale)
    worst = max(worst, max(powers.sum() - budget, 0.0) / max(budget, 1.0))
    if dual > 0:
        worst = max(worst, abs(powers.sum() - budget) / max(budget, 1.0))
    return float(worst)


def solve_relaxed(gain_total, penalty, budget: float, n_users: int) -> np.ndarray:
    """Maximize the linearized covariance objective over the trace ball.

    n_users * log det(I + gain_total @ Q) - Re tr(penalty @ Q) with Q
    Hermitian PSD, tr Q <= budget. Solved exactly through the trace
    constraint's multiplier: for a multiplier mu, the penalized problem
    (penalty replaced by penalty + mu*I) has the closed-form maximizer
    Q = S^{-1/2} V diag(max(n_users - 1/lam, 0)) V^H S^{-1/2}, where
    S = penalty + mu*I and (lam, V) is the eigensystem of the whitened gain
    S^{-1/2} gain S^{-1/2}. The trace of that maximizer is non-increasing in
    mu, so bisection finds the multiplier at which the budget binds (mu = 0
    when it does not).
    """
    gain = np.asarray(gain_total, dtype=np.complex128)
    gain = 0.5 * (gain + gain.conj().T)
    pen = np.asarray(penalty, dtype=np.complex128)
    pen = 0.5 * (pen + pen.conj().T)
    m = gain.shape[0]
    if budget < 0:
        raise ValueError("budget must be nonnegative")
    gain_top = float(np.linalg.eigvalsh(gain)[-1])
    if budget == 0 or gain_top <= 0:
        return np.zeros((m, m), dtype=np.complex128)

    def penalized_opt(mu):
        w, u = np.linalg.eigh(pen + mu * np.eye(m))
        inv_root = (u / np.sqrt(np.clip(w, 1e-300, None))) @ u.conj().T
        whitened = inv_root @ gain @ inv_root
        lam, v = np.linalg.eigh(0.5 * (whitened + whitened.conj().T))
        levels = np.zeros_like(lam)
        pos = lam > 0.0
        levels[pos] = np.clip(n_users - 1.0 / lam[pos], 0.0, None)
        factor = inv_root @ v
        cov = (factor * levels) @ factor.conj().T
        return 0.5 * (cov + cov.conj().T)

    def trace_of(cov):
        return float(np.real(np.trace(cov)))

    if float(np.linalg.eigvalsh(pen)[0]) > 0:
        cov = penalized_opt(0.0)
        if trace_of(cov) <= budget:
            return cov

    hi = n_users * gain_top
    for _ in range(60):
        if trace_of(penalized_opt(hi)) <= budget:
            break
        hi *= 2.0
    lo = 0.0
    for _ in range(_BISECT_STEPS):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if trace_of(penalized_opt(mid)) > budget:
            lo = mid
        else:
            hi = mid
    return penalized_opt(hi)


@dataclass
class MMTrace:
    """Outcome of one user's covariance ascent."""

    powers: np.ndarray  # eigen powers along the user's transmit basis
    objective_trace: list
    iterations: int
    converged: bool


def ascend_covariance(
    gain_total_diag,
    gain_other_diags,
    budget: float,
    n_users: int,
    init_powers,
    tol: float,
    max_iter: int,
) -> MMTrace:
    """Difference-of-concave ascent in the shared transmit basis.

    All gain matrices are diagonal in the user's transmit basis, so iterates
    stay diagonal: each round linearizes the interference terms at the
    current eigen powers and maximizes the concave surrogate exactly. The
    objective trace is non-decreasing by construction.
    """
    total = np.clip(np.asarray(gain_total_diag, dtype=float), 0.0, None)
    others = [np.clip(np.asarray(g, dtype=float), 0.0, None) for g in gain_other_diags]
    powers = np.clip(np.asarray(init_powers, dtype=float), 0.0, None)

    def objective(q):
        value = n_users * np.sum(np.log1p(total * q))
        for gain in others:
            value -= np.sum(np.log1p(gain * q))
        return float(value)

    trace = [objective(powers)]
    converged = False
    iterations = 0
    for iteration in range(1, max_iter + 1):
        slope = np.zeros_like(powers)
        for gain in others:
            slope += gain / (1.0 + gain * powers)
        powers, _ = separable_powers(total, slope, budget, n_users)
        trace.append(objective(powers))
        iterations = iteration
        if _relative_step(trace[-1], trace[-2]) <= tol:
            converged = True
            break
    return MMTrace(powers, trace, iterations, converged)


@dataclass(frozen=True)
class IndepGreedyResult:
    selection: Selection
    objective: float
    increments: tuple


def greedy_select_indep(gram_total, gram_others, n_pick: int, n_users: int) -> IndepGreedyResult:
    """Greedy antenna selection for the independent-decoding surrogate.

    The step score is the exact increment of
    n_users * log det(I + total Gram on rows) - sum_j log det(I + j-th
    interference Gram on rows); one inverse per Gram is maintained through
    rank-one updates. Ties break to the lowest index.
    """
    n = gram_total.shape[0]
    if not 1 <= n_pick <= n:
        raise ValueError(f"cannot pick {n_pick} rows out of {n}")
    roots = [hermitian_sqrt(gram_total)] + [hermitian_sqrt(g) for g in gram_others]
    weights = [float(n_users)] + [-1.0] * len(gram_others)
    inverses = [np.eye(n, dtype=np.complex128) for _ in roots]
    available = np.ones(n, dtype=bool)
    chosen = []
    increments = []
    for _ in range(n_pick):
        score = np.zeros(n)
        for root, inv, weight in zip(roots, inverses, weights):
            image = root.conj() @ inv
            quad = np.real(np.einsum("nj,nj->n", image, root))
            score += weight * np.log1p(np.clip(quad, 0.0, None))
        score[~available] = -np.inf
        pick = int(np.argmax(score))
        chosen.append(pick)
        increments.append(float(score[pick]))
        available[pick] = False
        inverses = [
            rank1_update(inv, root[pick, :])
            for root, inv in zip(roots, inverses)
        ]
    return IndepGreedyResult(
        Selection(tuple(chosen), n), float(sum(increments)), tuple(increments)
    )


def selection_objective_indep(gram_total, gram_others, selection: Selection, n_users: int) -> float:
    """Direct evaluation of the independent-decoding selection surrogate."""
    rows = list(selection.indices)
    eye = np.eye(len(rows))
    value = n_users * logdet_hermitian(eye + gram_total[np.ix_(rows, rows)])
    for gram in gram_others:
        value -= logdet_hermitian(eye + gram[np.ix_(rows, rows)])
    return float(value)


def uniform_covariances(config: SystemConfig) -> list:
    return [
        (p / int(m)) * np.eye(int(m), dtype=np.complex128)
        for m, p in zip(config.ut_antennas, config.power_budgets)
    ]


def _stream_gain_tables(state: IndepFixedPoint, user: int):
    """Gain vectors driving one user's covariance subproblem."""
    total = state.full.stream_gains[user]
    others = []
    for system in state.minus:
        if user in system.users:
            others.append(system.stream_gains[system.users.index(user)])
    return total, others


def ao_optimize_indep(stats: ChannelStats, config: SystemConfig = None, seed: int = None) -> DesignResult:
    """Alternating design of covariances and antenna selection.

    Mirrors the joint driver: each iteration runs the covariance ascent to
    completion for every user against the current auxiliaries, then
    reselects antennas greedily against the interference-aware surrogate,
    re-solving the rate approximation after each block. Block updates only
    replace the incumbent when they do not lower the approximate rate
    (beyond fixed-point noise). Stops once an iteration changes the
    approximate rate by at most ao_tol (relative).
    """
    if config is None:
        config = stats.config
    if seed is None:
        seed = config.rng_seed
    rng = stream(seed, DOMAIN_INIT, 0)
    selection = random_selection(config.n_antennas, config.n_chains, rng)
    covs = uniform_covariances(config)
    noise = config.noise_power
    n_users = config.n_users
    slack = 10.0 * config.fp_tol

    def solve(cv, sel):
        return solve_fp_indep(stats, cv, sel, noise, config.fp_tol, config.fp_max_iter)

    state = solve(covs, selection)
    fp_ok = state.converged
    value = de_rate_indep(stats, covs, selection, noise, state) if fp_ok else np.nan
    trace = [value]
    converged = False
    iterations = 0

    while fp_ok and iterations < config.ao_max_iter:
        iterations += 1

        candidate_covs = []
        for k in range(n_users):
            total, others = _stream_gain_tables(state, k)
            basis = stats.tx_bases[k]
            init = np.clip(
                np.real(np.diagonal(basis.conj().T @ covs[k] @ basis)), 0.0, None
            )
            ascent = ascend_covariance(
                total, others, config.power_budgets[k], n_users,
                init, config.mm_tol, config.mm_max_iter,
            )
            cov = (basis * ascent.powers) @ basis.conj().T
            candidate_covs.append(0.5 * (cov + cov.conj().T))
        candidate = solve(candidate_covs, selection)
        if not candidate.converged:
            fp_ok = False
            break
        candidate_value = de_rate_indep(stats, candidate_covs, selection, noise, candidate)
        if candidate_value >= value - slack:
            covs, state, value = candidate_covs, candidate, candidate_value

        gram_total = selection_gram(stats, state.full.eff_powers, noise)
        gram_others = [
            selection_gram(stats, system.eff_powers, noise, users=system.users)
            for system in state.minus
        ]
        candidate_selection = greedy_select_indep(
            gram_total, gram_others, config.n_chains, n_users
        ).selection
        if candidate_selection != selection:
            candidate = solve(covs, candidate_selection)
            if not candidate.converged:
                fp_ok = False
                break
            candidate_value = de_rate_indep(stats, covs, candidate_selection, noise, candidate)
            if candidate_value >= value - slack:
                selection, state, value = candidate_selection, candidate, candidate_value

        trace.append(value)
        if _relative_step(trace[-1], trace[-2]) <= config.ao_tol:
            converged = True
            break

    return DesignResult(
        selection=selection,
        decoding="independent",
        rate_nats=trace[-1],
        ao_iterations=iterations,
        rate_trace=trace,
        converged=converged and fp_ok,
        eigen_powers=None,
        covariances=covs,
        fp_converged=fp_ok,
        seed=seed,
    )
