"""Joint-decoding design: power water-filling, greedy antenna selection,
and the alternating driver tying them together.

Both block updates work on the converged auxiliaries of the rate
approximation: the per-stream gains set the water-filling channel qualities,
and the effective powers set the statistics-weighted receive Gram whose most
informative rows the greedy pass keeps.
"""

import dataclasses
from dataclasses import dataclass

import numpy as np

from .channel import ChannelStats
from .config import SystemConfig
from .detequiv import FixedPoint, solve_fp_joint
from .linalg import hermitian_sqrt, logdet_hermitian
from .rng import DOMAIN_INIT, stream
from .structures import DesignResult, Selection

_BISECT_STEPS = 200


@dataclass(frozen=True)
class WaterfillResult:
    powers: np.ndarray
    water_level: float  # dual variable of the budget constraint
    degenerate: bool


def waterfill(gains, budget: float) -> WaterfillResult:
    """Split a power budget across parallel streams with the given gains.

    Solves max sum_m log(1 + gains[m] * p[m]) subject to p >= 0 and
    sum(p) == budget, by bisecting the budget constraint's dual variable:
    p[m] = max(1/level - 1/gains[m], 0). An all-zero gain vector cannot
    distinguish allocations; the budget is then spread uniformly and the
    result flagged degenerate.
    """
    gains = np.asarray(gains, dtype=float)
    if gains.ndim != 1 or gains.size == 0:
        raise ValueError("gains must be a nonempty vector")
    if np.any(gains < 0):
        raise ValueError("gains must be nonnegative")
    if budget < 0:
        raise ValueError("budget must be nonnegative")
    if budget == 0:
        return WaterfillResult(np.zeros_like(gains), np.inf, False)
    positive = gains > 0
    if not positive.any():
        return WaterfillResult(np.full(gains.shape, budget / gains.size), 0.0, True)

    inv_gains = np.zeros_like(gains)
    inv_gains[positive] = 1.0 / gains[positive]

    def allocation(level):
        powers = np.where(positive, 1.0 / level - inv_gains, 0.0)
        return np.clip(powers, 0.0, None)

    # Total power is continuous and strictly decreasing in the level until
    # it hits zero, so bisection brackets the budget.
    hi = float(gains.max())
    lo = positive.sum() / (budget + inv_gains[positive].sum())
    for _ in range(_BISECT_STEPS):
        mid = 0.5 * (lo + hi)
        if allocation(mid).sum() > budget:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-18 * max(hi, 1.0):
            break
    level = 0.5 * (lo + hi)
    powers = allocation(level)
    return WaterfillResult(powers, float(level), False)


def selection_gram(stats: ChannelStats, eff_powers, noise_power: float, users=None) -> np.ndarray:
    """Statistics-weighted receive Gram over the full antenna set.

    Accumulates, for each listed user, the receive basis weighted by the
    coupling applied to that user's effective powers, scaled by the
    reciprocal noise power. Row energies of its square root measure how much
    each antenna contributes to the approximate rate.
    """
    n = stats.config.n_antennas
    if users is None:
        users = range(stats.config.n_users)
    users = list(users)
    if len(eff_powers) != len(users):
        raise ValueError("one effective-power vector per listed user required")
    gram = np.zeros((n, n), dtype=np.complex128)
    for k, eff in zip(users, eff_powers):
        load = stats.coupling[k] @ np.asarray(eff, dtype=float)
        basis = stats.rx_bases[k]
        gram += (basis * load) @ basis.conj().T / noise_power
    return 0.5 * (gram + gram.conj().T)


def rank1_update(inv: np.ndarray, vec: np.ndarray) -> np.ndarray:
    """Inverse of (inv^-1 + vec vec^H), given the current inverse.

    Standard rank-one downdate: inv - g g^H with
    g = inv @ vec / sqrt(1 + vec^H inv vec).
    """
    image = inv @ vec
    denom = 1.0 + float(np.real(np.vdot(vec, image)))
    g = image / np.sqrt(denom)
    updated = inv - np.outer(g, g.conj())
    return 0.5 * (updated + updated.conj().T)


@dataclass(frozen=True)
class GreedyResult:
    selection: Selection
    objective: float
    increments: tuple


def greedy_select(gram: np.ndarray, n_pick: int) -> GreedyResult:
    """Greedy row selection maximizing log det(I + gram restricted to rows).

    Grows the kept set one antenna at a time, scoring each candidate by the
    exact objective increment log(1 + b^H G b) where b is the candidate row
    of the Gram's square root and G tracks the inverse of the current
    selected-row Gram via rank-one updates. Ties break to the lowest index.
    """
    n = gram.shape[0]
    if not 1 <= n_pick <= n:
        raise ValueError(f"cannot pick {n_pick} rows out of {n}")
    root = hermitian_sqrt(gram)
    inv = np.eye(n, dtype=np.complex128)
    available = np.ones(n, dtype=bool)
    chosen = []
    increments = []
    for _ in range(n_pick):
        image = root.conj() @ inv
        quad = np.real(np.einsum("nj,nj->n", image, root))
        score = np.log1p(np.clip(quad, 0.0, None))
        score[~available] = -np.inf
        pick = int(np.argmax(score))
        chosen.append(pick)
        increments.append(float(score[pick]))
        available[pick] = False
        inv = rank1_update(inv, root[pick, :])
    return GreedyResult(
        Selection(tuple(chosen), n), float(sum(increments)), tuple(increments)
    )


def selection_objective(gram: np.ndarray, selection: Selection) -> float:
    """Direct log det(I + gram restricted to the selected rows/columns)."""
    rows = list(selection.indices)
    sub = gram[np.ix_(rows, rows)]
    return logdet_hermitian(np.eye(len(rows)) + sub)


def random_selection(n_antennas: int, n_pick: int, rng) -> Selection:
    order = rng.permutation(n_antennas)[:n_pick]
    return Selection(tuple(int(i) for i in order), n_antennas)


def uniform_powers(config: SystemConfig) -> list:
    return [
        np.full(int(m), p / int(m))
        for m, p in zip(config.ut_antennas, config.power_budgets)
    ]


def _relative_step(new: float, old: float) -> float:
    return abs(new - old) / max(abs(old), 1e-12)


def ao_optimize_joint(stats: ChannelStats, config: SystemConfig = None, seed: int = None) -> DesignResult:
    """Alternating design of eigen powers and antenna selection.

    Starts from a seeded random selection and uniform powers. Each iteration
    water-fills each user's budget against the current stream gains, then
    reselects antennas greedily against the effective-power Gram, re-solving
    the rate approximation after each block. A block update only replaces the
    incumbent when it does not lower the approximate rate (beyond fixed-point
    noise), so the rate trace is non-decreasing up to that slack. Stops once
    an iteration changes the approximate rate by at most ao_tol (relative).
    """
    if config is None:
        config = stats.config
    if seed is None:
        seed = config.rng_seed
    rng = stream(seed, DOMAIN_INIT, 0)
    selection = random_selection(config.n_antennas, config.n_chains, rng)
    powers = uniform_powers(config)
    noise = config.noise_power
    slack = 10.0 * config.fp_tol

    def solve(pw, sel):
        return solve_fp_joint(stats, pw, sel, noise, config.fp_tol, config.fp_max_iter)

    state = solve(powers, selection)
    trace = [state.value]
    converged = False
    fp_ok = state.converged
    iterations = 0

    while fp_ok and iterations < config.ao_max_iter:
        iterations += 1

        candidate_powers = [
            waterfill(state.stream_gains[k], config.power_budgets[k]).powers
            for k in range(config.n_users)
        ]
        candidate = solve(candidate_powers, selection)
        if not candidate.converged:
            fp_ok = False
            break
        if candidate.value >= state.value - slack:
            powers, state = candidate_powers, candidate

        gram = selection_gram(stats, state.eff_powers, noise)
        candidate_selection = greedy_select(gram, config.n_chains).selection
        if candidate_selection != selection:
            candidate = solve(powers, candidate_selection)
            if not candidate.converged:
                fp_ok = False
                break
            if candidate.value >= state.value - slack:
                selection, state = candidate_selection, candidate

        trace.append(state.value)
        if _relative_step(trace[-1], trace[-2]) <= config.ao_tol:
            converged = True
            break

    return DesignResult(
        selection=selection,
        decoding="joint",
        rate_nats=trace[-1],
        ao_iterations=iterations,
        rate_trace=trace,
        converged=converged and fp_ok,
        eigen_powers=powers,
        covariances=None,
        fp_converged=fp_ok,
        seed=seed,
    )
