"""Brute-force and closed-form references used to validate the fast paths.

Everything here is deliberately independent of the production
implementations: selections are enumerated instead of grown greedily, the
scalar fixed point is solved by its quadratic closed form instead of
iteration, the covariance surrogate is maximized by projected gradient over
the full matrix cone instead of the separable reduction, and the
single-antenna ergodic rate comes from the exponential-integral closed form
instead of sampling.
"""

import itertools
import math

import numpy as np

from .linalg import hermitian_sqrt, logdet_hermitian
from .structures import Selection

_EULER_GAMMA = 0.57721566490153286060651209008240243


def exhaustive_select(objective, n_antennas: int, n_pick: int):
    """Enumerate all antenna subsets of the given size and keep the best.

    Subsets are visited in lexicographic order and ties keep the first
    maximizer, so the returned subset is the lexicographically smallest
    optimum. Returns (indices, value).
    """
    if not 1 <= n_pick <= n_antennas:
        raise ValueError(f"cannot pick {n_pick} antennas out of {n_antennas}")
    best_subset = None
    best_value = -math.inf
    for subset in itertools.combinations(range(n_antennas), n_pick):
        value = float(objective(subset))
        if value > best_value:
            best_value = value
            best_subset = subset
    return best_subset, best_value


def scalar_fp_reference(noise_power: float, coupling: float, power: float):
    """Closed-form solution of the single-antenna, single-user fixed point.

    With one receive beam, one stream, coupling power w, stream power p and
    noise v, the coupled equations

        gain = 1 / (v + w * eff)
        eff  = p / (1 + p * w * gain)

    reduce to a quadratic in eff with one nonnegative root. Returns
    (gain, eff).
    """
    if noise_power <= 0:
        raise ValueError("noise power must be strictly positive")
    if coupling < 0 or power < 0:
        raise ValueError("coupling and power must be nonnegative")
    if coupling == 0 or power == 0:
        return 1.0 / noise_power, float(power)
    disc = noise_power * noise_power + 4.0 * coupling * power * noise_power
    eff = (-noise_power + math.sqrt(disc)) / (2.0 * coupling)
    gain = 1.0 / (noise_power + coupling * eff)
    return float(gain), float(eff)


def scalar_rate(noise_power: float, coupling: float, power: float) -> float:
    """Rate approximation of the scalar system, in nats."""
    gain, eff = scalar_fp_reference(noise_power, coupling, power)
    stream_gain = coupling * gain
    return (
        math.log1p(stream_gain * power)
        + math.log1p(coupling * eff / noise_power)
        - gain * coupling * eff
    )


def exp_integral_e1(x: float) -> float:
    """Exponential integral E1 for positive real arguments.

    Power series around zero below one, modified Lentz continued fraction
    above; both run to double-precision convergence.
    """
    if x <= 0:
        raise ValueError("argument must be strictly positive")
    if x <= 1.0:
        total = -_EULER_GAMMA - math.log(x)
        term = 1.0
        for n in range(1, 200):
            term *= -x / n
            delta = -term / n
            total += delta
            if abs(delta) < 1e-18 * max(abs(total), 1e-30):
                break
        return total
    # E1(x) = exp(-x) / (x + 1 - 1/(x + 3 - 4/(x + 5 - 9/(...))))
    tiny = 1e-300
    b = x + 1.0
    c = 1.0 / tiny
    d = 1.0 / b
    f = d
    for n in range(1, 300):
        a = -float(n * n)
        b += 2.0
        d = 1.0 / (a * d + b)
        c = b + a / c
        if c == 0.0:
            c = tiny
        delta = c * d
        f *= delta
        if abs(delta - 1.0) < 1e-16:
            break
    return math.exp(-x) * f


def exact_siso_rate(power: float, path_gain: float, noise_power: float) -> float:
    """Ergodic rate of a single-antenna link with unit-variance fading.

    E[log(1 + snr * |h|^2)] with |h|^2 standard exponential equals
    exp(1/snr) * E1(1/snr) nats, snr = power * path_gain / noise_power.
    """
    if noise_power <= 0:
        raise ValueError("noise power must be strictly positive")
    if power < 0 or path_gain <= 0:
        raise ValueError("power must be nonnegative and path gain positive")
    snr = power * path_gain / noise_power
    if snr == 0:
        return 0.0
    inv = 1.0 / snr
    # exp(inv) overflows for tiny snr long after the product has converged
    # to zero; the series E1(x) ~ exp(-x)/x * (1 - 1/x + ...) covers it.
    if inv > 700.0:
        # asymptotic expansion of exp(x) * E1(x) for large x
        total, term = 0.0, 1.0
        for n in range(0, 30):
            if n > 0:
                term *= -n / inv
            total += term
        return total / inv
    return math.exp(inv) * exp_integral_e1(inv)


def rate_joint_fullsize(sample, covs, selection: Selection, noise_power: float) -> float:
    """Joint-decoding rate via the full-antenna-dimension determinant.

    Embeds each user's whitened Gram on the full antenna set, zeroes the
    unselected rows and columns, and evaluates log det(I_N + sum). Agrees
    with the selected-subsystem form by the determinant identity
    det(I + AB) = det(I + BA).
    """
    n = sample.channels[0].shape[0]
    mask = np.zeros(n)
    mask[list(selection.indices)] = 1.0
    gram = np.eye(n, dtype=np.complex128)
    for chan, cov in zip(sample.channels, covs):
        whitened = chan @ np.asarray(cov, dtype=np.complex128) @ chan.conj().T / noise_power
        gram += mask[:, None] * whitened * mask[None, :]
    return logdet_hermitian(0.5 * (gram + gram.conj().T))


def pg_solve_relaxed(
    gain_total,
    penalty,
    budget: float,
    n_users: int,
    tol: float = 1e-10,
    max_iter: int = 20000,
):
    """Projected-gradient reference for the linearized covariance problem.

    Maximizes n_users * log det(I + gain_total @ Q) - Re tr(penalty @ Q)
    over Hermitian PSD Q with tr Q <= budget, using backtracking ascent
    steps and Euclidean projection onto the feasible cone (eigenvalue
    clipping plus a water-level shift when the trace cap binds).
    """
    gain_total = np.asarray(gain_total, dtype=np.complex128)
    penalty = np.asarray(penalty, dtype=np.complex128)
    m = gain_total.shape[0]
    root = hermitian_sqrt(gain_total)

    def objective(q):
        inner = np.eye(m) + root @ q @ root
        return n_users * logdet_hermitian(0.5 * (inner + inner.conj().T)) - float(
            np.real(np.trace(penalty @ q))
        )

    def gradient(q):
        inner = np.eye(m) + root @ q @ root
        grad = n_users * root @ np.linalg.inv(0.5 * (inner + inner.conj().T)) @ root - penalty
        return 0.5 * (grad + grad.conj().T)

    def project(q):
        eigvals, eigvecs = np.linalg.eigh(0.5 * (q + q.conj().T))
        eigvals = np.clip(eigvals, 0.0, None)
        total = eigvals.sum()
        if total > budget:
            lo, hi = 0.0, float(eigvals.max())
            for _ in range(200):
                mid = 0.5 * (lo + hi)
                if np.clip(eigvals - mid, 0.0, None).sum() > budget:
                    lo = mid
                else:
                    hi = mid
            eigvals = np.clip(eigvals - 0.5 * (lo + hi), 0.0, None)
        return (eigvecs * eigvals) @ eigvecs.conj().T

    q = project(np.eye(m, dtype=np.complex128) * (budget / max(m, 1)))
    value = objective(q)
    step = 1.0
    stalls = 0
    for _ in range(max_iter):
        grad = gradient(q)
        trial = step
        advanced = False
        while trial > 1e-18:
            candidate = project(q + trial * grad)
            candidate_value = objective(candidate)
            if candidate_value > value:
                improvement = candidate_value - value
                q, value = candidate, candidate_value
                advanced = True
                break
            trial *= 0.5
        if not advanced:
            stalls += 1
            step = 1.0
            if stalls >= 3:
                break
            continue
        step = min(trial * 2.0, 1e6)
        if improvement <= tol * max(1.0, abs(value)):
            stalls += 1
            if stalls >= 5:
                break
        else:
            stalls = 0
    return q, float(value)
