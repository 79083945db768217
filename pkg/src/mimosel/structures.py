"""Shared value types: antenna selections, rate estimates, design results."""

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError


@dataclass(frozen=True)
class Selection:
    """A subset of receive antennas routed to the RF chains.

    Indices are held sorted ascending; the associated rectangular selection
    operator keeps exactly those rows of a length-n_antennas vector.
    """

    indices: tuple
    n_antennas: int

    def __post_init__(self):
        idx = tuple(int(i) for i in self.indices)
        if sorted(set(idx)) != sorted(idx):
            raise ValueError("selection indices must be distinct")
        if idx != tuple(sorted(idx)):
            idx = tuple(sorted(idx))
        object.__setattr__(self, "indices", idx)
        if len(idx) == 0:
            raise ValueError("selection must keep at least one antenna")
        if idx[0] < 0 or idx[-1] >= self.n_antennas:
            raise ValueError("selection index out of range")

    def __len__(self):
        return len(self.indices)

    @property
    def mask(self) -> np.ndarray:
        """Binary indicator vector of length n_antennas."""
        m = np.zeros(self.n_antennas, dtype=np.int64)
        m[list(self.indices)] = 1
        return m

    @classmethod
    def from_mask(cls, mask) -> "Selection":
        mask = np.asarray(mask)
        if not np.all((mask == 0) | (mask == 1)):
            raise ValueError("selection mask must be binary")
        return cls(tuple(int(i) for i in np.flatnonzero(mask)), int(mask.size))


@dataclass(frozen=True)
class RateEstimate:
    """Monte-Carlo estimate of an ergodic sum-rate, in nats."""

    mean_nats: float
    stderr_nats: float
    n_samples: int

    @property
    def low_confidence(self) -> bool:
        return self.n_samples < 2


@dataclass
class DesignResult:
    """Outcome of one optimization run (or a materialized baseline design)."""

    selection: Selection
    decoding: str  # "joint" | "independent"
    rate_nats: float
    ao_iterations: int
    rate_trace: list
    converged: bool
    eigen_powers: list = None  # per-user eigen-power vectors (joint decoding)
    covariances: list = None  # per-user covariance matrices (independent)
    fp_converged: bool = True
    seed: int = 0


def check_powers(powers, ut_antennas, budgets=None, tol: float = 1e-9) -> None:
    """Validate per-user eigen-power vectors (nonnegative, within budget)."""
    if len(powers) != len(ut_antennas):
        raise ConfigError("one power vector per user required")
    for k, vec in enumerate(powers):
        vec = np.asarray(vec, dtype=float)
        if vec.shape != (int(ut_antennas[k]),):
            raise ConfigError(f"power vector {k} has wrong length")
        if np.any(vec < -tol):
            raise ConfigError(f"power vector {k} has negative entries")
        if budgets is not None and vec.sum() > budgets[k] + tol:
            raise ConfigError(f"power vector {k} exceeds its budget")


def check_covariances(covs, ut_antennas, budgets=None, tol: float = 1e-9) -> None:
    """Validate per-user transmit covariances (Hermitian PSD, within budget)."""
    if len(covs) != len(ut_antennas):
        raise ConfigError("one covariance per user required")
    for k, mat in enumerate(covs):
        mat = np.asarray(mat)
        m = int(ut_antennas[k])
        if mat.shape != (m, m):
            raise ConfigError(f"covariance {k} has wrong shape {mat.shape}")
        scale = max(1.0, float(np.abs(mat).max()))
        if np.linalg.norm(mat - mat.conj().T) > 1e-12 * scale * m:
            raise ConfigError(f"covariance {k} is not Hermitian")
        min_eig = float(np.linalg.eigvalsh(0.5 * (mat + mat.conj().T))[0])
        if min_eig < -1e-10 * scale:
            raise ConfigError(f"covariance {k} is not positive semidefinite")
        if budgets is not None and float(np.real(np.trace(mat))) > budgets[k] + tol:
            raise ConfigError(f"covariance {k} exceeds its trace budget")


def covariances_from_powers(stats, powers) -> list:
    """Per-user covariances with the statistics' transmit bases as eigenvectors."""
    covs = []
    for basis, vec in zip(stats.tx_bases, powers):
        vec = np.asarray(vec, dtype=float)
        covs.append((basis * vec) @ basis.conj().T)
    return covs
