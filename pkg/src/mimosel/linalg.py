"""Small dense linear-algebra helpers used across the solvers."""

import numpy as np

from .errors import MimoselError


def logdet_hermitian(mat: np.ndarray) -> float:
    """log-determinant of a Hermitian positive-definite matrix.

    Evaluated through the Cholesky factor. A failed factorization triggers
    one retry on the symmetrized matrix (average with its conjugate
    transpose) before raising.
    """
    try:
        factor = np.linalg.cholesky(mat)
    except np.linalg.LinAlgError:
        sym = 0.5 * (mat + mat.conj().T)
        try:
            factor = np.linalg.cholesky(sym)
        except np.linalg.LinAlgError as exc:
            raise MimoselError("matrix is not positive definite") from exc
    return float(2.0 * np.sum(np.log(np.real(np.diagonal(factor)))))


def logdet_hermitian_stack(mats: np.ndarray) -> np.ndarray:
    """log-determinants of a stack (..., n, n) of Hermitian PD matrices."""
    factors = np.linalg.cholesky(mats)
    diags = np.real(np.diagonal(factors, axis1=-2, axis2=-1))
    return 2.0 * np.sum(np.log(diags), axis=-1)


def hermitian_sqrt(mat: np.ndarray, clip_tol: float = 0.0) -> np.ndarray:
    """Principal square root of a Hermitian PSD matrix.

    Eigenvalues below zero (roundoff) are clipped before the root is taken.
    """
    eigvals, eigvecs = np.linalg.eigh(mat)
    eigvals = np.clip(eigvals, clip_tol, None)
    return (eigvecs * np.sqrt(eigvals)) @ eigvecs.conj().T


def psd_factor(mat: np.ndarray) -> np.ndarray:
    """Factor F with F @ F^H equal to the Hermitian PSD input."""
    eigvals, eigvecs = np.linalg.eigh(mat)
    eigvals = np.clip(eigvals, 0.0, None)
    return eigvecs * np.sqrt(eigvals)


def hermitian_deviation(mat: np.ndarray) -> float:
    return float(np.linalg.norm(mat - mat.conj().T))


def min_eigval(mat: np.ndarray) -> float:
    return float(np.linalg.eigvalsh(0.5 * (mat + mat.conj().T))[0])
