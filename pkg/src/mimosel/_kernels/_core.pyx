# cython: boundscheck=False, wraparound=False, cdivision=True
# cython: language_level=3
"""Compiled per-sample rate kernel.

Same contract as the numpy fallback: batched instantaneous rates (and
optionally the leave-one-user-out rates) from pre-drawn i.i.d. beam
factors. Works sample by sample through BLAS level-3 calls and Cholesky
log-determinants, avoiding the fallback's batched temporaries.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport log
from libc.stdlib cimport free, malloc
from libc.string cimport memset
from scipy.linalg.cython_blas cimport zgemm, zherk
from scipy.linalg.cython_lapack cimport zpotrf

cnp.import_array()

ctypedef double complex zcomplex


cdef inline double _logdet_cholesky(zcomplex* work, zcomplex* src, int n, int* info) nogil:
    """Cholesky log-determinant of the Hermitian matrix whose lower
    triangle is stored column-major in src; src is left untouched."""
    cdef int i, j
    cdef double acc = 0.0
    for j in range(n):
        for i in range(j, n):
            work[i + n * j] = src[i + n * j]
    zpotrf("L", &n, work, &n, info)
    if info[0] != 0:
        return 0.0
    for i in range(n):
        acc += log(work[i + n * i].real)
    return 2.0 * acc


def rate_samples(rx_rows, coupling_amps, cov_factors, iid_factors, leave_one_out):
    """See the fallback implementation for the full parameter contract."""
    cdef int n_users = len(rx_rows)
    if n_users == 0:
        raise ValueError("at least one user required")
    cdef int n_samples = iid_factors[0].shape[0]
    cdef int n_sel = rx_rows[0].shape[0]
    cdef int n_ant = rx_rows[0].shape[1]
    cdef bint want_loo = bool(leave_one_out)

    # Per-user operands pinned as Fortran-ordered arrays for BLAS (the
    # i.i.d. factors stay C-ordered; they are re-packed per sample anyway).
    keep = []
    cdef zcomplex** a_ptr = <zcomplex**>malloc(n_users * sizeof(void*))
    cdef double** amp_ptr = <double**>malloc(n_users * sizeof(void*))
    cdef zcomplex** f_ptr = <zcomplex**>malloc(n_users * sizeof(void*))
    cdef zcomplex** iid_ptr = <zcomplex**>malloc(n_users * sizeof(void*))
    cdef int* m_of = <int*>malloc(n_users * sizeof(int))
    cdef int* r_of = <int*>malloc(n_users * sizeof(int))
    if not (a_ptr and amp_ptr and f_ptr and iid_ptr and m_of and r_of):
        free(a_ptr); free(amp_ptr); free(f_ptr); free(iid_ptr)
        free(m_of); free(r_of)
        raise MemoryError
    cdef int k, m_max = 0, r_max = 0, failed = 0
    cdef cnp.ndarray arr, rates_arr, loo_arr
    cdef double* loo_ptr = NULL
    try:
        for k in range(n_users):
            arr = np.asfortranarray(rx_rows[k], dtype=np.complex128)
            if arr.shape[0] != n_sel or arr.shape[1] != n_ant:
                raise ValueError("receive-row shapes differ across users")
            keep.append(arr)
            a_ptr[k] = <zcomplex*>cnp.PyArray_DATA(arr)

            arr = np.asfortranarray(coupling_amps[k], dtype=np.float64)
            keep.append(arr)
            amp_ptr[k] = <double*>cnp.PyArray_DATA(arr)
            if arr.shape[0] != n_ant:
                raise ValueError("coupling rows must match the antenna count")
            m_of[k] = <int>arr.shape[1]

            arr = np.asfortranarray(cov_factors[k], dtype=np.complex128)
            keep.append(arr)
            f_ptr[k] = <zcomplex*>cnp.PyArray_DATA(arr)
            if arr.shape[0] != m_of[k]:
                raise ValueError("covariance factor rows must match the coupling columns")
            r_of[k] = <int>arr.shape[1]

            arr = np.ascontiguousarray(iid_factors[k], dtype=np.complex128)
            keep.append(arr)
            if arr.shape[0] != n_samples or arr.shape[1] != n_ant or arr.shape[2] != m_of[k]:
                raise ValueError("i.i.d. factor shapes are inconsistent")
            iid_ptr[k] = <zcomplex*>cnp.PyArray_DATA(arr)

            if m_of[k] > m_max:
                m_max = m_of[k]
            if r_of[k] > r_max:
                r_max = r_of[k]

        rates_arr = np.empty(n_samples)
        if want_loo:
            loo_arr = np.empty((n_users, n_samples))
            loo_ptr = <double*>cnp.PyArray_DATA(loo_arr)
        failed = _run(
            a_ptr, amp_ptr, f_ptr, iid_ptr, m_of, r_of,
            n_users, n_samples, n_sel, n_ant, m_max, r_max, want_loo,
            <double*>cnp.PyArray_DATA(rates_arr), loo_ptr,
        )
        if failed:
            raise ValueError("rate kernel hit a non-positive-definite system")
        return rates_arr, (loo_arr if want_loo else None)
    finally:
        free(a_ptr); free(amp_ptr); free(f_ptr); free(iid_ptr)
        free(m_of); free(r_of)


cdef int _run(
    zcomplex** a_ptr, double** amp_ptr, zcomplex** f_ptr, zcomplex** iid_ptr,
    int* m_of, int* r_of, int n_users, int n_samples, int n_sel, int n_ant,
    int m_max, int r_max, bint want_loo, double* rates, double* rates_without,
) except -1:
    cdef zcomplex* coupled = <zcomplex*>malloc(n_ant * m_max * sizeof(zcomplex))
    cdef zcomplex* shaped = <zcomplex*>malloc(n_ant * max(r_max, 1) * sizeof(zcomplex))
    cdef zcomplex* projected = <zcomplex*>malloc(n_sel * max(r_max, 1) * sizeof(zcomplex))
    cdef zcomplex* terms = <zcomplex*>malloc(n_users * n_sel * n_sel * sizeof(zcomplex))
    cdef zcomplex* gram = <zcomplex*>malloc(n_sel * n_sel * sizeof(zcomplex))
    cdef zcomplex* reduced = <zcomplex*>malloc(n_sel * n_sel * sizeof(zcomplex))
    cdef zcomplex* work = <zcomplex*>malloc(n_sel * n_sel * sizeof(zcomplex))
    if not (coupled and shaped and projected and terms and gram and reduced and work):
        free(coupled); free(shaped); free(projected); free(terms)
        free(gram); free(reduced); free(work)
        raise MemoryError

    cdef zcomplex cone = 1.0
    cdef zcomplex czero = 0.0
    cdef double rone = 1.0
    cdef double rzero = 0.0
    cdef int i, j, n, k, m, r, info = 0, failed = 0
    cdef zcomplex* term_k
    cdef zcomplex* iid_base

    with nogil:
        for i in range(n_samples):
            for k in range(n_users):
                m = m_of[k]
                r = r_of[k]
                term_k = terms + k * n_sel * n_sel
                if r == 0:
                    memset(term_k, 0, n_sel * n_sel * sizeof(zcomplex))
                    continue
                iid_base = iid_ptr[k] + i * n_ant * m
                # C-ordered sample slice -> Fortran-ordered coupled factor.
                for j in range(m):
                    for n in range(n_ant):
                        coupled[n + n_ant * j] = amp_ptr[k][n + n_ant * j] * iid_base[n * m + j]
                zgemm("N", "N", &n_ant, &r, &m, &cone, coupled, &n_ant,
                      f_ptr[k], &m, &czero, shaped, &n_ant)
                zgemm("N", "N", &n_sel, &r, &n_ant, &cone, a_ptr[k], &n_sel,
                      shaped, &n_ant, &czero, projected, &n_sel)
                zherk("L", "N", &n_sel, &r, &rone, projected, &n_sel,
                      &rzero, term_k, &n_sel)

            for j in range(n_sel):
                for n in range(j, n_sel):
                    gram[n + n_sel * j] = 1.0 if n == j else czero
                    for k in range(n_users):
                        gram[n + n_sel * j] = gram[n + n_sel * j] + terms[k * n_sel * n_sel + n + n_sel * j]

            rates[i] = _logdet_cholesky(work, gram, n_sel, &info)
            if info != 0:
                failed = 1
                break

            if want_loo:
                for k in range(n_users):
                    term_k = terms + k * n_sel * n_sel
                    for j in range(n_sel):
                        for n in range(j, n_sel):
                            reduced[n + n_sel * j] = gram[n + n_sel * j] - term_k[n + n_sel * j]
                    rates_without[k * n_samples + i] = _logdet_cholesky(work, reduced, n_sel, &info)
                    if info != 0:
                        failed = 1
                        break
                if failed:
                    break

    free(coupled); free(shaped); free(projected); free(terms)
    free(gram); free(reduced); free(work)
    return failed
