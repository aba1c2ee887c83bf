# cython: language_level=3, boundscheck=False, wraparound=False, initializedcheck=False, cdivision=True
"""Compiled selection loop for the multiplicative-weights codebook builder.

Same algorithm as resolvon._kernel_py.select_codebook, with the per-round
eigensolve done through LAPACK zheevd and the densities/traces formed in
plain C loops, so long runs avoid the interpreter entirely.
"""

from libc.math cimport INFINITY, exp

import numpy as np

from scipy.linalg.cython_blas cimport zgemm
from scipy.linalg.cython_lapack cimport zheevd


def select_codebook(edges_in, double eps, rounds_in):
    edges_arr = np.ascontiguousarray(edges_in, dtype=np.complex128)
    if edges_arr.ndim != 3 or edges_arr.shape[1] != edges_arr.shape[2]:
        raise ValueError(f"edges must be (X, d, d), got {edges_arr.shape}")
    cdef Py_ssize_t rounds = int(rounds_in)
    if rounds < 0:
        raise ValueError("rounds must be non-negative")

    cdef double complex[:, :, ::1] edges = edges_arr
    cdef Py_ssize_t nx = edges.shape[0]
    cdef int d = <int> edges.shape[1]

    cost_arr = np.zeros((d, d), dtype=np.complex128)
    a_arr = np.zeros((d, d), dtype=np.complex128, order="F")
    vs_arr = np.zeros((d, d), dtype=np.complex128, order="F")
    f_arr = np.zeros((d, d), dtype=np.complex128, order="F")
    w_arr = np.zeros(d, dtype=np.float64)
    g_arr = np.zeros(d, dtype=np.float64)
    selected_arr = np.zeros(rounds, dtype=np.int64)
    incurred_arr = np.zeros(rounds, dtype=np.float64)

    cdef double complex[:, ::1] cost = cost_arr
    cdef double complex[::1, :] a = a_arr
    cdef double complex[::1, :] vs = vs_arr
    cdef double complex[::1, :] f = f_arr
    cdef double[::1] w = w_arr
    cdef double[::1] g = g_arr
    cdef long long[::1] selected = selected_arr
    cdef double[::1] incurred = incurred_arr

    cdef char jobz = b"V"
    cdef char uplo = b"L"
    cdef char op_n = b"N"
    cdef char op_c = b"C"
    cdef double complex one = 1.0
    cdef double complex zero = 0.0
    cdef int n = d, lda = d, info = 0
    cdef int lwork = -1, lrwork = -1, liwork = -1
    cdef double complex wkopt
    cdef double rwkopt = 0.0
    cdef int iwkopt = 0

    # Workspace query.
    zheevd(&jobz, &uplo, &n, &a[0, 0], &lda, &w[0], &wkopt, &lwork,
           &rwkopt, &lrwork, &iwkopt, &liwork, &info)
    if info != 0:
        raise RuntimeError(f"zheevd workspace query failed: info={info}")
    lwork = <int> wkopt.real
    lrwork = <int> rwkopt
    liwork = iwkopt
    work_arr = np.zeros(lwork, dtype=np.complex128)
    rwork_arr = np.zeros(lrwork, dtype=np.float64)
    iwork_arr = np.zeros(liwork, dtype=np.int32)
    cdef double complex[::1] work = work_arr
    cdef double[::1] rwork = rwork_arr
    cdef int[::1] iwork = iwork_arr

    cdef Py_ssize_t l, x, i, j, k, jbest
    cdef double z, wmin, gk, tx, best
    cdef double complex acc

    for l in range(rounds):
        for j in range(d):
            for i in range(d):
                a[i, j] = cost[i, j]
        zheevd(&jobz, &uplo, &n, &a[0, 0], &lda, &w[0], &work[0], &lwork,
               &rwork[0], &lrwork, &iwork[0], &liwork, &info)
        if info != 0:
            raise RuntimeError(f"zheevd failed at round {l}: info={info}")

        wmin = w[0]
        z = 0.0
        for k in range(d):
            gk = exp(-eps * (w[k] - wmin))
            g[k] = gk
            z += gk
        for k in range(d):
            g[k] /= z

        # f = (V diag(g)) V†, eigenvectors in a's columns.
        for k in range(d):
            for i in range(d):
                vs[i, k] = g[k] * a[i, k]
        zgemm(&op_n, &op_c, &n, &n, &n, &one, &vs[0, 0], &lda,
              &a[0, 0], &lda, &zero, &f[0, 0], &lda)

        best = -INFINITY
        jbest = 0
        for x in range(nx):
            acc = 0
            for i in range(d):
                for j in range(d):
                    acc += edges[x, i, j] * f[j, i]
            tx = acc.real
            if tx > best:
                best = tx
                jbest = x

        selected[l] = jbest
        incurred[l] = best
        for i in range(d):
            for j in range(d):
                cost[i, j] = cost[i, j] + edges[jbest, i, j]

    return selected_arr, incurred_arr
