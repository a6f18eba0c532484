# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled cyclic Jacobi kernel for Hermitian complex matrices.

Row-cyclic sweeps with complex plane rotations; the pivot's phase is folded
into the rotation so every 2x2 subproblem reduces to the real symmetric case.
The matrix and the optional eigenvector accumulator are updated in place.
`radiuslab._jacobi_py` is the drop-in pure fallback with identical semantics.
"""

import numpy as np

from libc.math cimport cos, fabs, hypot, sin, sqrt

__all__ = ["jacobi_inplace", "jacobi_batch", "radius_h_values", "KERNEL_NAME"]

KERNEL_NAME = "cython"

_DUMMY = np.zeros((1, 1), dtype=np.complex128)
cdef double complex[:, ::1] _DUMMY_VIEW = _DUMMY
_DUMMY3_ARR = np.zeros((1, 1, 1), dtype=np.complex128)
cdef double complex[:, :, ::1] _DUMMY3 = _DUMMY3_ARR


cdef inline double complex _conj(double complex z) noexcept nogil:
    return z.real - 1j * z.imag


cdef double _offdiag_fro(double complex[:, ::1] h, Py_ssize_t n) noexcept nogil:
    cdef Py_ssize_t i, j
    cdef double acc = 0.0, re, im
    for i in range(n - 1):
        for j in range(i + 1, n):
            re = h[i, j].real
            im = h[i, j].imag
            acc += re * re + im * im
    return sqrt(2.0 * acc)


cdef double _full_fro(double complex[:, ::1] h, Py_ssize_t n) noexcept nogil:
    cdef Py_ssize_t i, j
    cdef double acc = 0.0, re, im
    for i in range(n):
        for j in range(n):
            re = h[i, j].real
            im = h[i, j].imag
            acc += re * re + im * im
    return sqrt(acc)


cdef void _sweep(double complex[:, ::1] h, double complex[:, ::1] v,
                 Py_ssize_t n, double skip, bint want_vectors) noexcept nogil:
    cdef Py_ssize_t p, q, j, i
    cdef double hr, hi, habs, a, b, theta, sg, t, c, s
    cdef double complex u, cu, su, scu, hp, hq, vp, vq
    for p in range(n - 1):
        for q in range(p + 1, n):
            hr = h[p, q].real
            hi = h[p, q].imag
            habs = hypot(hr, hi)
            if habs <= skip:
                continue
            u = hr / habs + 1j * (hi / habs)
            cu = hr / habs - 1j * (hi / habs)
            a = h[p, p].real
            b = h[q, q].real
            theta = (a - b) / (2.0 * habs)
            sg = 1.0 if theta >= 0.0 else -1.0
            t = -sg / (fabs(theta) + sqrt(theta * theta + 1.0))
            c = 1.0 / sqrt(1.0 + t * t)
            s = t * c
            su = s * u
            scu = s * cu
            for j in range(n):
                if j == p or j == q:
                    continue
                hp = h[p, j]
                hq = h[q, j]
                h[p, j] = c * hp - su * hq
                h[q, j] = scu * hp + c * hq
                h[j, p] = _conj(h[p, j])
                h[j, q] = _conj(h[q, j])
            h[p, p] = c * c * a - 2.0 * c * s * habs + s * s * b
            h[q, q] = s * s * a + 2.0 * c * s * habs + c * c * b
            h[p, q] = 0.0
            h[q, p] = 0.0
            if want_vectors:
                for i in range(n):
                    vp = v[i, p]
                    vq = v[i, q]
                    v[i, p] = c * vp - scu * vq
                    v[i, q] = su * vp + c * vq


cdef int _diagonalize(double complex[:, ::1] h, double complex[:, ::1] v,
                      Py_ssize_t n, double tol, int max_sweeps,
                      bint want_vectors, int* sweeps_out,
                      double* off_out) noexcept nogil:
    cdef double norm0, target, skip, off
    cdef int sweep = 0
    norm0 = _full_fro(h, n)
    target = tol * norm0
    skip = target / n if n > 0 else 0.0
    off = _offdiag_fro(h, n)
    while off > target and sweep < max_sweeps:
        _sweep(h, v, n, skip, want_vectors)
        sweep += 1
        off = _offdiag_fro(h, n)
    sweeps_out[0] = sweep
    off_out[0] = off
    return 1 if off <= target else 0


def jacobi_inplace(h_obj, v_obj, double tol, int max_sweeps):
    """Diagonalize Hermitian ``h_obj`` in place.

    ``v_obj`` is either None (eigenvalues only) or an identity-initialized
    complex matrix accumulating eigenvectors as columns. Returns
    ``(converged, sweeps, off_final)`` where ``off_final`` is the remaining
    off-diagonal Frobenius mass; convergence target is ``tol * ||H||_F``.
    """
    cdef double complex[:, ::1] h = h_obj
    cdef bint want_vectors = v_obj is not None
    cdef double complex[:, ::1] v = v_obj if want_vectors else _DUMMY
    cdef Py_ssize_t n = h.shape[0]
    cdef int converged, sweeps
    cdef double off

    with nogil:
        converged = _diagonalize(h, v, n, tol, max_sweeps, want_vectors,
                                 &sweeps, &off)
    return converged == 1, sweeps, off


def jacobi_batch(ms_obj, want_vectors, double tol, int max_sweeps):
    """Diagonalize a stack of Hermitian matrices (modified in place).

    Returns ``(all_converged, evals, vecs)`` with evals of shape (m, n)
    (diagonal order, unsorted) and vecs of shape (m, n, n) or None.
    """
    cdef double complex[:, :, ::1] ms = ms_obj
    cdef Py_ssize_t m = ms.shape[0]
    cdef Py_ssize_t n = ms.shape[1]
    cdef bint want = bool(want_vectors)
    evals_arr = np.empty((m, n), dtype=np.float64)
    cdef double[:, ::1] evals = evals_arr
    vecs_arr = np.zeros((m, n, n), dtype=np.complex128) if want else None
    cdef double complex[:, :, ::1] vecs = vecs_arr if want else _DUMMY3
    cdef Py_ssize_t k, i
    cdef int ok = 1, converged, sweeps
    cdef double off

    with nogil:
        for k in range(m):
            if want:
                for i in range(n):
                    vecs[k, i, i] = 1.0
                converged = _diagonalize(ms[k], vecs[k], n, tol, max_sweeps,
                                         True, &sweeps, &off)
            else:
                converged = _diagonalize(ms[k], _DUMMY_VIEW, n, tol,
                                         max_sweeps, False, &sweeps, &off)
            if converged == 0:
                ok = 0
            for i in range(n):
                evals[k, i] = ms[k, i, i].real
    return ok == 1, evals_arr, vecs_arr


def radius_h_values(a_obj, thetas_obj, double tol, int max_sweeps):
    """h(theta) = lambda_max((e^{i theta} A + e^{-i theta} A*) / 2) for each
    theta, with the rotation, Hermitian part, and eigensolve all done on one
    scratch buffer. Returns (all_converged, values)."""
    cdef double complex[:, ::1] a = a_obj
    cdef double[::1] thetas = np.ascontiguousarray(thetas_obj, dtype=np.float64)
    cdef Py_ssize_t n = a.shape[0]
    cdef Py_ssize_t m = thetas.shape[0]
    out_arr = np.empty(m, dtype=np.float64)
    cdef double[::1] out = out_arr
    work_arr = np.empty((n, n), dtype=np.complex128)
    cdef double complex[:, ::1] work = work_arr
    cdef Py_ssize_t i, j, k
    cdef double c, s, best
    cdef double complex z, zc
    cdef int ok = 1, converged, sweeps
    cdef double off

    with nogil:
        for k in range(m):
            c = cos(thetas[k])
            s = sin(thetas[k])
            z = c + 1j * s
            zc = c - 1j * s
            for i in range(n):
                for j in range(n):
                    work[i, j] = 0.5 * (z * a[i, j] + zc * _conj(a[j, i]))
            converged = _diagonalize(work, _DUMMY_VIEW, n, tol, max_sweeps,
                                     False, &sweeps, &off)
            if converged == 0:
                ok = 0
            best = work[0, 0].real
            for i in range(1, n):
                if work[i, i].real > best:
                    best = work[i, i].real
            out[k] = best
    return ok == 1, out_arr
