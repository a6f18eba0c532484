"""Pure numpy fallback for the compiled Jacobi kernel.

Same rotation formulas and sweep order as ``radiuslab._kernels``; row and
column updates are vectorized per rotation instead of looped. Kept importable
everywhere so the package works without a compiler.
"""

import numpy as np

__all__ = ["jacobi_inplace", "jacobi_batch", "radius_h_values", "KERNEL_NAME"]

KERNEL_NAME = "python"


def _offdiag_fro(h):
    n = h.shape[0]
    iu = np.triu_indices(n, 1)
    return float(np.sqrt(2.0) * np.linalg.norm(h[iu]))


def _sweep(h, v, n, skip, want_vectors):
    for p in range(n - 1):
        for q in range(p + 1, n):
            hpq = h[p, q]
            habs = abs(hpq)
            if habs <= skip:
                continue
            u = hpq / habs
            cu = u.conjugate()
            a = h[p, p].real
            b = h[q, q].real
            theta = (a - b) / (2.0 * habs)
            sg = 1.0 if theta >= 0.0 else -1.0
            t = -sg / (abs(theta) + np.sqrt(theta * theta + 1.0))
            c = 1.0 / np.sqrt(1.0 + t * t)
            s = t * c
            hp = h[p, :].copy()
            hq = h[q, :].copy()
            h[p, :] = c * hp - (s * u) * hq
            h[q, :] = (s * cu) * hp + c * hq
            h[:, p] = np.conj(h[p, :])
            h[:, q] = np.conj(h[q, :])
            h[p, p] = c * c * a - 2.0 * c * s * habs + s * s * b
            h[q, q] = s * s * a + 2.0 * c * s * habs + c * c * b
            h[p, q] = 0.0
            h[q, p] = 0.0
            if want_vectors:
                vp = v[:, p].copy()
                vq = v[:, q].copy()
                v[:, p] = c * vp - (s * cu) * vq
                v[:, q] = (s * u) * vp + c * vq


def jacobi_inplace(h, v, tol, max_sweeps):
    """Diagonalize Hermitian ``h`` in place; see the compiled twin for contract."""
    n = h.shape[0]
    want_vectors = v is not None
    norm0 = float(np.linalg.norm(h, "fro"))
    target = tol * norm0
    skip = target / n if n > 0 else 0.0
    sweep = 0
    off = _offdiag_fro(h)
    while off > target and sweep < max_sweeps:
        _sweep(h, v, n, skip, want_vectors)
        sweep += 1
        off = _offdiag_fro(h)
    return off <= target, sweep, off


def jacobi_batch(ms, want_vectors, tol, max_sweeps):
    """Loop-based twin of the compiled batch entry point."""
    m, n = ms.shape[0], ms.shape[1]
    evals = np.empty((m, n), dtype=np.float64)
    vecs = np.zeros((m, n, n), dtype=np.complex128) if want_vectors else None
    ok = True
    for k in range(m):
        v = None
        if want_vectors:
            vecs[k] = np.eye(n)
            v = vecs[k]
        converged, _, _ = jacobi_inplace(ms[k], v, tol, max_sweeps)
        if not converged:
            ok = False
        evals[k] = np.real(np.diag(ms[k]))
    return ok, evals, vecs


def radius_h_values(a, thetas, tol, max_sweeps):
    """Per-theta lambda_max of the rotated Hermitian part; compiled twin's
    contract."""
    thetas = np.ascontiguousarray(thetas, dtype=np.float64)
    out = np.empty(thetas.shape[0], dtype=np.float64)
    ok = True
    for k, theta in enumerate(thetas):
        z = complex(np.cos(theta), np.sin(theta))
        work = 0.5 * (z * a + np.conj(z) * a.conj().T)
        converged, _, _ = jacobi_inplace(work, None, tol, max_sweeps)
        if not converged:
            ok = False
        out[k] = float(np.max(np.real(np.diag(work))))
    return ok, out
