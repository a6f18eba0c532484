"""Hermitian eigendecomposition and the matrix functional calculus.

The eigensolver is cyclic Jacobi with complex rotations (see ``backend``):
sweeps run until the off-diagonal Frobenius mass drops below 1e-13 * ||H||_F,
with a hard cap of 60 sweeps. Jacobi was chosen over tridiagonalization + QR
because it is simple to make bit-reproducible and is entirely adequate at the
desk-scale dimensions (n <= 64) this package targets.

Everything built on top (f(H), |A|, operator norm, spectral extremes) goes
through this one engine.
"""

from dataclasses import dataclass

import numpy as np

from . import backend
from .core import as_matrix, assert_hermitian, frobenius, symmetrize
from .errors import ConvergenceError, DomainError

JACOBI_TOL = 1e-13
JACOBI_MAX_SWEEPS = 60

# Eigenvalues of a nominally-PSD matrix inside [-CLAMP_RTOL * scale, 0) are
# treated as roundoff and clamped to zero; anything more negative is a genuine
# domain violation and raises.
CLAMP_RTOL = 1e-10


@dataclass(frozen=True)
class EigenDecomposition:
    """Spectral factorization H = V diag(eigenvalues) V*.

    eigenvalues are ascending; columns of ``vectors`` are orthonormal with a
    deterministic phase (first component above 1e-12 made real positive).
    ``residual`` is the achieved ||H - V L V*||_F / max(1, ||H||_F).
    """

    eigenvalues: np.ndarray
    vectors: np.ndarray
    residual: float


def _jacobi(h, want_vectors):
    n = h.shape[0]
    work = np.array(h, dtype=np.complex128, order="C", copy=True)
    vecs = np.eye(n, dtype=np.complex128) if want_vectors else None
    converged, sweeps, off = backend.jacobi_inplace(
        work, vecs, JACOBI_TOL, JACOBI_MAX_SWEEPS
    )
    if not converged:
        raise ConvergenceError(
            f"Jacobi sweeps exhausted ({sweeps}) with off-diagonal mass {off:.3e}",
            off_diagonal=off,
        )
    evals = np.real(np.diag(work)).copy()
    return evals, vecs


def _normalize_columns(evals, vecs):
    """Ascending eigenvalue order, then a deterministic per-column phase
    (first component above 1e-12 made real positive)."""
    order = np.argsort(evals, kind="stable")
    evals = evals[order]
    vecs = vecs[:, order]
    mask = np.abs(vecs) > 1e-12
    has_pivot = mask.any(axis=0)
    first = np.argmax(mask, axis=0)
    pivots = vecs[first, np.arange(vecs.shape[1])]
    safe = np.where(has_pivot, pivots, 1.0)
    vecs = vecs * (safe.conjugate() / np.abs(safe))[None, :]
    return evals, vecs


def eigvalsh(h):
    """Ascending eigenvalues of a Hermitian matrix (no vectors, no checks).

    Caller contract: ``h`` is Hermitian by construction. Hot path used by the
    radius sweep and the norm helpers.
    """
    evals, _ = _jacobi(h, want_vectors=False)
    evals.sort()
    return evals


def eigh_batch(stack, want_vectors):
    """Batched eigendecomposition of a stack of Hermitian-by-construction
    matrices. The stack buffer is destroyed. Eigenvalues come back in
    diagonal (unsorted) order; columns of each vecs[k] match evals[k]."""
    stack = np.ascontiguousarray(stack, dtype=np.complex128)
    ok, evals, vecs = backend.jacobi_batch(
        stack, want_vectors, JACOBI_TOL, JACOBI_MAX_SWEEPS
    )
    if not ok:
        raise ConvergenceError("Jacobi sweeps exhausted inside a batched solve")
    return evals, vecs


def eigh(h):
    """Eigenvalues and phase-normalized eigenvectors; caller asserts Hermitian."""
    evals, vecs = _jacobi(h, want_vectors=True)
    return _normalize_columns(evals, vecs)


def eig_hermitian(h):
    """Full decomposition with validation and residual: raises on a matrix that
    fails the Hermitian check or on sweep-cap exhaustion."""
    h = assert_hermitian(h)
    evals, vecs = eigh(h)
    resid = frobenius(h - (vecs * evals) @ vecs.conj().T) / max(1.0, frobenius(h))
    return EigenDecomposition(eigenvalues=evals, vectors=vecs, residual=float(resid))


def _clamp_spectrum(evals, scale):
    floor = -CLAMP_RTOL * scale
    low = float(evals.min()) if evals.size else 0.0
    if low < floor:
        raise DomainError(
            f"eigenvalue {low:.6e} below clamp floor {floor:.3e} "
            "for a function with domain [0, inf)"
        )
    return np.maximum(evals, 0.0)


def func_calc_prechecked(h, fn):
    """f(H) without the Hermitian assertion or final symmetrization; for hot
    paths where H is Hermitian by construction (quadrature nodes)."""
    evals, vecs = eigh(h)
    if getattr(fn, "entire", False):
        fvals = fn.eval_unrestricted(evals)
    else:
        scale = float(np.max(np.abs(evals))) if evals.size else 0.0
        evals = _clamp_spectrum(evals, scale)
        fvals = fn.eval_array(evals)
    return (vecs * fvals) @ vecs.conj().T


def apply_function(h, fn):
    """Functional calculus: V f(L) V* for Hermitian ``h``.

    Functions whose formula only exists on [0, inf) (fractional powers) get
    the clamp window: eigenvalues inside it are set to zero, genuinely
    negative spectrum raises DomainError. Kinds that extend to all of R
    (integer powers, affine, polynomials, e^t - 1) evaluate on the raw
    spectrum, so e.g. squaring an indefinite matrix works. The result is
    symmetrized (documented: V f(L) V* is Hermitian only up to roundoff).
    """
    h = assert_hermitian(h)
    return symmetrize(func_calc_prechecked(h, fn))


def abs_operator(a):
    """|A| = (A*A)^(1/2), positive semidefinite.

    The product A*A is symmetrized before the eigensolve (documented
    symmetrization: the product deviates from Hermitian only by roundoff) and
    its spectrum is clamped at zero under the standard window.
    """
    a = as_matrix(a)
    m = symmetrize(a.conj().T @ a)
    evals, vecs = eigh(m)
    scale = float(np.max(np.abs(evals))) if evals.size else 0.0
    evals = _clamp_spectrum(evals, scale)
    return symmetrize((vecs * np.sqrt(evals)) @ vecs.conj().T)


def operator_norm(a):
    """Largest singular value, computed as sqrt(lambda_max(A*A))."""
    a = as_matrix(a)
    m = symmetrize(a.conj().T @ a)
    top = float(eigvalsh(m)[-1])
    return float(np.sqrt(max(top, 0.0)))


def lambda_extremes(h):
    """(lambda_min, lambda_max) of a Hermitian matrix."""
    h = assert_hermitian(h)
    evals = eigvalsh(h)
    return float(evals[0]), float(evals[-1])


def lambda_max(h):
    """Largest eigenvalue; caller asserts Hermitian (hot path)."""
    return float(eigvalsh(h)[-1])
