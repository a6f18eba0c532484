"""Dense complex matrix basics: validation, adjoint, Cartesian split, JSON I/O.

Operands are plain ``numpy.ndarray`` of dtype complex128, square, row-major.
All functions are pure; nothing mutates its inputs.
"""

import json

import numpy as np

from .errors import DimensionMismatchError, NotHermitianError

HERMITIAN_RTOL = 1e-12


def as_matrix(a):
    """Validate and return ``a`` as a square complex128 matrix.

    Rejects non-square shapes and non-finite entries.
    """
    m = np.ascontiguousarray(a, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionMismatchError(m.shape, m.shape, op="square matrix expected")
    if m.shape[0] < 1:
        raise DimensionMismatchError(m.shape, m.shape, op="empty matrix")
    if not (np.all(np.isfinite(m.real)) and np.all(np.isfinite(m.imag))):
        raise ValueError("matrix has non-finite entries")
    return m


def adjoint(m):
    """Conjugate transpose."""
    return np.asarray(m).conj().T.copy()


def frobenius(m):
    """Frobenius norm."""
    return float(np.linalg.norm(m, "fro"))


def hermitian_deviation(m):
    """Relative Frobenius deviation from self-adjointness."""
    m = np.asarray(m)
    return frobenius(m - m.conj().T) / max(1.0, frobenius(m))


def assert_hermitian(m, rtol=HERMITIAN_RTOL):
    """Return ``m`` if Hermitian within ``rtol``; raise otherwise.

    Deliberately does not symmetrize: a failing input signals an upstream bug.
    """
    m = as_matrix(m)
    dev = hermitian_deviation(m)
    if dev > rtol:
        raise NotHermitianError(
            f"matrix deviates from Hermitian by {dev:.3e} (tolerance {rtol:.1e})"
        )
    return m


def symmetrize(m):
    """(M + M*)/2, used only where a product is Hermitian up to roundoff."""
    m = np.asarray(m)
    return (m + m.conj().T) / 2.0


def matmul(a, b):
    """Checked matrix product."""
    a = np.asarray(a, dtype=np.complex128)
    b = np.asarray(b, dtype=np.complex128)
    if a.shape[1] != b.shape[0]:
        raise DimensionMismatchError(a.shape, b.shape, op="matmul")
    return a @ b


def add(a, b):
    """Checked matrix sum."""
    a = np.asarray(a, dtype=np.complex128)
    b = np.asarray(b, dtype=np.complex128)
    if a.shape != b.shape:
        raise DimensionMismatchError(a.shape, b.shape, op="add")
    return a + b


def scale(c, a):
    """Scalar multiple."""
    return complex(c) * np.asarray(a, dtype=np.complex128)


def cartesian_decomposition(a):
    """Split A into Hermitian parts (B, C) with A = B + iC.

    B = (A + A*)/2 and C = (A - A*)/(2i); both are Hermitian by construction
    and satisfy (A*A + AA*)/2 = B^2 + C^2.
    """
    a = as_matrix(a)
    astar = a.conj().T
    b = (a + astar) / 2.0
    c = (a - astar) / 2.0j
    return b, c


def matrix_to_json_dict(m):
    """Wire format: {"n": n, "data": [[re, im], ...]} with n^2 row-major pairs."""
    m = as_matrix(m)
    n = m.shape[0]
    flat = m.reshape(-1)
    return {"n": n, "data": [[float(z.real), float(z.imag)] for z in flat]}


def matrix_from_json_dict(d):
    n = int(d["n"])
    data = d["data"]
    if len(data) != n * n:
        raise DimensionMismatchError((n, n), (len(data),), op="matrix JSON")
    flat = np.array([complex(re, im) for re, im in data], dtype=np.complex128)
    return as_matrix(flat.reshape(n, n))


def save_matrix(path, m):
    with open(path, "w") as fh:
        json.dump(matrix_to_json_dict(m), fh)
        fh.write("\n")


def load_matrix(path):
    with open(path) as fh:
        return matrix_from_json_dict(json.load(fh))
