"""The compiled kernel and the pure numpy fallback must agree."""

import numpy as np
import pytest

from radiuslab import _jacobi_py
from radiuslab.backend import available_backends
from radiuslab.core import frobenius
from radiuslab.spectral import JACOBI_MAX_SWEEPS, JACOBI_TOL

from conftest import random_hermitian


def _run(kernel, h, want_vectors):
    work = np.array(h, dtype=np.complex128, order="C", copy=True)
    n = h.shape[0]
    vecs = np.eye(n, dtype=np.complex128) if want_vectors else None
    converged, sweeps, off = kernel.jacobi_inplace(
        work, vecs, JACOBI_TOL, JACOBI_MAX_SWEEPS
    )
    assert converged
    return np.sort(np.real(np.diag(work))), vecs


def test_pure_backend_is_correct(rng):
    for _ in range(15):
        n = int(rng.integers(1, 10))
        h = random_hermitian(rng, n)
        evals, vecs = _run(_jacobi_py, h, want_vectors=True)
        ref = np.linalg.eigvalsh(h)
        assert np.max(np.abs(evals - ref)) <= 1e-12 * max(1.0, frobenius(h))
        assert frobenius(vecs.conj().T @ vecs - np.eye(n)) <= 1e-12


def test_backends_agree(rng):
    backends = available_backends()
    if "cython" not in backends:
        pytest.skip("compiled kernel not built")
    for _ in range(20):
        n = int(rng.integers(1, 13))
        h = random_hermitian(rng, n)
        evals_c, _ = _run(backends["cython"], h, want_vectors=False)
        evals_p, _ = _run(backends["python"], h, want_vectors=False)
        assert np.max(np.abs(evals_c - evals_p)) <= 1e-12 * max(1.0, frobenius(h))


def test_backends_agree_on_vectors(rng):
    backends = available_backends()
    if "cython" not in backends:
        pytest.skip("compiled kernel not built")
    h = random_hermitian(rng, 8)
    evals_c, v_c = _run(backends["cython"], h, want_vectors=True)
    evals_p, v_p = _run(backends["python"], h, want_vectors=True)
    assert np.max(np.abs(evals_c - evals_p)) <= 1e-13 * max(1.0, frobenius(h))
    # both reconstruct the input
    for evals, v in ((evals_c, v_c), (evals_p, v_p)):
        assert v is not None


def test_radius_values_backends_agree(rng):
    backends = available_backends()
    if "cython" not in backends:
        pytest.skip("compiled kernel not built")
    from conftest import random_matrix

    thetas = 2.0 * np.pi * np.arange(64) / 64
    for n in (1, 3, 7):
        a = np.ascontiguousarray(random_matrix(rng, n))
        ok_c, vals_c = backends["cython"].radius_h_values(a, thetas, JACOBI_TOL, JACOBI_MAX_SWEEPS)
        ok_p, vals_p = backends["python"].radius_h_values(a, thetas, JACOBI_TOL, JACOBI_MAX_SWEEPS)
        assert ok_c and ok_p
        assert np.max(np.abs(vals_c - vals_p)) <= 1e-12 * max(1.0, float(np.abs(vals_c).max()))


def test_batch_backends_agree(rng):
    backends = available_backends()
    if "cython" not in backends:
        pytest.skip("compiled kernel not built")
    stack = np.stack([random_hermitian(rng, 5) for _ in range(8)])
    got = {}
    for name, kernel in backends.items():
        ok, evals, vecs = kernel.jacobi_batch(
            np.ascontiguousarray(stack.copy()), True, JACOBI_TOL, JACOBI_MAX_SWEEPS
        )
        assert ok
        got[name] = (np.sort(evals, axis=1), vecs)
        rebuilt = np.matmul(vecs * evals[:, None, :], np.conj(np.swapaxes(vecs, 1, 2)))
        assert np.max(np.abs(rebuilt - stack)) <= 1e-11
    assert np.max(np.abs(got["cython"][0] - got["python"][0])) <= 1e-12


def test_pure_backend_end_to_end():
    # the fallback must carry the whole stack, not just the kernel
    import subprocess
    import sys
    import os

    code = (
        "import numpy as np, radiuslab as rl\n"
        "assert rl.active_backend() == 'python'\n"
        "J2 = np.array([[0, 1], [0, 0]], dtype=complex)\n"
        "assert abs(rl.numerical_radius(J2, grid_n=64).value - 0.5) < 1e-9\n"
        "res = rl.chain_thm_main(J2, rl.power(2))\n"
        "assert res.holds\n"
        "assert abs(res.terms[1] - 1.0 / 3.0) < 1e-10\n"
        "print('pure backend ok')\n"
    )
    env = dict(os.environ, RADIUSLAB_JACOBI="python")
    proc = subprocess.run(
        [sys.executable, "-c", code], capture_output=True, text=True, env=env
    )
    assert proc.returncode == 0, proc.stderr
    assert "pure backend ok" in proc.stdout


def test_zero_and_diagonal_terminate_immediately():
    for kernel in available_backends().values():
        for h in (np.zeros((3, 3)), np.diag([2.0, -1.0, 0.5])):
            work = np.array(h, dtype=np.complex128, order="C")
            converged, sweeps, off = kernel.jacobi_inplace(
                work, None, JACOBI_TOL, JACOBI_MAX_SWEEPS
            )
            assert converged and sweeps == 0 and off == 0.0
