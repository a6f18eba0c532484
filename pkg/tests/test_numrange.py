import math

import numpy as np
import pytest

from radiuslab.errors import DomainError, FunctionFlagError, NotUnitVectorError
from radiuslab.funcalc import power, psi_from_function
from radiuslab.numrange import (
    numerical_radius,
    rayleigh,
    sup_convex_over_joint_range,
)
from radiuslab.spectral import lambda_max, operator_norm

from conftest import random_matrix, random_psd, random_unit

J2 = np.array([[0, 1], [0, 0]], dtype=complex)
J3 = np.eye(3, k=1, dtype=complex)


def brute_force_radius(a, grid_n):
    # independent oracle: dense theta grid through numpy's eigensolver
    thetas = 2.0 * np.pi * np.arange(grid_n) / grid_n
    phases = np.exp(1j * thetas)
    stack = phases[:, None, None] * a[None, :, :]
    stack = (stack + stack.conj().transpose(0, 2, 1)) / 2.0
    return float(np.linalg.eigvalsh(stack)[:, -1].max())


def test_radius_oracles():
    res = numerical_radius(J2)
    assert res.value == pytest.approx(0.5, abs=1e-10)
    assert res.certified_error == pytest.approx(np.pi / 256, abs=1e-12)
    assert numerical_radius(np.diag([-3.0, 2.0]).astype(complex)).value == pytest.approx(
        3.0, abs=1e-9
    )
    assert numerical_radius(J3).value == pytest.approx(math.cos(math.pi / 4), abs=1e-8)


def test_radius_matches_brute_force(rng):
    for _ in range(10):
        n = int(rng.integers(2, 6))
        a = random_matrix(rng, n)
        ours = numerical_radius(a).value
        brute = brute_force_radius(a, 4096)
        assert ours >= brute - 1e-10
        assert ours <= brute + operator_norm(a) * np.pi / 4096 + 1e-10


def test_radius_zero_matrix():
    res = numerical_radius(np.zeros((3, 3), dtype=complex))
    assert res.value == 0.0 and res.certified_error == 0.0


def test_radius_equivalence_sandwich(rng):
    for _ in range(200):
        n = int(rng.integers(1, 9))
        a = random_matrix(rng, n)
        w = numerical_radius(a).value
        nrm = operator_norm(a)
        tol = 1e-9 * max(1.0, nrm)
        assert 0.5 * nrm - tol <= w <= nrm + tol


def test_radius_adjoint_and_phase_invariance(rng):
    for _ in range(15):
        a = random_matrix(rng, int(rng.integers(2, 7)))
        w = numerical_radius(a).value
        tol = 1e-9 * max(1.0, w)
        assert abs(w - numerical_radius(a.conj().T).value) <= tol
        alpha = float(rng.uniform(0, 2 * np.pi))
        assert abs(w - numerical_radius(np.exp(1j * alpha) * a).value) <= tol


def test_radius_normal_matrices(rng):
    from radiuslab.ensembles import haar_unitary, standard_complex_gaussian

    for _ in range(10):
        n = int(rng.integers(2, 7))
        u = haar_unitary(rng, n)
        z = standard_complex_gaussian(rng, n)
        a = (u * z) @ u.conj().T
        w = numerical_radius(a).value
        expected = float(np.max(np.abs(z)))
        assert w == pytest.approx(expected, rel=1e-8, abs=1e-10)
        assert operator_norm(a) == pytest.approx(expected, rel=1e-8, abs=1e-10)


def test_radius_grid_doubling_monotone(rng):
    for _ in range(10):
        a = random_matrix(rng, int(rng.integers(2, 6)))
        w1 = numerical_radius(a, grid_n=256).value
        w2 = numerical_radius(a, grid_n=512).value
        assert w2 >= w1 - 1e-10


def test_radius_grid_validation():
    with pytest.raises(ValueError):
        numerical_radius(J2, grid_n=8)


def test_rayleigh_examples(rng):
    x = random_unit(rng, 4)
    assert rayleigh(np.eye(4, dtype=complex), x) == pytest.approx(1.0, abs=1e-12)
    e2 = np.array([0, 1], dtype=complex)
    assert rayleigh(J2, e2) == 0.0
    plus = np.array([1, 1], dtype=complex) / np.sqrt(2)
    assert rayleigh(J2, plus) == pytest.approx(0.5, abs=1e-14)


def test_rayleigh_rejects_non_unit():
    with pytest.raises(NotUnitVectorError):
        rayleigh(J2, np.array([1.0, 1.0], dtype=complex))


def test_sup_sweep_point_range():
    eye = np.eye(2, dtype=complex)
    res = sup_convex_over_joint_range(eye, eye, psi_from_function(power(2)))
    assert res.lower == pytest.approx(1.0, abs=1e-12)
    assert res.upper == pytest.approx(1.0, abs=1e-12)


def test_sup_sweep_segment_oracle():
    p = np.diag([1.0, 0.0]).astype(complex)
    q = np.diag([0.0, 1.0]).astype(complex)
    res = sup_convex_over_joint_range(p, q, psi_from_function(power(2)))
    assert res.lower == pytest.approx(1.0 / 3.0, abs=1e-10)
    assert res.upper >= res.lower - 1e-12


def test_sup_sweep_rayleigh_degenerate(rng):
    # P = Q collapses the joint range to the diagonal: sup psi = f(lambda_max)
    p = random_psd(rng, 4)
    res = sup_convex_over_joint_range(p, p, psi_from_function(power(1)))
    assert res.lower == pytest.approx(lambda_max(p), rel=1e-10)


def test_sup_sweep_witness_reproduces_lower(rng):
    psi = psi_from_function(power(2))
    for _ in range(5):
        p = random_psd(rng, 4)
        q = random_psd(rng, 4)
        res = sup_convex_over_joint_range(p, q, psi)
        x = res.witness
        a = float(np.real(np.vdot(x, p @ x)))
        b = float(np.real(np.vdot(x, q @ x)))
        assert psi.value(max(a, 0), max(b, 0)) == pytest.approx(res.lower, abs=1e-12)


def test_sup_sweep_direction_doubling(rng):
    psi = psi_from_function(power(2))
    for _ in range(5):
        p = random_psd(rng, 4)
        q = random_psd(rng, 4)
        lo1 = sup_convex_over_joint_range(p, q, psi, directions=360).lower
        lo2 = sup_convex_over_joint_range(p, q, psi, directions=720).lower
        assert lo2 >= lo1 - 1e-10


def test_sup_sweep_bracket_order(rng):
    psi = psi_from_function(power(2))
    for _ in range(10):
        n = int(rng.integers(2, 6))
        p = random_psd(rng, n)
        q = random_psd(rng, n)
        res = sup_convex_over_joint_range(p, q, psi)
        assert res.lower <= res.upper + 1e-9 * max(1.0, res.upper)


def test_sup_sweep_commuting_brute_force(rng):
    # commuting case: the joint range is the convex hull of paired eigenvalues,
    # so the exact maximum of a convex objective is attained on a vertex
    psi = psi_from_function(power(2))
    for _ in range(10):
        d1 = np.abs(rng.standard_normal(4))
        d2 = np.abs(rng.standard_normal(4))
        p = np.diag(d1).astype(complex)
        q = np.diag(d2).astype(complex)
        exact = max(psi.value(a, b) for a, b in zip(d1, d2))
        res = sup_convex_over_joint_range(p, q, psi)
        assert res.lower >= exact - 1e-8
        assert exact <= res.upper + 1e-8


def test_sup_sweep_validation(rng):
    p = random_psd(rng, 3)
    with pytest.raises(FunctionFlagError):
        sup_convex_over_joint_range(p, p, object())
    indefinite = np.diag([1.0, -1.0, 0.5]).astype(complex)
    with pytest.raises(DomainError):
        sup_convex_over_joint_range(indefinite, p, psi_from_function(power(2)))
