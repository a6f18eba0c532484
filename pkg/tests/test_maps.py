import numpy as np
import pytest

from radiuslab.core import frobenius, symmetrize
from radiuslab.ensembles import derive_rng, haar_isometry, haar_unitary
from radiuslab.errors import DimensionMismatchError, FunctionFlagError, MapSpecError
from radiuslab.funcalc import exp_minus_one, power
from radiuslab.maps import (
    CATALOG_VARIANTS,
    Compression,
    CongruenceMap,
    DirectSum,
    IdentityMap,
    Mixture,
    Pinching,
    SummedFamily,
    TraceState,
    Transpose,
    UnitaryConjugation,
    apply_map,
    choi_davis_margin,
    jensen_inner_margin,
    kadison_margin,
    map_from_config,
    mixed_schwarz_margin,
    random_map,
    spot_check_positivity,
)
from radiuslab.spectral import apply_function, operator_norm

from conftest import random_hermitian, random_matrix, random_psd, random_unit

J2 = np.array([[0, 1], [0, 0]], dtype=complex)


def _catalog_for_tests(rng, n=4):
    u = haar_unitary(rng, n)
    v = haar_isometry(rng, n, 2)
    return [
        IdentityMap(n),
        Pinching([1, n - 1]),
        Compression(v),
        TraceState(n),
        Transpose(n),
        UnitaryConjugation(u),
        Mixture([IdentityMap(n), TraceState(n)], [0.25, 0.75]),
        DirectSum([TraceState(2), Transpose(n - 2)]),
    ]


def test_apply_examples():
    phi = TraceState(2)
    out = apply_map(phi, np.diag([0.0, 1.0]).astype(complex))
    assert np.allclose(out, 0.5 * np.eye(2), atol=1e-15)
    assert np.allclose(apply_map(Transpose(2), J2), J2.T, atol=0)
    x = np.array([[1.0, 2.0], [3.0, 4.0]], dtype=complex)
    assert np.allclose(apply_map(Pinching([1, 1]), x), np.diag([1.0, 4.0]), atol=0)


def test_unitality_and_linearity(rng):
    for phi in _catalog_for_tests(rng):
        n = phi.input_dim
        eye = np.eye(n, dtype=complex)
        assert frobenius(phi.apply(eye) - np.eye(phi.output_dim)) <= 1e-12 * max(
            1.0, np.sqrt(phi.output_dim)
        )
        x = random_matrix(rng, n)
        y = random_matrix(rng, n)
        c = complex(rng.standard_normal(), rng.standard_normal())
        lhs = phi.apply(x + c * y)
        rhs = phi.apply(x) + c * phi.apply(y)
        assert frobenius(lhs - rhs) <= 1e-12 * max(1.0, frobenius(lhs))


def test_hermiticity_preserved(rng):
    for phi in _catalog_for_tests(rng):
        h = random_hermitian(rng, phi.input_dim)
        out = phi.apply(h)
        assert frobenius(out - out.conj().T) <= 1e-12 * max(1.0, frobenius(out))


def test_positivity_spot_check(rng):
    for phi in _catalog_for_tests(rng):
        worst = spot_check_positivity(phi, rng, samples=100)
        assert worst >= -1e-10


def test_random_map_catalog_coverage():
    seen = set()
    for index in range(80):
        rng = derive_rng(7, "MAPS", "ginibre", 4, index)
        phi = random_map(rng, 4)
        seen.add(phi.variant)
        eye = np.eye(phi.input_dim, dtype=complex)
        assert frobenius(phi.apply(eye) - np.eye(phi.output_dim)) <= 1e-11
    assert seen.issuperset(set(CATALOG_VARIANTS) - {"compress"}) or seen.issuperset(
        CATALOG_VARIANTS
    )


def test_map_config_round_trip(rng):
    for phi in _catalog_for_tests(rng):
        back = map_from_config(phi.to_config())
        x = random_matrix(rng, phi.input_dim)
        assert np.allclose(phi.apply(x), back.apply(x), atol=1e-13)


def test_compress_accepts_square_matrix_wire_format(rng):
    from radiuslab.core import matrix_to_json_dict

    u = haar_unitary(rng, 3)
    phi = map_from_config({"variant": "compress", "V": matrix_to_json_dict(u)})
    x = random_matrix(rng, 3)
    assert np.allclose(phi.apply(x), u.conj().T @ x @ u, atol=1e-13)


def test_map_validation_errors(rng):
    with pytest.raises(MapSpecError):
        Mixture([IdentityMap(2), TraceState(2)], [0.5, 0.6])
    with pytest.raises(MapSpecError):
        Mixture([IdentityMap(2), TraceState(2)], [-0.1, 1.1])
    with pytest.raises(MapSpecError):
        Compression(np.ones((3, 2), dtype=complex))
    with pytest.raises(MapSpecError):
        UnitaryConjugation(np.ones((2, 2), dtype=complex))
    with pytest.raises(MapSpecError):
        Pinching([0, 2])
    with pytest.raises(DimensionMismatchError):
        IdentityMap(2).apply(np.zeros((3, 3), dtype=complex))
    with pytest.raises(MapSpecError):
        SummedFamily([CongruenceMap(np.eye(2, dtype=complex))] * 2)


def test_summed_family_partition(rng):
    w = haar_isometry(rng, 6, 3)
    blocks = [w[:3, :], w[3:, :]]
    fam = SummedFamily([CongruenceMap(b) for b in blocks])
    assert fam.input_dim == 6 and fam.output_dim == 3
    eye = np.eye(6, dtype=complex)
    assert np.allclose(fam.apply(eye), np.eye(3), atol=1e-12)


def test_choi_davis_examples(rng):
    h = np.diag([0.0, 1.0]).astype(complex)
    assert choi_davis_margin(IdentityMap(2), power(2), h) == pytest.approx(0.0, abs=1e-14)
    assert choi_davis_margin(TraceState(2), power(2), h) == pytest.approx(0.25, abs=1e-12)
    hp = np.array([[1, 1], [1, 1]], dtype=complex)
    assert choi_davis_margin(Pinching([1, 1]), power(2), hp) == pytest.approx(
        1.0, abs=1e-12
    )


def test_choi_davis_requires_operator_convex():
    with pytest.raises(FunctionFlagError):
        choi_davis_margin(IdentityMap(2), exp_minus_one(), np.eye(2, dtype=complex))


def test_choi_davis_random(rng):
    for _ in range(60):
        n = int(rng.integers(2, 6))
        phi = random_map(rng, n)
        h = random_psd(rng, n)
        r = float(rng.uniform(1.0, 2.0))
        margin = choi_davis_margin(phi, power(r), h)
        scale = max(1.0, operator_norm(symmetrize(phi.apply(apply_function(h, power(r))))))
        assert margin >= -1e-10 * scale


def test_kadison_examples_and_random(rng):
    h = np.diag([0.0, 1.0]).astype(complex)
    assert kadison_margin(IdentityMap(2), h) == pytest.approx(0.0, abs=1e-14)
    assert kadison_margin(TraceState(2), h) == pytest.approx(0.25, abs=1e-12)
    u = haar_unitary(rng, 3)
    hh = random_hermitian(rng, 3)
    assert kadison_margin(UnitaryConjugation(u), hh) == pytest.approx(0.0, abs=1e-12)
    for _ in range(60):
        n = int(rng.integers(2, 6))
        phi = random_map(rng, n)
        h = random_hermitian(rng, n)  # indefinite inputs included
        margin = kadison_margin(phi, h)
        scale = max(1.0, operator_norm(symmetrize(phi.apply(h @ h))))
        assert margin >= -1e-10 * scale


def test_jensen_examples(rng):
    c = 0.7
    x = random_unit(rng, 3)
    h = c * np.eye(3, dtype=complex)
    assert jensen_inner_margin(IdentityMap(3), power(2), h, x) == pytest.approx(
        0.0, abs=1e-12
    )
    h = np.diag([0.0, 1.0]).astype(complex)
    plus = np.array([1, 1], dtype=complex) / np.sqrt(2)
    assert jensen_inner_margin(IdentityMap(2), power(2), h, plus) == pytest.approx(
        0.25, abs=1e-12
    )
    e2 = np.array([0, 1], dtype=complex)
    assert jensen_inner_margin(IdentityMap(2), power(2), h, e2) == pytest.approx(
        0.0, abs=1e-12
    )


def test_jensen_random_including_non_operator_convex(rng):
    fns = [power(2), power(3), exp_minus_one()]
    for _ in range(100):
        n = int(rng.integers(2, 6))
        phi = random_map(rng, n)
        h = random_psd(rng, n)
        x = random_unit(rng, phi.output_dim)
        fn = fns[int(rng.integers(0, len(fns)))]
        margin = jensen_inner_margin(phi, fn, h, x)
        lifted = float(
            np.real(np.vdot(x, symmetrize(phi.apply(apply_function(h, fn))) @ x))
        )
        assert margin >= -1e-10 * max(1.0, abs(lifted))


def test_mixed_schwarz_examples(rng):
    e1 = np.array([1, 0], dtype=complex)
    e2 = np.array([0, 1], dtype=complex)
    assert mixed_schwarz_margin(J2, e2, e1) == pytest.approx(0.0, abs=1e-12)
    x = random_unit(rng, 2)
    assert mixed_schwarz_margin(np.eye(2, dtype=complex), x, x) == pytest.approx(
        0.0, abs=1e-12
    )
    y = random_unit(rng, 2)
    margin = mixed_schwarz_margin(np.eye(2, dtype=complex), x, y)
    assert margin == pytest.approx(1.0 - abs(np.vdot(y, x)), abs=1e-12)
    assert mixed_schwarz_margin(np.zeros((2, 2), dtype=complex), x, y) == 0.0


def test_mixed_schwarz_random(rng):
    for _ in range(100):
        n = int(rng.integers(1, 7))
        a = random_matrix(rng, n)
        x = random_unit(rng, n)
        y = random_unit(rng, n)
        margin = mixed_schwarz_margin(a, x, y)
        assert margin >= -1e-10 * max(1.0, operator_norm(a))


def test_transpose_map_margins_hold(rng):
    # the positive-but-not-completely-positive catalog member gets the same
    # guarantees; nothing here relies on complete positivity
    phi = Transpose(4)
    for _ in range(20):
        h = random_psd(rng, 4)
        assert choi_davis_margin(phi, power(2), h) >= -1e-10 * max(
            1.0, operator_norm(h) ** 2
        )
        hh = random_hermitian(rng, 4)
        assert kadison_margin(phi, hh) >= -1e-10 * max(1.0, operator_norm(hh) ** 2)
