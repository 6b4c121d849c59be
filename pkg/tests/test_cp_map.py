"""Tests for CP map representations: Kraus, Choi, action."""

import numpy as np
import pytest

from cpmaps import (
    CpMap,
    DimensionMismatch,
    NotCP,
    NotPSD,
    apply,
    choi_rank,
    choi_to_kraus,
    classify,
    is_cp,
    kraus_to_choi,
    maps_close,
    minimal_kraus,
)
from cpmaps.gallery import (
    SIGMA_X,
    conjugation_map,
    flip_twirl_map,
    identity_map,
    trace_state_map,
    transpose_map,
)

from conftest import random_kraus, random_map, random_psd, matrix_unit


IDENTITY_CHOI_2 = np.array(
    [
        [1, 0, 0, 1],
        [0, 0, 0, 0],
        [0, 0, 0, 0],
        [1, 0, 0, 1],
    ],
    dtype=complex,
)

FLIP_TWIRL_CHOI = np.array(
    [
        [1, 0, 0, 1],
        [0, 1, 1, 0],
        [0, 1, 1, 0],
        [1, 0, 0, 1],
    ],
    dtype=complex,
)


def test_identity_choi_frozen():
    phi = identity_map(2)
    assert np.allclose(phi.choi, IDENTITY_CHOI_2)


def test_flip_twirl_choi_and_spectrum_frozen():
    phi = flip_twirl_map()
    assert np.allclose(phi.choi, FLIP_TWIRL_CHOI)
    vals = np.linalg.eigvalsh(phi.choi)
    assert np.allclose(vals, [0.0, 0.0, 2.0, 2.0])


def test_choi_blocks_are_images_of_matrix_units():
    rng = np.random.default_rng(3)
    phi = random_map(rng, 3, 2, 2)
    for i in range(3):
        for j in range(3):
            block = phi.choi[i * 2:(i + 1) * 2, j * 2:(j + 1) * 2]
            assert np.allclose(block, apply(phi, matrix_unit(3, i, j)), atol=1e-12)


def test_apply_flip_twirl_closed_form():
    phi = flip_twirl_map()
    x = np.array([[1.0, 2.0], [3.0, 4.0]], dtype=complex)
    out = apply(phi, x)
    # X + sigma_x X sigma_x = [[a+d, b+c], [b+c, a+d]]
    assert np.allclose(out, [[5.0, 5.0], [5.0, 5.0]])


def test_apply_matches_kraus_sum():
    rng = np.random.default_rng(11)
    ks = random_kraus(rng, 3, 4, 2)
    phi = CpMap.from_kraus(ks)
    x = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    expected = sum(k.conj().T @ x @ k for k in ks)
    assert np.abs(apply(phi, x) - expected).max() < 1e-12


def test_apply_is_linear_and_positive():
    rng = np.random.default_rng(5)
    phi = random_map(rng, 3, 3, 2)
    x = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    y = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    a, b = 0.3 - 1j, 2.0 + 0.5j
    lhs = apply(phi, a * x + b * y)
    rhs = a * apply(phi, x) + b * apply(phi, y)
    assert np.abs(lhs - rhs).max() < 1e-9
    p = random_psd(rng, 3)
    w = np.linalg.eigvalsh(apply(phi, p))
    assert w[0] > -1e-10 * max(w[-1], 1.0)


def test_transpose_is_not_cp():
    phi = transpose_map(2)
    # Choi of the transpose is the swap operator: eigenvalues {-1, 1, 1, 1}
    vals = np.linalg.eigvalsh(phi.choi)
    assert np.allclose(vals, [-1.0, 1.0, 1.0, 1.0])
    assert not is_cp(phi)
    with pytest.raises(NotCP):
        classify(phi)


def test_choi_kraus_round_trip_random():
    rng = np.random.default_rng(42)
    for _ in range(20):
        d1 = int(rng.integers(1, 5))
        d2 = int(rng.integers(1, 5))
        r = int(rng.integers(1, d1 * d2 + 1))
        choi = random_psd(rng, d1 * d2, rank=r)
        ks = choi_to_kraus(choi, d1, d2)
        assert len(ks) == r
        back = kraus_to_choi(ks, d1, d2)
        assert np.abs(back - choi).max() < 1e-9 * max(np.abs(choi).max(), 1.0)


def test_choi_to_kraus_canonical_order_and_phase():
    ks = choi_to_kraus(FLIP_TWIRL_CHOI, 2, 2)
    assert np.allclose(ks[0], np.eye(2), atol=1e-12)
    assert np.allclose(ks[1], SIGMA_X, atol=1e-12)
    # the largest entry of each factor is real and positive
    for k in ks:
        idx = np.unravel_index(np.argmax(np.abs(k)), k.shape)
        assert k[idx].imag == pytest.approx(0.0, abs=1e-12)
        assert k[idx].real > 0


def test_minimal_kraus_prefers_stored_independent_family():
    phi = flip_twirl_map()
    mk = minimal_kraus(phi)
    assert all(np.array_equal(a, b) for a, b in zip(mk, phi.kraus))


def test_minimal_kraus_reduces_dependent_family():
    phi = CpMap.from_kraus([np.eye(2), np.eye(2)])
    mk = minimal_kraus(phi)
    assert len(mk) == 1
    assert np.allclose(mk[0], np.sqrt(2.0) * np.eye(2))


def test_minimal_kraus_of_zero_map_is_empty():
    assert minimal_kraus(CpMap.zero(2, 2)) == []


def test_choi_rank():
    assert choi_rank(identity_map(3)) == 1
    assert choi_rank(flip_twirl_map()) == 2
    rng = np.random.default_rng(9)
    phi = random_map(rng, 2, 3, 4)
    assert choi_rank(phi) == 4


def test_from_action_matches_direct_construction():
    phi = CpMap.from_action(lambda x: x.T, d_in=2, d_out=2)
    assert np.allclose(phi.choi, transpose_map(2).choi)
    a = np.array([[1.0, 2.0], [0.0, 1.0]])
    psi = CpMap.from_action(lambda x: a.conj().T @ x @ a, d_in=2, d_out=2)
    assert maps_close(psi, conjugation_map(a))


def test_arithmetic_on_maps():
    phi = identity_map(2)
    sx = conjugation_map(SIGMA_X)
    total = phi + sx
    assert maps_close(total, flip_twirl_map())
    assert maps_close(2.0 * phi, phi + phi)
    assert (total - total).is_zero()
    with pytest.raises(DimensionMismatch):
        identity_map(2) + identity_map(3)


def test_classify_pure_map():
    a = np.array([[1.0, 2.0], [0.0, 1j]])
    info = classify(conjugation_map(a))
    assert info.is_cp
    assert info.is_pure
    assert info.choi_rank == 1
    assert not info.is_entanglement_breaking_quasipure_form


def test_classify_unital():
    assert classify(identity_map(2)).is_unital
    assert not classify(flip_twirl_map()).is_unital  # phi(I) = 2I
    half = 0.5 * flip_twirl_map()
    assert classify(half).is_unital


def test_classify_entanglement_breaking_form():
    rho = np.array([[0.75, 0.25], [0.25, 0.25]], dtype=complex)
    v = np.array([1.0, 1j]) / np.sqrt(2.0)
    phi = trace_state_map(rho, v)
    info = classify(phi)
    assert info.is_entanglement_breaking_quasipure_form
    assert not info.is_pure
    assert info.choi_rank == 2
    # the recovered pair reproduces the action trace(rho X) |v><v|
    rng = np.random.default_rng(0)
    x = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    expected = np.trace(info.eb_state @ x) * np.outer(info.eb_vector,
                                                      info.eb_vector.conj())
    assert np.abs(apply(phi, x) - expected).max() < 1e-9
    assert np.allclose(info.eb_state, rho, atol=1e-9)


def test_classify_flip_twirl_is_not_eb_form():
    info = classify(flip_twirl_map())
    assert not info.is_entanglement_breaking_quasipure_form
    assert info.eb_state is None and info.eb_vector is None


def test_trace_state_map_factors():
    # rank-2 rho = sum p_j |u_j><u_j| gives factors sqrt(p_j) |u_j><v|
    rho = np.diag([0.25, 0.75]).astype(complex)
    v = np.array([0.0, 1.0], dtype=complex)
    phi = trace_state_map(rho, v)
    assert len(phi.kraus) == 2
    for k in phi.kraus:
        assert np.linalg.matrix_rank(k) == 1
    assert np.allclose(
        sum(k @ k.conj().T for k in phi.kraus), rho, atol=1e-12
    )
    with pytest.raises(NotPSD):
        trace_state_map(np.diag([1.0, -0.5]), v)


def test_kraus_to_choi_validates_shapes():
    with pytest.raises(DimensionMismatch):
        kraus_to_choi([np.zeros((2, 2)), np.zeros((3, 2))])
    with pytest.raises(DimensionMismatch):
        kraus_to_choi([])  # dimensions are required for an empty family
    assert np.allclose(kraus_to_choi([], d_in=2, d_out=3), np.zeros((6, 6)))


def test_from_choi_stores_hermitian_cp_checked_lazily():
    # from_choi stores any Hermitian matrix; CP-ness is a separate query
    phi = CpMap.from_choi(np.diag([1.0, -1.0, 0.0, 0.0]), 2, 2)
    assert not is_cp(phi)
    with pytest.raises(NotPSD):
        minimal_kraus(phi)


def test_zero_map_basics():
    z = CpMap.zero(2, 3)
    assert z.is_zero()
    assert is_cp(z)
    assert choi_rank(z) == 0
    assert np.allclose(apply(z, np.eye(2)), np.zeros((3, 3)))


def test_maps_close_uses_max_entry_norm():
    phi = flip_twirl_map()
    psi = CpMap.from_choi(phi.choi + 1e-12, 2, 2)
    assert maps_close(phi, psi)
    rho = CpMap.from_choi(phi.choi + 1e-6, 2, 2)
    assert not maps_close(phi, rho)
    assert not maps_close(flip_twirl_map(), identity_map(2))
