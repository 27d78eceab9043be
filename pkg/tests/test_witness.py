import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.spatial.transform import Rotation

from entanglekit import catalog as cat
from entanglekit.core import DensityMatrix, DomainError, NumericError, partial_transpose_matrix, tensor
from entanglekit.criteria import ppt_check
from entanglekit.randstates import haar_unitary, random_mixture, random_pure, random_separable
from entanglekit.witness import (
    CHSHSetting,
    MapAsOperator,
    WitnessOperator,
    chsh_maximize,
    chsh_maximum_closed_form,
    chsh_value,
    cj_map_to_operator,
    cj_operator_to_map,
    correlation,
    identity_map,
    map_images,
    map_product_floor,
    optimal_singlet_setting,
    product_floor,
    standard_witness,
    transpose_map,
    unitary_map,
    witness_check,
    witness_from_ppt_entangled_direction,
    witness_product_floor,
    witness_value,
)

from .strategies import seeds

PSI_MINUS = np.array([0, 1, -1, 0]) / np.sqrt(2)
PHI_PLUS = np.array([1, 0, 0, 1]) / np.sqrt(2)
PAULI_Z = np.diag([1.0, -1.0])


# --- witnesses -------------------------------------------------------------

def test_standard_witness_matrix():
    expected = 0.5 * (np.eye(4) - 2 * np.outer(PSI_MINUS, PSI_MINUS))
    np.testing.assert_allclose(standard_witness().matrix, expected, atol=1e-15)


def test_standard_witness_values():
    W = standard_witness()
    assert witness_value(W, cat.singlet()) == pytest.approx(-0.5, abs=1e-12)
    assert witness_value(W, DensityMatrix.maximally_mixed((2, 2))) == pytest.approx(0.25, abs=1e-15)


@given(seeds)
def test_standard_witness_nonnegative_on_products(seed):
    rng = np.random.default_rng(seed)
    psi = tensor(random_pure((2,), seed=rng), random_pure((2,), seed=rng))
    assert witness_value(standard_witness(), psi) >= -1e-12


def test_witness_identity_direction():
    W = witness_from_ppt_entangled_direction(DensityMatrix.maximally_mixed((2, 2)))
    np.testing.assert_allclose(W.matrix, np.eye(4) / 4)
    assert not witness_check(W, cat.singlet(), restarts=8, seed=0).detected


def test_witness_from_singlet_direction():
    W = witness_from_ppt_entangled_direction(np.outer(PSI_MINUS, PSI_MINUS), (2, 2))
    assert witness_product_floor(W, seed=0) == pytest.approx(0, abs=1e-7)
    assert witness_value(W, cat.bell("phi+").density()) < 0


@pytest.mark.parametrize("W,floor", [
    (standard_witness(), 0.0),
    (WitnessOperator(np.eye(4), (2, 2)), 1.0),
    (WitnessOperator(np.kron(PAULI_Z, PAULI_Z), (2, 2)), -1.0),
])
def test_product_floor_examples(W, floor):
    assert witness_product_floor(W, restarts=32, seed=1) == pytest.approx(floor, abs=1e-7)


def test_witness_rejects_bad_decomposition():
    with pytest.raises(DomainError):
        WitnessOperator(np.eye(4), (2, 2), (np.eye(4), np.eye(4)))
    with pytest.raises(DomainError):
        WitnessOperator(np.eye(4) - 2 * np.diag([1, 0, 0, 0]), (2, 2),
                        (np.eye(4) - 2 * np.diag([1, 0, 0, 0]), np.zeros((4, 4))))


def test_witness_rejects_non_hermitian_and_dims():
    with pytest.raises(DomainError):
        WitnessOperator(np.triu(np.ones((4, 4))), (2, 2))
    with pytest.raises(DomainError):
        witness_value(standard_witness(), DensityMatrix.maximally_mixed((2, 3)))


def test_witness_value_imaginary_residue():
    W = object.__new__(WitnessOperator)
    object.__setattr__(W, "matrix", np.triu(np.ones((4, 4))) * 1j)
    object.__setattr__(W, "dims", (2, 2))
    rho = random_mixture((2, 2), seed=0)
    with pytest.raises(NumericError):
        witness_value(W, rho)


def test_witness_check_labels():
    v = witness_check(standard_witness(), cat.singlet(), restarts=16, seed=0)
    assert v.detected and v.details["heuristic"] is False
    v = witness_check(WitnessOperator(np.kron(PAULI_Z, PAULI_Z), (2, 2)), cat.singlet(), restarts=16, seed=0)
    assert v.details["heuristic"] is True


@given(st.sampled_from([(2, 2), (2, 3), (3, 3)]), seeds)
def test_pt_moves_between_factors(dims, seed):
    rng = np.random.default_rng(seed)
    r, s = random_mixture(dims, seed=rng).matrix, random_mixture(dims, seed=rng).matrix
    lhs = np.trace(partial_transpose_matrix(r, dims, 0) @ s)
    rhs = np.trace(r @ partial_transpose_matrix(s, dims, 0))
    assert abs(lhs - rhs) < 1e-10


@given(st.sampled_from([(2, 2), (2, 3), (3, 3)]), seeds, seeds)
def test_decomposable_witness_never_detects_ppt(dims, seed_q, seed_r):
    rng = np.random.default_rng(seed_q)
    d = dims[0] * dims[1]
    P = random_mixture(dims, seed=rng).matrix * rng.uniform(0, 1)
    Q = random_mixture(dims, n_terms=int(rng.integers(1, d + 1)), seed=rng).matrix
    W = WitnessOperator(P + partial_transpose_matrix(Q, dims, 0), dims, (P, Q))
    corpus = [random_separable(dims, seed=seed_r), cat.werner(0.3) if dims == (2, 2) else cat.horodecki_a(0.5)
              if dims == (3, 3) else random_separable(dims, seed=seed_r + 1)]
    for rho in corpus:
        assert ppt_check(rho).score >= -1e-9
        assert witness_value(W, rho) >= -1e-9


# --- Choi-Jamiołkowski -----------------------------------------------------

def test_cj_identity_map():
    E = cj_map_to_operator(identity_map, 2)
    np.testing.assert_allclose(E.E, 2 * np.outer(PHI_PLUS, PHI_PLUS), atol=1e-15)
    rho = random_mixture((2,), seed=0).matrix
    np.testing.assert_allclose(cj_operator_to_map(E, rho), rho, atol=1e-15)


@pytest.mark.parametrize("d", [2, 3])
def test_cj_transposition(d):
    E = cj_map_to_operator(transpose_map, d)
    swap = np.eye(d * d).reshape(d, d, d, d).transpose(0, 1, 3, 2).reshape(d * d, d * d)
    np.testing.assert_allclose(E.E, swap, atol=1e-15)
    assert not E.is_completely_positive()
    rho = random_mixture((d,), seed=1).matrix
    np.testing.assert_allclose(cj_operator_to_map(E, rho), rho.T, atol=1e-15)


def test_cj_transposition_spectrum():
    np.testing.assert_allclose(cj_map_to_operator(transpose_map, 2).spectrum(), [1, 1, 1, -1], atol=1e-14)


@pytest.mark.parametrize("d", [2, 3, 4])
def test_cj_unitary_map_psd(d):
    E = cj_map_to_operator(unitary_map(haar_unitary(d, seed=d)), d)
    assert E.is_completely_positive()


def test_cj_witness_gives_positive_non_cp_map():
    W = standard_witness()
    E = MapAsOperator(W.matrix, 2, 2)
    assert not E.is_completely_positive()
    assert map_product_floor(E, seed=0) >= -1e-9
    rng = np.random.default_rng(3)
    for _ in range(20):
        out = cj_operator_to_map(E, random_mixture((2,), seed=rng))
        assert np.linalg.eigvalsh(out).min() >= -1e-12


@given(st.integers(2, 4), st.integers(2, 4), seeds)
def test_cj_round_trip(dB, dC, seed):
    rng = np.random.default_rng(seed)
    images = rng.normal(size=(dB, dB, dC, dC)) + 1j * rng.normal(size=(dB, dB, dC, dC))
    E = cj_map_to_operator(images)
    X = rng.normal(size=(dB, dB)) + 1j * rng.normal(size=(dB, dB))
    direct = np.einsum("ij,ijab->ab", X, images)
    np.testing.assert_allclose(cj_operator_to_map(E, X), direct, atol=1e-8)
    np.testing.assert_allclose(cj_map_to_operator(lambda x: cj_operator_to_map(E, x), dB).E, E.E, atol=1e-8)


def test_cj_errors():
    with pytest.raises(DomainError):
        cj_map_to_operator(np.zeros((2, 3, 2, 2)))
    with pytest.raises(DomainError):
        cj_map_to_operator(identity_map)
    with pytest.raises(DomainError):
        cj_operator_to_map(cj_map_to_operator(identity_map, 2), np.eye(3))


def test_map_images_shape():
    assert map_images(unitary_map(np.eye(3)), 3).shape == (3, 3, 3, 3)


# --- CHSH ------------------------------------------------------------------

def test_chsh_singlet_figure_setting():
    v = chsh_value(cat.singlet(), optimal_singlet_setting())
    assert v == pytest.approx(-2 * np.sqrt(2), abs=1e-12)


def test_chsh_singlet_parallel_correlation():
    a = np.array([0.3, -0.4, np.sqrt(1 - 0.25)])
    assert correlation(cat.singlet(), a, a) == pytest.approx(-1, abs=1e-12)


def test_chsh_maximize_singlet():
    v, s = chsh_maximize(cat.singlet(), seed=0)
    assert v == pytest.approx(2 * np.sqrt(2), abs=1e-6)
    assert v >= abs(chsh_value(cat.singlet(), optimal_singlet_setting())) - 1e-9
    assert chsh_value(cat.singlet(), s) == pytest.approx(v, abs=1e-12)


def test_chsh_setting_requires_unit_vectors():
    with pytest.raises(DomainError):
        CHSHSetting(np.array([1.0, 0, 0]), np.array([0, 1.0, 0]), np.array([0, 0, 1.0]), np.array([1.0, 1, 0]))


def test_chsh_two_qubit_only():
    with pytest.raises(DomainError):
        chsh_maximize(DensityMatrix.maximally_mixed((2, 3)))


@given(seeds)
def test_chsh_maximize_matches_closed_form(seed):
    rho = random_mixture((2, 2), seed=seed)
    v, _ = chsh_maximize(rho, seed=seed)
    assert v == pytest.approx(chsh_maximum_closed_form(rho), abs=1e-6)


@given(seeds)
def test_chsh_separable_bound(seed):
    rho = random_separable((2, 2), seed=seed)
    assert chsh_maximize(rho, restarts=8, seed=0)[0] <= 2 + 1e-6


@given(st.integers(0, 3), seeds)
def test_chsh_product_basis_state(k, seed):
    rng = np.random.default_rng(seed)
    s = CHSHSetting.from_array(rng.normal(size=(4, 3)))
    assert abs(chsh_value(DensityMatrix(np.diag(np.eye(4)[k]), (2, 2)), s)) <= 2 + 1e-12


def _su2(R):
    """SU(2) element acting on Pauli vectors as the rotation R."""
    from scipy.linalg import expm
    rv = Rotation.from_matrix(R).as_rotvec()
    from entanglekit.witness import PAULI
    return expm(-0.5j * np.einsum("k,kab->ab", rv, PAULI))


@given(seeds)
def test_chsh_rotation_invariance(seed):
    rng = np.random.default_rng(seed)
    rho = random_mixture((2, 2), seed=rng)
    s = CHSHSetting.from_array(rng.normal(size=(4, 3)))
    Ra, Rb = Rotation.random(random_state=rng).as_matrix(), Rotation.random(random_state=rng).as_matrix()
    U = np.kron(_su2(Ra), _su2(Rb))
    rotated = DensityMatrix(U @ rho.matrix @ U.conj().T, (2, 2))
    s2 = CHSHSetting(Ra @ s.a, Ra @ s.a_prime, Rb @ s.b, Rb @ s.b_prime)
    assert chsh_value(rotated, s2) == pytest.approx(chsh_value(rho, s), abs=1e-8)


def test_product_floor_raw_matrix():
    pf = product_floor(np.kron(PAULI_Z, PAULI_Z), (2, 2), restarts=8, seed=0)
    assert pf.value == pytest.approx(-1, abs=1e-10)
    assert pf.values.shape == (8,)
