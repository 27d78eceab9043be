import numpy as np
import pytest
from hypothesis import given

from entanglekit import catalog as cat
from entanglekit.core import (
    BipartiteSplit,
    DensityMatrix,
    DomainError,
    EnsembleDecomposition,
    NumericError,
    PureState,
    all_bipartitions,
    hermitian_basis,
    ket,
    operator_schmidt,
    partial_trace,
    partial_transpose,
    partial_transpose_matrix,
    realign,
    realigned_matrix,
    schmidt,
    spectrum,
    tensor,
    von_neumann_entropy,
)
from entanglekit.randstates import local_unitary, random_mixture, random_pure

from .strategies import mixed_states, pure_states, seeds, small_dims

SQ2 = 1 / np.sqrt(2)


# --- type invariants -------------------------------------------------------

def test_pure_state_rejects_unnormalized():
    with pytest.raises(DomainError):
        PureState(np.array([1.0, 1.0]), (2,))


def test_pure_state_rejects_dims_mismatch():
    with pytest.raises(DomainError):
        PureState(ket("00"), (2, 3))


@pytest.mark.parametrize("m", [
    np.array([[1, 1], [0, 0]]),          # non-Hermitian
    np.diag([0.6, 0.6]),                 # trace
    np.diag([1.2, -0.2]),                # negative eigenvalue
])
def test_density_matrix_rejects_invalid(m):
    with pytest.raises(DomainError):
        DensityMatrix(m, (2,))


def test_state_arrays_are_read_only():
    rho = cat.werner(0.5)
    with pytest.raises(ValueError):
        rho.matrix[0, 0] = 1


@pytest.mark.parametrize("a,b", [((0,), (0,)), ((), (0, 1)), ((0, 1), ())])
def test_split_invalid(a, b):
    with pytest.raises(DomainError):
        BipartiteSplit(frozenset(a), frozenset(b))


@pytest.mark.parametrize("n,count", [(2, 1), (3, 3), (4, 7), (5, 15)])
def test_all_bipartitions_count(n, count):
    splits = all_bipartitions(n)
    assert len(splits) == count
    assert len({s.label() for s in splits}) == count


def test_ensemble_caratheodory_bound():
    members = [PureState(ket("0"), (2,))] * 5
    with pytest.raises(DomainError):
        EnsembleDecomposition(np.full(5, 0.2), members)


# --- examples --------------------------------------------------------------

def test_tensor_examples():
    z, o = PureState(ket("0"), (2,)), PureState(ket("1"), (2,))
    p = tensor(z, o)
    assert p.dims == (2, 2)
    np.testing.assert_allclose(p.amplitudes, [0, 1, 0, 0])
    half = DensityMatrix.maximally_mixed((2,))
    np.testing.assert_allclose(tensor(half, half).matrix, np.eye(4) / 4)
    minus = PureState(SQ2 * (ket("0") - ket("1")), (2,))
    np.testing.assert_allclose(tensor(z, minus).amplitudes, SQ2 * np.array([1, -1, 0, 0]))


def test_partial_trace_examples():
    np.testing.assert_allclose(partial_trace(cat.singlet(), [0]).matrix, np.eye(2) / 2, atol=1e-15)
    ra, rb = random_mixture((2,), seed=1), random_mixture((3,), seed=2)
    np.testing.assert_allclose(partial_trace(tensor(ra, rb), [0]).matrix, ra.matrix, atol=1e-14)
    ghz_ab = partial_trace(cat.ghz(3), [0, 1]).matrix
    np.testing.assert_allclose(ghz_ab, np.diag([0.5, 0, 0, 0.5]), atol=1e-15)


def test_partial_trace_invalid_index():
    with pytest.raises(DomainError):
        partial_trace(cat.singlet(), [2])


def test_partial_transpose_examples():
    ev = np.linalg.eigvalsh(partial_transpose(cat.singlet()))
    np.testing.assert_allclose(np.sort(ev), [-0.5, 0.5, 0.5, 0.5], atol=1e-14)
    phi = PureState(SQ2 * (ket("00") + ket("11")), (2, 2))
    expected = 0.5 * np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]])
    np.testing.assert_allclose(partial_transpose(phi), expected, atol=1e-15)


def test_partial_transpose_invalid_party():
    with pytest.raises(DomainError):
        partial_transpose(cat.singlet(), 2)


@given(seeds)
def test_partial_transpose_of_product_is_psd(seed):
    rng = np.random.default_rng(seed)
    rho = tensor(random_mixture((2,), seed=rng), random_mixture((3,), seed=rng))
    assert np.linalg.eigvalsh(partial_transpose(rho)).min() > -1e-12


def test_realign_examples():
    prod = tensor(random_pure((2,), seed=3), random_pure((3,), seed=4))
    assert realign(prod).sum() == pytest.approx(1, abs=1e-10)
    assert realign(cat.singlet()).sum() == pytest.approx(2, abs=1e-12)
    assert realign(cat.horodecki_alpha(5)).sum() > 1
    assert realign(cat.werner(0.3)).size == 4
    assert realign(random_mixture((2, 3), seed=0)).size == 4


def test_schmidt_examples():
    s = schmidt(PureState(ket("00"), (2, 2)))
    assert s.rank == 1
    np.testing.assert_allclose(s.coefficients, [1])
    np.testing.assert_allclose(schmidt(cat.singlet()).coefficients, [SQ2, SQ2], atol=1e-15)
    ghz_a = schmidt(cat.ghz(3), BipartiteSplit.of([0], 3))
    np.testing.assert_allclose(ghz_a.coefficients, [SQ2, SQ2], atol=1e-15)


@pytest.mark.parametrize("state,value", [
    (PureState(ket("01"), (2, 2)), 0.0),
    (DensityMatrix.maximally_mixed((2,)), 1.0),
    (partial_trace(cat.werner(1.0), [0]), 1.0),
    (DensityMatrix.maximally_mixed((3, 3)), np.log2(9)),
])
def test_entropy_examples(state, value):
    rho = state.density() if isinstance(state, PureState) else state
    assert von_neumann_entropy(rho) == pytest.approx(value, abs=1e-12)


def test_entropy_rejects_negative_spectrum():
    with pytest.raises(NumericError):
        von_neumann_entropy(np.diag([1.1, -0.1]))


@pytest.mark.parametrize("m,expected", [
    (np.eye(2), [1, 1]),
    (cat.singlet().density().matrix, [1, 0, 0, 0]),
    (np.diag([1.0, -1.0]), [1, -1]),
])
def test_spectrum_examples(m, expected):
    np.testing.assert_allclose(spectrum(m), expected, atol=1e-14)


def test_spectrum_rejects_non_hermitian():
    with pytest.raises(DomainError):
        spectrum(np.array([[0, 1], [0, 0]]))


# --- properties ------------------------------------------------------------

@given(mixed_states())
def test_partial_transpose_involution(rho):
    once = partial_transpose_matrix(rho.matrix, rho.dims, [1])
    assert np.array_equal(partial_transpose_matrix(once, rho.dims, [1]), rho.matrix)


@given(mixed_states())
def test_partial_transpose_preserves_trace(rho):
    for party in (0, 1):
        assert np.trace(partial_transpose(rho, party)) == pytest.approx(1, abs=1e-12)


@given(pure_states())
def test_marginal_entropies_agree(psi):
    sa = von_neumann_entropy(partial_trace(psi, [0]))
    sb = von_neumann_entropy(partial_trace(psi, [1]))
    assert sa == pytest.approx(sb, abs=1e-8)


@given(pure_states())
def test_schmidt_reconstruction(psi):
    s = schmidt(psi)
    assert np.sum(s.coefficients ** 2) == pytest.approx(1, abs=1e-9)
    assert np.all(np.diff(s.coefficients) <= 1e-15)
    assert s.rank <= min(psi.dims)
    assert np.linalg.norm(s.reconstruct() - psi.amplitudes) < 1e-8
    np.testing.assert_allclose(np.sort(s.coefficients ** 2)[::-1],
                               spectrum(partial_trace(psi, [0]).matrix)[:s.rank], atol=1e-10)


@given(pure_states())
def test_schmidt_vectors_orthonormal(psi):
    s = schmidt(psi)
    np.testing.assert_allclose(s.left.conj() @ s.left.T, np.eye(s.rank), atol=1e-10)
    np.testing.assert_allclose(s.right.conj() @ s.right.T, np.eye(s.rank), atol=1e-10)


@given(mixed_states())
def test_realign_equals_trace_norm(rho):
    dA, dB = rho.dims
    tn = np.linalg.svd(realigned_matrix(rho.matrix, dA, dB), compute_uv=False).sum()
    lam = realign(rho)
    assert lam.sum() == pytest.approx(tn, abs=1e-12)
    assert np.all(lam >= 0) and np.all(np.diff(lam) <= 1e-15)


@given(small_dims, seeds)
def test_realign_pure_product(dims, seed):
    rng = np.random.default_rng(seed)
    prod = tensor(random_pure(dims[:1], seed=rng), random_pure(dims[1:], seed=rng))
    assert realign(prod).sum() == pytest.approx(1, abs=1e-8)


@given(mixed_states(), seeds)
def test_pt_spectrum_local_unitary_invariant(rho, seed):
    U = local_unitary(rho.dims, seed)
    rotated = U @ rho.matrix @ U.conj().T
    a = np.linalg.eigvalsh(partial_transpose(rho, 1))
    b = np.linalg.eigvalsh(partial_transpose_matrix(rotated, rho.dims, [1]))
    np.testing.assert_allclose(a, b, atol=1e-8)


@pytest.mark.parametrize("d", [2, 3, 4])
def test_hermitian_basis_orthonormal(d):
    g = hermitian_basis(d)
    assert g.shape == (d * d, d, d)
    np.testing.assert_allclose(g, g.conj().transpose(0, 2, 1))
    gram = np.einsum("kab,lba->kl", g, g)
    np.testing.assert_allclose(gram, np.eye(d * d), atol=1e-14)


@given(mixed_states())
def test_operator_schmidt_reconstructs(rho):
    os_ = operator_schmidt(rho)
    m = np.einsum("k,kab,kcd->acbd", os_.values, os_.ops_a, os_.ops_b).reshape(rho.matrix.shape)
    np.testing.assert_allclose(m, rho.matrix, atol=1e-12)
    np.testing.assert_allclose(os_.values, realign(rho)[:os_.values.size], atol=1e-12)


@pytest.mark.parametrize("order", [(1, 0, 2), (2, 0, 1), (0, 2, 1)])
def test_split_regrouping_matches_permutation(order):
    psi = random_pure((2, 3, 2), seed=7)
    split = BipartiteSplit.of([order[0]], 3)
    s = schmidt(psi, split)
    rho_a = partial_trace(psi, [order[0]])
    np.testing.assert_allclose(s.coefficients ** 2, spectrum(rho_a.matrix)[:s.rank], atol=1e-12)
