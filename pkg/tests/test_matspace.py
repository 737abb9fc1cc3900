import numpy as np
import pytest

from conftest import SX, SY, SZ, random_traceless_hermitian
from wayspan import matspace


def test_hs_inner_pauli_values():
    assert matspace.hs_inner(SZ, SZ) == pytest.approx(2.0)
    assert matspace.hs_inner(SX, SZ) == pytest.approx(0.0, abs=1e-14)
    assert matspace.hs_inner(SX, SY) == pytest.approx(0.0, abs=1e-14)


def test_hs_inner_is_squared_norm(rng):
    for n in (2, 3, 5):
        a = random_traceless_hermitian(n, rng)
        val = matspace.hs_inner(a, a)
        assert val >= 0.0
        assert val == pytest.approx(matspace.hs_norm(a) ** 2, rel=1e-12)


def test_hs_inner_symmetric(rng):
    a = random_traceless_hermitian(4, rng)
    b = random_traceless_hermitian(4, rng)
    assert matspace.hs_inner(a, b) == pytest.approx(matspace.hs_inner(b, a), rel=1e-12)


def test_hs_inner_dimension_mismatch():
    with pytest.raises(ValueError, match="mismatch"):
        matspace.hs_inner(SZ, np.eye(3))


def test_hs_inner_rejects_non_hermitian():
    skew = np.array([[0.0, 1.0], [-1.0, 0.0]])
    with pytest.raises(ValueError, match="imaginary"):
        matspace.hs_inner(skew, SY)


def test_submatrix_diagonal_case():
    m = np.diag([1.0, 2.0, 3.0])
    block = matspace.submatrix_2x2(m, 1, 3)
    assert np.allclose(block, np.diag([1.0, 3.0]))


def test_submatrix_of_embedded_block_roundtrips():
    m = matspace.embed_2x2(SX, 1, 2, 3)
    assert np.allclose(matspace.submatrix_2x2(m, 1, 2), SX)


def test_embed_then_extract_agrees_on_selected_entries(rng):
    m = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    for (i, j) in [(1, 2), (2, 4), (1, 4)]:
        block = matspace.submatrix_2x2(m, i, j)
        back = matspace.embed_2x2(block, i, j, 4)
        a, b = i - 1, j - 1
        for r, c in [(a, a), (a, b), (b, a), (b, b)]:
            assert back[r, c] == pytest.approx(m[r, c])


def test_embed_identity_block_gives_identity():
    assert np.array_equal(matspace.embed_2x2(np.eye(2), 1, 2, 4), np.eye(4))


def test_embed_swap_is_permutation():
    swap = np.array([[0.0, 1.0], [1.0, 0.0]])
    out = matspace.embed_2x2(swap, 1, 2, 3)
    perm = np.array([[0, 1, 0], [1, 0, 0], [0, 0, 1]], dtype=complex)
    assert np.array_equal(out, perm)


def test_embed_rotation_block_is_unitary():
    rot = np.array([[1.0, 1.0], [-1.0, 1.0]]) / np.sqrt(2.0)
    out = matspace.embed_2x2(rot, 1, 2, 2)
    assert matspace.unitarity_defect(out) < 1e-14


def test_embed_unitary_blocks_stay_unitary(rng):
    for _ in range(20):
        n = int(rng.integers(2, 7))
        i = int(rng.integers(1, n))
        j = int(rng.integers(i + 1, n + 1))
        a = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        q, _ = np.linalg.qr(a)
        out = matspace.embed_2x2(q, i, j, n)
        assert matspace.unitarity_defect(out) < 1e-12


@pytest.mark.parametrize("i,j", [(2, 2), (0, 1), (3, 2), (1, 5)])
def test_block_index_validation(i, j):
    with pytest.raises(ValueError):
        matspace.submatrix_2x2(np.eye(4), i, j)
    with pytest.raises(ValueError):
        matspace.embed_2x2(np.eye(2), i, j, 4)


def test_basis_n2_is_scaled_paulis():
    basis = matspace.basis_zt(2)
    expected = [SX / np.sqrt(2), SY / np.sqrt(2), SZ / np.sqrt(2)]
    assert len(basis) == 3
    for got, want in zip(basis, expected):
        assert np.allclose(got, want)


def test_basis_orthonormal_n3():
    basis = matspace.basis_zt(3)
    assert len(basis) == 8
    gram = np.array([[matspace.hs_inner(a, b) for b in basis] for a in basis])
    assert np.allclose(gram, np.eye(8), atol=1e-12)
    for b in basis:
        assert abs(np.trace(b)) < 1e-14


def test_basis_count_n5():
    assert len(matspace.basis_zt(5)) == 24


def test_basis_rejects_trivial_dimension():
    with pytest.raises(ValueError):
        matspace.basis_zt(1)


def test_to_coords_single_component():
    basis = matspace.basis_zt(2)
    coords = matspace.to_coords(SZ, basis)
    assert np.allclose(coords, [0.0, 0.0, np.sqrt(2.0)])


def test_to_coords_zero_matrix():
    basis = matspace.basis_zt(3)
    assert np.allclose(matspace.to_coords(np.zeros((3, 3)), basis), 0.0)


def test_coords_roundtrip_and_isometry(rng):
    for n in (2, 3, 4, 5):
        basis = matspace.basis_zt(n)
        for _ in range(5):
            z = random_traceless_hermitian(n, rng)
            coords = matspace.to_coords(z, basis)
            back = matspace.from_coords(coords, basis)
            assert np.linalg.norm(back - z) < 1e-10
            assert np.linalg.norm(coords) == pytest.approx(matspace.hs_norm(z), rel=1e-10)


def test_hermitian_zt_constructor_validates():
    with pytest.raises(ValueError, match="Hermitian"):
        matspace.hermitian_zt(np.array([[0.0, 1.0], [2.0, 0.0]]))
    with pytest.raises(ValueError, match="traceless"):
        matspace.hermitian_zt(np.eye(2))
    out = matspace.hermitian_zt(SZ)
    assert not out.flags.writeable


def test_unitary_constructor_validates():
    with pytest.raises(ValueError, match="unitary"):
        matspace.unitary(np.array([[1.0, 0.0], [0.0, 2.0]]))
    out = matspace.unitary(np.eye(3))
    assert not out.flags.writeable
