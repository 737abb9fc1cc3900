"""Primitives for the traceless-Hermitian matrix space and 2x2 block surgery.

Traceless Hermitian N x N matrices form a real vector space of dimension
N^2 - 1 under the Hilbert-Schmidt inner product Tr(AB).  This module holds
the validated constructors for the matrix value types used across the
package, extraction and embedding of 2x2 blocks at a row/column pair, and
an orthonormal basis of the traceless-Hermitian space for coordinate and
rank computations.

Row/column pairs (i, j) are 1-based with i < j in every public signature;
they are converted to 0-based indices internally.  All returned arrays are
read-only, and every operation is a pure function, so values can be shared
freely between threads.
"""

from __future__ import annotations

import numpy as np

# Tolerances for constructed values: comfortably above double-precision
# round-off up to the soft dimension cap N = 32, far below any physical
# scale in this problem class.
HERMITIAN_ENTRY_TOL = 1e-12
TRACE_RTOL = 1e-12
UNITARY_TOL = 1e-10

__all__ = [
    "HERMITIAN_ENTRY_TOL",
    "TRACE_RTOL",
    "UNITARY_TOL",
    "dagger",
    "hs_norm",
    "hs_inner",
    "assert_hermitian_zt",
    "hermitian_zt",
    "unitarity_defect",
    "assert_unitary",
    "unitary",
    "submatrix_2x2",
    "embed_2x2",
    "basis_zt",
    "to_coords",
    "from_coords",
]


def _readonly(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


def _square(m, name: str = "matrix") -> np.ndarray:
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"{name} must be square, got shape {m.shape}")
    return m


def dagger(m: np.ndarray) -> np.ndarray:
    """Conjugate transpose."""
    return np.conj(np.asarray(m).T)


def hs_norm(a: np.ndarray) -> float:
    """Frobenius norm, i.e. the norm induced by the HS inner product."""
    return float(np.linalg.norm(a))


def hs_inner(a: np.ndarray, b: np.ndarray) -> float:
    """Hilbert-Schmidt inner product Tr(a b) of two Hermitian matrices.

    The value is real for Hermitian arguments; a non-negligible imaginary
    residual means an input was not Hermitian and raises.  Symmetric in
    its arguments.
    """
    a = _square(a, "a")
    b = _square(b, "b")
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    val = complex(np.einsum("ij,ji->", a, b))
    scale = max(1.0, hs_norm(a) * hs_norm(b))
    if abs(val.imag) > 1e-12 * scale:
        raise ValueError(
            f"inner product has imaginary residual {val.imag:.3e}; inputs are not Hermitian"
        )
    return float(val.real)


def assert_hermitian_zt(
    m,
    *,
    entry_tol: float = HERMITIAN_ENTRY_TOL,
    trace_rtol: float = TRACE_RTOL,
    name: str = "matrix",
) -> np.ndarray:
    """Validate that ``m`` is Hermitian and traceless within tolerance.

    Hermiticity is checked entrywise; the trace magnitude must be below
    ``trace_rtol`` times the Frobenius norm (an exactly zero trace always
    passes).  Returns ``m`` as a complex array on success.
    """
    m = _square(m, name).astype(complex)
    herm_err = float(np.abs(m - dagger(m)).max())
    if herm_err > entry_tol:
        raise ValueError(f"{name} is not Hermitian: max entry defect {herm_err:.3e}")
    tr = abs(complex(np.trace(m)))
    if tr != 0.0 and tr > trace_rtol * hs_norm(m):
        raise ValueError(f"{name} is not traceless: |trace| = {tr:.3e}")
    return m


def hermitian_zt(entries) -> np.ndarray:
    """Validated, read-only traceless Hermitian matrix."""
    return _readonly(assert_hermitian_zt(entries).copy())


def unitarity_defect(u: np.ndarray) -> float:
    """Frobenius norm of u†u - I."""
    u = _square(u, "u")
    n = u.shape[0]
    return float(np.linalg.norm(dagger(u) @ u - np.eye(n)))


def assert_unitary(u, *, tol: float = UNITARY_TOL, name: str = "matrix") -> np.ndarray:
    u = _square(u, name).astype(complex)
    defect = unitarity_defect(u)
    if defect > tol:
        raise ValueError(f"{name} is not unitary: ||u†u - I||_F = {defect:.3e}")
    return u


def unitary(entries) -> np.ndarray:
    """Validated, read-only unitary matrix."""
    return _readonly(assert_unitary(entries).copy())


def _block_indices(i: int, j: int, n: int) -> tuple[int, int]:
    if not (isinstance(i, (int, np.integer)) and isinstance(j, (int, np.integer))):
        raise ValueError(f"indices must be integers, got ({i!r}, {j!r})")
    if not 1 <= i < j <= n:
        raise ValueError(f"need 1 <= i < j <= {n}, got (i, j) = ({i}, {j})")
    return int(i) - 1, int(j) - 1


def submatrix_2x2(m, i: int, j: int) -> np.ndarray:
    """2x2 sub-matrix of ``m`` formed by the i-th and j-th rows and columns.

    Indices are 1-based with i < j.  Returns ``[[m_ii, m_ij], [m_ji, m_jj]]``.
    """
    m = _square(m)
    a, b = _block_indices(i, j, m.shape[0])
    return _readonly(m[np.ix_([a, b], [a, b])].astype(complex))


def embed_2x2(d, i: int, j: int, n: int) -> np.ndarray:
    """Identity of size ``n`` with the 2x2 block ``d`` written into rows and
    columns i, j (1-based, i < j).

    The four entries of ``d`` land at positions (i,i), (i,j), (j,i), (j,j);
    every other row and column is left as in the identity.  A unitary block
    yields a unitary result.
    """
    d = np.asarray(d, dtype=complex)
    if d.shape != (2, 2):
        raise ValueError(f"block must be 2x2, got shape {d.shape}")
    a, b = _block_indices(i, j, n)
    out = np.eye(n, dtype=complex)
    out[np.ix_([a, b], [a, b])] = d
    return _readonly(out)


def basis_zt(n: int) -> np.ndarray:
    """Orthonormal basis of the traceless Hermitian n x n matrices.

    Generalized Gell-Mann construction with n^2 - 1 elements stacked along
    the first axis in a fixed, documented order:

    1. symmetric pairs (E_ij + E_ji)/sqrt(2) for i < j, lexicographic (i, j);
    2. antisymmetric pairs (-i E_ij + i E_ji)/sqrt(2), same pair order;
    3. diagonals diag(1, ..., 1, -k, 0, ..., 0)/sqrt(k (k + 1)), k = 1..n-1.

    Each element has unit HS norm and the set is mutually orthogonal, so
    coordinate maps built on it are isometries.
    """
    if n < 2:
        raise ValueError(f"basis needs dimension >= 2, got {n}")
    out = np.zeros((n * n - 1, n, n), dtype=complex)
    pos = 0
    inv_sqrt2 = 1.0 / np.sqrt(2.0)
    for i in range(n):
        for j in range(i + 1, n):
            out[pos, i, j] = inv_sqrt2
            out[pos, j, i] = inv_sqrt2
            pos += 1
    for i in range(n):
        for j in range(i + 1, n):
            out[pos, i, j] = -1j * inv_sqrt2
            out[pos, j, i] = 1j * inv_sqrt2
            pos += 1
    for k in range(1, n):
        norm = np.sqrt(k * (k + 1.0))
        for d in range(k):
            out[pos, d, d] = 1.0 / norm
        out[pos, k, k] = -k / norm
        pos += 1
    return _readonly(out)


def to_coords(z, basis: np.ndarray) -> np.ndarray:
    """Real coordinates of a traceless Hermitian matrix in an orthonormal basis.

    ``c_k = hs_inner(basis_k, z)``; the reconstruction ``sum c_k basis_k``
    recovers ``z`` and the map is a linear isometry onto R^(n^2 - 1).
    """
    z = _square(z, "z")
    if basis.shape[1:] != z.shape:
        raise ValueError(f"dimension mismatch: basis {basis.shape[1:]} vs z {z.shape}")
    return _readonly(np.real(np.einsum("kij,ji->k", basis, z)))


def from_coords(coords, basis: np.ndarray) -> np.ndarray:
    """Inverse of :func:`to_coords`: assemble the matrix sum c_k basis_k."""
    coords = np.asarray(coords, dtype=float)
    if coords.shape != (basis.shape[0],):
        raise ValueError(
            f"coordinate vector must have length {basis.shape[0]}, got {coords.shape}"
        )
    return _readonly(np.einsum("k,kij->ij", coords, basis))
