"""Way-point set construction and the separating-unitary witness.

A way-point set is an ordered list of unitaries with the property that any
propagator trajectory visiting all of them carries conjugated dipoles
spanning the full traceless-Hermitian space, which certifies that the
control-to-propagator map is non-singular along that trajectory.  Two
constructions are provided:

* a dipole-dependent set built from the spectral decomposition of the
  coupling operator (four unitaries per index pair, 2N^2 - 2N in total);
* a dipole-independent set built from a five-angle grid (valid whenever
  every off-diagonal coupling entry is nonzero).

The separating-unitary witness produces, for any two nonzero traceless
Hermitian matrices, a unitary whose conjugation action makes their HS
inner product nonzero, by aligning sorted spectra through a permutation.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from ._fmt import (
    FormatError,
    canonical_dumps,
    complex_entries,
    matrix_from_entries,
    parse_json,
    require_key,
    write_text,
)
from .matspace import assert_hermitian_zt, assert_unitary, dagger, embed_2x2, hs_norm, submatrix_2x2

__all__ = [
    "PROVENANCES",
    "ThetaGrid",
    "WaypointSet",
    "Lemma1Result",
    "SeparatingWitness",
    "theorem1_waypoints",
    "theorem3_waypoints",
    "theorem1_count",
    "theorem3_count",
    "default_theta_grid",
    "lemma1_check",
    "separating_unitary",
    "load_waypoints",
    "save_waypoints",
]

PROVENANCES = ("theorem1", "theorem3", "custom")

LEMMA1_DET_THRESHOLD = 1e-6

# 2x2 factors multiplied onto the base unitary of each quadruple.  The
# second and third are unitary normalizations (1/sqrt(2)); conjugating a
# diagonal block diag(l1, l2) by them produces the target block patterns
# asserted in _check_quadruple below.
_SWAP = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
_ROTATE = np.array([[1.0, 1.0], [-1.0, 1.0]], dtype=complex) / np.sqrt(2.0)
_PHASE = np.array([[1.0j, 1.0], [1.0, 1.0j]], dtype=complex) / np.sqrt(2.0)


def theorem1_count(n: int) -> int:
    return 2 * n * n - 2 * n


def theorem3_count(n: int) -> int:
    return 5 * (n * (n - 1) // 2) + 5 * (n - 1)


@dataclass(frozen=True)
class ThetaGrid:
    """Five angles (radians) for the dipole-independent construction."""

    angles: np.ndarray

    def __post_init__(self):
        angles = np.array(self.angles, dtype=float).reshape(-1)
        if angles.shape != (5,):
            raise ValueError(f"grid needs exactly 5 angles, got {angles.shape}")
        if not np.all(np.isfinite(angles)):
            raise ValueError("grid angles must be finite")
        angles.setflags(write=False)
        object.__setattr__(self, "angles", angles)


@dataclass(frozen=True)
class WaypointSet:
    """Ordered unitaries with provenance and optional per-element labels.

    ``pair_index`` maps list position to ``(i, j, k)`` with k in 1..4 for
    the dipole-dependent set, or ``(kind, theta, i, j)`` with kind "U" or
    "V" for the dipole-independent one; positions are 1-based pairs i < j.
    """

    dim: int
    unitaries: np.ndarray
    provenance: str
    pair_index: tuple | None = None

    def __post_init__(self):
        if self.provenance not in PROVENANCES:
            raise ValueError(f"provenance must be one of {PROVENANCES}, got {self.provenance!r}")
        arr = np.array(self.unitaries, dtype=complex)
        if arr.ndim != 3 or arr.shape[1] != arr.shape[2] or arr.shape[1] != self.dim:
            raise ValueError(f"unitaries must be (count, {self.dim}, {self.dim}), got {arr.shape}")
        for k, u in enumerate(arr):
            assert_unitary(u, name=f"way-point {k + 1}")
        expected = {
            "theorem1": theorem1_count(self.dim),
            "theorem3": theorem3_count(self.dim),
        }.get(self.provenance)
        if expected is not None and arr.shape[0] != expected:
            raise ValueError(
                f"{self.provenance} set at dimension {self.dim} must have "
                f"{expected} elements, got {arr.shape[0]}"
            )
        if self.pair_index is not None:
            idx = tuple(tuple(entry) for entry in self.pair_index)
            if len(idx) != arr.shape[0]:
                raise ValueError("pair_index length must match the number of way-points")
            object.__setattr__(self, "pair_index", idx)
        arr.setflags(write=False)
        object.__setattr__(self, "dim", int(self.dim))
        object.__setattr__(self, "unitaries", arr)

    def __len__(self) -> int:
        return int(self.unitaries.shape[0])


class Lemma1Result(NamedTuple):
    passed: bool
    det_magnitude: float


class SeparatingWitness(NamedTuple):
    unitary: np.ndarray
    value: float
    permutation: tuple


def _pairs(n: int):
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            yield i, j


def _off_block_mask(n: int, a: int, b: int) -> np.ndarray:
    mask = np.ones((n, n), dtype=bool)
    mask[a, :] = mask[b, :] = False
    mask[:, a] = mask[:, b] = False
    return mask


def _check_quadruple(mu: np.ndarray, quad: list[np.ndarray], i: int, j: int, lam1: float, lam2: float) -> None:
    """Verify the conjugated-dipole block pattern of one quadruple."""
    s = lam1 + lam2
    d = lam1 - lam2
    expected = [
        np.array([[lam1, 0.0], [0.0, lam2]], dtype=complex),
        np.array([[lam2, 0.0], [0.0, lam1]], dtype=complex),
        0.5 * np.array([[s, d], [d, s]], dtype=complex),
        0.5 * np.array([[s, -d * 1j], [d * 1j, s]], dtype=complex),
    ]
    hats = [dagger(w) @ mu @ w for w in quad]
    for k, (hat, block) in enumerate(zip(hats, expected)):
        err = float(np.abs(submatrix_2x2(hat, i, j) - block).max())
        if err > 1e-10:
            raise RuntimeError(
                f"way-point {k + 1} of pair ({i},{j}) misses its block pattern by {err:.3e}"
            )
    mask = _off_block_mask(mu.shape[0], i - 1, j - 1)
    for k in range(1, 4):
        err = float(np.abs((hats[k] - hats[0])[mask]).max()) if mask.any() else 0.0
        if err > 1e-12:
            raise RuntimeError(
                f"way-point {k + 1} of pair ({i},{j}) disturbs off-block entries by {err:.3e}"
            )


def theorem1_waypoints(mu: np.ndarray) -> WaypointSet:
    """Dipole-dependent way-point set (2N^2 - 2N unitaries).

    The coupling operator is diagonalized as ``mu = Q diag(w) Q†`` with
    eigenvalues ascending; a nonzero traceless Hermitian matrix always has
    two distinct eigenvalues, and the construction uses the smallest
    (lam1) and largest (lam2).  For each 1-based pair i < j the base
    unitary is ``Q`` with columns permuted so a lam1-eigenvector sits in
    column i and a lam2-eigenvector in column j (column 0 and column N-1
    of the ascending decomposition, which keeps degenerate spectra
    deterministic).  The quadruple is the base unitary times the identity,
    a swap block, a rotation block and a phase block at (i, j); the four
    conjugated dipoles then agree off the (i, j) block and realize the
    four 2x2 block patterns that force any orthogonal traceless Hermitian
    matrix to vanish.  Those patterns are re-verified numerically for
    every quadruple at construction time.
    """
    mu = assert_hermitian_zt(mu, name="mu")
    if hs_norm(mu) < 1e-14:
        raise ValueError("coupling operator must be nonzero")
    n = mu.shape[0]
    w, q = np.linalg.eigh(mu)
    lam1, lam2 = float(w[0]), float(w[-1])

    unitaries = []
    index = []
    for i, j in _pairs(n):
        # perm[pos] = eigenvector column placed at position pos (0-based).
        rest = [c for c in range(n) if c not in (0, n - 1)]
        perm = np.empty(n, dtype=int)
        perm[i - 1] = 0
        perm[j - 1] = n - 1
        free = [p for p in range(n) if p not in (i - 1, j - 1)]
        perm[free] = rest
        base = q[:, perm].astype(complex)
        quad = [
            base,
            base @ embed_2x2(_SWAP, i, j, n),
            base @ embed_2x2(_ROTATE, i, j, n),
            base @ embed_2x2(_PHASE, i, j, n),
        ]
        _check_quadruple(mu, quad, i, j, lam1, lam2)
        unitaries.extend(quad)
        index.extend((i, j, k) for k in (1, 2, 3, 4))

    return WaypointSet(
        dim=n,
        unitaries=np.array(unitaries),
        provenance="theorem1",
        pair_index=tuple(index),
    )


def lemma1_check(grid) -> Lemma1Result:
    """Nonsingularity check for the five-angle trig system.

    Builds the 5x5 matrix with rows (1, cos t, sin t, cos 2t, sin 2t) over
    the grid angles and tests |det| against 1e-6; a grid passing the check
    pins all five coefficients of such a trig polynomial from its five
    sampled values.
    """
    angles = grid.angles if isinstance(grid, ThetaGrid) else ThetaGrid(np.asarray(grid)).angles
    rows = np.column_stack(
        [
            np.ones(5),
            np.cos(angles),
            np.sin(angles),
            np.cos(2 * angles),
            np.sin(2 * angles),
        ]
    )
    det = abs(float(np.linalg.det(rows)))
    return Lemma1Result(passed=det > LEMMA1_DET_THRESHOLD, det_magnitude=det)


def default_theta_grid() -> ThetaGrid:
    """The standard angle grid {0, pi/3, pi/2, pi, 3pi/2}.

    The fifth angle must differ from the fourth modulo 2 pi or the trig
    system degenerates; the returned grid is verified on construction.
    """
    grid = ThetaGrid(np.array([0.0, np.pi / 3.0, np.pi / 2.0, np.pi, 1.5 * np.pi]))
    result = lemma1_check(grid)
    if not result.passed:
        raise RuntimeError(f"default grid unexpectedly singular: |det| = {result.det_magnitude:.3e}")
    return grid


def theorem3_waypoints(n: int, grid: ThetaGrid | None = None) -> WaypointSet:
    """Dipole-independent way-point set from a five-angle grid.

    Emits, in a fixed order, the off-diagonal exchange blocks
    ``[[0, e^{i t}], [e^{-i t}, 0]]`` embedded at every 1-based pair
    i < j, then the reflection blocks ``[[cos t, sin t], [sin t, -cos t]]``
    embedded at consecutive pairs (i, i+1), for each of the five grid
    angles.  The set depends only on the dimension and the grid, never on
    the coupling operator, so repeated construction is bit-identical.
    """
    if n < 2:
        raise ValueError(f"dimension must be >= 2, got {n}")
    grid = default_theta_grid() if grid is None else grid
    check = lemma1_check(grid)
    if not check.passed:
        raise ValueError(
            f"angle grid is singular (|det| = {check.det_magnitude:.3e} <= {LEMMA1_DET_THRESHOLD})"
        )

    unitaries = []
    index = []
    for i, j in _pairs(n):
        for theta in grid.angles:
            phase = np.exp(1j * theta)
            block = np.array([[0.0, phase], [np.conj(phase), 0.0]])
            unitaries.append(embed_2x2(block, i, j, n))
            index.append(("U", float(theta), i, j))
    for i in range(1, n):
        for theta in grid.angles:
            c, s = np.cos(theta), np.sin(theta)
            block = np.array([[c, s], [s, -c]], dtype=complex)
            unitaries.append(embed_2x2(block, i, i + 1, n))
            index.append(("V", float(theta), i, i + 1))

    return WaypointSet(
        dim=n,
        unitaries=np.array(unitaries),
        provenance="theorem3",
        pair_index=tuple(index),
    )


def _candidate_permutations(n: int, rng: np.random.Generator | None, max_attempts: int):
    ident = tuple(range(n))
    rev = tuple(range(n - 1, -1, -1))
    yield ident
    if rev != ident:
        yield rev
    if n <= 6:
        for p in itertools.permutations(range(n)):
            if p != ident and p != rev:
                yield p
    else:
        gen = rng if rng is not None else np.random.default_rng(0)
        for _ in range(max_attempts):
            yield tuple(int(x) for x in gen.permutation(n))


def separating_unitary(
    z: np.ndarray,
    mu: np.ndarray,
    *,
    rng: np.random.Generator | None = None,
    witness_rtol: float = 1e-10,
    max_attempts: int = 20000,
) -> SeparatingWitness:
    """Unitary ``u`` with |Tr(z u† mu u)| above ``witness_rtol * ||z|| ||mu||``.

    Both inputs are diagonalized with ascending spectra; conjugation by a
    permutation of the aligned eigenbases reduces the trace to the sum
    ``sum_k d1_k d2_{p(k)}`` over permuted spectrum products.  Candidates
    are tried in a fixed order: identity, order reversal, then the
    remaining permutations lexicographically for dimension <= 6 and
    seeded random permutations beyond.  The identity alignment of two
    sorted zero-sum spectra maximizes the sum, so a witness is found
    essentially immediately for non-degenerate inputs; exhausting the
    candidates signals degenerate input or a tolerance problem and raises.
    """
    z = assert_hermitian_zt(z, name="z")
    mu = assert_hermitian_zt(mu, name="mu")
    if z.shape != mu.shape:
        raise ValueError(f"dimension mismatch: z {z.shape} vs mu {mu.shape}")
    norm_z, norm_mu = hs_norm(z), hs_norm(mu)
    if norm_z < 1e-14 or norm_mu < 1e-14:
        raise ValueError("witness needs nonzero matrices")
    n = z.shape[0]
    w1, v1 = np.linalg.eigh(z)
    w2, v2 = np.linalg.eigh(mu)
    threshold = witness_rtol * norm_z * norm_mu

    for p in _candidate_permutations(n, rng, max_attempts):
        value = float(np.dot(w1, w2[list(p)]))
        if abs(value) > threshold:
            perm_matrix = np.eye(n, dtype=complex)[:, list(p)]
            u = v2 @ perm_matrix @ dagger(v1)
            achieved = complex(np.einsum("ij,ji->", z, dagger(u) @ mu @ u))
            if abs(achieved.real - value) > 1e-8 * max(1.0, abs(value)):
                raise RuntimeError(
                    f"witness mismatch: predicted {value:.6g}, conjugation gives {achieved:.6g}"
                )
            u.setflags(write=False)
            return SeparatingWitness(unitary=u, value=value, permutation=tuple(p))

    raise RuntimeError(
        "no separating permutation found; inputs are likely degenerate beyond tolerance"
    )


def save_waypoints(ws: WaypointSet, target) -> None:
    doc = {
        "dim": ws.dim,
        "provenance": ws.provenance,
        "count": len(ws),
        "unitaries": [complex_entries(u) for u in ws.unitaries],
        "pair_index": [list(entry) for entry in ws.pair_index] if ws.pair_index else None,
    }
    write_text(target, canonical_dumps(doc))


def load_waypoints(source) -> WaypointSet:
    doc = parse_json(source)
    n = require_key(doc, "dim")
    if not isinstance(n, int) or n < 2:
        raise FormatError(f"field 'dim' must be an integer >= 2, got {n!r}")
    provenance = require_key(doc, "provenance")
    count = require_key(doc, "count")
    raw = require_key(doc, "unitaries")
    if not isinstance(raw, list) or len(raw) != count:
        raise FormatError(f"'unitaries' must hold count = {count} matrices")
    unitaries = np.array([matrix_from_entries(u, "unitaries", n) for u in raw])
    pair_index = doc.get("pair_index")
    if pair_index is not None:
        pair_index = tuple(tuple(entry) for entry in pair_index)
    try:
        return WaypointSet(dim=n, unitaries=unitaries, provenance=provenance, pair_index=pair_index)
    except ValueError as exc:
        raise FormatError(str(exc)) from exc
