"""Controllability test via the Lie closure of the two skew-Hermitian generators.

The system is density-matrix controllable exactly when the Lie algebra
generated by -i h0 and -i mu is the full traceless skew-Hermitian algebra
su(N) or all of u(N); this module computes that closure numerically and
reports its dimension and verdict.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "VERDICT_SU",
    "VERDICT_U",
    "VERDICT_NO",
    "LieClosureResult",
    "lie_closure",
    "is_controllable",
]

VERDICT_SU = "SU"
VERDICT_U = "U"
VERDICT_NO = "NO"

# A new direction is accepted when its component orthogonal to the current
# basis exceeds this fraction of the candidate's norm before projection
# (commutators shrink in scale, so the test must be relative), with an
# absolute floor guarding against noise amplification.
RANK_RTOL = 1e-10
ABS_FLOOR = 1e-13


@dataclass(frozen=True)
class LieClosureResult:
    """Closure dimension, an orthonormal basis of it, and the verdict.

    The basis is orthonormal under the real HS inner product
    Re Tr(A†B) and every element is skew-Hermitian.  Verdict "SU" means
    dimension N^2 - 1 with all basis elements traceless, "U" means the
    full N^2, anything else is "NO".
    """

    dimension: int
    basis: np.ndarray
    verdict: str


def _real_hs(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.real(np.vdot(a, b)))


def lie_closure(
    h0: np.ndarray,
    mu: np.ndarray,
    *,
    rank_rtol: float = RANK_RTOL,
    abs_floor: float = ABS_FLOOR,
) -> LieClosureResult:
    """Compute the Lie algebra generated by -i h0 and -i mu inside u(N).

    Starts from the orthonormalized generators (normalized to unit HS norm
    first, which removes scale dependence of the tolerance) and repeatedly
    appends Gram-Schmidt-orthonormalized commutators, breadth first: every
    element pairs with all of its predecessors in the round after it was
    added, so the schedule is deterministic and each unordered pair is
    visited exactly once.  Stops at closure or at dimension N^2.
    """
    h0 = np.asarray(h0, dtype=complex)
    mu = np.asarray(mu, dtype=complex)
    if h0.ndim != 2 or h0.shape[0] != h0.shape[1] or h0.shape != mu.shape:
        raise ValueError(f"generators must be square with equal shape, got {h0.shape} and {mu.shape}")
    n = h0.shape[0]

    basis: list[np.ndarray] = []

    def try_add(cand: np.ndarray, pre_norm: float) -> bool:
        resid = cand
        # Two projection passes keep the basis orthonormal to round-off.
        for _ in range(2):
            for e in basis:
                resid = resid - _real_hs(e, resid) * e
        norm = float(np.linalg.norm(resid))
        if norm <= max(rank_rtol * pre_norm, abs_floor):
            return False
        basis.append(resid / norm)
        return True

    new: list[int] = []
    for gen in (-1j * h0, -1j * mu):
        norm = float(np.linalg.norm(gen))
        if norm <= abs_floor:
            continue
        if try_add(gen / norm, 1.0):
            new.append(len(basis) - 1)

    while new and len(basis) < n * n:
        next_new: list[int] = []
        for b_idx in new:
            for a_idx in range(b_idx):
                cand = basis[a_idx] @ basis[b_idx] - basis[b_idx] @ basis[a_idx]
                pre_norm = float(np.linalg.norm(cand))
                if pre_norm <= abs_floor:
                    continue
                if try_add(cand, pre_norm):
                    next_new.append(len(basis) - 1)
            if len(basis) >= n * n:
                break
        new = next_new

    dim = len(basis)
    stacked = np.array(basis) if basis else np.zeros((0, n, n), dtype=complex)
    stacked.setflags(write=False)
    traceless = all(abs(complex(np.trace(e))) < 1e-10 for e in basis)
    if dim == n * n:
        verdict = VERDICT_U
    elif dim == n * n - 1 and traceless:
        verdict = VERDICT_SU
    else:
        verdict = VERDICT_NO
    return LieClosureResult(dimension=dim, basis=stacked, verdict=verdict)


def is_controllable(sys) -> str:
    """Controllability verdict ("SU", "U" or "NO") for a quantum system."""
    return lie_closure(sys.h0, sys.mu).verdict
