"""Spanning analysis, landscape gradient, and critical-point residuals.

The spanning rank of a set of traceless Hermitian matrices decides whether
their real span fills the full N^2 - 1 dimensional space; applied to the
conjugated dipoles along a trajectory it certifies non-singularity of the
control-to-propagator map at the sample resolution.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import evolve
from ._fmt import canonical_dumps, complex_entries, write_text
from .evolve import ControlField, PropagatorTrajectory
from .matspace import basis_zt, dagger
from .model import QuantumSystem
from .waypoints import WaypointSet

__all__ = [
    "RANK_TOL",
    "SpanReport",
    "VisitRecord",
    "spanning_rank",
    "trajectory_independence",
    "waypoint_visits",
    "gate_fidelity",
    "gradient",
    "finite_difference_gradient",
    "kinematic_residual",
    "save_span_report",
    "visits_csv",
]

# Conjugated dipoles are unit scale, so the gap between true rank
# deficiency and round-off is many orders of magnitude at desk scale.
RANK_TOL = 1e-8


@dataclass(frozen=True)
class SpanReport:
    """Singular spectrum, rank and verdict of a traceless-Hermitian span.

    ``full`` means rank N^2 - 1.  ``complement_basis`` holds an
    orthonormal basis (as matrices) of the orthogonal complement of the
    span, and is empty exactly when the span is full.
    """

    dim: int
    count: int
    singular_values: np.ndarray
    rank: int
    full: bool
    complement_basis: np.ndarray

    @property
    def verdict(self) -> str:
        return "FULL" if self.full else f"DEFICIENT rank={self.rank}"


@dataclass(frozen=True)
class VisitRecord:
    """Best phase-invariant match of one way-point along a trajectory."""

    index: int
    fidelity: float
    time: float
    step: int
    visited: bool


def spanning_rank(mats, *, rank_tol: float = RANK_TOL) -> SpanReport:
    """Rank of a set of traceless Hermitian matrices in isu(N) coordinates.

    Stacks the coordinates of every matrix (in the orthonormal basis from
    :func:`wayspan.matspace.basis_zt`) as rows and takes the SVD; the rank
    counts singular values above ``rank_tol`` times the largest one.  The
    complement basis collects the right-singular vectors of the discarded
    directions mapped back to matrices.  Inputs are expected Hermitian;
    the report is invariant under permutations of the list and under
    appending linear combinations of existing elements.
    """
    arr = np.asarray(mats, dtype=complex)
    if arr.ndim != 3 or arr.shape[0] == 0:
        raise ValueError(f"need a nonempty stack of square matrices, got shape {arr.shape}")
    if arr.shape[1] != arr.shape[2]:
        raise ValueError(f"matrices must be square, got shape {arr.shape}")
    n = arr.shape[1]
    basis = basis_zt(n)
    coords = np.real(np.einsum("kij,mji->mk", basis, arr))
    _, s, vt = np.linalg.svd(coords, full_matrices=True)
    smax = float(s[0]) if s.size else 0.0
    rank = int(np.sum(s > rank_tol * smax)) if smax > 0.0 else 0
    full = rank == n * n - 1
    if full:
        complement = np.zeros((0, n, n), dtype=complex)
    else:
        complement = np.einsum("ck,kij->cij", vt[rank:], basis)
    for out in (s, complement):
        out.setflags(write=False)
    return SpanReport(
        dim=n,
        count=int(arr.shape[0]),
        singular_values=s,
        rank=rank,
        full=full,
        complement_basis=complement,
    )


def trajectory_independence(
    traj: PropagatorTrajectory,
    sample_indices=None,
    *,
    rank_tol: float = RANK_TOL,
) -> SpanReport:
    """Spanning report of the conjugated dipoles at the sampled grid nodes.

    A FULL verdict certifies linear independence of the conjugated-dipole
    entries at the sample resolution; by default all nodes are used.
    """
    mats = traj.mu_hats
    if sample_indices is not None:
        idx = np.asarray(sample_indices, dtype=int)
        if idx.size == 0:
            raise ValueError("sample_indices must be nonempty")
        if idx.min() < 0 or idx.max() >= mats.shape[0]:
            raise ValueError(f"sample indices out of range 0..{mats.shape[0] - 1}")
        mats = mats[idx]
    return spanning_rank(mats, rank_tol=rank_tol)


def gate_fidelity(target: np.ndarray, u: np.ndarray) -> float:
    """Phase-invariant gate match |Tr(target† u)| / N."""
    target = np.asarray(target)
    u = np.asarray(u)
    if target.shape != u.shape or target.ndim != 2:
        raise ValueError(f"dimension mismatch: {target.shape} vs {u.shape}")
    return float(abs(np.vdot(target, u)) / target.shape[0])


def waypoint_visits(traj: PropagatorTrajectory, wset: WaypointSet, fid_tol: float = 1e-3) -> list[VisitRecord]:
    """Best visit fidelity of every way-point over the trajectory nodes.

    Fidelity is phase-invariant, |Tr(W† U_m)| / N, since way-points only
    matter through conjugation; a way-point counts as visited when its
    best fidelity reaches 1 - fid_tol.  Indices in the records are the
    1-based list positions of the set.
    """
    if wset.dim != traj.dim:
        raise ValueError(f"dimension mismatch: set {wset.dim} vs trajectory {traj.dim}")
    overlaps = np.abs(np.einsum("kij,mij->km", wset.unitaries.conj(), traj.unitaries)) / traj.dim
    records = []
    for k in range(len(wset)):
        m = int(np.argmax(overlaps[k]))
        fid = float(overlaps[k, m])
        records.append(
            VisitRecord(
                index=k + 1,
                fidelity=fid,
                time=float(traj.times[m]),
                step=m,
                visited=fid >= 1.0 - fid_tol,
            )
        )
    return records


def gradient(
    sys: QuantumSystem,
    field: ControlField,
    rho0: np.ndarray,
    obs: np.ndarray,
) -> np.ndarray:
    """Derivative of Tr(rho(T) obs) with respect to each control step.

    Realized as ``g_m = -dt Im Tr(O_T [mu_hat_m, rho0])`` with
    ``O_T = U_M† obs U_M`` and ``mu_hat_m`` the spectrally corrected
    coupling conjugated by the half-step (midpoint) propagator of step m
    (see ``evolve._step_frames``); with that correction the discrete
    derivative is exact, and the central finite-difference check is the
    normative contract pinning sign and convention.
    """
    rho0 = np.asarray(rho0, dtype=complex)
    obs = np.asarray(obs, dtype=complex)
    n = sys.dim
    if rho0.shape != (n, n) or obs.shape != (n, n):
        raise ValueError(
            f"dimension mismatch: rho0 {rho0.shape}, obs {obs.shape}, system {n}"
        )
    step, half, mu_bar = evolve._step_frames(sys, field)
    m_total = field.steps
    mid_hats = np.empty((m_total, n, n), dtype=complex)
    u = np.eye(n, dtype=complex)
    for m in range(m_total):
        u_mid = half[m] @ u
        mid_hats[m] = dagger(u_mid) @ mu_bar[m] @ u_mid
        u = step[m] @ u
    o_t = dagger(u) @ obs @ u
    ro = rho0 @ o_t
    return -2.0 * field.dt * np.imag(np.einsum("mab,ba->m", mid_hats, ro))


def finite_difference_gradient(
    sys: QuantumSystem,
    field: ControlField,
    rho0: np.ndarray,
    obs: np.ndarray,
    *,
    h: float = 1e-5,
) -> np.ndarray:
    """Central finite differences of the same objective; validation oracle."""
    rho0 = np.asarray(rho0, dtype=complex)
    obs = np.asarray(obs, dtype=complex)

    def objective(values: np.ndarray) -> float:
        probe = ControlField(horizon=field.horizon, values=values)
        u = evolve._final_propagator(sys, probe)
        return float(np.real(np.einsum("ij,ji->", u @ rho0 @ dagger(u), obs)))

    out = np.empty(field.steps)
    base = field.values
    for m in range(field.steps):
        plus = base.copy()
        minus = base.copy()
        plus[m] += h
        minus[m] -= h
        out[m] = (objective(plus) - objective(minus)) / (2.0 * h)
    return out


def kinematic_residual(u_t: np.ndarray, rho0: np.ndarray, obs: np.ndarray) -> float:
    """Frobenius norm of [U_T† obs U_T, rho0]; zero at kinematic critical points."""
    u_t = np.asarray(u_t, dtype=complex)
    rho0 = np.asarray(rho0, dtype=complex)
    obs = np.asarray(obs, dtype=complex)
    if not (u_t.shape == rho0.shape == obs.shape) or u_t.ndim != 2:
        raise ValueError(
            f"dimension mismatch: u {u_t.shape}, rho0 {rho0.shape}, obs {obs.shape}"
        )
    conj_obs = dagger(u_t) @ obs @ u_t
    return float(np.linalg.norm(conj_obs @ rho0 - rho0 @ conj_obs))


def save_span_report(report: SpanReport, target) -> None:
    """Write singular values as CSV, a verdict line, and any complement basis."""
    lines = ["singular_value"]
    lines += [repr(float(s)) for s in report.singular_values]
    lines.append(report.verdict)
    text = "\n".join(lines) + "\n"
    if not report.full:
        text += "complement\n"
        text += canonical_dumps([complex_entries(m) for m in report.complement_basis])
    write_text(target, text)


def visits_csv(records: list[VisitRecord], target) -> None:
    lines = ["waypoint,fidelity,time"]
    for r in records:
        lines.append(f"{r.index},{r.fidelity!r},{r.time!r}")
    write_text(target, "\n".join(lines) + "\n")
