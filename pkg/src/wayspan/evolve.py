"""Propagator integration for piecewise-constant controls.

The step generator ``h0 - eps_m * mu`` is Hermitian, so each step
propagator is computed by eigendecomposition, which is exact for a
constant step and unconditionally unitary up to round-off.  Trajectories
carry the interaction-frame coupling ``u† mu u`` at every grid node
because all downstream analysis (spanning, gradients) consumes it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import matspace
from ._fmt import FormatError, canonical_dumps, parse_json, require_key, write_text
from .matspace import dagger
from .model import QuantumSystem

__all__ = [
    "ControlField",
    "PropagatorTrajectory",
    "density_matrix",
    "propagate",
    "conjugated_dipole",
    "evolve_density",
    "expectation",
    "concat_fields",
    "load_field",
    "save_field",
    "trajectory_csv",
]

TRAJECTORY_TOL = 1e-10


@dataclass(frozen=True)
class ControlField:
    """Piecewise-constant control on a uniform grid over [0, horizon]."""

    horizon: float
    values: np.ndarray

    def __post_init__(self):
        horizon = float(self.horizon)
        if not np.isfinite(horizon) or horizon <= 0:
            raise ValueError(f"horizon must be positive and finite, got {horizon!r}")
        values = np.array(self.values, dtype=float).reshape(-1)
        if values.size < 1:
            raise ValueError("control needs at least one step")
        if not np.all(np.isfinite(values)):
            raise ValueError("control values must be finite")
        values.setflags(write=False)
        object.__setattr__(self, "horizon", horizon)
        object.__setattr__(self, "values", values)

    @property
    def steps(self) -> int:
        return int(self.values.size)

    @property
    def dt(self) -> float:
        return self.horizon / self.steps

    @classmethod
    def constant(cls, value: float, horizon: float, steps: int) -> "ControlField":
        return cls(horizon=horizon, values=np.full(steps, float(value)))


@dataclass(frozen=True)
class PropagatorTrajectory:
    """Grid times, propagators U(t_m, 0) and conjugated dipoles at each node."""

    times: np.ndarray
    unitaries: np.ndarray
    mu_hats: np.ndarray

    @property
    def dim(self) -> int:
        return int(self.unitaries.shape[-1])

    @property
    def steps(self) -> int:
        return int(self.unitaries.shape[0]) - 1


def density_matrix(entries, *, tol: float = TRAJECTORY_TOL) -> np.ndarray:
    """Validated density matrix: Hermitian, unit trace, nonnegative spectrum."""
    rho = np.asarray(entries, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError(f"density matrix must be square, got shape {rho.shape}")
    herm = float(np.abs(rho - dagger(rho)).max())
    if herm > tol:
        raise ValueError(f"density matrix not Hermitian: defect {herm:.3e}")
    tr = complex(np.trace(rho))
    if abs(tr - 1.0) > tol:
        raise ValueError(f"density matrix trace must be 1, got {tr:.12g}")
    lo = float(np.linalg.eigvalsh(rho).min())
    if lo < -tol:
        raise ValueError(f"density matrix has negative eigenvalue {lo:.3e}")
    out = rho.copy()
    out.setflags(write=False)
    return out


def _step_data(sys: QuantumSystem, field: ControlField) -> tuple[np.ndarray, np.ndarray]:
    """Batched eigendecomposition of every step generator h0 - eps_m mu."""
    gens = sys.h0[None, :, :] - field.values[:, None, None] * sys.mu[None, :, :]
    return np.linalg.eigh(gens)


def _phase_conjugate(v: np.ndarray, phases: np.ndarray) -> np.ndarray:
    """Batched V diag(phases) V†."""
    return np.einsum("mab,mb,mcb->mac", v, phases, v.conj())


def _step_unitaries(sys: QuantumSystem, field: ControlField) -> np.ndarray:
    w, v = _step_data(sys, field)
    return _phase_conjugate(v, np.exp(-1j * field.dt * w))


def _final_propagator(sys: QuantumSystem, field: ControlField) -> np.ndarray:
    """Endpoint propagator only; skips trajectory storage and validation."""
    steps = _step_unitaries(sys, field)
    u = np.eye(sys.dim, dtype=complex)
    for s in steps:
        u = s @ u
    return u


def _step_frames(sys: QuantumSystem, field: ControlField) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Per-step data for exact control derivatives.

    Returns the step propagators, half-step propagators and the
    spectrally corrected coupling ``mu_bar`` for each step: in the step
    eigenbasis the coupling entries are damped by
    sinc(dt (w_a - w_b) / 2), which makes the derivative of the step
    exponential with respect to the control amplitude exact,

        d(step)/d(eps) = i dt * half_step @ mu_bar @ half_step.
    """
    w, v = _step_data(sys, field)
    dt = field.dt
    step = _phase_conjugate(v, np.exp(-1j * dt * w))
    half = _phase_conjugate(v, np.exp(-0.5j * dt * w))
    mu_eig = np.einsum("mba,bc,mcd->mad", v.conj(), sys.mu.astype(complex), v)
    gaps = 0.5 * dt * (w[:, :, None] - w[:, None, :])
    kernel = np.sinc(gaps / np.pi)
    mu_bar = np.einsum("mab,mbc,mdc->mad", v, mu_eig * kernel, v.conj())
    return step, half, mu_bar


def propagate(sys: QuantumSystem, field: ControlField, *, validate: bool = True) -> PropagatorTrajectory:
    """Integrate the propagator over the control grid.

    ``U_m = exp(-i dt (h0 - eps_m mu)) U_{m-1}`` with ``U_0 = I`` exactly;
    each node also gets the conjugated dipole ``U_m† mu U_m``.  With
    ``validate`` the unitarity of every node and the Hermitian traceless
    structure of every conjugated dipole are checked at 1e-10.
    """
    steps = _step_unitaries(sys, field)
    m_total = field.steps
    n = sys.dim
    unitaries = np.empty((m_total + 1, n, n), dtype=complex)
    unitaries[0] = np.eye(n)
    for m in range(m_total):
        unitaries[m + 1] = steps[m] @ unitaries[m]
    mu_hats = np.einsum("mba,bc,mcd->mad", unitaries.conj(), sys.mu.astype(complex), unitaries)
    times = np.linspace(0.0, field.horizon, m_total + 1)

    if validate:
        eye = np.eye(n)
        gram = np.einsum("mba,mbc->mac", unitaries.conj(), unitaries)
        defect = float(np.linalg.norm(gram - eye, axis=(1, 2)).max())
        if defect > TRAJECTORY_TOL:
            raise RuntimeError(f"propagation lost unitarity: defect {defect:.3e}")
        herm = float(np.abs(mu_hats - mu_hats.conj().transpose(0, 2, 1)).max())
        traces = float(np.abs(np.trace(mu_hats, axis1=1, axis2=2)).max())
        if herm > TRAJECTORY_TOL or traces > TRAJECTORY_TOL:
            raise RuntimeError(
                f"conjugated dipoles off structure: hermiticity {herm:.3e}, trace {traces:.3e}"
            )

    for arr in (times, unitaries, mu_hats):
        arr.setflags(write=False)
    return PropagatorTrajectory(times=times, unitaries=unitaries, mu_hats=mu_hats)


def conjugated_dipole(u: np.ndarray, mu: np.ndarray) -> np.ndarray:
    """Coupling operator in the frame of ``u``: u† mu u.

    Hermitian and traceless whenever ``mu`` is, with the same HS norm.
    """
    u = np.asarray(u)
    mu = np.asarray(mu)
    if u.shape != mu.shape or u.ndim != 2:
        raise ValueError(f"dimension mismatch: u {u.shape} vs mu {mu.shape}")
    out = dagger(u) @ mu @ u
    out.setflags(write=False)
    return out


def evolve_density(traj: PropagatorTrajectory, rho0: np.ndarray) -> np.ndarray:
    """Density trajectory rho_m = U_m rho0 U_m† along the grid."""
    rho0 = np.asarray(rho0, dtype=complex)
    if rho0.shape != (traj.dim, traj.dim):
        raise ValueError(f"density matrix shape {rho0.shape} does not match dimension {traj.dim}")
    u = traj.unitaries
    out = np.einsum("mab,bc,mdc->mad", u, rho0, u.conj())
    out.setflags(write=False)
    return out


def expectation(rho: np.ndarray, obs: np.ndarray) -> float:
    """Observable expectation Tr(rho obs); real for Hermitian arguments."""
    rho = np.asarray(rho)
    obs = np.asarray(obs)
    if rho.shape != obs.shape or rho.ndim != 2:
        raise ValueError(f"dimension mismatch: rho {rho.shape} vs obs {obs.shape}")
    val = complex(np.einsum("ij,ji->", rho, obs))
    if abs(val.imag) > 1e-10 * max(1.0, abs(val)):
        raise ValueError(f"expectation has imaginary residual {val.imag:.3e}; inputs not Hermitian")
    return float(val.real)


def concat_fields(fields: list[ControlField]) -> ControlField:
    """Concatenate fields sharing one step length into a single grid."""
    if not fields:
        raise ValueError("need at least one field")
    dt = fields[0].dt
    for f in fields[1:]:
        if abs(f.dt - dt) > 1e-12 * dt:
            raise ValueError(f"step mismatch: {f.dt!r} vs {dt!r}")
    values = np.concatenate([f.values for f in fields])
    horizon = float(sum(f.horizon for f in fields))
    return ControlField(horizon=horizon, values=values)


def load_field(source) -> ControlField:
    """Load a control document: JSON with fields ``T``, ``M``, ``values``."""
    doc = parse_json(source)
    horizon = require_key(doc, "T")
    m = require_key(doc, "M")
    values = require_key(doc, "values")
    if not isinstance(m, int) or m < 1:
        raise FormatError(f"field 'M' must be a positive integer, got {m!r}")
    try:
        arr = np.array(values, dtype=float)
    except (TypeError, ValueError) as exc:
        raise FormatError(f"field 'values' is not numeric: {exc}") from exc
    if arr.shape != (m,):
        raise FormatError(f"'values' must hold M = {m} numbers, got shape {arr.shape}")
    try:
        return ControlField(horizon=float(horizon), values=arr)
    except (TypeError, ValueError) as exc:
        raise FormatError(str(exc)) from exc


def save_field(field: ControlField, target) -> None:
    doc = {"T": field.horizon, "M": field.steps, "values": field.values.tolist()}
    write_text(target, canonical_dumps(doc))


def trajectory_csv(traj: PropagatorTrajectory, target) -> None:
    """Write t plus Re/Im of all propagator entries (row-major) as CSV."""
    n = traj.dim
    header = ["t"]
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            header += [f"re_u_{i}_{j}", f"im_u_{i}_{j}"]
    lines = [",".join(header)]
    for t, u in zip(traj.times, traj.unitaries):
        row = [repr(float(t))]
        for v in u.reshape(-1):
            row += [repr(float(v.real)), repr(float(v.imag))]
        lines.append(",".join(row))
    write_text(target, "\n".join(lines) + "\n")
