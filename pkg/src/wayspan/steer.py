"""Control synthesis toward target unitaries and through way-point lists.

First-order ascent on the phase-invariant gate fidelity with a
backtracking line search; plain gradient ascent is deterministic given
the seed and entirely sufficient at desk scale.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import evolve, reachability
from .evolve import ControlField, concat_fields
from .landscape import VisitRecord, gate_fidelity, waypoint_visits
from .matspace import assert_unitary, dagger
from .model import QuantumSystem
from .waypoints import WaypointSet

__all__ = [
    "NotControllableError",
    "SteerOptions",
    "SynthesisResult",
    "WaypointSynthesis",
    "default_segment_time",
    "synthesize_to_target",
    "synthesize_through_waypoints",
]

ARMIJO = 1e-4
MIN_STEP = 1e-12
GRAD_FLOOR = 1e-14
INIT_AMPLITUDE = 0.1


class NotControllableError(ValueError):
    """The system's Lie closure is too small for synthesis guarantees."""


def default_segment_time(sys: QuantumSystem) -> float:
    """Heuristic horizon per segment: 10 pi N / ||mu||_HS.

    No a-priori bound on the needed horizon exists, so this is a knob;
    failures at a too-short horizon are reported honestly rather than
    hidden.
    """
    return 10.0 * np.pi * sys.dim / float(np.linalg.norm(sys.mu))


@dataclass(frozen=True)
class SteerOptions:
    segment_time: float
    steps_per_segment: int = 50
    max_iters: int = 500
    fid_target: float = 0.999
    step_size: float = 0.1
    seed: int = 0

    def __post_init__(self):
        if not (0.0 < self.fid_target < 1.0):
            raise ValueError(f"fid_target must lie in (0, 1), got {self.fid_target}")
        for name in ("segment_time", "steps_per_segment", "max_iters", "step_size"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")

    @classmethod
    def for_system(cls, sys: QuantumSystem, **overrides) -> "SteerOptions":
        overrides.setdefault("segment_time", default_segment_time(sys))
        return cls(**overrides)


@dataclass(frozen=True)
class SynthesisResult:
    field: ControlField
    achieved_fidelity: float
    iterations: int
    converged: bool


@dataclass(frozen=True)
class WaypointSynthesis:
    """Concatenated field, per-segment results and the visit verification."""

    field: ControlField
    segments: tuple[SynthesisResult, ...]
    visits: tuple[VisitRecord, ...]

    @property
    def all_visited(self) -> bool:
        return all(v.visited for v in self.visits)


def _fidelity_state(sys: QuantumSystem, field: ControlField, target: np.ndarray) -> tuple[float, np.ndarray]:
    u = evolve._final_propagator(sys, field)
    return gate_fidelity(target, u), u


def _fidelity_gradient(sys: QuantumSystem, field: ControlField, target: np.ndarray) -> tuple[float, np.ndarray]:
    """Fidelity and the exact gradient of its square wrt each step amplitude.

    With z = Tr(target† U_M), the objective is |z|^2 / N^2 and
    dz/d(eps_m) = i dt Tr(mu_hat_m target† U_M) with mu_hat_m the
    spectrally corrected midpoint conjugate from ``evolve._step_frames``;
    the overall phase of the target drops out of the product with
    conj(z), so the iterates are invariant under target phase shifts.
    """
    n = sys.dim
    step, half, mu_bar = evolve._step_frames(sys, field)
    m_total = field.steps
    mid_hats = np.empty((m_total, n, n), dtype=complex)
    u = np.eye(n, dtype=complex)
    for m in range(m_total):
        u_mid = half[m] @ u
        mid_hats[m] = dagger(u_mid) @ mu_bar[m] @ u_mid
        u = step[m] @ u
    z = complex(np.vdot(target, u))
    b = dagger(target) @ u
    dz = 1j * field.dt * np.einsum("mab,ba->m", mid_hats, b)
    grad = 2.0 * np.real(np.conj(z) * dz) / (n * n)
    return abs(z) / n, grad


def _synthesize(
    sys: QuantumSystem,
    target: np.ndarray,
    opts: SteerOptions,
    rng: np.random.Generator,
    initial: ControlField | None,
) -> SynthesisResult:
    m_steps = opts.steps_per_segment
    if initial is not None:
        if initial.steps != m_steps or abs(initial.horizon - opts.segment_time) > 1e-12 * opts.segment_time:
            raise ValueError("initial field must match segment_time and steps_per_segment")
        values = initial.values.copy()
    else:
        values = rng.uniform(-INIT_AMPLITUDE, INIT_AMPLITUDE, m_steps)

    field = ControlField(horizon=opts.segment_time, values=values)
    fid, grad = _fidelity_gradient(sys, field, target)
    iterations = 0
    alpha = opts.step_size
    while fid < opts.fid_target and iterations < opts.max_iters:
        gnorm2 = float(np.dot(grad, grad))
        if gnorm2 < GRAD_FLOOR**2:
            break
        phi = fid * fid
        alpha = min(opts.step_size, 2.0 * alpha)
        accepted = False
        while alpha >= MIN_STEP:
            trial = ControlField(horizon=opts.segment_time, values=field.values + alpha * grad)
            trial_fid, _ = _fidelity_state(sys, trial, target)
            if trial_fid * trial_fid >= phi + ARMIJO * alpha * gnorm2:
                field = trial
                fid = trial_fid
                accepted = True
                break
            alpha *= 0.5
        if not accepted:
            break
        iterations += 1
        fid, grad = _fidelity_gradient(sys, field, target)

    return SynthesisResult(
        field=field,
        achieved_fidelity=fid,
        iterations=iterations,
        converged=fid >= opts.fid_target,
    )


def synthesize_to_target(
    sys: QuantumSystem,
    target: np.ndarray,
    opts: SteerOptions,
    *,
    initial: ControlField | None = None,
    rng: np.random.Generator | None = None,
) -> SynthesisResult:
    """Gradient-ascent synthesis of a control hitting ``target`` up to phase.

    Requires a controllable system.  The initial guess is small seeded
    uniform noise (the zero field is often a saddle); an explicit
    ``initial`` field overrides it.  Accepted iterations never decrease
    the fidelity (Armijo backtracking), and a field already meeting
    ``fid_target`` returns converged at iteration 0.  Non-convergence is
    reported in the result rather than raised.
    """
    verdict = reachability.is_controllable(sys)
    if verdict == reachability.VERDICT_NO:
        raise NotControllableError(
            "system is not controllable (Lie closure too small); synthesis guarantees do not apply"
        )
    target = assert_unitary(target, name="target")
    if target.shape != (sys.dim, sys.dim):
        raise ValueError(f"target shape {target.shape} does not match dimension {sys.dim}")
    if rng is None:
        rng = np.random.default_rng(opts.seed)
    return _synthesize(sys, target, opts, rng, initial)


def synthesize_through_waypoints(
    sys: QuantumSystem,
    wset: WaypointSet,
    opts: SteerOptions,
) -> WaypointSynthesis:
    """Chain segment syntheses so the trajectory visits the way-points in order.

    Segment k targets the relative propagator taking the achieved endpoint
    of the previous segments to way-point k (with the identity before the
    first), per the composition U(t_k, 0) = U(t_k, t_{k-1}) U(t_{k-1}, 0);
    anchoring each target to the achieved endpoint keeps per-segment errors
    from compounding across the chain.  The segment fields share one grid
    and concatenate into a single control whose re-propagated trajectory is
    verified against the set with phase-invariant visit fidelities.
    """
    verdict = reachability.is_controllable(sys)
    if verdict == reachability.VERDICT_NO:
        raise NotControllableError(
            "system is not controllable (Lie closure too small); synthesis guarantees do not apply"
        )
    if len(wset) == 0:
        raise ValueError("way-point set is empty")
    if wset.dim != sys.dim:
        raise ValueError(f"dimension mismatch: set {wset.dim} vs system {sys.dim}")

    rng = np.random.default_rng(opts.seed)
    reached = np.eye(sys.dim, dtype=complex)
    segments = []
    fields = []
    for w in wset.unitaries:
        target = w @ dagger(reached)
        result = _synthesize(sys, target, opts, rng, None)
        segments.append(result)
        fields.append(result.field)
        reached = evolve._final_propagator(sys, result.field) @ reached

    field = concat_fields(fields)
    traj = evolve.propagate(sys, field)
    visits = waypoint_visits(traj, wset, fid_tol=1.0 - opts.fid_target)
    return WaypointSynthesis(field=field, segments=tuple(segments), visits=tuple(visits))
