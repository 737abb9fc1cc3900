"""Quantum system definition, document I/O, and standing-hypothesis checks.

A system is a drift Hamiltonian ``h0`` and a coupling (dipole) operator
``mu`` through which one scalar control field enters the dynamics
bilinearly.  Both are restricted to real symmetric matrices and ``mu``
must be traceless; inputs outside those assumptions are rejected rather
than silently accepted so that every downstream construction stays on
well-defined ground.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import reachability
from ._fmt import (
    FormatError,
    canonical_dumps,
    parse_json,
    read_text,
    real_matrix,
    require_key,
    write_text,
)

__all__ = [
    "FormatError",
    "HypothesisViolation",
    "QuantumSystem",
    "HypothesisReport",
    "load_system",
    "load_system_csv",
    "save_system",
    "check_hypotheses",
    "default_offdiag_tol",
]

SYMMETRY_ENTRY_TOL = 1e-12
TRACE_RTOL = 1e-12


class HypothesisViolation(ValueError):
    """A required modeling hypothesis does not hold for the given matrices."""

    def __init__(self, hypothesis: str, message: str):
        super().__init__(message)
        self.hypothesis = hypothesis


def _worst_asymmetry(m: np.ndarray) -> tuple[float, int, int]:
    defect = np.abs(m - m.T)
    flat = int(np.argmax(defect))
    i, j = divmod(flat, m.shape[0])
    return float(defect[i, j]), i + 1, j + 1


def _as_real_symmetric(entries, name: str, dim: int) -> np.ndarray:
    if np.iscomplexobj(entries):
        raise HypothesisViolation(f"{name}_real", f"{name} must have real entries")
    try:
        m = np.array(entries, dtype=float)
    except (TypeError, ValueError) as exc:
        raise HypothesisViolation(
            f"{name}_real", f"{name} must have real entries: {exc}"
        ) from exc
    if m.shape != (dim, dim):
        raise ValueError(f"{name} must be {dim}x{dim}, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError(f"{name} contains non-finite entries")
    defect, i, j = _worst_asymmetry(m)
    if defect > SYMMETRY_ENTRY_TOL:
        raise HypothesisViolation(
            f"{name}_symmetric",
            f"{name} is not symmetric: entry ({i},{j}) differs from ({j},{i}) by {defect:.3e}",
        )
    return m


@dataclass(frozen=True)
class QuantumSystem:
    """An N-level system: real symmetric ``h0`` and traceless ``mu`` (hbar = 1)."""

    dim: int
    h0: np.ndarray
    mu: np.ndarray
    label: str | None = None

    def __post_init__(self):
        if not isinstance(self.dim, (int, np.integer)) or self.dim < 2:
            raise ValueError(f"system dimension must be an integer >= 2, got {self.dim!r}")
        h0 = _as_real_symmetric(self.h0, "h0", self.dim)
        mu = _as_real_symmetric(self.mu, "mu", self.dim)
        trace = abs(float(np.trace(mu)))
        if trace >= TRACE_RTOL * (1.0 + float(np.linalg.norm(mu))):
            raise HypothesisViolation(
                "mu_traceless", f"zero-trace hypothesis violated: Tr(mu) = {np.trace(mu):.6g}"
            )
        h0.setflags(write=False)
        mu.setflags(write=False)
        object.__setattr__(self, "dim", int(self.dim))
        object.__setattr__(self, "h0", h0)
        object.__setattr__(self, "mu", mu)


@dataclass(frozen=True)
class HypothesisReport:
    """Outcome of the standing-hypothesis checks, one flag per hypothesis.

    ``offdiag_nonzero`` is true iff every off-diagonal coupling entry
    exceeds ``offdiag_tol`` in magnitude; ``controllable`` is the Lie
    closure verdict ("SU", "U" or "NO").
    """

    zero_trace: bool
    symmetric: bool
    offdiag_nonzero: bool
    controllable: str
    offdiag_min: float
    offdiag_tol: float
    lie_dimension: int

    @property
    def ok(self) -> bool:
        """True iff every checked hypothesis holds."""
        return (
            self.zero_trace
            and self.symmetric
            and self.offdiag_nonzero
            and self.controllable in (reachability.VERDICT_SU, reachability.VERDICT_U)
        )


def default_offdiag_tol(mu: np.ndarray) -> float:
    """Threshold below which an off-diagonal coupling entry counts as zero.

    The nonzero-coupling hypothesis is a strict inequality, so only
    numerically-zero entries should fail it: 1e-12 times the Frobenius
    norm of ``mu``.
    """
    return 1e-12 * float(np.linalg.norm(mu))


def check_hypotheses(sys: QuantumSystem, offdiag_tol: float | None = None) -> HypothesisReport:
    """Evaluate each standing hypothesis of a valid system independently.

    Never mutates the system and is deterministic; the controllability
    verdict is delegated to :func:`reachability.lie_closure`.
    """
    mu = sys.mu
    tol = default_offdiag_tol(mu) if offdiag_tol is None else float(offdiag_tol)
    off_mask = ~np.eye(sys.dim, dtype=bool)
    offdiag_min = float(np.abs(mu[off_mask]).min())
    closure = reachability.lie_closure(sys.h0, sys.mu)
    trace = abs(float(np.trace(mu)))
    sym_defect = max(_worst_asymmetry(np.asarray(sys.h0))[0], _worst_asymmetry(np.asarray(mu))[0])
    return HypothesisReport(
        zero_trace=trace < TRACE_RTOL * (1.0 + float(np.linalg.norm(mu))),
        symmetric=sym_defect <= SYMMETRY_ENTRY_TOL,
        offdiag_nonzero=offdiag_min > tol,
        controllable=closure.verdict,
        offdiag_min=offdiag_min,
        offdiag_tol=tol,
        lie_dimension=closure.dimension,
    )


def load_system(source) -> QuantumSystem:
    """Load a system document (JSON with fields ``n``, ``h0``, ``mu``, optional ``label``).

    Raises :class:`FormatError` for malformed documents and
    :class:`HypothesisViolation` for well-formed documents whose matrices
    break the modeling assumptions.
    """
    doc = parse_json(source)
    n = require_key(doc, "n")
    if not isinstance(n, int) or n < 2:
        raise FormatError(f"field 'n' must be an integer >= 2, got {n!r}")
    h0 = real_matrix(require_key(doc, "h0"), "h0", n)
    mu = real_matrix(require_key(doc, "mu"), "mu", n)
    label = doc.get("label")
    if label is not None and not isinstance(label, str):
        raise FormatError("field 'label' must be a string")
    return QuantumSystem(dim=n, h0=h0, mu=mu, label=label)


def load_system_csv(source) -> QuantumSystem:
    """Load the compact CSV variant: line ``n``, then N rows of h0, then N of mu."""
    lines = [ln.strip() for ln in read_text(source).splitlines() if ln.strip()]
    if not lines:
        raise FormatError("empty CSV system document")
    try:
        n = int(lines[0])
    except ValueError as exc:
        raise FormatError(f"first CSV line must be the dimension: {exc}") from exc
    if len(lines) != 1 + 2 * n:
        raise FormatError(f"CSV system document needs {1 + 2 * n} lines for n = {n}, got {len(lines)}")

    def rows(block: list[str], name: str) -> np.ndarray:
        parsed = []
        for ln in block:
            try:
                row = [float(tok) for tok in ln.split(",")]
            except ValueError as exc:
                raise FormatError(f"bad {name} row {ln!r}: {exc}") from exc
            if len(row) != n:
                raise FormatError(f"{name} row has {len(row)} entries, expected {n}")
            parsed.append(row)
        return np.array(parsed, dtype=float)

    h0 = rows(lines[1 : 1 + n], "h0")
    mu = rows(lines[1 + n : 1 + 2 * n], "mu")
    return QuantumSystem(dim=n, h0=h0, mu=mu)


def save_system(sys: QuantumSystem, target) -> None:
    """Write the canonical system document; reloading recovers it bit-exactly."""
    doc = {"n": sys.dim, "h0": sys.h0.tolist(), "mu": sys.mu.tolist()}
    if sys.label is not None:
        doc["label"] = sys.label
    write_text(target, canonical_dumps(doc))
