import numpy as np
import pytest

from conftest import (
    SX,
    SY,
    SZ,
    random_density,
    random_traceless_symmetric,
)
from wayspan import evolve, landscape, matspace, waypoints
from wayspan.evolve import ControlField
from wayspan.model import QuantumSystem


@pytest.fixture
def pauli_system():
    return QuantumSystem(2, np.real(SZ), np.real(SX))


class TestSpanningRank:
    def test_single_direction(self):
        report = landscape.spanning_rank(np.array([SZ]))
        assert report.rank == 1
        assert not report.full
        # complement spans the sx and sy directions
        comp = report.complement_basis
        assert comp.shape[0] == 2
        for probe in (SX, SY):
            proj = sum(abs(matspace.hs_inner(c, probe)) ** 2 for c in comp)
            assert proj == pytest.approx(matspace.hs_norm(probe) ** 2, rel=1e-10)

    def test_duplicates_do_not_add(self):
        report = landscape.spanning_rank(np.array([SZ, SZ]))
        assert report.rank == 1

    def test_quadruple_conjugates_are_full(self):
        wset = waypoints.theorem1_waypoints(np.real(SZ))
        hats = np.array([evolve.conjugated_dipole(u, SZ) for u in wset.unitaries])
        report = landscape.spanning_rank(hats)
        assert report.full
        assert report.complement_basis.shape[0] == 0

    def test_permutation_and_combination_invariance(self, rng):
        mats = np.array([random_traceless_symmetric(3, rng) for _ in range(5)])
        base = landscape.spanning_rank(mats)
        shuffled = landscape.spanning_rank(mats[rng.permutation(5)])
        assert shuffled.rank == base.rank
        combo = 0.3 * mats[0] - 1.7 * mats[3]
        extended = landscape.spanning_rank(np.concatenate([mats, combo[None]]))
        assert extended.rank == base.rank

    def test_empty_input_rejected(self):
        with pytest.raises(ValueError):
            landscape.spanning_rank(np.zeros((0, 2, 2)))

    def test_verdict_strings(self):
        assert landscape.spanning_rank(np.array([SZ])).verdict == "DEFICIENT rank=1"
        wset = waypoints.theorem3_waypoints(2)
        mu = np.real(SX) + np.real(SZ) * 0.5
        mu = mu - np.trace(mu) / 2 * np.eye(2)
        hats = np.array([evolve.conjugated_dipole(u, mu) for u in wset.unitaries])
        assert landscape.spanning_rank(hats).verdict == "FULL"


class TestTrajectoryIndependence:
    def test_free_evolution_is_deficient(self, pauli_system):
        # u(t) = exp(-i t sz) conjugates sx inside span{sx, sy} only
        field = ControlField.constant(0.0, 3.0, 60)
        traj = evolve.propagate(pauli_system, field)
        report = landscape.trajectory_independence(traj)
        assert report.rank == 2
        assert not report.full

    def test_single_sample(self, pauli_system):
        field = ControlField.constant(0.0, 1.0, 10)
        traj = evolve.propagate(pauli_system, field)
        assert landscape.trajectory_independence(traj, [0]).rank == 1

    def test_monotone_in_samples(self, pauli_system, rng):
        field = ControlField(horizon=4.0, values=rng.normal(size=80))
        traj = evolve.propagate(pauli_system, field)
        few = landscape.trajectory_independence(traj, [0, 10, 20])
        more = landscape.trajectory_independence(traj, [0, 10, 20, 40, 60, 80])
        assert more.rank >= few.rank

    def test_invalid_indices(self, pauli_system):
        field = ControlField.constant(0.0, 1.0, 10)
        traj = evolve.propagate(pauli_system, field)
        with pytest.raises(ValueError):
            landscape.trajectory_independence(traj, [0, 99])
        with pytest.raises(ValueError):
            landscape.trajectory_independence(traj, [])


class TestWaypointVisits:
    def test_exact_containment(self, pauli_system, rng):
        field = ControlField(horizon=2.0, values=rng.normal(size=40))
        traj = evolve.propagate(pauli_system, field)
        wset = waypoints.WaypointSet(
            dim=2, unitaries=np.array([traj.unitaries[17]]), provenance="custom"
        )
        records = landscape.waypoint_visits(traj, wset, fid_tol=1e-6)
        assert records[0].fidelity == pytest.approx(1.0, abs=1e-12)
        assert records[0].step == 17
        assert records[0].visited

    def test_identity_trajectory_misses_swap(self):
        sys2 = QuantumSystem(2, np.zeros((2, 2)), np.real(SX))
        field = ControlField.constant(0.0, 1.0, 5)
        traj = evolve.propagate(sys2, field)
        swap = matspace.embed_2x2(np.array([[0.0, 1.0], [1.0, 0.0]]), 1, 2, 2)
        wset = waypoints.WaypointSet(dim=2, unitaries=np.array([swap]), provenance="custom")
        records = landscape.waypoint_visits(traj, wset, fid_tol=1e-3)
        assert records[0].fidelity == pytest.approx(0.0, abs=1e-12)
        assert not records[0].visited

    def test_gate_fidelity_phase_invariance(self, rng):
        u = np.linalg.qr(rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3)))[0]
        assert landscape.gate_fidelity(u, np.exp(0.7j) * u) == pytest.approx(1.0)


class TestGradient:
    def test_zero_for_maximally_mixed_state(self, pauli_system, rng):
        field = ControlField(horizon=1.0, values=rng.normal(size=20))
        obs = np.diag([1.0, -2.0])
        g = landscape.gradient(pauli_system, field, np.eye(2) / 2, obs)
        assert np.abs(g).max() < 1e-12

    def test_zero_for_identity_observable(self, pauli_system, rng):
        field = ControlField(horizon=1.0, values=rng.normal(size=20))
        rho0 = random_density(2, rng)
        g = landscape.gradient(pauli_system, field, rho0, np.eye(2))
        assert np.abs(g).max() < 1e-12

    def test_matches_finite_differences(self, rng):
        h0 = random_traceless_symmetric(3, rng)
        mu = random_traceless_symmetric(3, rng)
        sys3 = QuantumSystem(3, h0, mu)
        field = ControlField(horizon=1.2, values=0.5 * rng.normal(size=20))
        rho0 = random_density(3, rng)
        obs = random_traceless_symmetric(3, rng)
        analytic = landscape.gradient(sys3, field, rho0, obs)
        numeric = landscape.finite_difference_gradient(sys3, field, rho0, obs, h=1e-5)
        rel = np.abs(analytic - numeric).max() / np.abs(analytic).max()
        assert rel < 1e-5

    def test_zero_at_kinematic_critical_point(self, pauli_system, rng):
        field = ControlField(horizon=1.5, values=rng.normal(size=25))
        traj = evolve.propagate(pauli_system, field)
        u_end = traj.unitaries[-1]
        # observable built to commute with rho0 after conjugation
        obs = u_end @ np.diag([0.3, -1.1]) @ u_end.conj().T
        rho0 = np.diag([0.75, 0.25]).astype(complex)
        assert landscape.kinematic_residual(u_end, rho0, obs) < 1e-12
        g = landscape.gradient(pauli_system, field, rho0, obs)
        assert np.abs(g).max() < 1e-10


class TestKinematicResidual:
    def test_mixed_state_is_critical(self, rng):
        u = np.linalg.qr(rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3)))[0]
        obs = random_traceless_symmetric(3, rng)
        assert landscape.kinematic_residual(u, np.eye(3) / 3, obs) < 1e-12

    def test_commuting_diagonals(self):
        assert landscape.kinematic_residual(np.eye(2), np.diag([0.7, 0.3]), np.diag([1.0, 5.0])) == 0.0

    def test_projector_against_sx(self):
        resid = landscape.kinematic_residual(np.eye(2), np.diag([1.0, 0.0]), SX)
        assert resid == pytest.approx(np.sqrt(2.0), rel=1e-12)


class TestReports:
    def test_span_report_file(self, tmp_path):
        report = landscape.spanning_rank(np.array([SZ]))
        out = tmp_path / "span.txt"
        landscape.save_span_report(report, out)
        text = out.read_text()
        lines = text.splitlines()
        assert lines[0] == "singular_value"
        assert "DEFICIENT rank=1" in text
        assert "complement" in text

    def test_full_report_has_no_complement_section(self, tmp_path):
        wset = waypoints.theorem1_waypoints(np.real(SZ))
        hats = np.array([evolve.conjugated_dipole(u, SZ) for u in wset.unitaries])
        out = tmp_path / "span.txt"
        landscape.save_span_report(landscape.spanning_rank(hats), out)
        text = out.read_text()
        assert text.strip().endswith("FULL")

    def test_visits_csv(self, tmp_path):
        records = [landscape.VisitRecord(index=1, fidelity=0.5, time=1.25, step=3, visited=False)]
        out = tmp_path / "visits.csv"
        landscape.visits_csv(records, out)
        lines = out.read_text().splitlines()
        assert lines[0] == "waypoint,fidelity,time"
        assert lines[1].startswith("1,0.5,1.25")
